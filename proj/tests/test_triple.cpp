#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "qds/triple.hpp"

using namespace qds;
using oracle::Mat;
using oracle::Trunc;

TEST_CASE("spanning set sizes follow the word grammar") {
  CHECK(spanning_set(*make_point(), 1).elems.size() == 1);
  CHECK(spanning_set(*make_circle(8, 1), 3).elems.size() == 7);
  CHECK(spanning_set(*make_circle(8, 2), 2).elems.size() == 9);
  for (int m = 2; m <= 6; ++m) {
    auto t = make_qds(make_point(), m);
    CHECK(spanning_set(*t, 1).elems.size() == static_cast<std::size_t>(1 + 2 * m + m * m));
    SpanningSet fin = spanning_set(*t, 1, Family::Finite);
    CHECK(fin.elems.size() == static_cast<std::size_t>(m * m));
    CHECK_FALSE(fin.unital);
    CHECK(spanning_set(*t, 1, Family::Laurent).elems.size() == static_cast<std::size_t>(1 + 2 * m));
  }
  // 1 + 2m Laurent words plus 5 circle words per matrix unit
  CHECK(spanning_set(*make_qds(make_circle(6, 1), 3), 2).elems.size() == 52);
  auto dbl = make_doubled(make_circle(6, 1));
  CHECK(spanning_set(*dbl, 2).elems.size() == 5);
}

TEST_CASE("finite words are ordered b (x) e(i,j) with index i*m + j") {
  int m = 4;
  auto t = make_qds(make_point(), m);
  SpanningSet fin = spanning_set(*t, 1, Family::Finite);
  const Layer& L = *t->layer;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) CHECK(fin.elems[i * m + j] == qds_elem(L, identity(*L.inner), i, j));
  SpanningSet all = spanning_set(*t, 1);
  CHECK(all.names[1] == "l^1");
  CHECK(all.names[m + 1] == "l*^1");
}

TEST_CASE("budget and window errors") {
  CHECK_THROWS_AS(spanning_set(*make_circle(4, 1), 5), Error);
  try {
    spanning_set(*make_circle(4, 1), 5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowOverflow);
  }
  try {
    spanning_set(*make_point(), 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetTooSmall);
  }
}

TEST_CASE("suspension generators") {
  auto t = make_qds(make_circle(6, 1), 3);
  std::vector<std::string> want = {"1(x)u", "z^1(x)u", "z^-1(x)u", "l", "l*"};
  CHECK(t->generator_names == want);
  auto tt = make_qds(t, 3);
  CHECK(tt->generators.size() == 8);
}

TEST_CASE("spanning elements materialize to the expected tensor products") {
  Trunc tr{6, 7};
  auto t = make_qds(make_circle(6, 1), 3);
  const Layer& L = *t->layer;
  const Layer& C = *L.inner;
  SpanningSet s = spanning_set(*t, 2);
  SpanningSet cs = spanning_set(*t->inner, 2);
  int m = 3;
  int first_fin = 1 + 2 * m;
  for (std::size_t b = 0; b < cs.elems.size(); ++b)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Mat e;
        e.add(i, j, Scalar(1));
        Mat want = oracle::kron(oracle::materialize(C, cs.elems[b], tr), tr.qds, e);
        CHECK(oracle::materialize(L, s.elems[first_fin + b * m * m + i * m + j], tr).e == want.e);
      }
}

TEST_CASE("Dirac commutators of spanning elements agree with matrices") {
  Trunc tr{8, 8};
  for (auto t : {make_circle(4, 1), make_qds(make_point(), 3), make_qds(make_circle(4, 1), 3)}) {
    const Layer& L = *t->layer;
    Mat D = oracle::dirac(L, tr);
    for (const auto& x : spanning_set(*t, 1).elems) {
      Mat X = oracle::materialize(L, x, tr);
      CHECK(oracle::equal_interior(L, tr, oracle::materialize(L, commutator_D(L, x), tr), D * X - X * D, 2));
    }
  }
}

TEST_CASE("condition A holds on the circle and its suspensions") {
  for (auto t : {make_circle(6, 1), make_qds(make_circle(6, 1), 4), make_qds(make_qds(make_point(), 3), 3)}) {
    ConditionReport r = check_conditions(*t);
    CHECK(r.condition_A);
    CHECK(r.witnesses.size() == t->generators.size());
  }
  // the circle witness [D,z]F - F[D,z] is rank one: (zF - Fz) e_-1 = -2 e_0
  Trunc tr{6, 6};
  auto c = make_circle(6, 1);
  const Layer& L = *c->layer;
  Mat F = oracle::sign_matrix(L, tr), D = oracle::dirac(L, tr);
  Mat Z = oracle::materialize(L, c->generators[0], tr);
  Mat cz = D * Z - Z * D;
  Mat w = cz * F - F * cz;
  CHECK(w.e.size() == 1);
  CHECK(w.at(tr.circle, tr.circle - 1) == Scalar(-2));
}

TEST_CASE("F A meets A trivially on the circle and its Pauli double") {
  CHECK(check_conditions(*make_circle(6, 1), 2).f_intersection_trivial);
  CHECK(check_conditions(*make_doubled(make_circle(6, 1)), 2).f_intersection_trivial);
}
