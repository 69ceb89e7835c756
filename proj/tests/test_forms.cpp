#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "qds/forms.hpp"

using namespace qds;
using oracle::Mat;
using oracle::Trunc;

namespace {

// rank of a family of keyed vectors, independent of the forms pipeline
int keyed_rank(const std::vector<KeyedVec>& vs) {
  std::map<Key, int> idx;
  for (const auto& v : vs)
    for (const auto& [k, x] : v) idx.emplace(k, 0);
  int c = 0;
  for (auto& [k, i] : idx) i = c++;
  std::vector<SparseVec> rows;
  for (const auto& v : vs) {
    SparseVec r;
    for (const auto& [k, x] : v) r.push(idx.at(k), x);
    rows.push_back(r);
  }
  return Subspace::span(c, rows).dim();
}

}  // namespace

TEST_CASE("finite matrix calculus: Omega^0 = Omega^1 = M_m, Omega^2 = 0") {
  // at cutoff 2 the truncation has no room for the junk that kills Omega^2
  for (int m = 3; m <= 5; ++m) {
    FormContext c(make_qds(make_point(), m), 1, Mode::Bounded, Family::Finite);
    CHECK(omega_d(c, 0).quotient_dim == m * m);
    CHECK(omega_d(c, 1).quotient_dim == m * m);
    CHECK(omega_d(c, 2).quotient_dim == 0);
  }
}

TEST_CASE("classical circle: Omega^1 is one copy of the functions, Omega^2 vanishes") {
  for (auto [W, p] : {std::pair{8, 2}, std::pair{8, 3}, std::pair{4, 2}}) {
    FormContext c(make_circle(W, 1), p, Mode::Bounded);
    int want = 2 * std::min(W, p) + 1;
    CHECK(omega_d(c, 0).quotient_dim == want);
    CHECK(omega_d(c, 1).quotient_dim == want);
    CHECK(omega_d(c, 2).quotient_dim == 0);
  }
}

TEST_CASE("pipeline span agrees with the brute force over all words") {
  std::vector<std::pair<TriplePtr, int>> cases = {
      {make_qds(make_point(), 3), 1}, {make_circle(4, 1), 2}, {make_qds(make_circle(4, 1), 2), 1}};
  for (auto& [t, p] : cases)
    for (Mode mode : {Mode::Bounded, Mode::Calkin}) {
      FormContext c(t, p, mode, Family::All, false);
      for (int n = 0; n <= 2; ++n) {
        OmegaSpace o = omega_d(c, n);
        CHECK(o.pi_dim == keyed_rank(pi_all_words(c, n)));
      }
    }
}

TEST_CASE("parallel and serial kernels agree exactly") {
  for (auto t : {make_qds(make_point(), 4), make_qds(make_circle(4, 1), 2)}) {
    FormContext s(t, 1, Mode::Bounded, Family::All, false), p(t, 1, Mode::Bounded, Family::All, true);
    for (int n = 0; n <= 2; ++n) {
      OmegaSpace a = omega_d(s, n), b = omega_d(p, n);
      CHECK(a.quotient_dim == b.quotient_dim);
      CHECK(a.cols.keys == b.cols.keys);
      CHECK(a.section.rows() == b.section.rows());
      CHECK(a.section.payloads() == b.section.payloads());
      CHECK(a.junk.rows() == b.junk.rows());
    }
  }
}

TEST_CASE("pi of words matches concrete matrices") {
  Trunc tr{8, 9};
  auto t = make_qds(make_circle(4, 1), 3);
  FormContext c(t, 1, Mode::Bounded);
  const Layer& L = c.layer();
  Mat D = oracle::dirac(L, tr);
  auto M = [&](int i) { return oracle::materialize(L, c.element(i), tr); };
  auto comm = [&](int i) { return D * M(i) - M(i) * D; };
  std::vector<Word> words = {{0, 1}, {4, 1}, {2, 5, 9}, {8, 12, 20}, {1, 4, 30, 7}};
  for (const auto& w : words) {
    Mat want = M(w[0]);
    for (std::size_t k = 1; k < w.size(); ++k) want = want * comm(w[k]);
    CHECK(oracle::equal_interior(L, tr, oracle::materialize(L, c.pi_word(w), tr), want, 4));
  }
}

TEST_CASE("Toeplitz forms: l* dl + l dl* equals u, which dies modulo compacts") {
  int m = 4;
  auto t = make_qds(make_point(), m);
  FormContext b(t, 1, Mode::Bounded), k(t, 1, Mode::Calkin);
  int l = 1, ls = m + 1;
  FormExpr w(1);
  w.add(Word{ls, l}, Scalar(1));
  w.add(Word{l, ls}, Scalar(1));
  const Layer& L = b.layer();
  CHECK(b.pi_op(w) == qds_elem(L, identity(*L.inner), 0, 0));
  CHECK_FALSE(b.pi_eval(w).empty());
  CHECK(k.pi_eval(w).empty());
  // l dl* alone is the identity
  CHECK(b.pi_op(FormExpr::word(Word{l, ls})) == identity(L));
}

TEST_CASE("universal differential squares to zero and obeys the graded Leibniz rule") {
  FormContext c(make_qds(make_point(), 3), 1, Mode::Bounded);
  // matrix units e(i,j) sit at index 7 + 3i + j and stay closed under products
  auto e = [](int i, int j) { return 7 + 3 * i + j; };
  FormExpr x = FormExpr::word(Word{e(0, 1), e(1, 2)}, Scalar::frac(2, 3));
  x.add(Word{e(0, 2), e(2, 0)}, Scalar(-1));
  FormExpr y = FormExpr::word(Word{e(2, 1), e(1, 0)});
  CHECK(universal_d(c, universal_d(c, x)).is_zero());
  FormExpr lhs = universal_d(c, universal_product(c, x, y));
  FormExpr rhs = universal_product(c, universal_d(c, x), y);
  rhs.add(universal_product(c, x, universal_d(c, y)), Scalar(-1));
  CHECK(c.pi_eval(lhs) == c.pi_eval(rhs));
}

TEST_CASE("induced differential composes to zero") {
  FormContext c(make_circle(6, 1), 3, Mode::Bounded);
  OmegaSpace o0 = omega_d(c, 0), o1 = omega_d(c, 1), o2 = omega_d(c, 2);
  auto d0 = induced_differential(c, o0, o1);
  auto d1 = induced_differential(c, o1, o2);
  CHECK(d0.matrix.rows() == o0.quotient_dim);
  CHECK(d0.matrix.cols() == o1.quotient_dim);
  CHECK(rank(d0.matrix) == o0.quotient_dim - 1);  // only constants are closed
  CHECK(d1.matrix.cols() == 0);
}

TEST_CASE("class_of rejects vectors outside the computed window") {
  FormContext c(make_qds(make_point(), 3), 1, Mode::Bounded);
  OmegaSpace o = omega_d(c, 1);
  KeyedVec bogus = {{Key{0, 40, 41}, Scalar(1)}};
  CHECK_THROWS_AS(o.class_of(bogus), Error);
  // a section vector is its own class: the i-th unit coordinate
  for (int i = 0; i < o.quotient_dim; ++i) {
    auto cls = o.class_of(o.section_vector(i));
    for (int j = 0; j < o.quotient_dim; ++j) CHECK(cls[j] == Scalar(i == j ? 1 : 0));
  }
}

TEST_CASE("stabilization under growing budgets") {
  StabilizeResult r = stabilize(make_circle(8, 1), 1, Mode::Bounded, 3);
  CHECK(r.dims == std::vector<int>{3, 5, 7});
  CHECK(r.dims == r.oracle);
  CHECK(r.stable);
  // at budget 1 the degree-2 junk is under-resolved; from budget 2 on it matches the oracle
  StabilizeResult q = stabilize(make_circle(8, 1), 2, Mode::Bounded, 3);
  CHECK(q.dims == std::vector<int>{2, 0, 0});
  CHECK(q.stable);
  StabilizeResult s = stabilize(make_qds(make_point(), 3), 1, Mode::Bounded, 2);
  CHECK(s.dims.size() == 2);
  CHECK(s.stable);
}
