#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "qds/oper.hpp"

using namespace qds;
using oracle::Mat;
using oracle::Trunc;

namespace {
Scalar S(long a, long b = 1) { return Scalar::frac(a, b); }

struct Toeplitz {
  LayerPtr L = qds_lift(point_layer(), 6);
  const Layer& I = *L->inner;
  Op one = identity(*L);
  Op l = qds_band(*L, identity(I), 1);
  Op ls = qds_band(*L, identity(I), -1);
  Op e(int p, int q) const { return qds_elem(*L, identity(I), p, q); }
};
}  // namespace

TEST_CASE("shift relations on the Toeplitz layer") {
  Toeplitz t;
  const Layer& L = *t.L;
  CHECK(op_mul(L, t.l, t.ls) == t.one);
  Op u = t.e(0, 0);
  CHECK(op_mul(L, t.ls, t.l) == sub(L, t.one, u));
  CHECK(op_mul(L, t.e(2, 3), t.e(3, 1)) == t.e(2, 1));
  CHECK(is_zero(op_mul(L, t.e(2, 3), t.e(2, 1))));
  // l e_n = e_{n-1}: l e_{p,q} = e_{p-1,q}
  CHECK(op_mul(L, t.l, t.e(2, 4)) == t.e(1, 4));
  CHECK(is_zero(op_mul(L, t.l, t.e(0, 4))));
}

TEST_CASE("commutators on the Toeplitz layer") {
  Toeplitz t;
  const Layer& L = *t.L;
  CHECK(commutator_D(L, t.e(3, 1)) == scale(L, S(2), t.e(3, 1)));
  CHECK(commutator_D(L, t.l) == scale(L, S(-1), t.l));
  CHECK(commutator_D(L, t.ls) == t.ls);
  CHECK(is_zero(commutator_D(L, t.one)));
  CHECK(is_zero(commutator_D(L, t.e(0, 0))));
  // [N, T] entries equal (p - q) T_pq on all supports up to 5x5
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 5; ++q) {
      FinMatrix T = FinMatrix::unit(p, q, S(p + 2 * q + 1, 3));
      CHECK(commutator_D(L, qds_fin(L, identity(t.I), T)) == qds_fin(L, identity(t.I), T.number_commutator()));
    }
}

TEST_CASE("compactness and calkin coordinates") {
  Toeplitz t;
  const Layer& L = *t.L;
  Op u = t.e(0, 0);
  CHECK(is_compact(L, u));
  CHECK(!is_compact(L, t.l));
  CHECK(coords(L, u, Mode::Calkin).empty());
  Op x = add(L, scale(L, S(-2), t.one), u);
  auto c = coords(L, x, Mode::Calkin);
  REQUIRE(c.size() == 1);
  CHECK(c[0].first == Key{1, 0});
  CHECK(c[0].second == S(-2));
  auto b = coords(L, t.e(1, 2), Mode::Bounded);
  REQUIRE(b.size() == 1);
  CHECK(b[0].first == Key{0, 1, 2});

  auto C = circle_layer(8);
  Op z = circle_mult(*C, LaurentPoly::monomial(1));
  Op F = sign_op(*C);
  Op dz = commutator_D(*C, z);
  Op cond = sub(*C, op_mul(*C, dz, F), op_mul(*C, F, dz));
  CHECK(is_compact(*C, cond));
  CHECK(!is_zero(cond));
  // (M_f' F - F M_f')_{m,n} = f'_{m-n}(sign n - sign m)
  for (const auto& [mn, v] : cond.ci.corr.e) {
    int m = mn.first, n = mn.second;
    CHECK(m - n == 1);
    CHECK(v == S((n >= 0 ? 1 : -1) - (m >= 0 ? 1 : -1)));
  }
}

TEST_CASE("sign operator") {
  for (auto L : {point_layer(), circle_layer(6), qds_lift(point_layer(), 4), qds_lift(circle_layer(6), 3),
                 pauli_double(circle_layer(4))}) {
    Op F = sign_op(*L);
    CHECK(mul_F(*L, identity(*L)) == F);
    CHECK(mul_F(*L, F) == identity(*L));
    CHECK(op_mul(*L, F, F) == identity(*L));
  }
  auto L = qds_lift(circle_layer(6), 3);
  Op a = circle_mult(*L->inner, LaurentPoly::monomial(1) + LaurentPoly::monomial(-2, S(3)));
  CHECK(mul_F(*L, qds_elem(*L, a, 1, 2)) == qds_elem(*L, mul_F(*L->inner, a), 1, 2));
}

TEST_CASE("doubled layer") {
  auto C = circle_layer(4);
  auto L = pauli_double(C);
  Op a = circle_mult(*C, LaurentPoly::monomial(1, S(2)));
  Op ta = doubled(*L, a, zero(*C));
  CHECK(commutator_D(*L, ta) == doubled(*L, zero(*C), commutator_D(*C, a)));
  // pi of a degree-n word carries sigma_1^n
  Op w = ta;
  for (int n = 1; n <= 4; ++n) {
    w = op_mul(*L, w, commutator_D(*L, ta));
    CHECK(is_zero(w.db.parts[n % 2 == 1 ? 0 : 1]));
  }
}

TEST_CASE("structured products agree with concrete matrices") {
  std::mt19937 g(3);
  Trunc t;
  t.circle = 12;
  t.qds = 14;
  const int margin = 6;
  std::vector<LayerPtr> layers = {point_layer(), circle_layer(8), qds_lift(point_layer(), 6),
                                  pauli_double(circle_layer(8)), qds_lift(circle_layer(8), 4)};
  for (const auto& L : layers) {
    Trunc tt = t;
    if (L->kind == LayerKind::Qds && L->inner->kind == LayerKind::Circle) {
      tt.circle = 9;
      tt.qds = 10;
    }
    Mat D = oracle::dirac(*L, tt), F = oracle::sign_matrix(*L, tt);
    for (int k = 0; k < 8; ++k) {
      Op a = oracle::random_op(*L, g), b = oracle::random_op(*L, g);
      Mat A = oracle::materialize(*L, a, tt), B = oracle::materialize(*L, b, tt);
      CHECK(oracle::equal_interior(*L, tt, oracle::materialize(*L, op_mul(*L, a, b), tt), A * B, margin));
      CHECK(oracle::equal_interior(*L, tt, oracle::materialize(*L, commutator_D(*L, a), tt), D * A - A * D, margin));
      CHECK(oracle::equal_interior(*L, tt, oracle::materialize(*L, mul_F(*L, a), tt), F * A, margin));
      CHECK(oracle::equal_interior(*L, tt, oracle::materialize(*L, adjoint(*L, a), tt), oracle::dagger(A), margin));
      // Leibniz
      CHECK(commutator_D(*L, op_mul(*L, a, b)) ==
            add(*L, op_mul(*L, commutator_D(*L, a), b), op_mul(*L, a, commutator_D(*L, b))));
      // associativity and calkin kernel
      Op c = oracle::random_op(*L, g);
      CHECK(op_mul(*L, op_mul(*L, a, b), c) == op_mul(*L, a, op_mul(*L, b, c)));
      CHECK(is_compact(*L, a) == coords(*L, a, Mode::Calkin).empty());
      CHECK(is_zero(a) == coords(*L, a, Mode::Bounded).empty());
    }
    // F commutes with D
    CHECK(oracle::equal_interior(*L, tt, D * F, F * D, 0));
  }
}

TEST_CASE("window overflow and layer errors") {
  auto L = qds_lift(point_layer(), 2);
  CHECK_THROWS_AS(qds_elem(*L, identity(*L->inner), L->work_limit + 1, 0), Error);
  auto C = circle_layer(2);
  Op z = circle_mult(*C, LaurentPoly::monomial(1));
  Op F = sign_op(*C);
  Op z5 = circle_mult(*C, LaurentPoly::monomial(5));
  CHECK_THROWS_AS(op_mul(*C, F, z5), Error);
  CHECK_THROWS_AS(op_mul(*C, z, identity(*L)), Error);
  CHECK_THROWS_AS(qds_lift(point_layer(), 1), Error);
}
