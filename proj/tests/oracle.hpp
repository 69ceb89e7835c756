#pragma once
// Concrete truncated matrices used as an independent oracle for the structured operators.
#include <map>
#include <random>

#include "qds/oper.hpp"

namespace oracle {

using qds::Layer;
using qds::LayerKind;
using qds::Op;
using qds::Scalar;

struct Mat {
  std::map<std::pair<int, int>, Scalar> e;
  void add(int i, int j, const Scalar& v) {
    if (v.is_zero()) return;
    auto [it, fresh] = e.try_emplace({i, j}, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero()) e.erase(it);
    }
  }
  Scalar at(int i, int j) const {
    auto it = e.find({i, j});
    return it == e.end() ? Scalar() : it->second;
  }
};

inline Mat operator*(const Mat& a, const Mat& b) {
  std::map<int, std::vector<std::pair<int, Scalar>>> rows;
  for (const auto& [ij, v] : b.e) rows[ij.first].emplace_back(ij.second, v);
  Mat r;
  for (const auto& [ij, v] : a.e) {
    auto it = rows.find(ij.second);
    if (it == rows.end()) continue;
    for (const auto& [j, w] : it->second) r.add(ij.first, j, v * w);
  }
  return r;
}
inline Mat operator+(const Mat& a, const Mat& b) {
  Mat r = a;
  for (const auto& [ij, v] : b.e) r.add(ij.first, ij.second, v);
  return r;
}
inline Mat operator-(const Mat& a, const Mat& b) {
  Mat r = a;
  for (const auto& [ij, v] : b.e) r.add(ij.first, ij.second, -v);
  return r;
}
inline Mat dagger(const Mat& a) {
  Mat r;
  for (const auto& [ij, v] : a.e) r.add(ij.second, ij.first, v.conj());
  return r;
}

// truncation size per layer: circle uses indices [-R, R], QDS uses [0, R)
struct Trunc {
  int circle = 12;
  int qds = 14;
};

inline int dim(const Layer& L, const Trunc& t) {
  switch (L.kind) {
    case LayerKind::Point: return 1;
    case LayerKind::Circle: return 2 * t.circle + 1;
    case LayerKind::Qds: return dim(*L.inner, t) * t.qds;
    case LayerKind::Doubled: return 2 * dim(*L.inner, t);
  }
  return 0;
}

inline Mat kron(const Mat& a, int bdim, const Mat& b) {
  Mat r;
  for (const auto& [ij, v] : a.e)
    for (const auto& [kl, w] : b.e) r.add(ij.first * bdim + kl.first, ij.second * bdim + kl.second, v * w);
  return r;
}

inline Mat eye(int n) {
  Mat r;
  for (int i = 0; i < n; ++i) r.add(i, i, Scalar(1));
  return r;
}

inline Mat materialize(const Layer& L, const Op& x, const Trunc& t) {
  Mat r;
  switch (L.kind) {
    case LayerKind::Point: r.add(0, 0, x.pt.s); break;
    case LayerKind::Circle: {
      int R = t.circle;
      for (int m = -R; m <= R; ++m)
        for (int n = -R; n <= R; ++n) {
          const auto& f = n >= 0 ? x.ci.plus : x.ci.minus;
          Scalar v = f.at(m - n);
          auto it = x.ci.corr.e.find({m, n});
          if (it != x.ci.corr.e.end()) v += it->second;
          r.add(m + R, n + R, v);
        }
      break;
    }
    case LayerKind::Qds: {
      int M = t.qds;
      for (std::size_t s = 0; s < x.qd.fin_keys.size(); ++s) {
        auto [p, q] = x.qd.fin_keys[s];
        if (p >= M || q >= M) continue;
        Mat e;
        e.add(p, q, Scalar(1));
        r = r + kron(materialize(*L.inner, x.qd.fin_vals[s], t), M, e);
      }
      for (std::size_t s = 0; s < x.qd.band_keys.size(); ++s) {
        int k = x.qd.band_keys[s];
        Mat T;
        for (int i = 0; i < M; ++i)
          if (i + k >= 0 && i + k < M) T.add(i, i + k, Scalar(1));
        r = r + kron(materialize(*L.inner, x.qd.band_vals[s], t), M, T);
      }
      break;
    }
    case LayerKind::Doubled: {
      Mat s1;
      s1.add(0, 1, Scalar(1));
      s1.add(1, 0, Scalar(1));
      r = kron(materialize(*L.inner, x.db.parts[0], t), 2, eye(2)) +
          kron(materialize(*L.inner, x.db.parts[1], t), 2, s1);
      break;
    }
  }
  return r;
}

inline Mat sign_matrix(const Layer& L, const Trunc& t);

inline Mat dirac(const Layer& L, const Trunc& t) {
  Mat r;
  switch (L.kind) {
    case LayerKind::Point: break;
    case LayerKind::Circle:
      for (int m = -t.circle; m <= t.circle; ++m) r.add(m + t.circle, m + t.circle, Scalar(m));
      break;
    case LayerKind::Qds: {
      Mat N;
      for (int i = 0; i < t.qds; ++i) N.add(i, i, Scalar(i));
      r = kron(dirac(*L.inner, t), t.qds, eye(t.qds)) + kron(sign_matrix(*L.inner, t), t.qds, N);
      break;
    }
    case LayerKind::Doubled: {
      Mat s1;
      s1.add(0, 1, Scalar(1));
      s1.add(1, 0, Scalar(1));
      r = kron(dirac(*L.inner, t), 2, s1);
      break;
    }
  }
  return r;
}

inline Mat sign_matrix(const Layer& L, const Trunc& t) {
  Mat r;
  switch (L.kind) {
    case LayerKind::Point: r.add(0, 0, Scalar(1)); break;
    case LayerKind::Circle:
      for (int m = -t.circle; m <= t.circle; ++m) r.add(m + t.circle, m + t.circle, Scalar(m >= 0 ? 1 : -1));
      break;
    case LayerKind::Qds: r = kron(sign_matrix(*L.inner, t), t.qds, eye(t.qds)); break;
    case LayerKind::Doubled: {
      Mat s1;
      s1.add(0, 1, Scalar(1));
      s1.add(1, 0, Scalar(1));
      r = kron(sign_matrix(*L.inner, t), 2, s1);
      break;
    }
  }
  return r;
}

// basis indices far enough from the truncation edge that products are exact there
inline bool interior(const Layer& L, const Trunc& t, int idx, int margin) {
  switch (L.kind) {
    case LayerKind::Point: return true;
    case LayerKind::Circle: return std::abs(idx - t.circle) <= t.circle - margin;
    case LayerKind::Qds: {
      int n = idx % t.qds;
      return n < t.qds - margin && interior(*L.inner, t, idx / t.qds, margin);
    }
    case LayerKind::Doubled: return interior(*L.inner, t, idx / 2, margin);
  }
  return true;
}

inline bool equal_interior(const Layer& L, const Trunc& t, const Mat& a, const Mat& b, int margin) {
  Mat d = a - b;
  for (const auto& [ij, v] : d.e)
    if (interior(L, t, ij.first, margin) && interior(L, t, ij.second, margin)) return false;
  return true;
}

// random operators of small support
inline Scalar rand_scalar(std::mt19937& g) {
  std::uniform_int_distribution<int> d(-3, 3), den(1, 3);
  return Scalar(qds::Rational(d(g), den(g)), qds::Rational(g() % 3 == 0 ? d(g) : 0, den(g))) ;
}

inline Op random_op(const Layer& L, std::mt19937& g, int deg = 2) {
  using namespace qds;
  std::uniform_int_distribution<int> dk(-deg, deg);
  switch (L.kind) {
    case LayerKind::Point: return scalar_op(L, rand_scalar(g));
    case LayerKind::Circle: {
      LaurentPoly p, m;
      for (int i = 0; i < 2; ++i) {
        p = p + LaurentPoly::monomial(dk(g), rand_scalar(g));
        m = m + LaurentPoly::monomial(dk(g), rand_scalar(g));
      }
      FinMatrix c;
      c.add(dk(g), dk(g), rand_scalar(g));
      return circle_from(L, p, m, c);
    }
    case LayerKind::Qds: {
      std::uniform_int_distribution<int> dp(0, deg + 1);
      Op o = zero(L);
      for (int i = 0; i < 2; ++i) {
        o = add(L, o, qds_elem(L, random_op(*L.inner, g, 1), dp(g), dp(g)));
        o = add(L, o, qds_band(L, scale(*L.inner, rand_scalar(g), identity(*L.inner)), dk(g)));
      }
      return o;
    }
    case LayerKind::Doubled: return doubled(L, random_op(*L.inner, g, deg), random_op(*L.inner, g, deg));
  }
  return zero(L);
}

}  // namespace oracle
