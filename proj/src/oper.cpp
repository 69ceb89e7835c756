#include "qds/oper.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace qds {

const char* mode_name(Mode m) { return m == Mode::Bounded ? "bounded" : "calkin"; }

Mode parse_mode(const std::string& s) {
  if (s == "bounded") return Mode::Bounded;
  if (s == "calkin") return Mode::Calkin;
  throw Error(ErrorCode::ConfigInvalid, "mode must be bounded or calkin, got " + s);
}

// ---------- LaurentPoly ----------

LaurentPoly LaurentPoly::monomial(int k, Scalar v) {
  LaurentPoly p;
  if (!v.is_zero()) p.c.emplace_back(k, std::move(v));
  return p;
}

Scalar LaurentPoly::at(int k) const {
  for (const auto& [d, v] : c)
    if (d == k) return v;
  return Scalar();
}

int LaurentPoly::max_abs_degree() const {
  int m = 0;
  for (const auto& [d, v] : c) m = std::max(m, std::abs(d));
  return m;
}

LaurentPoly LaurentPoly::derivative() const {
  LaurentPoly p;
  for (const auto& [d, v] : c)
    if (d != 0) p.c.emplace_back(d, Scalar(d) * v);
  return p;
}

LaurentPoly LaurentPoly::tilde() const {
  LaurentPoly p;
  for (auto it = c.rbegin(); it != c.rend(); ++it) p.c.emplace_back(-it->first, it->second.conj());
  return p;
}

static LaurentPoly combine(const LaurentPoly& a, const LaurentPoly& b, const Scalar& sb) {
  LaurentPoly r;
  auto i = a.c.begin();
  auto j = b.c.begin();
  while (i != a.c.end() || j != b.c.end()) {
    if (j == b.c.end() || (i != a.c.end() && i->first < j->first)) {
      r.c.push_back(*i++);
    } else if (i == a.c.end() || j->first < i->first) {
      r.c.emplace_back(j->first, sb * j->second);
      ++j;
    } else {
      Scalar v = i->second + sb * j->second;
      if (!v.is_zero()) r.c.emplace_back(i->first, std::move(v));
      ++i;
      ++j;
    }
  }
  return r;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) { return combine(a, b, Scalar(1)); }
LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return combine(a, b, Scalar(-1)); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  std::map<int, Scalar> acc;
  for (const auto& [i, x] : a.c)
    for (const auto& [j, y] : b.c) acc[i + j] += x * y;
  LaurentPoly r;
  for (auto& [k, v] : acc)
    if (!v.is_zero()) r.c.emplace_back(k, std::move(v));
  return r;
}

LaurentPoly operator*(const Scalar& s, const LaurentPoly& a) {
  LaurentPoly r;
  if (s.is_zero()) return r;
  for (const auto& [k, v] : a.c) r.c.emplace_back(k, s * v);
  return r;
}

// ---------- FinMatrix ----------

FinMatrix FinMatrix::unit(int p, int q, Scalar v) {
  FinMatrix m;
  m.add(p, q, v);
  return m;
}

int FinMatrix::order() const {
  int m = 0;
  for (const auto& [pq, v] : e) m = std::max({m, pq.first + 1, pq.second + 1});
  return m;
}

void FinMatrix::add(int p, int q, const Scalar& v) {
  if (v.is_zero()) return;
  auto [it, fresh] = e.try_emplace({p, q}, v);
  if (!fresh) {
    it->second += v;
    if (it->second.is_zero()) e.erase(it);
  }
}

FinMatrix FinMatrix::number_commutator() const {
  FinMatrix r;
  for (const auto& [pq, v] : e) r.add(pq.first, pq.second, Scalar(pq.first - pq.second) * v);
  return r;
}

FinMatrix operator*(const FinMatrix& a, const FinMatrix& b) {
  FinMatrix r;
  for (const auto& [pq, x] : a.e) {
    auto it = b.e.lower_bound({pq.second, std::numeric_limits<int>::min()});
    for (; it != b.e.end() && it->first.first == pq.second; ++it)
      r.add(pq.first, it->first.second, x * it->second);
  }
  return r;
}

FinMatrix operator+(const FinMatrix& a, const FinMatrix& b) {
  FinMatrix r = a;
  for (const auto& [pq, v] : b.e) r.add(pq.first, pq.second, v);
  return r;
}

// ---------- layers ----------

std::string Layer::describe() const {
  switch (kind) {
    case LayerKind::Point: return "point";
    case LayerKind::Circle:
      return "circle(" + std::to_string(window) + "," + std::to_string(gen_degree) + ")";
    case LayerKind::Qds: return "qds(" + inner->describe() + "," + std::to_string(cutoff) + ")";
    case LayerKind::Doubled: return "doubled(" + inner->describe() + ")";
  }
  return "?";
}

LayerPtr point_layer() {
  static LayerPtr p = std::make_shared<Layer>();
  return p;
}

LayerPtr circle_layer(int window, int gen_degree) {
  if (window < 1 || gen_degree < 1) throw Error(ErrorCode::ConfigInvalid, "circle parameters must be positive");
  auto l = std::make_shared<Layer>();
  l->kind = LayerKind::Circle;
  l->window = window;
  l->gen_degree = gen_degree;
  return l;
}

LayerPtr qds_lift(const LayerPtr& inner, int cutoff) {
  if (cutoff < 2) throw Error(ErrorCode::CutoffTooSmall, "cutoff must be at least 2, got " + std::to_string(cutoff));
  auto l = std::make_shared<Layer>();
  l->kind = LayerKind::Qds;
  l->cutoff = cutoff;
  l->work_limit = 6 * cutoff + 8;
  l->inner = inner;
  return l;
}

LayerPtr pauli_double(const LayerPtr& inner) {
  auto l = std::make_shared<Layer>();
  l->kind = LayerKind::Doubled;
  l->inner = inner;
  return l;
}

bool same_layer(const Layer& a, const Layer& b) {
  if (a.kind != b.kind || a.window != b.window || a.gen_degree != b.gen_degree || a.cutoff != b.cutoff)
    return false;
  if (!a.inner || !b.inner) return !a.inner && !b.inner;
  return same_layer(*a.inner, *b.inner);
}

bool finite_dimensional(const Layer& l) {
  if (l.kind == LayerKind::Point) return true;
  if (l.kind == LayerKind::Doubled) return finite_dimensional(*l.inner);
  return false;
}

void check_layer(const Layer& L, const Op& a) {
  if (a.kind != L.kind)
    throw Error(ErrorCode::LayerMismatch, "operator does not belong to layer " + L.describe());
}

// ---------- equality ----------

bool operator==(const Op& a, const Op& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case LayerKind::Point: return a.pt.s == b.pt.s;
    case LayerKind::Circle: return a.ci.plus == b.ci.plus && a.ci.minus == b.ci.minus && a.ci.corr == b.ci.corr;
    case LayerKind::Qds:
      return a.qd.fin_keys == b.qd.fin_keys && a.qd.fin_vals == b.qd.fin_vals &&
             a.qd.band_keys == b.qd.band_keys && a.qd.band_vals == b.qd.band_vals;
    case LayerKind::Doubled: return a.db.parts == b.db.parts;
  }
  return false;
}

// ---------- constructors ----------

Op zero(const Layer& L) {
  Op o;
  o.kind = L.kind;
  if (L.kind == LayerKind::Doubled) o.db.parts = {zero(*L.inner), zero(*L.inner)};
  return o;
}

Op identity(const Layer& L) { return scalar_op(L, Scalar(1)); }

Op scalar_op(const Layer& L, const Scalar& s) {
  Op o = zero(L);
  if (s.is_zero()) return o;
  switch (L.kind) {
    case LayerKind::Point: o.pt.s = s; break;
    case LayerKind::Circle:
      o.ci.plus = LaurentPoly::constant(s);
      o.ci.minus = LaurentPoly::constant(s);
      break;
    case LayerKind::Qds:
      o.qd.band_keys = {0};
      o.qd.band_vals = {scalar_op(*L.inner, s)};
      break;
    case LayerKind::Doubled: o.db.parts[0] = scalar_op(*L.inner, s); break;
  }
  return o;
}

Op sign_op(const Layer& L) {
  Op o = zero(L);
  switch (L.kind) {
    case LayerKind::Point: o.pt.s = Scalar(1); break;
    case LayerKind::Circle:
      o.ci.plus = LaurentPoly::constant(1);
      o.ci.minus = LaurentPoly::constant(-1);
      break;
    case LayerKind::Qds:
      o.qd.band_keys = {0};
      o.qd.band_vals = {sign_op(*L.inner)};
      break;
    case LayerKind::Doubled: o.db.parts[1] = sign_op(*L.inner); break;
  }
  return o;
}

static void check_corr_window(const Layer& L, const FinMatrix& c) {
  for (const auto& [mn, v] : c.e)
    if (std::abs(mn.first) > L.window || std::abs(mn.second) > L.window)
      throw Error(ErrorCode::WindowOverflow, "circle correction at (" + std::to_string(mn.first) + "," +
                                                 std::to_string(mn.second) + ") outside Fourier window " +
                                                 std::to_string(L.window) + "; raise --fourier-window");
}

Op circle_from(const Layer& L, LaurentPoly plus, LaurentPoly minus, FinMatrix corr) {
  if (L.kind != LayerKind::Circle) throw Error(ErrorCode::LayerMismatch, "not a circle layer");
  check_corr_window(L, corr);
  Op o = zero(L);
  o.ci.plus = std::move(plus);
  o.ci.minus = std::move(minus);
  o.ci.corr = std::move(corr);
  return o;
}

Op circle_mult(const Layer& L, const LaurentPoly& f) { return circle_from(L, f, f, {}); }

static void check_qds_index(const Layer& L, int a, int b = 0) {
  if (std::abs(a) > L.work_limit || std::abs(b) > L.work_limit)
    throw Error(ErrorCode::WindowOverflow, "QDS index beyond work limit " + std::to_string(L.work_limit) +
                                               "; raise --cutoff or lower the degree");
}

Op qds_elem(const Layer& L, const Op& b, int p, int q) {
  if (L.kind != LayerKind::Qds) throw Error(ErrorCode::LayerMismatch, "not a QDS layer");
  check_layer(*L.inner, b);
  if (p < 0 || q < 0) throw std::invalid_argument("negative matrix index");
  check_qds_index(L, p, q);
  Op o = zero(L);
  if (is_zero(b)) return o;
  o.qd.fin_keys = {{p, q}};
  o.qd.fin_vals = {b};
  return o;
}

Op qds_band(const Layer& L, const Op& c, int k) {
  if (L.kind != LayerKind::Qds) throw Error(ErrorCode::LayerMismatch, "not a QDS layer");
  check_layer(*L.inner, c);
  check_qds_index(L, k);
  Op o = zero(L);
  if (is_zero(c)) return o;
  o.qd.band_keys = {k};
  o.qd.band_vals = {c};
  return o;
}

Op qds_fin(const Layer& L, const Op& b, const FinMatrix& T) {
  Op o = zero(L);
  for (const auto& [pq, v] : T.e) o = add(L, o, qds_elem(L, scale(*L.inner, v, b), pq.first, pq.second));
  return o;
}

Op qds_laurent(const Layer& L, const Op& c, const LaurentPoly& f) {
  Op o = zero(L);
  for (const auto& [k, v] : f.c) o = add(L, o, qds_band(L, scale(*L.inner, v, c), k));
  return o;
}

Op doubled(const Layer& L, const Op& x, const Op& y) {
  if (L.kind != LayerKind::Doubled) throw Error(ErrorCode::LayerMismatch, "not a doubled layer");
  check_layer(*L.inner, x);
  check_layer(*L.inner, y);
  Op o;
  o.kind = LayerKind::Doubled;
  o.db.parts = {x, y};
  return o;
}

// ---------- linear structure ----------

bool is_zero(const Op& x) {
  switch (x.kind) {
    case LayerKind::Point: return x.pt.s.is_zero();
    case LayerKind::Circle: return x.ci.plus.is_zero() && x.ci.minus.is_zero() && x.ci.corr.e.empty();
    case LayerKind::Qds: return x.qd.fin_keys.empty() && x.qd.band_keys.empty();
    case LayerKind::Doubled: return is_zero(x.db.parts[0]) && is_zero(x.db.parts[1]);
  }
  return true;
}

namespace {

template <class K>
void merge_parts(const Layer& inner, const std::vector<K>& ka, const std::vector<Op>& va,
                 const std::vector<K>& kb, const std::vector<Op>& vb, const Scalar& sb,
                 std::vector<K>& ko, std::vector<Op>& vo) {
  std::size_t i = 0, j = 0;
  while (i < ka.size() || j < kb.size()) {
    if (j == kb.size() || (i < ka.size() && ka[i] < kb[j])) {
      ko.push_back(ka[i]);
      vo.push_back(va[i]);
      ++i;
    } else if (i == ka.size() || kb[j] < ka[i]) {
      ko.push_back(kb[j]);
      vo.push_back(scale(inner, sb, vb[j]));
      ++j;
    } else {
      Op s = add(inner, va[i], scale(inner, sb, vb[j]));
      if (!is_zero(s)) {
        ko.push_back(ka[i]);
        vo.push_back(std::move(s));
      }
      ++i;
      ++j;
    }
  }
}

Op lincomb(const Layer& L, const Op& a, const Op& b, const Scalar& sb) {
  check_layer(L, a);
  check_layer(L, b);
  Op o = zero(L);
  switch (L.kind) {
    case LayerKind::Point: o.pt.s = a.pt.s + sb * b.pt.s; break;
    case LayerKind::Circle:
      o.ci.plus = a.ci.plus + sb * b.ci.plus;
      o.ci.minus = a.ci.minus + sb * b.ci.minus;
      o.ci.corr = a.ci.corr;
      for (const auto& [mn, v] : b.ci.corr.e) o.ci.corr.add(mn.first, mn.second, sb * v);
      break;
    case LayerKind::Qds:
      merge_parts(*L.inner, a.qd.fin_keys, a.qd.fin_vals, b.qd.fin_keys, b.qd.fin_vals, sb, o.qd.fin_keys,
                  o.qd.fin_vals);
      merge_parts(*L.inner, a.qd.band_keys, a.qd.band_vals, b.qd.band_keys, b.qd.band_vals, sb,
                  o.qd.band_keys, o.qd.band_vals);
      break;
    case LayerKind::Doubled:
      o.db.parts[0] = lincomb(*L.inner, a.db.parts[0], b.db.parts[0], sb);
      o.db.parts[1] = lincomb(*L.inner, a.db.parts[1], b.db.parts[1], sb);
      break;
  }
  return o;
}

// accumulators for QDS products
struct QdsAcc {
  const Layer& L;
  std::map<std::pair<int, int>, Op> fin;
  std::map<int, Op> band;

  void add_fin(int p, int q, Op v) {
    if (is_zero(v)) return;
    check_qds_index(L, p, q);
    auto [it, fresh] = fin.try_emplace({p, q}, v);
    if (!fresh) it->second = add(*L.inner, it->second, v);
  }
  void add_band(int k, Op v) {
    if (is_zero(v)) return;
    check_qds_index(L, k);
    auto [it, fresh] = band.try_emplace(k, v);
    if (!fresh) it->second = add(*L.inner, it->second, v);
  }
  Op build() {
    Op o = zero(L);
    for (auto& [k, v] : fin)
      if (!is_zero(v)) {
        o.qd.fin_keys.push_back(k);
        o.qd.fin_vals.push_back(std::move(v));
      }
    for (auto& [k, v] : band)
      if (!is_zero(v)) {
        o.qd.band_keys.push_back(k);
        o.qd.band_vals.push_back(std::move(v));
      }
    return o;
  }
};

Op circle_mul(const Layer& L, const Op& X, const Op& Y) {
  const auto& a = X.ci;
  const auto& b = Y.ci;
  auto sym = [](const CircleOp& c, bool plus) -> const LaurentPoly& { return plus ? c.plus : c.minus; };
  FinMatrix corr;
  // semicommutator S(a)S(b) - S(ab) lives on sign-crossing index pairs
  if (!(a.plus == a.minus)) {
    LaurentPoly dpm = a.plus - a.minus;
    LaurentPoly dmp = a.minus - a.plus;
    for (const auto& [j, c] : b.minus.c) {
      if (j <= 0) continue;
      for (int n = -j; n <= -1; ++n) {
        int k = n + j;
        for (const auto& [i, d] : dpm.c) corr.add(k + i, n, d * c);
      }
    }
    for (const auto& [j, c] : b.plus.c) {
      if (j >= 0) continue;
      for (int n = 0; n <= -j - 1; ++n) {
        int k = n + j;
        for (const auto& [i, d] : dmp.c) corr.add(k + i, n, d * c);
      }
    }
  }
  for (const auto& [kn, c] : b.corr.e)
    for (const auto& [i, d] : sym(a, kn.first >= 0).c) corr.add(kn.first + i, kn.second, d * c);
  for (const auto& [mk, c] : a.corr.e) {
    for (bool pl : {true, false})
      for (const auto& [j, d] : sym(b, pl).c) {
        int n = mk.second - j;
        if ((n >= 0) == pl) corr.add(mk.first, n, c * d);
      }
  }
  if (!a.corr.e.empty() && !b.corr.e.empty()) corr = corr + a.corr * b.corr;
  return circle_from(L, a.plus * b.plus, a.minus * b.minus, std::move(corr));
}

Op qds_mul(const Layer& L, const Op& X, const Op& Y) {
  const Layer& I = *L.inner;
  QdsAcc acc{L, {}, {}};
  const auto& x = X.qd;
  const auto& y = Y.qd;
  // fin x fin, indexed by row of y
  std::map<int, std::vector<std::size_t>> yrows;
  for (std::size_t t = 0; t < y.fin_keys.size(); ++t) yrows[y.fin_keys[t].first].push_back(t);
  for (std::size_t s = 0; s < x.fin_keys.size(); ++s) {
    auto [p, q] = x.fin_keys[s];
    auto it = yrows.find(q);
    if (it != yrows.end())
      for (std::size_t t : it->second) acc.add_fin(p, y.fin_keys[t].second, op_mul(I, x.fin_vals[s], y.fin_vals[t]));
    for (std::size_t t = 0; t < y.band_keys.size(); ++t) {
      int k = y.band_keys[t];
      if (q + k >= 0) acc.add_fin(p, q + k, op_mul(I, x.fin_vals[s], y.band_vals[t]));
    }
  }
  for (std::size_t s = 0; s < x.band_keys.size(); ++s) {
    int k = x.band_keys[s];
    for (std::size_t t = 0; t < y.fin_keys.size(); ++t) {
      auto [p, q] = y.fin_keys[t];
      if (p - k >= 0) acc.add_fin(p - k, q, op_mul(I, x.band_vals[s], y.fin_vals[t]));
    }
    for (std::size_t t = 0; t < y.band_keys.size(); ++t) {
      int b = y.band_keys[t];
      Op cd = op_mul(I, x.band_vals[s], y.band_vals[t]);
      if (is_zero(cd)) continue;
      acc.add_band(k + b, cd);
      if (k < 0) {
        Op neg = scale(I, Scalar(-1), cd);
        for (int i = 0; i <= -k - 1; ++i) {
          int j = i + k + b;
          if (j >= 0) acc.add_fin(i, j, neg);
        }
      }
    }
  }
  return acc.build();
}

}  // namespace

Op add(const Layer& L, const Op& a, const Op& b) { return lincomb(L, a, b, Scalar(1)); }
Op sub(const Layer& L, const Op& a, const Op& b) { return lincomb(L, a, b, Scalar(-1)); }

Op scale(const Layer& L, const Scalar& s, const Op& a) {
  check_layer(L, a);
  if (s.is_zero()) return zero(L);
  if (s.is_one()) return a;
  Op o = zero(L);
  switch (L.kind) {
    case LayerKind::Point: o.pt.s = s * a.pt.s; break;
    case LayerKind::Circle:
      o.ci.plus = s * a.ci.plus;
      o.ci.minus = s * a.ci.minus;
      for (const auto& [mn, v] : a.ci.corr.e) o.ci.corr.e.emplace(mn, s * v);
      break;
    case LayerKind::Qds:
      o.qd.fin_keys = a.qd.fin_keys;
      o.qd.band_keys = a.qd.band_keys;
      for (const auto& v : a.qd.fin_vals) o.qd.fin_vals.push_back(scale(*L.inner, s, v));
      for (const auto& v : a.qd.band_vals) o.qd.band_vals.push_back(scale(*L.inner, s, v));
      break;
    case LayerKind::Doubled:
      o.db.parts = {scale(*L.inner, s, a.db.parts[0]), scale(*L.inner, s, a.db.parts[1])};
      break;
  }
  return o;
}

Op op_mul(const Layer& L, const Op& a, const Op& b) {
  check_layer(L, a);
  check_layer(L, b);
  if (is_zero(a) || is_zero(b)) return zero(L);
  switch (L.kind) {
    case LayerKind::Point: {
      Op o = zero(L);
      o.pt.s = a.pt.s * b.pt.s;
      return o;
    }
    case LayerKind::Circle: return circle_mul(L, a, b);
    case LayerKind::Qds: return qds_mul(L, a, b);
    case LayerKind::Doubled: {
      const Layer& I = *L.inner;
      const auto& x = a.db.parts;
      const auto& y = b.db.parts;
      return doubled(L, add(I, op_mul(I, x[0], y[0]), op_mul(I, x[1], y[1])),
                     add(I, op_mul(I, x[0], y[1]), op_mul(I, x[1], y[0])));
    }
  }
  return zero(L);
}

Op adjoint(const Layer& L, const Op& a) {
  check_layer(L, a);
  Op o = zero(L);
  switch (L.kind) {
    case LayerKind::Point: o.pt.s = a.pt.s.conj(); break;
    case LayerKind::Circle: {
      FinMatrix corr;
      for (const auto& [mn, v] : a.ci.corr.e) corr.add(mn.second, mn.first, v.conj());
      std::vector<int> degs;
      for (const auto& [k, v] : a.ci.plus.c) degs.push_back(k);
      for (const auto& [k, v] : a.ci.minus.c) degs.push_back(k);
      std::sort(degs.begin(), degs.end());
      degs.erase(std::unique(degs.begin(), degs.end()), degs.end());
      for (int i : degs) {
        Scalar fp = a.ci.plus.at(i).conj(), fm = a.ci.minus.at(i).conj();
        if (i > 0)
          for (int m = -i; m <= -1; ++m) corr.add(m, m + i, fm - fp);
        if (i < 0)
          for (int m = 0; m <= -i - 1; ++m) corr.add(m, m + i, fp - fm);
      }
      return circle_from(L, a.ci.plus.tilde(), a.ci.minus.tilde(), std::move(corr));
    }
    case LayerKind::Qds: {
      QdsAcc acc{L, {}, {}};
      for (std::size_t s = 0; s < a.qd.fin_keys.size(); ++s)
        acc.add_fin(a.qd.fin_keys[s].second, a.qd.fin_keys[s].first, adjoint(*L.inner, a.qd.fin_vals[s]));
      for (std::size_t s = 0; s < a.qd.band_keys.size(); ++s)
        acc.add_band(-a.qd.band_keys[s], adjoint(*L.inner, a.qd.band_vals[s]));
      return acc.build();
    }
    case LayerKind::Doubled:
      o.db.parts = {adjoint(*L.inner, a.db.parts[0]), adjoint(*L.inner, a.db.parts[1])};
      break;
  }
  return o;
}

Op commutator_D(const Layer& L, const Op& a) {
  check_layer(L, a);
  switch (L.kind) {
    case LayerKind::Point: return zero(L);
    case LayerKind::Circle: {
      FinMatrix corr;
      for (const auto& [mn, v] : a.ci.corr.e) corr.add(mn.first, mn.second, Scalar(mn.first - mn.second) * v);
      return circle_from(L, a.ci.plus.derivative(), a.ci.minus.derivative(), std::move(corr));
    }
    case LayerKind::Qds: {
      const Layer& I = *L.inner;
      QdsAcc acc{L, {}, {}};
      for (std::size_t s = 0; s < a.qd.fin_keys.size(); ++s) {
        auto [p, q] = a.qd.fin_keys[s];
        const Op& b = a.qd.fin_vals[s];
        acc.add_fin(p, q, commutator_D(I, b));
        // (F (x) N)(b (x) e_pq) - (b (x) e_pq)(F (x) N) = p Fb - q bF
        acc.add_fin(p, q, scale(I, Scalar(p), mul_F(I, b)));
        acc.add_fin(p, q, scale(I, Scalar(-q), op_mul(I, b, sign_op(I))));
      }
      for (std::size_t s = 0; s < a.qd.band_keys.size(); ++s) {
        int k = a.qd.band_keys[s];
        const Op& c = a.qd.band_vals[s];
        Op Fc = mul_F(I, c);
        if (!(Fc == op_mul(I, c, sign_op(I))))
          throw Error(ErrorCode::WindowOverflow, "band coefficient does not commute with F; commutator is unbounded");
        acc.add_band(k, commutator_D(I, c));
        if (k != 0) acc.add_band(k, scale(I, Scalar(-k), Fc));
      }
      return acc.build();
    }
    case LayerKind::Doubled: {
      const Layer& I = *L.inner;
      return doubled(L, commutator_D(I, a.db.parts[1]), commutator_D(I, a.db.parts[0]));
    }
  }
  return zero(L);
}

Op mul_F(const Layer& L, const Op& a) {
  check_layer(L, a);
  switch (L.kind) {
    case LayerKind::Point: return a;
    case LayerKind::Circle: return circle_mul(L, sign_op(L), a);
    case LayerKind::Qds: {
      const Layer& I = *L.inner;
      Op o = a;
      for (auto& v : o.qd.fin_vals) v = mul_F(I, v);
      for (auto& v : o.qd.band_vals) v = mul_F(I, v);
      return o;
    }
    case LayerKind::Doubled: {
      const Layer& I = *L.inner;
      return doubled(L, mul_F(I, a.db.parts[1]), mul_F(I, a.db.parts[0]));
    }
  }
  return a;
}

bool is_compact(const Layer& L, const Op& a) {
  check_layer(L, a);
  switch (L.kind) {
    case LayerKind::Point: return a.pt.s.is_zero();
    case LayerKind::Circle: return a.ci.plus.is_zero() && a.ci.minus.is_zero();
    case LayerKind::Qds: {
      if (!a.qd.band_keys.empty()) return false;
      if (finite_dimensional(*L.inner)) return true;
      for (const auto& v : a.qd.fin_vals)
        if (!is_compact(*L.inner, v)) return false;
      return true;
    }
    case LayerKind::Doubled: return is_compact(*L.inner, a.db.parts[0]) && is_compact(*L.inner, a.db.parts[1]);
  }
  return false;
}

namespace {
void coords_into(const Layer& L, const Op& a, Mode mode, Key& prefix, KeyedVec& out) {
  switch (L.kind) {
    case LayerKind::Point:
      if (!a.pt.s.is_zero()) out.emplace_back(prefix, a.pt.s);
      return;
    case LayerKind::Circle: {
      auto emit_sym = [&](int tag, const LaurentPoly& f) {
        for (const auto& [k, v] : f.c) {
          Key key = prefix;
          key.push_back(tag);
          key.push_back(k);
          out.emplace_back(std::move(key), v);
        }
      };
      emit_sym(0, a.ci.plus);
      emit_sym(1, a.ci.minus);
      if (mode == Mode::Bounded)
        for (const auto& [mn, v] : a.ci.corr.e) {
          Key key = prefix;
          key.insert(key.end(), {2, mn.first, mn.second});
          out.emplace_back(std::move(key), v);
        }
      return;
    }
    case LayerKind::Qds: {
      const Layer& I = *L.inner;
      if (!(mode == Mode::Calkin && finite_dimensional(I)))
        for (std::size_t s = 0; s < a.qd.fin_keys.size(); ++s) {
          std::size_t n = prefix.size();
          prefix.insert(prefix.end(), {0, a.qd.fin_keys[s].first, a.qd.fin_keys[s].second});
          coords_into(I, a.qd.fin_vals[s], mode, prefix, out);
          prefix.resize(n);
        }
      for (std::size_t s = 0; s < a.qd.band_keys.size(); ++s) {
        std::size_t n = prefix.size();
        prefix.insert(prefix.end(), {1, a.qd.band_keys[s]});
        coords_into(I, a.qd.band_vals[s], Mode::Bounded, prefix, out);
        prefix.resize(n);
      }
      return;
    }
    case LayerKind::Doubled:
      for (int t = 0; t < 2; ++t) {
        prefix.push_back(t);
        coords_into(*L.inner, a.db.parts[t], mode, prefix, out);
        prefix.pop_back();
      }
      return;
  }
}

bool visible_from(const Layer& L, const Key& k, std::size_t pos, int budget) {
  switch (L.kind) {
    case LayerKind::Point: return true;
    case LayerKind::Circle:
      if (k[pos] == 2) return true;
      return std::abs(k[pos + 1]) <= std::min(L.window, budget * L.gen_degree);
    case LayerKind::Qds:
      if (k[pos] == 0)
        return k[pos + 1] < L.cutoff && k[pos + 2] < L.cutoff && visible_from(*L.inner, k, pos + 3, budget);
      return std::abs(k[pos + 1]) <= L.cutoff && visible_from(*L.inner, k, pos + 2, budget);
    case LayerKind::Doubled: return visible_from(*L.inner, k, pos + 1, budget);
  }
  return true;
}
}  // namespace

KeyedVec coords(const Layer& L, const Op& a, Mode mode) {
  check_layer(L, a);
  KeyedVec out;
  Key prefix;
  coords_into(L, a, mode, prefix, out);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

bool key_visible(const Layer& L, const Key& k, int budget) { return visible_from(L, k, 0, budget); }

std::string key_str(const Key& k) {
  std::string s = "[";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + "]";
}

std::string op_str(const Layer& L, const Op& a) {
  std::string s;
  for (const auto& [k, v] : coords(L, a, Mode::Bounded)) s += (s.empty() ? "" : " ") + key_str(k) + ":" + v.str();
  return s.empty() ? "0" : s;
}

}  // namespace qds
