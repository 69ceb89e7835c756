#include "qds/exact.hpp"

#include <algorithm>

namespace qds {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::AmbientMismatch: return "AmbientMismatch";
    case ErrorCode::NotASubspace: return "NotASubspace";
    case ErrorCode::LayerMismatch: return "LayerMismatch";
    case ErrorCode::WindowOverflow: return "WindowOverflow";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotWellDefined: return "NotWellDefined";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::NotAProjection: return "NotAProjection";
    case ErrorCode::ModuleMismatch: return "ModuleMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Error";
}

Scalar Scalar::frac(long num, long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return Scalar(r);
}

Scalar& Scalar::operator+=(const Scalar& o) {
  re_ += o.re_;
  if (sgn(o.im_) != 0) im_ += o.im_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  re_ -= o.re_;
  if (sgn(o.im_) != 0) im_ -= o.im_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational r = re_ * o.re_ - im_ * o.im_;
  Rational i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero");
  if (sgn(im_) == 0) return Scalar(Rational(1) / re_);
  Rational n = re_ * re_ + im_ * im_;
  return Scalar(re_ / n, -im_ / n);
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  if (sgn(o.im_) == 0) {
    re_ /= o.re_;
    if (sgn(im_) != 0) im_ /= o.re_;
    return *this;
  }
  return *this *= o.inverse();
}

std::string Scalar::str() const {
  if (sgn(im_) == 0) return re_.get_str();
  std::string ims = im_.get_str() + "i";
  if (sgn(re_) == 0) return ims;
  if (sgn(im_) > 0) return re_.get_str() + "+" + ims;
  return re_.get_str() + ims;
}

namespace {
Rational parse_rational(const std::string& s) {
  if (s.empty() || s == "+") return Rational(1);
  if (s == "-") return Rational(-1);
  std::string t = s[0] == '+' ? s.substr(1) : s;
  Rational r;
  if (r.set_str(t, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}
}  // namespace

Scalar Scalar::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty scalar");
  if (s.back() != 'i') return Scalar(parse_rational(s));
  std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != '/') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return Scalar(Rational(0), parse_rational(body));
  return Scalar(parse_rational(body.substr(0, split)), parse_rational(body.substr(split)));
}

Scalar SparseVec::at(int idx) const {
  auto it = std::lower_bound(e.begin(), e.end(), idx,
                             [](const auto& p, int v) { return p.first < v; });
  if (it != e.end() && it->first == idx) return it->second;
  return Scalar();
}

void SparseVec::push(int idx, Scalar v) {
  if (!v.is_zero()) e.emplace_back(idx, std::move(v));
}

void SparseVec::scale(const Scalar& s) {
  if (s.is_zero()) {
    e.clear();
    return;
  }
  for (auto& [i, v] : e) v *= s;
}

void axpy(SparseVec& y, const Scalar& a, const SparseVec& x) {
  if (a.is_zero() || x.e.empty()) return;
  std::vector<std::pair<int, Scalar>> out;
  out.reserve(y.e.size() + x.e.size());
  auto i = y.e.begin();
  auto j = x.e.begin();
  while (i != y.e.end() || j != x.e.end()) {
    if (j == x.e.end() || (i != y.e.end() && i->first < j->first)) {
      out.push_back(std::move(*i));
      ++i;
    } else if (i == y.e.end() || j->first < i->first) {
      out.emplace_back(j->first, a * j->second);
      ++j;
    } else {
      Scalar v = std::move(i->second);
      v += a * j->second;
      if (!v.is_zero()) out.emplace_back(i->first, std::move(v));
      ++i;
      ++j;
    }
  }
  y.e = std::move(out);
}

SparseVec from_dense(const std::vector<Scalar>& d) {
  SparseVec v;
  for (int i = 0; i < static_cast<int>(d.size()); ++i) v.push(i, d[i]);
  return v;
}

ExactMatrix::ExactMatrix(int rows, int cols) : cols_(cols), r_(rows) {}

ExactMatrix::ExactMatrix(int cols, std::vector<SparseVec> rows) : cols_(cols), r_(std::move(rows)) {}

ExactMatrix ExactMatrix::dense(const std::vector<std::vector<Scalar>>& d) {
  int cols = d.empty() ? 0 : static_cast<int>(d[0].size());
  ExactMatrix m(static_cast<int>(d.size()), cols);
  for (std::size_t i = 0; i < d.size(); ++i) m.r_[i] = from_dense(d[i]);
  return m;
}

ExactMatrix ExactMatrix::identity(int n) {
  ExactMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.r_[i].push(i, Scalar(1));
  return m;
}

void ExactMatrix::set(int i, int j, const Scalar& v) {
  SparseVec delta;
  delta.push(j, v - at(i, j));
  axpy(r_[i], Scalar(1), delta);
}

std::size_t ExactMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& r : r_) n += r.size();
  return n;
}

double ExactMatrix::density() const {
  if (r_.empty() || cols_ == 0) return 0.0;
  return static_cast<double>(nnz()) / (static_cast<double>(r_.size()) * cols_);
}

bool Echelon::insert(SparseVec v, SparseVec payload) {
  reduce(v, &payload);
  if (v.empty()) return false;
  Scalar inv = v.e.front().second.inverse();
  if (!inv.is_one()) {
    v.scale(inv);
    payload.scale(inv);
  }
  int c = v.lead();
  if (static_cast<int>(row_of_col_.size()) < cols_) row_of_col_.assign(cols_, -1);
  row_of_col_[c] = static_cast<int>(rows_.size());
  piv_.push_back(c);
  rows_.push_back(std::move(v));
  pay_.push_back(std::move(payload));
  return true;
}

void Echelon::reduce(SparseVec& v, SparseVec* payload) const {
  if (rows_.empty()) return;
  std::size_t pos = 0;
  while (pos < v.e.size()) {
    int c = v.e[pos].first;
    int r = row_of_col_[c];
    if (r < 0) {
      ++pos;
      continue;
    }
    Scalar coef = -v.e[pos].second;
    axpy(v, coef, rows_[r]);
    if (payload) axpy(*payload, coef, pay_[r]);
  }
}

bool Echelon::contains(SparseVec v) const {
  reduce(v);
  return v.empty();
}

void Echelon::finish() {
  std::vector<int> order(rows_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return piv_[a] < piv_[b]; });
  std::vector<SparseVec> rows, pays;
  std::vector<int> piv;
  for (int k : order) {
    rows.push_back(std::move(rows_[k]));
    pays.push_back(std::move(pay_[k]));
    piv.push_back(piv_[k]);
  }
  for (int i = static_cast<int>(rows.size()) - 1; i >= 0; --i) {
    for (int j = 0; j < i; ++j) {
      Scalar c = rows[j].at(piv[i]);
      if (c.is_zero()) continue;
      axpy(rows[j], -c, rows[i]);
      axpy(pays[j], -c, pays[i]);
    }
  }
  rows_ = std::move(rows);
  pay_ = std::move(pays);
  piv_ = std::move(piv);
  row_of_col_.assign(cols_, -1);
  for (std::size_t i = 0; i < piv_.size(); ++i) row_of_col_[piv_[i]] = static_cast<int>(i);
}

RrefResult rref_sparse(const ExactMatrix& m) {
  Echelon e(m.cols());
  for (const auto& r : m.row_list()) e.insert(r);
  e.finish();
  return {ExactMatrix(m.cols(), e.rows()), e.pivots()};
}

RrefResult rref_dense(const ExactMatrix& m) {
  int R = m.rows(), C = m.cols();
  std::vector<std::vector<Scalar>> a(R, std::vector<Scalar>(C));
  for (int i = 0; i < R; ++i)
    for (const auto& [j, v] : m.row(i).e) a[i][j] = v;
  std::vector<int> piv;
  int row = 0;
  for (int c = 0; c < C && row < R; ++c) {
    int sel = -1;
    for (int i = row; i < R; ++i)
      if (!a[i][c].is_zero()) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[sel], a[row]);
    Scalar inv = a[row][c].inverse();
    for (int j = c; j < C; ++j)
      if (!a[row][j].is_zero()) a[row][j] *= inv;
    for (int i = 0; i < R; ++i) {
      if (i == row || a[i][c].is_zero()) continue;
      Scalar f = a[i][c];
      for (int j = c; j < C; ++j)
        if (!a[row][j].is_zero()) a[i][j] -= f * a[row][j];
    }
    piv.push_back(c);
    ++row;
  }
  std::vector<SparseVec> rows;
  for (int i = 0; i < row; ++i) rows.push_back(from_dense(a[i]));
  return {ExactMatrix(C, std::move(rows)), piv};
}

RrefResult rref(const ExactMatrix& m) {
  if (m.density() > 0.25 && m.rows() > 0) return rref_dense(m);
  return rref_sparse(m);
}

int rank(const ExactMatrix& m) { return static_cast<int>(rref(m).pivots.size()); }

Subspace Subspace::from_rref(int ambient, RrefResult r) {
  Subspace s(ambient);
  s.basis_ = std::move(r.m);
  s.pivots_ = std::move(r.pivots);
  return s;
}

Subspace Subspace::span(int ambient, const std::vector<SparseVec>& vs) {
  Echelon e(ambient);
  for (const auto& v : vs) {
    if (!v.empty() && v.e.back().first >= ambient)
      throw Error(ErrorCode::AmbientMismatch, "vector index outside ambient space");
    e.insert(v);
  }
  e.finish();
  return from_rref(ambient, {ExactMatrix(ambient, e.rows()), e.pivots()});
}

Subspace Subspace::full(int ambient) { return from_rref(ambient, {ExactMatrix::identity(ambient), [&] {
                                                          std::vector<int> p(ambient);
                                                          for (int i = 0; i < ambient; ++i) p[i] = i;
                                                          return p;
                                                        }()}); }

bool Subspace::contains_vec(const SparseVec& v) const {
  SparseVec r = v;
  for (int i = 0; i < dim(); ++i) {
    Scalar c = r.at(pivots_[i]);
    if (!c.is_zero()) axpy(r, -c, basis_.row(i));
  }
  return r.empty();
}

std::vector<Scalar> Subspace::coordinates(const SparseVec& v) const {
  std::vector<Scalar> c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = v.at(pivots_[i]);
  return c;
}

Subspace kernel(const ExactMatrix& m) {
  RrefResult r = rref(m);
  std::vector<bool> is_piv(m.cols(), false);
  for (int p : r.pivots) is_piv[p] = true;
  std::vector<SparseVec> basis;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    std::vector<std::pair<int, Scalar>> entries;
    entries.emplace_back(f, Scalar(1));
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
      Scalar c = r.m.at(static_cast<int>(i), f);
      if (!c.is_zero()) entries.emplace_back(r.pivots[i], -c);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseVec v;
    v.e = std::move(entries);
    basis.push_back(std::move(v));
  }
  return Subspace::span(m.cols(), basis);
}

static void check_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw Error(ErrorCode::AmbientMismatch,
                std::to_string(a.ambient_dim()) + " vs " + std::to_string(b.ambient_dim()));
}

Subspace sum(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  std::vector<SparseVec> vs = a.basis().row_list();
  vs.insert(vs.end(), b.basis().row_list().begin(), b.basis().row_list().end());
  return Subspace::span(a.ambient_dim(), vs);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  int n = a.ambient_dim();
  Echelon e(2 * n);
  for (const auto& u : a.basis().row_list()) {
    SparseVec v = u;
    for (const auto& [i, x] : u.e) v.e.emplace_back(i + n, x);
    e.insert(std::move(v));
  }
  for (const auto& w : b.basis().row_list()) e.insert(w);
  std::vector<SparseVec> out;
  for (const auto& r : e.rows()) {
    if (r.lead() < n) continue;
    SparseVec v;
    for (const auto& [i, x] : r.e) v.e.emplace_back(i - n, x);
    out.push_back(std::move(v));
  }
  return Subspace::span(n, out);
}

bool contains(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  for (const auto& r : b.basis().row_list())
    if (!a.contains_vec(r)) return false;
  return true;
}

int quotient_dim(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  if (!contains(a, b)) throw Error(ErrorCode::NotASubspace, "quotient by a non-subspace");
  return a.dim() - b.dim();
}

}  // namespace qds
