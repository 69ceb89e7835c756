#pragma once
#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "qds/errors.hpp"

namespace qds {

using Rational = mpq_class;

// Gaussian rational re + im*i. mpq_class keeps every value canonical.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long v) : re_(v) {}
  Scalar(int v) : re_(v) {}
  Scalar(Rational re) : re_(std::move(re)) { re_.canonicalize(); }
  Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static Scalar frac(long num, long den);
  static Scalar i() { return Scalar(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  Scalar conj() const { return Scalar(re_, -im_); }
  Scalar operator-() const { return Scalar(-re_, -im_); }
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);
  Scalar inverse() const;

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  // "3/4", "-1/2i", "1+2i"
  std::string str() const;
  static Scalar parse(const std::string& s);

 private:
  Rational re_{0};
  Rational im_{0};
};

// sorted by index, no stored zeros
struct SparseVec {
  std::vector<std::pair<int, Scalar>> e;

  bool empty() const { return e.empty(); }
  std::size_t size() const { return e.size(); }
  int lead() const { return e.empty() ? -1 : e.front().first; }
  Scalar at(int idx) const;
  void push(int idx, Scalar v);  // indices must be appended in increasing order
  void scale(const Scalar& s);
  friend bool operator==(const SparseVec& a, const SparseVec& b) { return a.e == b.e; }
  friend bool operator!=(const SparseVec& a, const SparseVec& b) { return !(a == b); }
};

// y += a*x
void axpy(SparseVec& y, const Scalar& a, const SparseVec& x);
SparseVec from_dense(const std::vector<Scalar>& d);

class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(int rows, int cols);
  ExactMatrix(int cols, std::vector<SparseVec> rows);
  static ExactMatrix dense(const std::vector<std::vector<Scalar>>& d);
  static ExactMatrix identity(int n);

  int rows() const { return static_cast<int>(r_.size()); }
  int cols() const { return cols_; }
  Scalar at(int i, int j) const { return r_[i].at(j); }
  void set(int i, int j, const Scalar& v);
  const SparseVec& row(int i) const { return r_[i]; }
  const std::vector<SparseVec>& row_list() const { return r_; }
  std::size_t nnz() const;
  double density() const;
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.cols_ == b.cols_ && a.r_ == b.r_;
  }

 private:
  int cols_ = 0;
  std::vector<SparseVec> r_;
};

struct RrefResult {
  ExactMatrix m;
  std::vector<int> pivots;
};

// canonical RREF; switches to dense elimination above density 0.25
RrefResult rref(const ExactMatrix& m);
RrefResult rref_sparse(const ExactMatrix& m);
RrefResult rref_dense(const ExactMatrix& m);

// Incremental echelon form with an optional payload carried through every row
// operation (used to track word preimages).
class Echelon {
 public:
  explicit Echelon(int cols = 0) : cols_(cols) {}
  int cols() const { return cols_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  // returns true if v was independent and was stored
  bool insert(SparseVec v, SparseVec payload = {});
  // reduce v (and its payload) against stored rows
  void reduce(SparseVec& v, SparseVec* payload = nullptr) const;
  bool contains(SparseVec v) const;
  // back-substitute into canonical RREF, rows sorted by pivot
  void finish();
  const std::vector<SparseVec>& rows() const { return rows_; }
  const std::vector<SparseVec>& payloads() const { return pay_; }
  const std::vector<int>& pivots() const { return piv_; }

 private:
  int cols_;
  std::vector<SparseVec> rows_, pay_;
  std::vector<int> piv_;
  std::vector<int> row_of_col_;
};

class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(int ambient) : ambient_(ambient), basis_(0, ambient) {}
  static Subspace span(int ambient, const std::vector<SparseVec>& vs);
  static Subspace from_rref(int ambient, RrefResult r);
  static Subspace full(int ambient);

  int ambient_dim() const { return ambient_; }
  int dim() const { return basis_.rows(); }
  const ExactMatrix& basis() const { return basis_; }
  const std::vector<int>& pivots() const { return pivots_; }
  bool contains_vec(const SparseVec& v) const;
  // pivot-column coordinates of a vector inside the subspace
  std::vector<Scalar> coordinates(const SparseVec& v) const;
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  int ambient_ = 0;
  ExactMatrix basis_;
  std::vector<int> pivots_;
};

Subspace kernel(const ExactMatrix& m);
Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersect(const Subspace& a, const Subspace& b);
bool contains(const Subspace& a, const Subspace& b);  // b ⊆ a
int quotient_dim(const Subspace& a, const Subspace& b);
int rank(const ExactMatrix& m);

}  // namespace qds
