#pragma once
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qds/exact.hpp"

namespace qds {

enum class Mode { Bounded, Calkin };
const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

// finitely supported map degree -> coefficient, sorted, no zeros
struct LaurentPoly {
  std::vector<std::pair<int, Scalar>> c;

  static LaurentPoly monomial(int k, Scalar v = Scalar(1));
  static LaurentPoly constant(Scalar v) { return monomial(0, std::move(v)); }
  bool is_zero() const { return c.empty(); }
  Scalar at(int k) const;
  int max_abs_degree() const;
  LaurentPoly derivative() const;  // z^k -> k z^k
  LaurentPoly tilde() const;       // z^k coefficient -> conj of z^{-k} coefficient
  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const Scalar& s, const LaurentPoly& a);
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.c == b.c; }
};

// sparse (p, q) -> scalar over N x N (also used for circle corrections over Z x Z)
struct FinMatrix {
  std::map<std::pair<int, int>, Scalar> e;

  static FinMatrix unit(int p, int q, Scalar v = Scalar(1));
  int order() const;  // least m with all entries indices < m
  void add(int p, int q, const Scalar& v);
  FinMatrix number_commutator() const;  // [N, T]
  friend FinMatrix operator*(const FinMatrix& a, const FinMatrix& b);
  friend FinMatrix operator+(const FinMatrix& a, const FinMatrix& b);
  friend bool operator==(const FinMatrix& a, const FinMatrix& b) { return a.e == b.e; }
};

enum class LayerKind { Point, Circle, Qds, Doubled };

struct Layer;
using LayerPtr = std::shared_ptr<const Layer>;

struct Layer {
  LayerKind kind = LayerKind::Point;
  int window = 0;      // circle: Fourier window W
  int gen_degree = 1;  // circle
  int cutoff = 0;      // qds
  int work_limit = 0;  // qds: hard bound on finite indices and band degrees
  LayerPtr inner;
  std::string describe() const;
};

LayerPtr point_layer();
LayerPtr circle_layer(int window, int gen_degree = 1);
LayerPtr qds_lift(const LayerPtr& inner, int cutoff);
LayerPtr pauli_double(const LayerPtr& inner);
bool same_layer(const Layer& a, const Layer& b);
bool finite_dimensional(const Layer& l);

struct Op;

struct PointOp {
  Scalar s;
};

struct CircleOp {
  LaurentPoly plus, minus;  // end symbols: S_{m,n} = f_{sign n}[m - n]
  FinMatrix corr;           // finite correction over the Fourier window
};

struct QdsOp {
  std::vector<std::pair<int, int>> fin_keys;  // sorted
  std::vector<Op> fin_vals;                   // b (x) e_pq
  std::vector<int> band_keys;                 // sorted
  std::vector<Op> band_vals;                  // c (x) T_k, (T_k)_{ij} = [j - i = k]
};

struct DoubledOp {
  std::vector<Op> parts;  // {x, y} for x (x) I + y (x) sigma_1
};

struct Op {
  LayerKind kind = LayerKind::Point;
  PointOp pt;
  CircleOp ci;
  QdsOp qd;
  DoubledOp db;
};

bool operator==(const Op& a, const Op& b);
inline bool operator!=(const Op& a, const Op& b) { return !(a == b); }

using Key = std::vector<int>;
using KeyedVec = std::vector<std::pair<Key, Scalar>>;  // sorted by key

// construction
Op zero(const Layer& L);
Op identity(const Layer& L);
Op scalar_op(const Layer& L, const Scalar& s);
Op sign_op(const Layer& L);  // F
Op circle_mult(const Layer& L, const LaurentPoly& f);
Op circle_from(const Layer& L, LaurentPoly plus, LaurentPoly minus, FinMatrix corr);
Op qds_elem(const Layer& L, const Op& b, int p, int q);  // b (x) e_pq
Op qds_band(const Layer& L, const Op& c, int k);         // c (x) T_k
Op qds_fin(const Layer& L, const Op& b, const FinMatrix& T);
Op qds_laurent(const Layer& L, const Op& c, const LaurentPoly& f);  // c (x) sigma'(f)
Op doubled(const Layer& L, const Op& x, const Op& y);

// algebra
bool is_zero(const Op& x);
Op add(const Layer& L, const Op& a, const Op& b);
Op sub(const Layer& L, const Op& a, const Op& b);
Op scale(const Layer& L, const Scalar& s, const Op& a);
Op op_mul(const Layer& L, const Op& a, const Op& b);
Op adjoint(const Layer& L, const Op& a);
Op commutator_D(const Layer& L, const Op& a);
Op mul_F(const Layer& L, const Op& a);
bool is_compact(const Layer& L, const Op& a);
KeyedVec coords(const Layer& L, const Op& a, Mode mode);
// key visible inside the budget-p window of the layer
bool key_visible(const Layer& L, const Key& k, int budget);
void check_layer(const Layer& L, const Op& a);

std::string key_str(const Key& k);
std::string op_str(const Layer& L, const Op& a);  // canonical text, 0-based indices

}  // namespace qds
