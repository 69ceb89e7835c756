#pragma once
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qds/triple.hpp"

namespace qds {

// slot entries index the spanning set; kAdjoinedUnit marks the unit of the
// minimal unitization in slot 0 of forms over a non-unital family
using Word = std::vector<int>;
constexpr int kAdjoinedUnit = -1;

struct FormExpr {
  int degree = 0;
  std::map<Word, Scalar> terms;

  FormExpr() = default;
  explicit FormExpr(int deg) : degree(deg) {}
  static FormExpr word(const Word& w, Scalar c = Scalar(1));
  void add(const Word& w, const Scalar& c);
  void add(const FormExpr& o, const Scalar& c = Scalar(1));
  bool is_zero() const { return terms.empty(); }
  friend bool operator==(const FormExpr& a, const FormExpr& b) {
    return a.degree == b.degree && a.terms == b.terms;
  }
};

// A triple together with a spanning set (budget, family) and the mode of the
// quotient. Caches per-degree span data.
class FormContext {
 public:
  FormContext(TriplePtr t, int budget, Mode mode, Family fam = Family::All, bool parallel = true);

  const TripleDescriptor& triple() const { return *t_; }
  TriplePtr triple_ptr() const { return t_; }
  const Layer& layer() const { return *t_->layer; }
  const SpanningSet& spanning() const { return span_; }
  int size() const { return static_cast<int>(span_.elems.size()); }
  int unit() const { return span_.unital ? 0 : kAdjoinedUnit; }
  bool is_unit(int idx) const { return idx == unit(); }
  int budget() const { return span_.budget; }
  Mode mode() const { return mode_; }
  Family family() const { return span_.family; }
  bool parallel() const { return parallel_; }
  std::vector<int> non_unit() const;

  const Op& element(int idx) const;
  const Op& dcomm(int idx) const { return dcomm_[idx]; }
  std::string word_str(const Word& w) const;
  std::string form_str(const FormExpr& f) const;

  Op pi_word(const Word& w) const;
  Op pi_op(const FormExpr& f) const;
  KeyedVec pi_eval(const FormExpr& f) const;
  KeyedVec keyed(const Op& x) const { return coords(layer(), x, mode_); }
  bool visible(const Key& k) const { return key_visible(layer(), k, budget()); }
  // coefficients of an algebra element over the spanning set; BudgetExceeded if outside
  std::vector<std::pair<int, Scalar>> expand(const Op& x) const;

  // independent word preimages spanning pi(Omega^n), unwindowed
  const std::vector<std::pair<Word, Op>>& level(int n) const;

 private:
  TriplePtr t_;
  SpanningSet span_;
  Mode mode_;
  bool parallel_;
  Op unit_op_;
  std::vector<Op> dcomm_;
  std::map<Key, int> span_index_;
  Echelon span_ech_;
  mutable std::mutex mu_;
  mutable std::vector<std::vector<std::pair<Word, Op>>> levels_;
};

FormExpr universal_d(const FormContext& c, const FormExpr& w);
FormExpr universal_product(const FormContext& c, const FormExpr& x, const FormExpr& y);

// keyed vectors placed in a fixed column order: keys outside the budget window first
struct Columns {
  std::vector<Key> keys;
  std::map<Key, int> index;
  int hidden = 0;
  static Columns build(const FormContext& c, const std::vector<const KeyedVec*>& vs);
  SparseVec place(const KeyedVec& v) const;  // throws NotWellDefined on unknown keys
  bool knows(const KeyedVec& v) const;
  KeyedVec unplace(const SparseVec& v) const;
};

struct OmegaSpace {
  int degree = 0;
  Mode mode = Mode::Bounded;
  int budget = 1;
  Family family = Family::All;
  std::string triple;
  Columns cols;
  std::vector<Word> words;  // preimage alphabet, degree n
  Echelon pi;               // RREF of the full span, payload over words
  Echelon junk;             // RREF of the full junk span, payload over words
  Echelon section;          // quotient representatives (pivot complement), payload over words
  int pi_dim = 0, junk_dim = 0;    // full spans
  int pi_vis = 0, junk_vis = 0;    // inside the window
  int quotient_dim = 0;

  Subspace pi_span() const;    // pi(Omega^n) inside the window
  Subspace junk_span() const;  // pi(dJ_0^{n-1}) inside the window
  FormExpr preimage(const SparseVec& payload) const;
  FormExpr section_preimage(int i) const { return preimage(section.payloads()[i]); }
  KeyedVec section_vector(int i) const { return cols.unplace(section.rows()[i]); }
  // class of a keyed operator vector in the quotient; NotWellDefined when outside window + junk
  std::vector<Scalar> class_of(const KeyedVec& v) const;
  bool is_zero_class(const KeyedVec& v) const;
};

Subspace omega_span(const FormContext& c, int n);  // full span in its own sorted columns
OmegaSpace omega_d(const FormContext& c, int n);
// brute force over all words; reference path for tests
std::vector<KeyedVec> pi_all_words(const FormContext& c, int n);
std::vector<Word> all_words(const FormContext& c, int n);

// matrix columns = classes of s_n basis, rows = classes in s_{n+1}
struct InducedDifferential {
  ExactMatrix matrix;  // rows: section basis of s_n; each row holds the image class
  int junk_checked = 0;
};
InducedDifferential induced_differential(const FormContext& c, const OmegaSpace& sn, const OmegaSpace& sn1);

struct StabilizeResult {
  std::vector<int> budgets;
  std::vector<int> dims;
  std::vector<int> oracle;  // empty when no oracle applies
  bool stable = false;
};
StabilizeResult stabilize(const TriplePtr& t, int n, Mode mode, int max_budget, Family fam = Family::All,
                          int min_budget = 1);
// reachable-monomial oracle for the circle: dims of Omega^0, Omega^1 at a budget
int circle_oracle_dim(int window, int gen_degree, int budget, int n);

}  // namespace qds
