#include "qds/forms.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <functional>
#include <set>

namespace qds {

FormExpr FormExpr::word(const Word& w, Scalar c) {
  FormExpr f(static_cast<int>(w.size()) - 1);
  f.add(w, c);
  return f;
}

void FormExpr::add(const Word& w, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }
}

void FormExpr::add(const FormExpr& o, const Scalar& c) {
  for (const auto& [w, x] : o.terms) add(w, c * x);
}

// run f(i) for i in [0, n), in parallel when allowed; the first failing index rethrows
template <class F>
static void parallel_for(int n, bool par, F&& f) {
  std::vector<std::exception_ptr> errs(n);
#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// ---------- context ----------

FormContext::FormContext(TriplePtr t, int budget, Mode mode, Family fam, bool parallel)
    : t_(std::move(t)), span_(spanning_set(*t_, budget, fam)), mode_(mode), parallel_(parallel) {
  const Layer& L = layer();
  unit_op_ = identity(L);
  for (const auto& e : span_.elems) dcomm_.push_back(commutator_D(L, e));
  std::vector<KeyedVec> cs;
  for (const auto& e : span_.elems) {
    cs.push_back(coords(L, e, Mode::Bounded));
    for (const auto& [k, v] : cs.back()) span_index_.emplace(k, 0);
  }
  int n = 0;
  for (auto& [k, i] : span_index_) i = n++;
  span_ech_ = Echelon(n);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    SparseVec v, p;
    for (const auto& [k, x] : cs[i]) v.push(span_index_.at(k), x);
    p.push(static_cast<int>(i), Scalar(1));
    if (!span_ech_.insert(std::move(v), std::move(p)))
      throw Error(ErrorCode::BudgetTooSmall, "spanning set is linearly dependent at element " + span_.names[i]);
  }
}

std::vector<int> FormContext::non_unit() const {
  std::vector<int> r;
  for (int i = 0; i < size(); ++i)
    if (!is_unit(i)) r.push_back(i);
  return r;
}

const Op& FormContext::element(int idx) const {
  if (idx == kAdjoinedUnit) return unit_op_;
  return span_.elems.at(idx);
}

std::string FormContext::word_str(const Word& w) const {
  std::string s = w[0] == kAdjoinedUnit ? "1" : span_.names[w[0]];
  for (std::size_t j = 1; j < w.size(); ++j) s += " d(" + span_.names[w[j]] + ")";
  return s;
}

std::string FormContext::form_str(const FormExpr& f) const {
  if (f.is_zero()) return "0";
  std::string s;
  for (const auto& [w, c] : f.terms) s += (s.empty() ? "" : " + ") + ("(" + c.str() + ") " + word_str(w));
  return s;
}

Op FormContext::pi_word(const Word& w) const {
  const Layer& L = layer();
  Op o = element(w[0]);
  for (std::size_t j = 1; j < w.size(); ++j) o = op_mul(L, o, dcomm_[w[j]]);
  return o;
}

Op FormContext::pi_op(const FormExpr& f) const {
  const Layer& L = layer();
  Op o = zero(L);
  for (const auto& [w, c] : f.terms) o = add(L, o, scale(L, c, pi_word(w)));
  return o;
}

KeyedVec FormContext::pi_eval(const FormExpr& f) const { return keyed(pi_op(f)); }

std::vector<std::pair<int, Scalar>> FormContext::expand(const Op& x) const {
  SparseVec v, pay;
  for (const auto& [k, c] : coords(layer(), x, Mode::Bounded)) {
    auto it = span_index_.find(k);
    if (it == span_index_.end())
      throw Error(ErrorCode::BudgetExceeded,
                  "product leaves the budget-" + std::to_string(budget()) + " spanning set; raise --word-budget");
    v.e.emplace_back(it->second, c);
  }
  std::sort(v.e.begin(), v.e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  span_ech_.reduce(v, &pay);
  if (!v.empty())
    throw Error(ErrorCode::BudgetExceeded,
                "product leaves the budget-" + std::to_string(budget()) + " spanning set; raise --word-budget");
  std::vector<std::pair<int, Scalar>> out;
  for (const auto& [i, c] : pay.e) out.emplace_back(i, -c);
  return out;
}

const std::vector<std::pair<Word, Op>>& FormContext::level(int n) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Layer& L = layer();
  while (static_cast<int>(levels_.size()) <= n) {
    int j = static_cast<int>(levels_.size());
    std::vector<std::pair<Word, Op>> cand;
    if (j == 0) {
      if (!span_.unital) cand.push_back({{kAdjoinedUnit}, unit_op_});
      for (int i = 0; i < size(); ++i) cand.push_back({{i}, span_.elems[i]});
    } else {
      for (const auto& [w, op] : levels_[j - 1])
        for (int s : non_unit()) {
          Word w2 = w;
          w2.push_back(s);
          cand.push_back({std::move(w2), op});
        }
    }
    std::vector<KeyedVec> vs(cand.size());
    parallel_for(static_cast<int>(cand.size()), parallel_, [&](int i) {
      if (j > 0) cand[i].second = op_mul(L, cand[i].second, dcomm_[cand[i].first.back()]);
      vs[i] = coords(L, cand[i].second, mode_);
    });
    std::map<Key, int> idx;
    for (const auto& v : vs)
      for (const auto& [k, x] : v) idx.emplace(k, 0);
    int c = 0;
    for (auto& [k, i] : idx) i = c++;
    Echelon e(c);
    std::vector<std::pair<Word, Op>> keep;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      SparseVec v;
      for (const auto& [k, x] : vs[i]) v.push(idx.at(k), x);
      if (e.insert(std::move(v))) keep.push_back(std::move(cand[i]));
    }
    levels_.push_back(std::move(keep));
  }
  return levels_[n];
}

// ---------- universal algebra ----------

FormExpr universal_d(const FormContext& c, const FormExpr& w) {
  FormExpr r(w.degree + 1);
  int u = c.unit();
  for (const auto& [word, x] : w.terms) {
    if (c.is_unit(word[0])) continue;
    Word nw;
    nw.push_back(u);
    nw.insert(nw.end(), word.begin(), word.end());
    r.add(nw, x);
  }
  return r;
}

namespace {

// a * b for spanning indices (either may be the unit) as a combination of spanning indices
std::vector<std::pair<int, Scalar>> elem_product(const FormContext& c, int a, int b) {
  if (c.is_unit(a)) return {{b, Scalar(1)}};
  if (c.is_unit(b)) return {{a, Scalar(1)}};
  return c.expand(op_mul(c.layer(), c.element(a), c.element(b)));
}

// (word) * b
FormExpr right_mul(const FormContext& c, const Word& w, int b) {
  FormExpr r(static_cast<int>(w.size()) - 1);
  if (w.size() == 1) {
    for (const auto& [i, x] : elem_product(c, w[0], b)) r.add(Word{i}, x);
    return r;
  }
  if (c.is_unit(b)) {
    r.add(w, Scalar(1));
    return r;
  }
  Word head(w.begin(), w.end() - 1);
  int am = w.back();
  // w' d(a_m b)
  for (const auto& [i, x] : elem_product(c, am, b)) {
    if (c.is_unit(i)) continue;
    Word nw = head;
    nw.push_back(i);
    r.add(nw, x);
  }
  // - (w' a_m) db
  FormExpr inner = right_mul(c, head, am);
  for (const auto& [iw, x] : inner.terms) {
    Word nw = iw;
    nw.push_back(b);
    r.add(nw, -x);
  }
  return r;
}

}  // namespace

FormExpr universal_product(const FormContext& c, const FormExpr& x, const FormExpr& y) {
  FormExpr r(x.degree + y.degree);
  for (const auto& [wx, cx] : x.terms)
    for (const auto& [wy, cy] : y.terms) {
      FormExpr head = right_mul(c, wx, wy[0]);
      for (const auto& [hw, ch] : head.terms) {
        Word nw = hw;
        bool dead = false;
        for (std::size_t j = 1; j < wy.size(); ++j) {
          if (c.is_unit(wy[j])) dead = true;
          nw.push_back(wy[j]);
        }
        if (!dead) r.add(nw, cx * cy * ch);
      }
    }
  return r;
}

// ---------- columns ----------

Columns Columns::build(const FormContext& c, const std::vector<const KeyedVec*>& vs) {
  std::set<Key> all;
  for (const auto* v : vs)
    for (const auto& [k, x] : *v) all.insert(k);
  Columns cols;
  std::vector<Key> vis;
  for (const auto& k : all) (c.visible(k) ? vis : cols.keys).push_back(k);
  cols.hidden = static_cast<int>(cols.keys.size());
  cols.keys.insert(cols.keys.end(), vis.begin(), vis.end());
  for (std::size_t i = 0; i < cols.keys.size(); ++i) cols.index.emplace(cols.keys[i], static_cast<int>(i));
  return cols;
}

bool Columns::knows(const KeyedVec& v) const {
  for (const auto& [k, x] : v)
    if (!index.count(k)) return false;
  return true;
}

SparseVec Columns::place(const KeyedVec& v) const {
  SparseVec r;
  for (const auto& [k, x] : v) {
    auto it = index.find(k);
    if (it == index.end())
      throw Error(ErrorCode::NotWellDefined, "coordinate " + key_str(k) + " outside the computed span; raise budget");
    r.e.emplace_back(it->second, x);
  }
  std::sort(r.e.begin(), r.e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return r;
}

KeyedVec Columns::unplace(const SparseVec& v) const {
  KeyedVec r;
  for (const auto& [i, x] : v.e) r.emplace_back(keys[i], x);
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return r;
}

// ---------- spans ----------

std::vector<Word> all_words(const FormContext& c, int n) {
  std::vector<int> first;
  if (n >= 1 && !c.spanning().unital) first.push_back(kAdjoinedUnit);
  for (int i = 0; i < c.size(); ++i) first.push_back(i);
  std::vector<Word> out;
  for (int f : first) out.push_back({f});
  std::vector<int> rest = c.non_unit();
  for (int j = 1; j <= n; ++j) {
    std::vector<Word> next;
    next.reserve(out.size() * rest.size());
    for (const auto& w : out)
      for (int s : rest) {
        Word nw = w;
        nw.push_back(s);
        next.push_back(std::move(nw));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<KeyedVec> pi_all_words(const FormContext& c, int n) {
  std::vector<Word> ws = all_words(c, n);
  std::vector<KeyedVec> out(ws.size());
  parallel_for(static_cast<int>(ws.size()), c.parallel(), [&](int i) { out[i] = c.keyed(c.pi_word(ws[i])); });
  return out;
}

namespace {

struct Candidates {
  std::vector<Word> words;
  std::vector<KeyedVec> vecs;
};

Candidates pi_candidates(const FormContext& c, int n) {
  Candidates r;
  if (n == 0) {
    for (int i = 0; i < c.size(); ++i) r.words.push_back({i});
  } else {
    for (const auto& [w, op] : c.level(n - 1))
      for (int s : c.non_unit()) {
        Word nw = w;
        nw.push_back(s);
        r.words.push_back(std::move(nw));
      }
  }
  r.vecs.resize(r.words.size());
  const auto& prev = n > 0 ? c.level(n - 1) : c.level(0);
  int per = static_cast<int>(c.non_unit().size());
  parallel_for(static_cast<int>(r.words.size()), c.parallel(), [&](int i) {
    if (n == 0) {
      r.vecs[i] = c.keyed(c.element(r.words[i][0]));
    } else {
      const Op& base = prev[i / per].second;
      r.vecs[i] = c.keyed(op_mul(c.layer(), base, c.dcomm(r.words[i].back())));
    }
  });
  return r;
}

struct JunkRows {
  std::vector<Word> dwords;  // d(w), empty when d(w) = 0
  std::vector<KeyedVec> p, q;
};

JunkRows junk_rows(const FormContext& c, int n) {
  JunkRows r;
  std::vector<Word> ws = all_words(c, n - 1);
  r.dwords.resize(ws.size());
  r.p.resize(ws.size());
  r.q.resize(ws.size());
  int u = c.unit();
  parallel_for(static_cast<int>(ws.size()), c.parallel(), [&](int i) {
    const Word& w = ws[i];
    Op pw = c.pi_word(w);
    r.p[i] = c.keyed(pw);
    if (!c.is_unit(w[0])) {
      Word dw;
      dw.push_back(u);
      dw.insert(dw.end(), w.begin(), w.end());
      r.q[i] = c.keyed(c.pi_word(dw));
      r.dwords[i] = std::move(dw);
    }
  });
  return r;
}

int word_id(std::map<Word, int>& ids, std::vector<Word>& words, const Word& w) {
  auto [it, fresh] = ids.try_emplace(w, static_cast<int>(words.size()));
  if (fresh) words.push_back(w);
  return it->second;
}

}  // namespace

Subspace omega_span(const FormContext& c, int n) {
  Candidates cand = pi_candidates(c, n);
  std::vector<const KeyedVec*> ptrs;
  for (const auto& v : cand.vecs) ptrs.push_back(&v);
  Columns cols = Columns::build(c, ptrs);
  std::vector<SparseVec> rows;
  for (const auto& v : cand.vecs) rows.push_back(cols.place(v));
  return Subspace::span(static_cast<int>(cols.keys.size()), rows);
}

OmegaSpace omega_d(const FormContext& c, int n) {
  if (n < 0) throw std::invalid_argument("negative degree");
  OmegaSpace s;
  s.degree = n;
  s.mode = c.mode();
  s.budget = c.budget();
  s.family = c.family();
  s.triple = c.triple().describe();

  Candidates cand = pi_candidates(c, n);
  JunkRows jr;
  if (n >= 1) jr = junk_rows(c, n);

  std::vector<const KeyedVec*> ptrs;
  for (const auto& v : cand.vecs) ptrs.push_back(&v);
  for (const auto& v : jr.q) ptrs.push_back(&v);
  s.cols = Columns::build(c, ptrs);
  int C = static_cast<int>(s.cols.keys.size());

  std::map<Word, int> ids;
  s.pi = Echelon(C);
  for (std::size_t i = 0; i < cand.words.size(); ++i) {
    SparseVec pay;
    pay.push(word_id(ids, s.words, cand.words[i]), Scalar(1));
    s.pi.insert(s.cols.place(cand.vecs[i]), std::move(pay));
  }
  s.pi.finish();

  s.junk = Echelon(C);
  if (n >= 1) {
    std::set<Key> pkeys;
    for (const auto& v : jr.p)
      for (const auto& [k, x] : v) pkeys.insert(k);
    std::map<Key, int> pidx;
    for (const auto& k : pkeys) pidx.emplace(k, static_cast<int>(pidx.size()));
    int P = static_cast<int>(pidx.size());
    Echelon big(P + C);
    for (std::size_t i = 0; i < jr.p.size(); ++i) {
      SparseVec row;
      for (const auto& [k, x] : jr.p[i]) row.e.emplace_back(pidx.at(k), x);
      std::sort(row.e.begin(), row.e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      SparseVec q = s.cols.place(jr.q[i]);
      for (const auto& [j, x] : q.e) row.e.emplace_back(P + j, x);
      SparseVec pay;
      if (!jr.dwords[i].empty()) pay.push(word_id(ids, s.words, jr.dwords[i]), Scalar(1));
      big.insert(std::move(row), std::move(pay));
    }
    for (std::size_t r = 0; r < big.rows().size(); ++r) {
      const SparseVec& row = big.rows()[r];
      if (row.lead() < P) continue;
      SparseVec q;
      for (const auto& [j, x] : row.e) q.e.emplace_back(j - P, x);
      s.junk.insert(std::move(q), big.payloads()[r]);
    }
    s.junk.finish();
  }

  s.pi_dim = s.pi.rank();
  s.junk_dim = s.junk.rank();
  for (int p : s.pi.pivots()) s.pi_vis += p >= s.cols.hidden;
  for (int p : s.junk.pivots()) s.junk_vis += p >= s.cols.hidden;
  for (const auto& row : s.junk.rows())
    if (!s.pi.contains(row)) throw Error(ErrorCode::NotWellDefined, "junk span is not contained in the form span");

  s.section = Echelon(C);
  for (std::size_t r = 0; r < s.pi.rows().size(); ++r) {
    if (s.pi.pivots()[r] < s.cols.hidden) continue;
    SparseVec v = s.pi.rows()[r];
    SparseVec pay = s.pi.payloads()[r];
    s.junk.reduce(v, &pay);
    s.section.insert(std::move(v), std::move(pay));
  }
  s.section.finish();
  s.quotient_dim = s.section.rank();
  if (s.quotient_dim != s.pi_vis - s.junk_vis)
    throw Error(ErrorCode::NotWellDefined, "windowed quotient is inconsistent");
  return s;
}

Subspace OmegaSpace::pi_span() const {
  std::vector<SparseVec> rows;
  for (std::size_t r = 0; r < pi.rows().size(); ++r)
    if (pi.pivots()[r] >= cols.hidden) rows.push_back(pi.rows()[r]);
  return Subspace::span(static_cast<int>(cols.keys.size()), rows);
}

Subspace OmegaSpace::junk_span() const {
  std::vector<SparseVec> rows;
  for (std::size_t r = 0; r < junk.rows().size(); ++r)
    if (junk.pivots()[r] >= cols.hidden) rows.push_back(junk.rows()[r]);
  return Subspace::span(static_cast<int>(cols.keys.size()), rows);
}

FormExpr OmegaSpace::preimage(const SparseVec& payload) const {
  FormExpr f(degree);
  for (const auto& [i, x] : payload.e) f.add(words[i], x);
  return f;
}

std::vector<Scalar> OmegaSpace::class_of(const KeyedVec& kv) const {
  SparseVec v = cols.place(kv);
  junk.reduce(v);
  if (!v.empty() && v.lead() < cols.hidden)
    throw Error(ErrorCode::NotWellDefined,
                "degree-" + std::to_string(degree) + " class has coordinates outside the budget window; raise budget");
  std::vector<Scalar> out(section.rank());
  for (int i = 0; i < section.rank(); ++i) out[i] = v.at(section.pivots()[i]);
  for (int i = 0; i < section.rank(); ++i)
    if (!out[i].is_zero()) axpy(v, -out[i], section.rows()[i]);
  if (!v.empty())
    throw Error(ErrorCode::NotWellDefined, "vector is not in the degree-" + std::to_string(degree) + " form span");
  return out;
}

bool OmegaSpace::is_zero_class(const KeyedVec& v) const {
  for (const auto& x : class_of(v))
    if (!x.is_zero()) return false;
  return true;
}

InducedDifferential induced_differential(const FormContext& c, const OmegaSpace& sn, const OmegaSpace& sn1) {
  if (sn1.degree != sn.degree + 1 || sn.budget != sn1.budget || sn.mode != sn1.mode)
    throw Error(ErrorCode::NotWellDefined, "induced differential needs consecutive spaces at one truncation");
  InducedDifferential d;
  std::vector<SparseVec> rows(sn.quotient_dim);
  parallel_for(sn.quotient_dim, c.parallel(), [&](int i) {
    FormExpr w = universal_d(c, sn.section_preimage(i));
    rows[i] = from_dense(sn1.class_of(c.pi_eval(w)));
  });
  d.matrix = ExactMatrix(sn1.quotient_dim, std::move(rows));
  // junk vectors are images of d, so d of their preimages vanishes
  for (std::size_t r = 0; r < sn.junk.rows().size(); ++r) {
    if (sn.junk.pivots()[r] < sn.cols.hidden) continue;
    FormExpr w = universal_d(c, sn.preimage(sn.junk.payloads()[r]));
    if (!sn1.is_zero_class(c.pi_eval(w)))
      throw Error(ErrorCode::NotWellDefined, "junk basis vector maps outside junk; raise budget");
    ++d.junk_checked;
  }
  return d;
}

int circle_oracle_dim(int window, int gen_degree, int budget, int n) {
  int K = std::min(window, budget * gen_degree);
  std::set<int> reach;
  if (n == 0) {
    for (int a = -K; a <= K; ++a) reach.insert(a);
  } else if (n == 1) {
    for (int a = -K; a <= K; ++a)
      for (int b = -K; b <= K; ++b)
        if (b != 0 && std::abs(a + b) <= K) reach.insert(a + b);
  } else {
    return 0;
  }
  return static_cast<int>(reach.size());
}

StabilizeResult stabilize(const TriplePtr& t, int n, Mode mode, int max_budget, Family fam, int min_budget) {
  StabilizeResult r;
  for (int b = min_budget; b <= max_budget; ++b) {
    int dim;
    try {
      FormContext c(t, b, mode, fam);
      dim = omega_d(c, n).quotient_dim;
    } catch (const Error&) {
      break;
    }
    r.budgets.push_back(b);
    r.dims.push_back(dim);
    if (t->kind == TripleKind::Circle)
      r.oracle.push_back(circle_oracle_dim(t->layer->window, t->layer->gen_degree, b, n));
  }
  std::size_t k = r.dims.size();
  if (k < 2)
    r.stable = false;
  else if (!r.oracle.empty())
    r.stable = r.dims[k - 1] == r.oracle[k - 1] && r.dims[k - 2] == r.oracle[k - 2];
  else
    r.stable = r.dims[k - 1] == r.dims[k - 2];
  return r;
}

}  // namespace qds
