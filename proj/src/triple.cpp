#include "qds/triple.hpp"

#include <map>

namespace qds {

const char* family_name(Family f) {
  switch (f) {
    case Family::All: return "all";
    case Family::Finite: return "finite";
    case Family::Laurent: return "laurent";
  }
  return "?";
}

TriplePtr make_point() {
  auto t = std::make_shared<TripleDescriptor>();
  t->kind = TripleKind::Point;
  t->layer = point_layer();
  return t;
}

TriplePtr make_circle(int window, int gen_degree) {
  auto t = std::make_shared<TripleDescriptor>();
  t->kind = TripleKind::Circle;
  t->layer = circle_layer(window, gen_degree);
  for (int j = 1; j <= gen_degree; ++j)
    for (int s : {j, -j}) {
      t->generators.push_back(circle_mult(*t->layer, LaurentPoly::monomial(s)));
      t->generator_names.push_back("z^" + std::to_string(s));
    }
  return t;
}

TriplePtr make_qds(const TriplePtr& inner, int cutoff) {
  auto t = std::make_shared<TripleDescriptor>();
  t->kind = TripleKind::Qds;
  t->layer = qds_lift(inner->layer, cutoff);
  t->inner = inner;
  t->inner_conditions = check_conditions(*inner);
  const Layer& L = *t->layer;
  const Layer& I = *inner->layer;
  t->generators.push_back(qds_elem(L, identity(I), 0, 0));
  t->generator_names.push_back("1(x)u");
  for (std::size_t g = 0; g < inner->generators.size(); ++g) {
    t->generators.push_back(qds_elem(L, inner->generators[g], 0, 0));
    t->generator_names.push_back(inner->generator_names[g] + "(x)u");
  }
  t->generators.push_back(qds_band(L, identity(I), 1));
  t->generator_names.push_back("l");
  t->generators.push_back(qds_band(L, identity(I), -1));
  t->generator_names.push_back("l*");
  return t;
}

TriplePtr make_doubled(const TriplePtr& inner) {
  auto t = std::make_shared<TripleDescriptor>();
  t->kind = TripleKind::Doubled;
  t->layer = pauli_double(inner->layer);
  t->inner = inner;
  t->unital = inner->unital;
  const Layer& I = *inner->layer;
  for (std::size_t g = 0; g < inner->generators.size(); ++g) {
    t->generators.push_back(doubled(*t->layer, inner->generators[g], zero(I)));
    t->generator_names.push_back(inner->generator_names[g] + "(x)I");
  }
  return t;
}

SpanningSet spanning_set(const TripleDescriptor& t, int budget, Family fam) {
  if (budget < 1) throw Error(ErrorCode::BudgetTooSmall, "word budget must be at least 1");
  SpanningSet s;
  s.budget = budget;
  s.family = fam;
  const Layer& L = *t.layer;
  switch (t.kind) {
    case TripleKind::Point:
      s.elems.push_back(identity(L));
      s.names.push_back("1");
      break;
    case TripleKind::Circle: {
      int K = budget * L.gen_degree;
      if (K > L.window)
        throw Error(ErrorCode::WindowOverflow, "budget " + std::to_string(budget) + " reaches degree " +
                                                   std::to_string(K) + " beyond Fourier window " +
                                                   std::to_string(L.window) + "; raise --fourier-window");
      s.elems.push_back(identity(L));
      s.names.push_back("1");
      for (int k = 1; k <= K; ++k)
        for (int d : {k, -k}) {
          s.elems.push_back(circle_mult(L, LaurentPoly::monomial(d)));
          s.names.push_back("z^" + std::to_string(d));
        }
      break;
    }
    case TripleKind::Qds: {
      const Layer& I = *L.inner;
      int m = L.cutoff;
      if (fam != Family::Finite) {
        s.elems.push_back(identity(L));
        s.names.push_back("1");
        for (int k = 1; k <= m; ++k) {
          s.elems.push_back(qds_band(L, identity(I), k));
          s.names.push_back("l^" + std::to_string(k));
        }
        for (int k = 1; k <= m; ++k) {
          s.elems.push_back(qds_band(L, identity(I), -k));
          s.names.push_back("l*^" + std::to_string(k));
        }
      } else {
        s.unital = false;
      }
      if (fam != Family::Laurent) {
        SpanningSet in = spanning_set(*t.inner, budget, Family::All);
        for (std::size_t b = 0; b < in.elems.size(); ++b)
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
              s.elems.push_back(qds_elem(L, in.elems[b], i, j));
              s.names.push_back(in.names[b] + "(x)e(" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
      }
      break;
    }
    case TripleKind::Doubled: {
      SpanningSet in = spanning_set(*t.inner, budget, fam);
      s.unital = in.unital;
      for (std::size_t b = 0; b < in.elems.size(); ++b) {
        s.elems.push_back(doubled(L, in.elems[b], zero(*L.inner)));
        s.names.push_back(in.names[b] + "(x)I");
      }
      break;
    }
  }
  return s;
}

namespace {
Subspace keyed_span(const std::vector<KeyedVec>& vs, std::map<Key, int>& index) {
  for (const auto& v : vs)
    for (const auto& [k, x] : v) index.emplace(k, 0);
  int c = 0;
  for (auto& [k, i] : index) i = c++;
  std::vector<SparseVec> rows;
  for (const auto& v : vs) {
    SparseVec r;
    for (const auto& [k, x] : v) r.push(index.at(k), x);
    rows.push_back(std::move(r));
  }
  return Subspace::span(c, rows);
}
}  // namespace

ConditionReport check_conditions(const TripleDescriptor& t, int budget) {
  ConditionReport r;
  const Layer& L = *t.layer;
  Op F = sign_op(L);
  for (std::size_t g = 0; g < t.generators.size(); ++g) {
    Op c = commutator_D(L, t.generators[g]);
    Op x = sub(L, op_mul(L, c, F), op_mul(L, F, c));
    bool ok = is_compact(L, x);
    r.condition_A = r.condition_A && ok;
    r.witnesses.push_back(t.generator_names[g] + ": " + (ok ? "compact" : "NOT compact") + " " + op_str(L, x));
  }
  SpanningSet s = spanning_set(t, budget);
  std::vector<KeyedVec> a, fa;
  for (const auto& e : s.elems) {
    a.push_back(coords(L, e, Mode::Bounded));
    fa.push_back(coords(L, mul_F(L, e), Mode::Bounded));
  }
  std::vector<KeyedVec> all = a;
  all.insert(all.end(), fa.begin(), fa.end());
  std::map<Key, int> index;
  keyed_span(all, index);
  auto sub_span = [&](const std::vector<KeyedVec>& vs) {
    std::vector<SparseVec> rows;
    for (const auto& v : vs) {
      SparseVec row;
      for (const auto& [k, x] : v) row.push(index.at(k), x);
      rows.push_back(std::move(row));
    }
    return Subspace::span(static_cast<int>(index.size()), rows);
  };
  int inter = intersect(sub_span(a), sub_span(fa)).dim();
  r.f_intersection_trivial = inter == 0;
  r.notes.push_back("dim(F.A cap A) = " + std::to_string(inter) + " at budget " + std::to_string(budget));
  if (t.kind == TripleKind::Qds || t.kind == TripleKind::Point)
    r.notes.push_back("F.A cap A on a layer with F = F(x)1 is a diagnostic only");
  r.notes.push_back("Condition (B) is a structural declaration: commutators stay inside the layered grammar");
  return r;
}

}  // namespace qds
