#include "qds/conn.hpp"

namespace qds {

namespace {

std::string module_tag(const Layer& L, int n, const std::vector<Op>& p) {
  std::string s = L.describe() + "|" + std::to_string(n);
  for (const auto& x : p) s += "|" + op_str(L, x);
  return s;
}

void require_same(const FgpModule& m, const ModElem& x) {
  if (x.tag != m.tag || static_cast<int>(x.v.size()) != m.n)
    throw Error(ErrorCode::ModuleMismatch, "element does not belong to module over " + m.calc->layer().describe());
}

FormExpr form0(const FormContext& c, const Op& x) {
  FormExpr f(0);
  for (const auto& [i, v] : c.expand(x)) f.add(Word{i}, v);
  return f;
}

FormExpr class_rep(const OmegaSpace& o, const std::vector<Scalar>& cls) {
  FormExpr f(o.degree);
  for (std::size_t i = 0; i < cls.size(); ++i)
    if (!cls[i].is_zero()) f.add(o.section_preimage(static_cast<int>(i)), cls[i]);
  return f;
}

Op class_op(const Calculus& k, const OmegaSpace& o, const std::vector<Scalar>& cls) {
  return k.ctx->pi_op(class_rep(o, cls));
}

const OmegaSpace& space(const Calculus& k, int degree) {
  if (degree == 1) return k.o1;
  if (degree == 2) return k.o2;
  throw Error(ErrorCode::NotWellDefined, "module forms are kept in degrees 1 and 2");
}

std::vector<Op> mat_mul(const Layer& L, int n, const std::vector<Op>& a, const std::vector<Op>& b) {
  std::vector<Op> r(n * n, zero(L));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r[i * n + j] = add(L, r[i * n + j], op_mul(L, a[i * n + k], b[k * n + j]));
  return r;
}

std::vector<Op> mat_adjoint(const Layer& L, int n, const std::vector<Op>& a) {
  std::vector<Op> r(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i * n + j] = adjoint(L, a[j * n + i]);
  return r;
}

// p x + A x for x a vector of forms of degree k (the extension of nabla to E (x) Omega^k)
FormVec extend(const ConnectionData& c, const FormVec& x, bool differentiate) {
  const FgpModule& m = c.module;
  const FormContext& ctx = *m.calc->ctx;
  int n = m.n;
  int deg = x.empty() ? 0 : x[0].degree;
  FormVec out(n, FormExpr(deg + 1));
  std::vector<FormExpr> dx(n);
  for (int j = 0; j < n; ++j) dx[j] = differentiate ? universal_d(ctx, x[j]) : FormExpr(deg + 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!is_zero(m.at(i, j)) && !dx[j].is_zero()) out[i].add(universal_product(ctx, form0(ctx, m.at(i, j)), dx[j]));
      const auto& a = c.perturbation[i * n + j];
      bool nz = false;
      for (const auto& v : a) nz = nz || !v.is_zero();
      if (nz && !x[j].is_zero()) out[i].add(universal_product(ctx, class_rep(m.calc->o1, a), x[j]));
    }
  return out;
}

}  // namespace

CalcPtr make_calculus(const TriplePtr& t, int budget, Mode mode, bool parallel) {
  auto k = std::make_shared<Calculus>();
  k->ctx = std::make_shared<FormContext>(t, budget, mode, Family::All, parallel);
  k->o1 = omega_d(*k->ctx, 1);
  k->o2 = omega_d(*k->ctx, 2);
  return k;
}

FgpModule make_module(const CalcPtr& calc, int n, const std::vector<Op>& p) {
  const Layer& L = calc->layer();
  if (static_cast<int>(p.size()) != n * n) throw Error(ErrorCode::NotAProjection, "matrix is not n x n");
  for (const auto& x : p) check_layer(L, x);
  std::vector<Op> p2 = mat_mul(L, n, p, p), ps = mat_adjoint(L, n, p);
  for (int i = 0; i < n * n; ++i) {
    if (p2[i] != p[i])
      throw Error(ErrorCode::NotAProjection, "p^2 - p has entry (" + std::to_string(i / n) + "," +
                                                 std::to_string(i % n) + ") = " + op_str(L, sub(L, p2[i], p[i])));
    if (ps[i] != p[i])
      throw Error(ErrorCode::NotAProjection, "p* - p has entry (" + std::to_string(i / n) + "," +
                                                 std::to_string(i % n) + ") = " + op_str(L, sub(L, ps[i], p[i])));
  }
  FgpModule m;
  m.calc = calc;
  m.n = n;
  m.p = p;
  m.tag = module_tag(L, n, p);
  return m;
}

ModElem module_element(const FgpModule& m, const std::vector<Op>& a) {
  const Layer& L = m.calc->layer();
  if (static_cast<int>(a.size()) != m.n) throw Error(ErrorCode::ModuleMismatch, "vector length differs from rank");
  ModElem x;
  x.tag = m.tag;
  x.v.assign(m.n, zero(L));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) x.v[i] = add(L, x.v[i], op_mul(L, m.at(i, j), a[j]));
  return x;
}

ModElem column(const FgpModule& m, int j) {
  const Layer& L = m.calc->layer();
  std::vector<Op> e(m.n, zero(L));
  e[j] = identity(L);
  return module_element(m, e);
}

ModElem mul_right(const FgpModule& m, const ModElem& x, const Op& a) {
  require_same(m, x);
  ModElem r = x;
  for (auto& v : r.v) v = op_mul(m.calc->layer(), v, a);
  return r;
}

Op hermitian_inner(const FgpModule& m, const ModElem& x, const ModElem& y) {
  require_same(m, x);
  require_same(m, y);
  const Layer& L = m.calc->layer();
  Op r = zero(L);
  for (int j = 0; j < m.n; ++j) r = add(L, r, op_mul(L, adjoint(L, x.v[j]), y.v[j]));
  return r;
}

std::vector<std::vector<Scalar>> op_classes(const FgpModule& m, int degree, const std::vector<Op>& w) {
  const OmegaSpace& o = space(*m.calc, degree);
  std::vector<std::vector<Scalar>> out;
  for (const auto& x : w) out.push_back(o.class_of(m.calc->ctx->keyed(x)));
  return out;
}

std::vector<std::vector<Scalar>> classes(const FgpModule& m, const FormVec& w) {
  std::vector<Op> ops;
  for (const auto& f : w) ops.push_back(m.calc->ctx->pi_op(f));
  return op_classes(m, w.empty() ? 1 : w[0].degree, ops);
}

bool ConnectionData::is_grassmannian() const {
  for (const auto& a : perturbation)
    for (const auto& v : a)
      if (!v.is_zero()) return false;
  return true;
}

ConnectionData grassmannian(const FgpModule& m) {
  ConnectionData c;
  c.module = m;
  c.perturbation.assign(m.n * m.n, std::vector<Scalar>(m.calc->o1.quotient_dim));
  return c;
}

ConnectionData perturbed(const FgpModule& m, const std::vector<Op>& B) {
  const Layer& L = m.calc->layer();
  int n = m.n;
  std::vector<Op> X = mat_mul(L, n, mat_mul(L, n, m.p, B), m.p);
  std::vector<Op> Xs = mat_adjoint(L, n, X);
  ConnectionData c;
  c.module = m;
  for (int i = 0; i < n * n; ++i)
    c.perturbation.push_back(m.calc->o1.class_of(m.calc->ctx->keyed(add(L, X[i], Xs[i]))));
  return c;
}

FormVec apply_connection(const ConnectionData& c, const ModElem& x) {
  require_same(c.module, x);
  FormVec v;
  for (const auto& a : x.v) v.push_back(form0(*c.module.calc->ctx, a));
  return extend(c, v, true);
}

std::vector<std::vector<Scalar>> curvature_on(const ConnectionData& c, const ModElem& x) {
  FormVec once = apply_connection(c, x);
  return classes(c.module, extend(c, once, true));
}

std::vector<Op> curvature_ops(const ConnectionData& c) {
  int n = c.module.n;
  std::vector<Op> out(n * n);
  for (int j = 0; j < n; ++j) {
    FormVec th = extend(c, apply_connection(c, column(c.module, j)), true);
    for (int i = 0; i < n; ++i) out[i * n + j] = c.module.calc->ctx->pi_op(th[i]);
  }
  return out;
}

std::vector<std::vector<Scalar>> curvature(const ConnectionData& c) {
  int n = c.module.n;
  std::vector<std::vector<Scalar>> out(n * n);
  for (int j = 0; j < n; ++j) {
    auto col = curvature_on(c, column(c.module, j));
    for (int i = 0; i < n; ++i) out[i * n + j] = col[i];
  }
  return out;
}

std::vector<std::vector<Scalar>> grassmannian_curvature_formula(const FgpModule& m) {
  const FormContext& ctx = *m.calc->ctx;
  int n = m.n;
  std::vector<FormExpr> p0(n * n), dp(n * n);
  for (int i = 0; i < n * n; ++i) {
    p0[i] = form0(ctx, m.p[i]);
    dp[i] = universal_d(ctx, p0[i]);
  }
  std::vector<Op> out(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FormExpr acc(2);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int e = 0; e < n; ++e) {
            if (p0[i * n + a].is_zero() || dp[a * n + b].is_zero() || dp[b * n + e].is_zero() ||
                p0[e * n + j].is_zero())
              continue;
            FormExpr t = universal_product(ctx, p0[i * n + a], dp[a * n + b]);
            t = universal_product(ctx, t, dp[b * n + e]);
            acc.add(universal_product(ctx, t, p0[e * n + j]));
          }
      out[i * n + j] = ctx.pi_op(acc);
    }
  return op_classes(m, 2, out);
}

LiftedModule lift_module(const FgpModule& m, int cutoff, int budget, Mode mode, bool parallel) {
  LiftedModule lm;
  lm.base = m;
  lm.cutoff = cutoff;
  auto t = make_qds(m.calc->ctx->triple_ptr(), cutoff);
  CalcPtr k = make_calculus(t, budget, mode, parallel);
  const Layer& L = k->layer();
  std::vector<Op> pu;
  for (const auto& x : m.p) pu.push_back(qds_elem(L, x, 0, 0));
  lm.lifted = make_module(k, m.n, pu);
  return lm;
}

std::map<int, std::vector<Op>> Psi(const LiftedModule& lm, const ModElem& x) {
  require_same(lm.lifted, x);
  const Layer& B = lm.base.calc->layer();
  std::map<int, std::vector<Op>> parts;
  for (int i = 0; i < lm.lifted.n; ++i) {
    const QdsOp& q = x.v[i].qd;
    if (!q.band_keys.empty())
      throw Error(ErrorCode::ModuleMismatch, "element has a Laurent part; it is not in (p (x) u)(A (x) S)^n");
    for (std::size_t r = 0; r < q.fin_keys.size(); ++r) {
      auto [a, s] = q.fin_keys[r];
      if (a != 0) throw Error(ErrorCode::ModuleMismatch, "element is not in the range of p (x) u");
      auto it = parts.find(s);
      if (it == parts.end()) it = parts.emplace(s, std::vector<Op>(lm.base.n, zero(B))).first;
      it->second[i] = q.fin_vals[r];
    }
  }
  return parts;
}

ModElem Phi(const LiftedModule& lm, const std::map<int, std::vector<Op>>& parts) {
  const Layer& L = lm.lifted.calc->layer();
  ModElem x;
  x.tag = lm.lifted.tag;
  x.v.assign(lm.lifted.n, zero(L));
  for (const auto& [s, v] : parts)
    for (int i = 0; i < lm.lifted.n; ++i) x.v[i] = add(L, x.v[i], qds_elem(L, v[i], 0, s));
  return x;
}

ConnectionData lift_connection(const ConnectionData& c, const LiftedModule& lm) {
  if (c.module.tag != lm.base.tag) throw Error(ErrorCode::ModuleMismatch, "connection lives on another module");
  const Calculus& kb = *lm.base.calc;
  const Calculus& kl = *lm.lifted.calc;
  ConnectionData r;
  r.module = lm.lifted;
  for (const auto& a : c.perturbation) {
    Op w = class_op(kb, kb.o1, a);
    r.perturbation.push_back(kl.o1.class_of(kl.ctx->keyed(qds_elem(kl.layer(), w, 0, 0))));
  }
  return r;
}

std::vector<Op> lifted_formula(const ConnectionData& c, const LiftedModule& lm, const ModElem& x) {
  const Layer& B = lm.base.calc->layer();
  const Layer& L = lm.lifted.calc->layer();
  int n = lm.base.n;
  std::vector<Op> out(n, zero(L));
  for (const auto& [s, v] : Psi(lm, x)) {
    ModElem xs;
    xs.tag = lm.base.tag;
    xs.v = v;
    // nabla(xi_s) (x) u e_0s
    FormVec w = apply_connection(c, xs);
    for (int i = 0; i < n; ++i) out[i] = add(L, out[i], qds_elem(L, lm.base.calc->ctx->pi_op(w[i]), 0, s));
    // (p (x) u)(xi_s (x) delta(u e_0s)), with delta(u e_0s) = F [N, u e_0s] = -s F e_0s
    if (s == 0) continue;
    for (int i = 0; i < n; ++i) {
      Op acc = zero(B);
      for (int j = 0; j < n; ++j) acc = add(B, acc, op_mul(B, lm.base.at(i, j), mul_F(B, v[j])));
      out[i] = add(L, out[i], qds_elem(L, scale(B, Scalar(-s), acc), 0, s));
    }
  }
  return out;
}

std::vector<std::vector<Scalar>> psi_map(const LiftedModule& lm, const std::vector<std::vector<Scalar>>& theta) {
  const Calculus& kb = *lm.base.calc;
  const Calculus& kl = *lm.lifted.calc;
  std::vector<std::vector<Scalar>> out;
  for (const auto& t : theta) {
    Op w = class_op(kb, kb.o2, t);
    out.push_back(kl.o2.class_of(kl.ctx->keyed(qds_elem(kl.layer(), w, 0, 0))));
  }
  return out;
}

int leibniz_failures(const ConnectionData& c, const std::vector<ModElem>& xs, const std::vector<Op>& as) {
  const FgpModule& m = c.module;
  const Layer& L = m.calc->layer();
  int bad = 0;
  for (const auto& x : xs)
    for (const auto& a : as) {
      auto lhs = classes(m, apply_connection(c, mul_right(m, x, a)));
      FormVec w = apply_connection(c, x);
      Op da = commutator_D(L, a);
      std::vector<Op> rhs;
      for (int i = 0; i < m.n; ++i)
        rhs.push_back(add(L, op_mul(L, m.calc->ctx->pi_op(w[i]), a), op_mul(L, x.v[i], da)));
      if (lhs != op_classes(m, 1, rhs)) ++bad;
    }
  return bad;
}

int compatibility_failures(const ConnectionData& c, const std::vector<ModElem>& xs) {
  const FgpModule& m = c.module;
  const Layer& L = m.calc->layer();
  const FormContext& ctx = *m.calc->ctx;
  int bad = 0;
  std::vector<std::vector<Op>> nab;
  for (const auto& x : xs) {
    std::vector<Op> w;
    for (const auto& f : apply_connection(c, x)) w.push_back(ctx.pi_op(f));
    nab.push_back(std::move(w));
  }
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = 0; b < xs.size(); ++b) {
      Op lhs = zero(L);
      for (int j = 0; j < m.n; ++j) {
        lhs = add(L, lhs, op_mul(L, adjoint(L, xs[a].v[j]), nab[b][j]));
        lhs = sub(L, lhs, op_mul(L, adjoint(L, nab[a][j]), xs[b].v[j]));
      }
      Op rhs = commutator_D(L, hermitian_inner(m, xs[a], xs[b]));
      if (!m.calc->o1.is_zero_class(ctx.keyed(sub(L, lhs, rhs)))) ++bad;
    }
  return bad;
}

int linearity_failures(const ConnectionData& c, const std::vector<ModElem>& xs, const std::vector<Op>& as) {
  const FgpModule& m = c.module;
  const Layer& L = m.calc->layer();
  int bad = 0;
  for (const auto& x : xs) {
    auto th = curvature_on(c, x);
    for (const auto& a : as) {
      std::vector<Op> rhs;
      for (const auto& cls : th) rhs.push_back(op_mul(L, class_op(*m.calc, m.calc->o2, cls), a));
      if (curvature_on(c, mul_right(m, x, a)) != op_classes(m, 2, rhs)) ++bad;
    }
  }
  return bad;
}

json class_matrix_json(const std::vector<std::vector<Scalar>>& m, int n) {
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) {
      json e = json::array();
      for (const auto& v : m[i * n + j]) e.push_back(v.str());
      row.push_back(e);
    }
    rows.push_back(row);
  }
  return rows;
}

json connection_json(const ConnectionData& c) {
  const FgpModule& m = c.module;
  json p = json::array();
  for (const auto& x : m.p) p.push_back(op_str(m.calc->layer(), x));
  return {{"layer", m.calc->layer().describe()},
          {"rank", m.n},
          {"projection", p},
          {"budget", m.calc->ctx->budget()},
          {"mode", mode_name(m.calc->ctx->mode())},
          {"omega1_dim", m.calc->o1.quotient_dim},
          {"omega2_dim", m.calc->o2.quotient_dim},
          {"grassmannian", c.is_grassmannian()},
          {"perturbation", class_matrix_json(c.perturbation, m.n)}};
}

Check verify_diagram(const std::string& id, const ConnectionData& c, const LiftedModule& lm) {
  Check ch;
  ch.id = id;
  ch.anchor =
      "Theorem extension thm: \"f is the map which sends any compatible connection to its associated curvature\"; "
      "Prop extended curvature: \"Sigma Theta(p(0,...,a_i,...,0)) (x) uT_i\"";
  ConnectionData lc = lift_connection(c, lm);
  auto lhs = curvature(lc);
  auto rhs = psi_map(lm, curvature(c));
  int n = c.module.n;
  bool zero = true;
  for (const auto& e : lhs)
    for (const auto& v : e) zero = zero && v.is_zero();
  ch.parameters = {{"base", c.module.calc->layer().describe()},
                   {"lifted", lm.lifted.calc->layer().describe()},
                   {"rank", n},
                   {"grassmannian", c.is_grassmannian()}};
  ch.expected = {{"psi_of_base_curvature", class_matrix_json(rhs, n)}};
  ch.computed = {{"curvature_of_lift", class_matrix_json(lhs, n)},
                 {"lifted_omega2_dim", lm.lifted.calc->o2.quotient_dim}};
  ch.pass = lhs == rhs;
  if (c.is_grassmannian()) {
    // for the Grassmannian both curvatures are universal expressions in p and p (x) u: compare operators
    std::vector<Op> top = curvature_ops(lc), bop = curvature_ops(c);
    const Layer& L = lm.lifted.calc->layer();
    bool op_eq = true, op_zero = true;
    for (int i = 0; i < n * n; ++i) {
      op_eq = op_eq && top[i] == qds_elem(L, bop[i], 0, 0);
      op_zero = op_zero && is_zero(bop[i]);
    }
    ch.expected["operator_level_equal"] = true;
    ch.computed["operator_level_equal"] = op_eq;
    ch.computed["operator_level_zero"] = op_zero;
    ch.pass = ch.pass && op_eq;
  }
  if (zero) ch.note = "degenerate: both sides vanish because Omega^2 of the suspension is zero at this truncation";
  return ch;
}

std::vector<Op> bott_projection(const Layer& C) {
  auto mono = [](int k, Scalar v) { return LaurentPoly::monomial(k, v); };
  Scalar h = Scalar::frac(1, 2), q = Scalar::frac(1, 4);
  Scalar iq = Scalar::i() * q;
  LaurentPoly p11 = mono(0, h) + mono(1, q) + mono(-1, q);
  LaurentPoly p22 = mono(0, h) + mono(1, -q) + mono(-1, -q);
  LaurentPoly p12 = mono(1, -iq) + mono(-1, iq);  // sin / 2 = (z - z^-1) / 4i
  return {circle_mult(C, p11), circle_mult(C, p12), circle_mult(C, p12), circle_mult(C, p22)};
}

std::vector<Op> u_diagonal_projection(const Layer& T) {
  Op u = qds_elem(T, identity(*T.inner), 0, 0);
  return {u, zero(T), zero(T), identity(T)};
}

}  // namespace qds
