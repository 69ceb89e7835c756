#include "qds/suite.hpp"

#include <omp.h>

#include <algorithm>
#include <random>

#include "qds/lemmas.hpp"

namespace qds {

namespace {

const char* kAnchorConnection =
    "Definition: \"A compatible connection on E is a C-linear mapping\" satisfying the Leibniz rule and "
    "\"<nabla xi, eta> = sum omega_j^* <xi_j, eta>_A\"";
const char* kAnchorGrassmannian =
    "Lemma preservation of Grassmannian: \"If nabla is the Grassmannian connection on E, then nabla~ is the "
    "Grassmannian connection on E~\"";
const char* kAnchorExtended =
    "Proposition extended connection and Lemma imp iso: \"Psi : (p (x) u)(Omega_D^1 (x) S)^n --> p(Omega_D^1)^n "
    "(x) uS\"";
const char* kAnchorCompatible =
    "Lemma extended compatibility: \"The connection nabla~ of Proposition (extended connection) is compatible with "
    "the Hermitian structure\"";
const char* kAnchorEmbedding =
    "Theorem extension thm: \"We have an one-one affine morphism phi~_con : Con(E) --> Con(E~) which preserves the "
    "Grassmannian conections\"";

Check make_check(const std::string& id, const char* anchor, const json& params, json expected, json computed,
                 bool pass) {
  Check ch;
  ch.id = id;
  ch.anchor = anchor;
  ch.parameters = params;
  ch.expected = std::move(expected);
  ch.computed = std::move(computed);
  ch.pass = pass;
  return ch;
}

// portable draws: raw mt19937 output is fixed by the standard, distributions are not
Scalar draw(std::mt19937& rng, bool real) {
  auto q = [&] { return Scalar::frac(static_cast<long>(rng() % 11) - 5, static_cast<long>(rng() % 4) + 1); };
  if (real) return q();
  return q() + Scalar::i() * q();
}

std::vector<Op> random_hermitian(const Layer& L, int n, std::mt19937& rng) {
  std::vector<Scalar> h(n * n);
  for (int i = 0; i < n; ++i) {
    h[i * n + i] = draw(rng, true);
    for (int j = i + 1; j < n; ++j) {
      h[i * n + j] = draw(rng, false);
      h[j * n + i] = h[i * n + j].conj();
    }
  }
  std::vector<Op> B;
  for (const auto& x : h) B.push_back(scalar_op(L, x));
  return B;
}

json case_params(const ConnectionCase& cc) {
  return {{"base", cc.base->describe()}, {"rank", cc.rank},         {"budget", cc.budget},
          {"mode", mode_name(cc.mode)},  {"lift_cutoff", cc.lift_cutoff}, {"lift_budget", cc.lift_budget}};
}

}  // namespace

std::vector<Check> verify_connections(const ConnectionCase& cc, unsigned seed, bool parallel) {
  std::vector<Check> out;
  const std::string pre = "connections." + cc.name + ".";
  json params = case_params(cc);
  params["seed"] = seed;
  std::mt19937 rng(seed);

  CalcPtr calc = make_calculus(cc.base, cc.budget, cc.mode, parallel);
  FgpModule m = make_module(calc, cc.rank, cc.projection);
  const Layer& L = calc->layer();
  const SpanningSet& sp = calc->ctx->spanning();
  int second = L.kind == LayerKind::Qds ? L.cutoff + 1 : 2;
  std::vector<Op> as = {sp.elems[1], sp.elems[second]};
  std::vector<ModElem> xs;
  for (int j = 0; j < cc.rank; ++j) xs.push_back(column(m, j));
  std::vector<Op> mixed(cc.rank);
  for (int j = 0; j < cc.rank; ++j) mixed[j] = as[j % 2];
  xs.push_back(module_element(m, mixed));

  ConnectionData g = grassmannian(m);
  ConnectionData c = perturbed(m, random_hermitian(L, cc.rank, rng));

  int leib = leibniz_failures(g, xs, as) + leibniz_failures(c, xs, as);
  int comp = compatibility_failures(g, xs) + compatibility_failures(c, xs);
  int lin = linearity_failures(c, xs, as);
  json samples = {{"elements", xs.size()}, {"algebra_samples", as.size()}};
  out.push_back(make_check(pre + "leibniz", kAnchorConnection, params, {{"failures", 0}},
                           {{"failures", leib}, {"samples", samples}}, leib == 0));
  out.push_back(make_check(pre + "compatibility", kAnchorConnection, params, {{"failures", 0}},
                           {{"failures", comp}, {"samples", samples}}, comp == 0));
  out.push_back(make_check(pre + "linearity", kAnchorConnection, params, {{"failures", 0}},
                           {{"failures", lin}, {"samples", samples}}, lin == 0));

  auto curv = curvature(g);
  auto formula = grassmannian_curvature_formula(m);
  out.push_back(make_check(pre + "grassmannian_curvature", kAnchorConnection, params,
                           {{"p_dp_dp", class_matrix_json(formula, m.n)}},
                           {{"curvature", class_matrix_json(curv, m.n)}, {"omega2_dim", calc->o2.quotient_dim}},
                           curv == formula));

  LiftedModule lm = lift_module(m, cc.lift_cutoff, cc.lift_budget, cc.mode, parallel);
  ConnectionData lg = lift_connection(g, lm), lc = lift_connection(c, lm);
  out.push_back(make_check(pre + "grassmannian_preserved", kAnchorGrassmannian, params, {{"grassmannian", true}},
                           {{"grassmannian", lg.is_grassmannian()},
                            {"lifted_omega1_dim", lm.lifted.calc->o1.quotient_dim}},
                           lg.is_grassmannian()));

  std::map<int, std::vector<Op>> parts;
  parts[0] = xs[0].v;
  parts[1] = xs.back().v;
  ModElem xt = Phi(lm, parts);
  bool psi_phi = Psi(lm, xt) == parts;
  bool phi_psi = Phi(lm, Psi(lm, column(lm.lifted, 0))).v == column(lm.lifted, 0).v;
  out.push_back(make_check(pre + "psi_phi", kAnchorExtended, params,
                           {{"psi_after_phi_is_identity", true}, {"phi_after_psi_is_identity", true}},
                           {{"psi_after_phi_is_identity", psi_phi}, {"phi_after_psi_is_identity", phi_psi}},
                           psi_phi && phi_psi));

  const SpanningSet& ls = lm.lifted.calc->ctx->spanning();
  std::vector<Op> las = {ls.elems[lm.cutoff + 1], ls.elems[2 * lm.cutoff + 2]};
  std::vector<ModElem> lxs = {xt, column(lm.lifted, 0)};
  for (auto [tag, base, lifted] : {std::tuple{"grassmannian", &g, &lg}, std::tuple{"perturbed", &c, &lc}}) {
    auto lhs = classes(lm.lifted, apply_connection(*lifted, xt));
    auto rhs = op_classes(lm.lifted, 1, lifted_formula(*base, lm, xt));
    auto row = [](const std::vector<std::vector<Scalar>>& v) {
      json r = json::array();
      for (const auto& e : v) {
        json x = json::array();
        for (const auto& s : e) x.push_back(s.str());
        r.push_back(x);
      }
      return r;
    };
    out.push_back(make_check(pre + "lift_formula." + tag, kAnchorExtended, params, {{"formula", row(rhs)}},
                             {{"lifted_connection", row(lhs)}}, lhs == rhs));
    int lb = leibniz_failures(*lifted, lxs, las);
    int lcmp = compatibility_failures(*lifted, lxs);
    out.push_back(make_check(pre + "lifted_axioms." + tag, kAnchorCompatible, params,
                             {{"leibniz_failures", 0}, {"compatibility_failures", 0}},
                             {{"leibniz_failures", lb}, {"compatibility_failures", lcmp}}, lb == 0 && lcmp == 0));
  }

  json pairs = json::array();
  bool inj = true, any_distinct = false;
  for (int k = 0; k < 5; ++k) {
    ConnectionData c1 = perturbed(m, random_hermitian(L, cc.rank, rng));
    ConnectionData c2 = perturbed(m, random_hermitian(L, cc.rank, rng));
    bool base_diff = c1.perturbation != c2.perturbation;
    bool lift_diff = lift_connection(c1, lm).perturbation != lift_connection(c2, lm).perturbation;
    any_distinct = any_distinct || base_diff;
    inj = inj && (!base_diff || lift_diff);
    pairs.push_back({{"base_distinct", base_diff}, {"lifts_distinct", lift_diff}});
  }
  out.push_back(make_check(pre + "injectivity", kAnchorEmbedding, params,
                           {{"distinct_connections_have_distinct_lifts", true}},
                           {{"distinct_connections_have_distinct_lifts", inj}, {"pairs", pairs}}, inj && any_distinct));

  Check dg = verify_diagram(pre + "diagram.grassmannian", g, lm);
  Check dp = verify_diagram(pre + "diagram.perturbed", c, lm);
  dg.parameters.update(params);
  dp.parameters.update(params);
  out.push_back(dg);
  out.push_back(dp);
  return out;
}

std::vector<SuiteTask> suite_tasks(const RunConfig& c) {
  std::vector<SuiteTask> tasks;
  int cut = cutoff_at(c, 0);
  int W = c.fourier_window, g = c.gen_degree, p = c.word_budget;
  auto add = [&](const std::string& suite, const std::string& name, std::function<std::vector<Check>()> f) {
    tasks.push_back({suite, name, std::move(f)});
  };
  for (const auto& s : c.suites) {
    if (s == "s-lemmas") {
      add(s, "s_calculus", [=] { return verify_s_calculus(cut, 2); });
    } else if (s == "laurent") {
      add(s, "laurent", [=] { return verify_laurent(cut); });
    } else if (s == "witnesses") {
      for (int n = 1; n <= 5; ++n)
        add(s, "witness.zeta.n" + std::to_string(n),
            [=] { return std::vector<Check>{witness_suite(WitnessFamily::MatrixZeta, n, std::max(cut, n + 3))}; });
      for (int n = 1; n <= 5; ++n)
        add(s, "witness.omega.n" + std::to_string(n),
            [=] { return std::vector<Check>{witness_suite(WitnessFamily::CircleOmega, n, cut)}; });
    } else if (s == "circle") {
      add(s, "circle", [=] { return verify_circle(W, g, p); });
    } else if (s == "decomposition") {
      for (int n = 0; n <= 2; ++n)
        add(s, "decomposition.point.n" + std::to_string(n),
            [=] { return verify_decomposition(make_point(), n, 5, 1, Mode::Bounded); });
      for (int n = 0; n <= 2; ++n)
        add(s, "decomposition.circle.n" + std::to_string(n),
            [=] { return verify_decomposition(make_circle(6, 1), n, 3, 2, Mode::Calkin); });
    } else if (s == "theorem") {
      add(s, "theorem.point", [] { return verify_qds_theorem(make_point(), 5, 1, Mode::Bounded); });
      add(s, "theorem.circle", [] { return verify_qds_theorem(make_circle(6, 1), 3, 2, Mode::Calkin); });
    } else if (s == "corollary") {
      add(s, "corollary", [] { return verify_corollary(3, 3); });
    } else if (s == "pauli") {
      add(s, "pauli", [] { return verify_pauli(4, 1, 2); });
    } else if (s == "conditions") {
      add(s, "conditions", [] { return verify_conditions(6, 4); });
    } else if (s == "connections") {
      add(s, "connections.bott", [] {
        auto t = make_circle(16, 1);
        return verify_connections({"bott", t, bott_projection(*t->layer), 5, Mode::Calkin, 2, 5, 2}, 1);
      });
      add(s, "connections.u_diagonal", [] {
        auto t = make_qds(make_point(), 3);
        return verify_connections({"u_diagonal", t, u_diagonal_projection(*t->layer), 1, Mode::Bounded, 3, 1, 2}, 2);
      });
    }
  }
  return tasks;
}

Report run_verify(const RunConfig& c, bool parallel) {
  validate(c);
  std::vector<SuiteTask> tasks = suite_tasks(c);
  std::vector<std::vector<Check>> results(tasks.size());
  int count = static_cast<int>(tasks.size());
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int i = 0; i < count; ++i) {
    try {
      results[i] = tasks[i].run();
    } catch (const std::exception& e) {
      Check ch;
      ch.id = tasks[i].name + ".error";
      ch.anchor = "";
      ch.parameters = {{"suite", tasks[i].suite}};
      ch.expected = {{"error", nullptr}};
      ch.computed = {{"error", e.what()}};
      ch.pass = false;
      results[i] = {ch};
    }
  }
  Report r;
  r.config = config_json(c);
  r.config_hash = config_hash(c);
  for (auto& v : results)
    for (auto& ch : v) r.checks.push_back(std::move(ch));
  return r;
}

std::string artifact_key(const RunConfig& c, const std::string& command, const json& args) {
  return sha256_hex(json{{"command", command}, {"config", config_json(c)}, {"args", args}}.dump());
}

namespace {

json keyed(const KeyedVec& v) {
  json out = json::array();
  for (const auto& [k, x] : v) out.push_back({{"key", k}, {"value", x.str()}});
  return out;
}

json artifact_head(const RunConfig& c, const std::string& command) {
  return {{"schema", "qds-" + command + "/1"},
          {"index_base", 0},
          {"config", config_json(c)},
          {"config_hash", config_hash(c)},
          {"environment", environment_stamp()}};
}

}  // namespace

json compute_artifact(const RunConfig& c, const std::string& target, int degree) {
  validate(c);
  if (target == "connection-lift") return lift_artifact(c);
  if (target != "omega" && target != "junk")
    throw Error(ErrorCode::ConfigInvalid, "unknown compute target '" + target + "'");
  if (degree < 0) throw Error(ErrorCode::ConfigInvalid, "degree must be non-negative");
  TriplePtr t = config_triple(c);
  FormContext ctx(t, c.word_budget, c.mode);
  OmegaSpace o = omega_d(ctx, degree);
  json a = artifact_head(c, "compute");
  a["target"] = target;
  a["degree"] = degree;
  a["triple"] = t->describe();
  a["spanning_set"] = ctx.spanning().names;
  a["quotient_dim"] = o.quotient_dim;
  a["pi_dim"] = o.pi_vis;
  a["junk_dim"] = o.junk_vis;
  a["pi_dim_unwindowed"] = o.pi_dim;
  a["junk_dim_unwindowed"] = o.junk_dim;
  json basis = json::array();
  if (target == "omega") {
    for (int i = 0; i < o.quotient_dim; ++i)
      basis.push_back({{"vector", keyed(o.section_vector(i))}, {"preimage", ctx.form_str(o.section_preimage(i))}});
  } else {
    for (std::size_t i = 0; i < o.junk.rows().size(); ++i)
      basis.push_back({{"vector", keyed(o.cols.unplace(o.junk.rows()[i]))},
                       {"preimage", ctx.form_str(o.preimage(o.junk.payloads()[i]))}});
  }
  a["basis"] = basis;
  return a;
}

json lift_artifact(const RunConfig& c) {
  validate(c);
  TriplePtr t = config_triple(c);
  CalcPtr calc = make_calculus(t, c.word_budget, c.mode);
  const Layer& L = calc->layer();
  std::vector<Op> p;
  int n = 2;
  std::string projection;
  if (L.kind == LayerKind::Circle) {
    p = bott_projection(L);
    projection = "bott";
  } else if (L.kind == LayerKind::Qds) {
    p = u_diagonal_projection(L);
    projection = "u_diagonal";
  } else {
    n = 1;
    p = {identity(L)};
    projection = "free_rank_one";
  }
  FgpModule m = make_module(calc, n, p);
  int cutoff = cutoff_at(c, c.qds_iterations);
  LiftedModule lm = lift_module(m, cutoff, c.word_budget, c.mode);
  json a = artifact_head(c, "lift");
  a["projection"] = projection;
  a["lift_cutoff"] = cutoff;
  json cons = json::array();
  std::vector<ConnectionData> list;
  list.push_back(grassmannian(m));
  if (L.kind != LayerKind::Point) {
    std::mt19937 rng(7);
    list.push_back(perturbed(m, random_hermitian(L, n, rng)));
  }
  for (const auto& con : list) {
    ConnectionData lc = lift_connection(con, lm);
    Check d = verify_diagram("diagram", con, lm);
    cons.push_back({{"base", connection_json(con)},
                    {"lifted", connection_json(lc)},
                    {"base_curvature", class_matrix_json(curvature(con), n)},
                    {"lifted_curvature", class_matrix_json(curvature(lc), n)},
                    {"diagram", to_json(d)}});
  }
  a["connections"] = cons;
  return a;
}

}  // namespace qds
