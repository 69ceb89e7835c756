#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "qds/lemmas.hpp"
#include "qds/suite.hpp"

using namespace qds;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void records(const std::vector<Check>& cs) {
    for (const auto& c : cs) require(c.pass, c.id + " computed " + c.computed.dump());
  }
};

int dim_of(const std::vector<Check>& cs, const std::string& id, const char* field = "omega_dim") {
  for (const auto& c : cs)
    if (c.id == id) return c.computed.at(field).get<int>();
  return -1;
}

Outcome c1() {
  Outcome o;
  auto cs = verify_s_calculus(6, 2);
  o.records(cs);
  std::vector<int> want = {36, 36, 0, 0};
  for (int n = 0; n < 4; ++n)
    o.require(dim_of(cs, "s_calculus.n" + std::to_string(n)) == want[n], "dim Omega^" + std::to_string(n));
  return o;
}

Outcome c2() {
  Outcome o;
  auto cs = verify_laurent(6);
  o.records(cs);
  std::vector<int> want = {13, 13, 0};
  for (int n = 0; n < 3; ++n)
    o.require(dim_of(cs, "laurent.n" + std::to_string(n)) == want[n], "dim Omega^" + std::to_string(n));
  return o;
}

Outcome c3() {
  Outcome o;
  for (int n = 1; n <= 5; ++n) {
    Check z = witness_suite(WitnessFamily::MatrixZeta, n, n + 3);
    o.records({z});
    o.require(!z.computed["pi_d_zeta"].empty(), "pi(d zeta) nonzero");
  }
  // the displayed case table
  std::vector<long> table = {-2, -4, 2, 4, -2};
  for (int n = 1; n <= 5; ++n) {
    Check w = witness_suite(WitnessFamily::CircleOmega, n, 6);
    o.records({w});
    const json& v = w.computed["pi_d_omega"];
    o.require(v.size() == 1 && v[0]["value"] == std::to_string(table[n - 1]),
              "pi(d omega_" + std::to_string(n) + ") = " + std::to_string(table[n - 1]));
  }
  return o;
}

Outcome c4() {
  Outcome o;
  auto cs = verify_circle(8, 1, 3);
  o.records(cs);
  o.require(dim_of(cs, "circle.n0") == circle_oracle_dim(8, 1, 3, 0), "Omega^0 = oracle");
  o.require(dim_of(cs, "circle.n1") == circle_oracle_dim(8, 1, 3, 1), "Omega^1 = oracle");
  o.require(dim_of(cs, "circle.n2") == 0, "Omega^2 = 0");
  return o;
}

Outcome c5() {
  Outcome o;
  for (int n = 0; n <= 2; ++n) {
    o.records(verify_decomposition(make_point(), n, 5, 1, Mode::Bounded));
    o.records(verify_decomposition(make_circle(6, 1), n, 3, 2, Mode::Calkin));
  }
  auto tp = verify_qds_theorem(make_point(), 5, 1, Mode::Bounded);
  auto tc = verify_qds_theorem(make_circle(6, 1), 3, 2, Mode::Calkin);
  o.records(tp);
  o.records(tc);
  o.require(tp.size() == 4 && tc.size() == 4, "theorem records (1)-(4) for both bases");
  return o;
}

Outcome c6() {
  Outcome o;
  o.records(verify_corollary(3, 3));
  return o;
}

Outcome c7() {
  Outcome o;
  o.records(verify_pauli(4, 1, 2));
  return o;
}

Outcome c8() {
  Outcome o;
  auto cs = verify_conditions(6, 4);
  o.records(cs);
  o.require(cs.size() == 3, "three triples checked");
  return o;
}

Outcome c9() {
  Outcome o;
  auto bt = make_circle(16, 1);
  o.records(verify_connections({"bott", bt, bott_projection(*bt->layer), 5, Mode::Calkin, 2, 5, 2}, 1));
  auto tt = make_qds(make_point(), 3);
  o.records(verify_connections({"u_diagonal", tt, u_diagonal_projection(*tt->layer), 1, Mode::Bounded, 3, 1, 2}, 2));
  // classical circle: Omega^2 = 0 forces every curvature to vanish
  auto c8 = make_circle(8, 1);
  CalcPtr k = make_calculus(c8, 3, Mode::Calkin);
  FgpModule m = make_module(k, 2, bott_projection(*c8->layer));
  bool zero = true;
  for (const auto& e : curvature(grassmannian(m)))
    for (const auto& v : e) zero = zero && v.is_zero();
  o.require(k->o2.quotient_dim == 0 && zero, "curvature over circle(8,1) vanishes");
  return o;
}

std::pair<int, std::string> run_cli(const std::string& args) {
  std::string cmd = std::string(QDSCALC_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

Outcome c10() {
  Outcome o;
  auto a = run_cli("verify --jobs 1");
  auto b = run_cli("verify --jobs 1");
  auto c = run_cli("verify --jobs 4");
  o.require(!a.second.empty(), "report produced");
  o.require(a.second == b.second, "consecutive runs byte-identical");
  o.require(a.second == c.second, "--jobs 1 and --jobs 4 byte-identical");
  o.require(a.first == b.first && a.first == c.first, "identical exit codes");
  o.notes.push_back("report bytes: " + std::to_string(a.second.size()) + ", exit code " + std::to_string(a.first));
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Toeplitz-layer S-calculus dims (36, 36, 0, 0)", c1},
      {"Laurent calculus dims (13, 13, 0)", c2},
      {"zeta and omega witness values", c3},
      {"circle classical calculus vs reachable-monomial oracle", c4},
      {"QDS decomposition and theorem (point m=5; circle(6,1) m=3 p=2)", c5},
      {"iterated corollary, k = 2 over the point", c6},
      {"Pauli doubling", c7},
      {"condition stability", c8},
      {"connections and the curvature square", c9},
      {"determinism across runs and --jobs", c10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("error: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%.2f", secs);
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ["
              << tbuf << " s]\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
    if (!o.pass) ++failed;
  }
  std::cout << (criteria.size() - failed) << " of " << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
