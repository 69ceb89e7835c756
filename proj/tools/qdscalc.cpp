#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qds/suite.hpp"

using namespace qds;

namespace {

struct Flags {
  std::string config_file, base, mode, suites, cutoffs, out, cache_dir;
  int window = 0, gen_degree = 0, qds_iterations = -1, budget = 0, jobs = -1;
  bool quiet = false;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

RunConfig resolve(const Flags& f, const CLI::App& app) {
  RunConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read config file " + f.config_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigInvalid, std::string("config file is not JSON: ") + e.what());
    }
    c = config_from_json(j, c);
  }
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--base")) c.base = f.base;
  if (given("--fourier-window")) c.fourier_window = f.window;
  if (given("--gen-degree")) c.gen_degree = f.gen_degree;
  if (given("--qds-iterations")) c.qds_iterations = f.qds_iterations;
  if (given("--word-budget")) c.word_budget = f.budget;
  if (given("--mode")) c.mode = parse_mode(f.mode);
  if (given("--suite")) c.suites = split(f.suites);
  if (given("--out")) c.out = f.out;
  if (given("--cache-dir")) c.cache_dir = f.cache_dir;
  if (given("--jobs")) c.jobs = f.jobs;
  if (given("--cutoff")) {
    c.cutoffs.clear();
    for (const auto& s : split(f.cutoffs)) {
      try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        c.cutoffs.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigInvalid, "cutoff '" + s + "' is not an integer");
      }
    }
  }
  validate(c);
  return c;
}

void emit(const RunConfig& c, const std::string& bytes) {
  if (c.out == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + c.out);
  out << bytes;
}

Check check_from_json(const json& j) {
  Check c;
  c.id = j.at("id").get<std::string>();
  c.pass = j.at("pass").get<bool>();
  c.computed = j.value("computed", json());
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact calculus of forms on truncated spectral triples and their quantum double suspensions"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_file, "JSON config file; command-line flags override it");
  app.add_option("--base", f.base, "base triple")->check(CLI::IsMember({"point", "circle"}));
  app.add_option("--fourier-window", f.window, "Fourier window W of the circle");
  app.add_option("--gen-degree", f.gen_degree, "degree g of the circle generators z^g, z^-g");
  app.add_option("--qds-iterations", f.qds_iterations, "number of quantum double suspensions k");
  app.add_option("--cutoff", f.cutoffs, "Toeplitz cutoffs m[,m2,...], one per suspension level");
  app.add_option("--word-budget", f.budget, "word budget p of the spanning set");
  app.add_option("--mode", f.mode, "quotient mode")->check(CLI::IsMember({"bounded", "calkin"}));
  app.add_option("--suite", f.suites, "comma-separated suites for verify");
  app.add_option("--out", f.out, "output file for the JSON artifact, - for stdout");
  app.add_option("--cache-dir", f.cache_dir, "directory of cached canonical artifacts");
  app.add_option("--jobs", f.jobs, "worker threads (0 = runtime default)");
  app.add_flag("--quiet", f.quiet, "suppress the human-readable summary");

  auto* verify = app.add_subcommand("verify", "run verification suites and write a JSON report");
  auto* compute = app.add_subcommand("compute", "compute Omega^n or its junk for the configured triple");
  std::string target = "omega";
  int degree = 1;
  compute->add_option("target", target, "omega | junk | connection-lift")
      ->check(CLI::IsMember({"omega", "junk", "connection-lift"}));
  compute->add_option("--degree", degree, "form degree n");
  auto* lift = app.add_subcommand("lift", "lift connections on a projective module to one more suspension");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c = resolve(f, app);
    if (c.jobs > 0) omp_set_num_threads(c.jobs);
    bool parallel = c.jobs != 1;
    std::ostream& human = c.out == "-" ? std::cerr : std::cout;

    if (verify->parsed()) {
      std::string key = config_hash(c);
      std::string bytes;
      if (auto hit = cache_read(c.cache_dir, key)) {
        bytes = *hit;
      } else {
        bytes = run_verify(c, parallel).dump();
        cache_write(c.cache_dir, key, bytes);
      }
      json report = json::parse(bytes);
      bool ok = true;
      int idx = 1;
      for (const auto& j : report.at("checks")) {
        Check ch = check_from_json(j);
        ok = ok && ch.pass;
        if (!f.quiet) human << "[" << idx << "] " << human_line(ch) << "\n";
        ++idx;
      }
      if (!f.quiet)
        human << (ok ? "all " : "") << report["summary"]["passed"] << " of " << report["summary"]["total"]
              << " checks passed\n";
      emit(c, bytes);
      return ok ? 0 : 1;
    }

    json args;
    std::string command;
    if (compute->parsed()) {
      command = "compute";
      args = {{"target", target}, {"degree", degree}};
    } else if (lift->parsed()) {
      command = "lift";
      args = json::object();
    }
    std::string key = artifact_key(c, command, args);
    std::string bytes;
    if (auto hit = cache_read(c.cache_dir, key)) {
      bytes = *hit;
    } else {
      json a = command == "lift" ? lift_artifact(c) : compute_artifact(c, target, degree);
      bytes = a.dump(2) + "\n";
      cache_write(c.cache_dir, key, bytes);
    }
    if (!f.quiet) {
      json a = json::parse(bytes);
      if (a.contains("quotient_dim"))
        human << target << " degree " << degree << " on " << a["triple"].get<std::string>()
              << ": dim = " << a["quotient_dim"] << " (pi " << a["pi_dim"] << ", junk " << a["junk_dim"] << ")\n";
      if (a.contains("connections"))
        for (const auto& con : a["connections"])
          human << (con["base"]["grassmannian"].get<bool>() ? "grassmannian" : "perturbed") << " connection: diagram "
                << (con["diagram"]["pass"].get<bool>() ? "commutes" : "FAILS") << "\n";
    }
    emit(c, bytes);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
