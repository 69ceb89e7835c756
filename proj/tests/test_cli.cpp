#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qdscalc_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  fs::path err = scratch() / "stderr.txt";
  std::string cmd = std::string(QDSCALC_PATH) + " " + args + " 2>" + err.string();
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("verify writes a 0-based report to stdout and 1-based lines to stderr") {
  Run r = run("verify --suite witnesses --cutoff 7");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["index_base"] == 0);
  CHECK(j["checks"].size() == 10);
  CHECK(j["config"]["cutoffs"] == json::array({7}));
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("id"));
    CHECK(c.contains("paper_anchor"));
    CHECK(c.contains("parameters"));
    CHECK(c.contains("expected"));
    CHECK(c.contains("computed"));
    CHECK(c["pass"] == true);
  }
  // zeta_1 has pi(d zeta_1) = -e_21: key [0,1,0] in JSON, e(2,1) for people
  CHECK(j["checks"][0]["computed"]["pi_d_zeta"][0]["key"] == json::array({0, 1, 0}));
  CHECK(r.err.find("[1] PASS witness.zeta.n1  pi_d_zeta=-1 e(2,1)") != std::string::npos);
}

TEST_CASE("environment stamp carries no run-specific data") {
  Run r = run("verify --suite circle --jobs 2");
  json j = json::parse(r.out);
  std::string env = j["environment"].dump();
  for (const char* bad : {"time", "date", "host", "jobs", "thread"}) CHECK(env.find(bad) == std::string::npos);
  CHECK_FALSE(j["config"].contains("jobs"));
}

TEST_CASE("reports are byte-identical across job counts") {
  Run a = run("verify --suite witnesses,circle,pauli --jobs 1");
  Run b = run("verify --suite witnesses,circle,pauli --jobs 3");
  CHECK(a.code == b.code);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("exit code reflects failing checks") {
  Run bad = run("verify --suite corollary --quiet");
  CHECK(bad.code == 1);
  json j = json::parse(bad.out);
  CHECK_FALSE(j["summary"]["failed"].empty());
  Run empty = run("verify --suite '' --quiet");
  CHECK(empty.code == 0);
  CHECK(json::parse(empty.out)["checks"].empty());
}

TEST_CASE("invalid configuration is rejected") {
  CHECK(run("verify --cutoff 1").code == 2);
  CHECK(run("verify --cutoff 3,x").code == 2);
  CHECK(run("verify --suite nonsense").code == 2);
  CHECK(run("verify --base torus").code != 0);
  CHECK(run("compute omega --degree -1").code == 2);
  Run r = run("verify --word-budget 0");
  CHECK(r.code == 2);
  CHECK(r.err.find("ConfigInvalid") != std::string::npos);
  fs::path cfg = scratch() / "bad.json";
  std::ofstream(cfg) << R"({"base": "circle", "colour": 3})";
  CHECK(run("verify --config " + cfg.string()).code == 2);
}

TEST_CASE("compute reports the expected dimensions") {
  json p = json::parse(run("compute omega --degree 0 --base point").out);
  CHECK(p["quotient_dim"] == 1);
  json c = json::parse(run("compute omega --degree 1 --base circle").out);
  CHECK(c["quotient_dim"] == 7);
  CHECK(c["basis"].size() == 7);
  CHECK(c["index_base"] == 0);
  json j = json::parse(run("compute junk --degree 2 --base circle --fourier-window 8 --word-budget 2").out);
  CHECK(j["junk_dim"] == j["pi_dim"]);
  // Omega^1 of the suspended point is F times the suspended algebra
  std::string sigma = " --base point --qds-iterations 1 --cutoff 4 --mode bounded";
  json t0 = json::parse(run("compute omega --degree 0" + sigma).out);
  json t1 = json::parse(run("compute omega --degree 1" + sigma).out);
  CHECK(t1["quotient_dim"] == t0["quotient_dim"]);
  CHECK(t1["quotient_dim"] == 25);
}

TEST_CASE("config file and flags produce the same config hash") {
  fs::path cfg = scratch() / "cfg.json";
  std::ofstream(cfg) << R"({"base": "circle", "fourier_window": 8, "cutoffs": [7], "suites": ["witnesses"]})";
  json a = json::parse(run("verify --config " + cfg.string()).out);
  json b = json::parse(run("verify --base circle --fourier-window 8 --cutoff 7 --suite witnesses").out);
  CHECK(a["config_hash"] == b["config_hash"]);
  CHECK(a["config_hash"].get<std::string>().size() == 64);
  json c = json::parse(run("verify --config " + cfg.string() + " --cutoff 8").out);
  CHECK(c["config_hash"] != a["config_hash"]);
  CHECK(c["config"]["cutoffs"] == json::array({8}));
}

TEST_CASE("cache hits reproduce fresh artifacts byte for byte") {
  fs::path cache = scratch() / "cache";
  fs::remove_all(cache);
  std::string args = "compute omega --degree 1 --base circle --cache-dir " + cache.string();
  Run fresh = run("compute omega --degree 1 --base circle");
  Run first = run(args);
  CHECK(std::distance(fs::directory_iterator(cache), fs::directory_iterator()) == 1);
  Run second = run(args);
  CHECK(first.out == fresh.out);
  CHECK(second.out == fresh.out);

  Run v1 = run("verify --suite circle --cache-dir " + cache.string());
  json j = json::parse(v1.out);
  CHECK(fs::exists(cache / (j["config_hash"].get<std::string>() + ".json")));
  Run v2 = run("verify --suite circle --cache-dir " + cache.string());
  CHECK(v1.out == v2.out);
  CHECK(v1.code == v2.code);
}

TEST_CASE("output file and lift command") {
  fs::path out = scratch() / "lift.json";
  Run r = run("lift --base point --qds-iterations 1 --cutoff 3 --word-budget 1 --mode bounded --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("connection") != std::string::npos);  // human summary goes to stdout when --out is a file
  json j = json::parse(slurp(out));
  CHECK(j["projection"] == "u_diagonal");
  CHECK(j["connections"].size() == 2);
  for (const auto& c : j["connections"]) CHECK(c["diagram"]["pass"] == true);
  CHECK(j["connections"][0]["lifted"]["grassmannian"] == true);
}
