#include "qds/report.hpp"

#include <gmp.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qds {

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = RunConfig{}.suites;
  return s;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::ConfigInvalid, m); };
  if (c.base != "point" && c.base != "circle") bad("base must be point or circle, got '" + c.base + "'");
  if (c.fourier_window < 1) bad("fourier window must be positive");
  if (c.gen_degree < 1) bad("gen degree must be positive");
  if (c.qds_iterations < 0) bad("qds iterations must be non-negative");
  if (c.cutoffs.empty()) bad("at least one cutoff is required");
  for (int m : c.cutoffs)
    if (m < 2) bad("cutoffs must be at least 2");
  if (c.word_budget < 1) bad("word budget must be positive");
  if (c.jobs < 0) bad("jobs must be non-negative");
  for (const auto& s : c.suites)
    if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
      bad("unknown suite '" + s + "'");
}

json config_json(const RunConfig& c) {
  return {{"base", c.base},
          {"fourier_window", c.fourier_window},
          {"gen_degree", c.gen_degree},
          {"qds_iterations", c.qds_iterations},
          {"cutoffs", c.cutoffs},
          {"word_budget", c.word_budget},
          {"mode", mode_name(c.mode)},
          {"suites", c.suites}};
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "base") c.base = v.get<std::string>();
      else if (k == "fourier_window") c.fourier_window = v.get<int>();
      else if (k == "gen_degree") c.gen_degree = v.get<int>();
      else if (k == "qds_iterations") c.qds_iterations = v.get<int>();
      else if (k == "cutoffs") c.cutoffs = v.get<std::vector<int>>();
      else if (k == "word_budget") c.word_budget = v.get<int>();
      else if (k == "mode") c.mode = parse_mode(v.get<std::string>());
      else if (k == "suites") c.suites = v.get<std::vector<std::string>>();
      else if (k == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (k == "out") c.out = v.get<std::string>();
      else if (k == "jobs") c.jobs = v.get<int>();
      else throw Error(ErrorCode::ConfigInvalid, "unknown config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  validate(c);
  return c;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string config_hash(const RunConfig& c) { return sha256_hex(config_json(c).dump()); }

int cutoff_at(const RunConfig& c, int layer) {
  return c.cutoffs[std::min<std::size_t>(layer, c.cutoffs.size() - 1)];
}

TriplePtr config_triple(const RunConfig& c) {
  TriplePtr t = c.base == "point" ? make_point() : make_circle(c.fourier_window, c.gen_degree);
  for (int k = 0; k < c.qds_iterations; ++k) t = make_qds(t, cutoff_at(c, k));
  return t;
}

json environment_stamp() {
  return {{"engine", "qdscalc 1.0"},
          {"arithmetic", std::string("GMP ") + gmp_version},
          {"hash", OPENSSL_VERSION_TEXT},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)}};
}

bool Report::all_pass() const { return qds::all_pass(checks); }

json Report::to_json() const {
  json cs = json::array();
  int passed = 0;
  json failed = json::array();
  for (const auto& c : checks) {
    cs.push_back(qds::to_json(c));
    if (c.pass) ++passed;
    else failed.push_back(c.id);
  }
  return {{"schema", "qds-report/1"},
          {"index_base", 0},
          {"config", config},
          {"config_hash", config_hash},
          {"environment", environment_stamp()},
          {"checks", cs},
          {"summary", {{"total", checks.size()}, {"passed", passed}, {"failed", failed}}}};
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

namespace {
// [0, p, q] keys of a Toeplitz layer become e(p+1, q+1)
std::string human_value(const json& v) {
  if (v.is_array() && !v.empty() && v[0].is_object() && v[0].contains("key")) {
    std::string s;
    for (const auto& e : v) {
      const auto& k = e["key"];
      std::string term = e["value"].get<std::string>();
      if (k.size() == 3 && k[0] == 0)
        term += " e(" + std::to_string(k[1].get<int>() + 1) + "," + std::to_string(k[2].get<int>() + 1) + ")";
      else if (k.size() == 2 && k[0] == 1)
        term += " T(" + std::to_string(k[1].get<int>()) + ")";
      else
        term += " " + k.dump();
      s += (s.empty() ? "" : " + ") + term;
    }
    return s;
  }
  if (v.is_array() && v.empty()) return "0";
  return v.dump();
}
}  // namespace

std::string human_line(const Check& c) {
  std::ostringstream o;
  o << (c.pass ? "PASS " : "FAIL ") << c.id;
  if (c.computed.is_object()) {
    std::string sep = "  ";
    for (const auto& [k, v] : c.computed.items()) {
      if (v.is_object() || k == "witnesses" || k == "notes" || k == "doubled_notes") continue;
      if (v.is_array() && !v.empty() && v[0].is_array()) continue;
      o << sep << k << "=" << human_value(v);
      sep = " ";
    }
  }
  return o.str();
}

std::optional<std::string> cache_read(const std::string& dir, const std::string& key) {
  if (dir.empty()) return std::nullopt;
  std::ifstream in(std::filesystem::path(dir) / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void cache_write(const std::string& dir, const std::string& key, const std::string& bytes) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  auto final_path = std::filesystem::path(dir) / (key + ".json");
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << bytes;
  }
  std::filesystem::rename(tmp, final_path);
}

}  // namespace qds
