#pragma once
#include <optional>
#include <string>
#include <vector>

#include "qds/check.hpp"
#include "qds/oper.hpp"
#include "qds/triple.hpp"

namespace qds {

struct RunConfig {
  std::string base = "circle";  // point | circle
  int fourier_window = 8;
  int gen_degree = 1;
  int qds_iterations = 0;
  std::vector<int> cutoffs = {6};
  int word_budget = 3;
  Mode mode = Mode::Calkin;
  std::vector<std::string> suites = {"s-lemmas", "laurent",  "witnesses", "circle",     "decomposition",
                                     "theorem",  "corollary", "pauli",    "conditions", "connections"};
  // plumbing; not part of the config identity
  std::string cache_dir;
  std::string out = "-";
  int jobs = 0;
};

const std::vector<std::string>& known_suites();
void validate(const RunConfig& c);  // ConfigInvalid
json config_json(const RunConfig& c);  // canonical identity (no plumbing fields)
RunConfig config_from_json(const json& j, RunConfig defaults = {});
std::string sha256_hex(const std::string& data);
std::string config_hash(const RunConfig& c);
int cutoff_at(const RunConfig& c, int layer);  // per-layer cutoff, last one repeated
TriplePtr config_triple(const RunConfig& c);   // base lifted qds_iterations times
json environment_stamp();

struct Report {
  json config;
  std::string config_hash;
  std::vector<Check> checks;
  bool all_pass() const;
  json to_json() const;
  std::string dump() const;  // canonical bytes written to disk and stdout
};

// 1-based rendering for terminal output
std::string human_line(const Check& c);

// cache of canonical serializations keyed by hex digest
std::optional<std::string> cache_read(const std::string& dir, const std::string& key);
void cache_write(const std::string& dir, const std::string& key, const std::string& bytes);

}  // namespace qds
