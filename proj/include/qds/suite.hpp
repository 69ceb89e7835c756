#pragma once
#include <functional>
#include <string>
#include <vector>

#include "qds/conn.hpp"
#include "qds/report.hpp"

namespace qds {

// one independent unit of verification work; suites expand to a fixed list of tasks
struct SuiteTask {
  std::string suite;
  std::string name;
  std::function<std::vector<Check>()> run;
};
std::vector<SuiteTask> suite_tasks(const RunConfig& c);

// runs every task of the selected suites; records come out in task order regardless of scheduling.
// Errors inside a task become a failing record named <task>.error
Report run_verify(const RunConfig& c, bool parallel = true);

struct ConnectionCase {
  std::string name;
  TriplePtr base;
  std::vector<Op> projection;
  int budget = 1;
  Mode mode = Mode::Bounded;
  int lift_cutoff = 2;
  int lift_budget = 1;
  int rank = 2;
};
std::vector<Check> verify_connections(const ConnectionCase& cc, unsigned seed, bool parallel = true);

// machine artifacts of the compute and lift commands
json compute_artifact(const RunConfig& c, const std::string& target, int degree);
json lift_artifact(const RunConfig& c);
std::string artifact_key(const RunConfig& c, const std::string& command, const json& args);

}  // namespace qds
