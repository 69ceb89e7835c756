#include "qds/check.hpp"

namespace qds {

json to_json(const Check& c) {
  json j;
  j["id"] = c.id;
  j["paper_anchor"] = c.anchor;
  j["parameters"] = c.parameters;
  j["expected"] = c.expected;
  j["computed"] = c.computed;
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

bool all_pass(const std::vector<Check>& cs) {
  for (const auto& c : cs)
    if (!c.pass) return false;
  return true;
}

}  // namespace qds
