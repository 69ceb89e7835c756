#pragma once
#include <json.hpp>
#include <string>
#include <vector>

namespace qds {

using json = nlohmann::json;

struct Check {
  std::string id;
  std::string anchor;  // lemma tag plus quote
  json parameters = json::object();
  json expected;
  json computed;
  bool pass = false;
  std::string note;
};

json to_json(const Check& c);
bool all_pass(const std::vector<Check>& cs);

}  // namespace qds
