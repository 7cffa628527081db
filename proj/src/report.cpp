#include "wpd/report.hpp"

namespace wpd::stats {

nlohmann::ordered_json to_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  if (std::holds_alternative<double>(r.reference)) {
    j["reference"] = std::get<double>(r.reference);
  } else {
    j["reference"] = std::get<std::string>(r.reference);
  }
  j["threshold"] = r.threshold;
  if (r.p_value) {
    j["p_value"] = *r.p_value;
  } else {
    j["p_value"] = nullptr;
  }
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["pass"] = r.pass;
  switch (r.rule) {
    case PassRule::StatisticAtMost: j["rule"] = "statistic<=threshold"; break;
    case PassRule::StatisticAtLeast: j["rule"] = "statistic>=threshold"; break;
    case PassRule::PValueAtLeast: j["rule"] = "p_value>=threshold"; break;
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

std::string to_json_string(const std::vector<TestReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

}  // namespace wpd::stats
