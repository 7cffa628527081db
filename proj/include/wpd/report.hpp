#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "wpd/stats.hpp"

namespace wpd::stats {

// Stable field order: name, statistic, reference, threshold, p_value, n, seed, pass, then rule/notes.
nlohmann::ordered_json to_json(const TestReport& r);
std::string to_json_string(const std::vector<TestReport>& reports);

}  // namespace wpd::stats
