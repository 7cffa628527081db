#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpd/stats.hpp"

// The acceptance criteria as runnable checks, shared by the acceptance test
// and the `selftest` subcommand.
namespace wpd::suite {

inline constexpr std::uint64_t kMasterSeed = 20261016;
inline constexpr int kCriteria = 11;

struct SuiteOptions {
  std::uint64_t master_seed = kMasterSeed;
  // Fraction of the stated sample sizes. Below 1, thresholds that shrink like
  // 1/sqrt(N) are divided by sqrt(scale); z-score, p-value, exactness and
  // convergence-order gates are kept.
  double scale = 1.0;
  // Sample fraction for the determinism reruns of criterion 11.
  double determinism_scale = 0.02;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<stats::TestReport> reports;  // gating
  std::vector<stats::TestReport> info;     // reported, not gating
  double seconds = 0.0;                    // wall time, kept out of the JSON
};

std::string criterion_title(int id);
CriterionResult run_criterion(int id, const SuiteOptions& opt);

// Stable JSON of one result (no timing).
std::string to_json_string(const CriterionResult& r);

}  // namespace wpd::suite
