#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wpd/sampling.hpp"

namespace wpd::stats {

enum class PassRule { StatisticAtMost, PValueAtLeast, StatisticAtLeast };

struct TestReport {
  std::string name;
  double statistic = 0.0;
  std::variant<double, std::string> reference = 0.0;
  double threshold = 0.0;
  std::optional<double> p_value;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  PassRule rule = PassRule::StatisticAtMost;
  bool pass = false;
  std::vector<std::string> notes;

  // Recomputes `pass` from `rule`.
  void decide();
};

TestReport make_threshold_report(std::string name, double statistic, std::variant<double, std::string> reference,
                                 double threshold, std::size_t n, std::uint64_t seed,
                                 std::optional<double> p_value = std::nullopt);
// Passes when statistic >= floor.
TestReport make_floor_report(std::string name, double statistic, std::variant<double, std::string> reference,
                             double floor, std::size_t n, std::uint64_t seed);
TestReport make_pvalue_report(std::string name, double statistic, std::variant<double, std::string> reference,
                              double p_value, double floor, std::size_t n, std::uint64_t seed);

struct TestResult {
  double statistic;
  double p_value;
};

inline constexpr std::size_t kSmallSample = 100;

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
TestResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic;
  double p_value;
  std::size_t bins_used;  // after merging sparse bins
  double effective_n;
};

// Pearson fit of (optionally weighted) samples against a density integrated
// over [edges[i], edges[i+1]). Bins with expected count < 5 are merged with
// a neighbour. Weighted samples use the Kish effective sample size.
ChiSquareResult chi_square_density_fit(std::span<const double> samples, std::span<const double> edges,
                                       const std::function<double(double)>& density,
                                       std::span<const double> weights = {});
// Same with precomputed bin probabilities.
ChiSquareResult chi_square_fit(std::span<const double> samples, std::span<const double> edges,
                               std::span<const double> probabilities, std::span<const double> weights = {});

// Homogeneity test of two samples over common bins (2 x k contingency table).
// Adjacent bins with pooled count < 10 are merged.
ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      std::span<const double> edges);

double effective_sample_size(std::span<const double> weights);

// Percentile bootstrap interval at the given coverage level.
std::pair<double, double> bootstrap_ci(std::span<const double> samples,
                                       const std::function<double(std::span<const double>)>& functional,
                                       std::size_t replicates, sampling::SeedSpec seed, double level = 0.95);

// Bootstrap standard error of a two-sample statistic.
double bootstrap_se_two_sample(std::span<const double> a, std::span<const double> b,
                               const std::function<double(std::span<const double>, std::span<const double>)>& stat,
                               std::size_t replicates, sampling::SeedSpec seed);

// 0.5 * sum |p_i - q_i|.
double total_variation(std::span<const double> p, std::span<const double> q);

double mean(std::span<const double> x);
double variance(std::span<const double> x);
double median(std::vector<double> x);

}  // namespace wpd::stats
