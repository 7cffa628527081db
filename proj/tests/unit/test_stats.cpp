#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wpd/report.hpp"
#include "wpd/sampling.hpp"
#include "wpd/stats.hpp"

using namespace wpd;
using namespace wpd::stats;

TEST(Kolmogorov, KnownQuantiles) {
  // Classical critical values: Q(1.358) ~ 0.05, Q(1.628) ~ 0.01.
  EXPECT_NEAR(kolmogorov_q(1.358), 0.05, 5e-4);
  EXPECT_NEAR(kolmogorov_q(1.628), 0.01, 2e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(Ks, OneSampleHandExample) {
  // Sample {0.1, 0.5, 0.9} vs U(0,1): D = max(1/3-0.1, 0.5-1/3, 2/3-0.5, 0.9-2/3, 1-0.9) = 0.2333...
  const Vec x{0.9, 0.1, 0.5};
  const auto r = ks_one_sample(x, [](double v) { return v; });
  EXPECT_NEAR(r.statistic, 0.9 - 2.0 / 3.0, 1e-15);
}

TEST(Ks, TwoSampleHandExample) {
  const Vec a{1.0, 2.0, 3.0}, b{2.5, 3.5, 4.5, 5.5};
  // After 3.0: F_a = 1, F_b = 1/4.
  EXPECT_NEAR(ks_two_sample(a, b).statistic, 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a).statistic, 0.0);
}

TEST(Ks, UniformSampleAccepted) {
  sampling::Rng rng({1, 1});
  Vec x(20000);
  for (double& v : x) v = rng.uniform();
  const auto r = ks_one_sample(x, [](double v) { return v; });
  EXPECT_LT(r.statistic, 1.63 / std::sqrt(20000.0));
  EXPECT_GT(r.p_value, 0.01);
}

TEST(ChiSquare, ExponentialFitAndShiftedMisfit) {
  sampling::Rng rng({2, 1});
  Vec x(20000), y(20000);
  for (double& v : x) v = rng.exponential();
  for (double& v : y) v = 1.2 * rng.exponential();
  Vec edges;
  for (int i = 0; i <= 20; ++i) edges.push_back(0.25 * i);
  const auto dens = [](double v) { return std::exp(-v); };
  const auto good = chi_square_density_fit(x, edges, dens);
  const auto bad = chi_square_density_fit(y, edges, dens);
  EXPECT_GT(good.p_value, 0.001);
  EXPECT_LT(bad.p_value, 1e-6);
  EXPECT_EQ(good.bins_used, 21u);
}

TEST(ChiSquare, SparseBinsMerged) {
  const Vec x{0.1, 0.2, 0.3};
  const Vec edges{0.0, 0.5, 1.0};
  const Vec p{0.5, 0.5};
  const auto r = chi_square_fit(x, edges, p);
  EXPECT_EQ(r.bins_used, 1u);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
}

TEST(ChiSquare, TwoSampleHomogeneity) {
  // Table {20, 30 | 30, 20}: chi2 = 4 with one degree of freedom.
  Vec a, b;
  for (int i = 0; i < 20; ++i) a.push_back(0.25);
  for (int i = 0; i < 30; ++i) a.push_back(0.75);
  for (int i = 0; i < 30; ++i) b.push_back(0.25);
  for (int i = 0; i < 20; ++i) b.push_back(0.75);
  const Vec edges{0.0, 0.5, 1.0};
  const auto r = stats::chi_square_two_sample(a, b, edges);
  EXPECT_NEAR(r.statistic, 4.0, 1e-12);
  EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(2.0)), 1e-12);
  const auto same = stats::chi_square_two_sample(a, a, edges);
  EXPECT_DOUBLE_EQ(same.statistic, 0.0);
}

TEST(Ess, Values) {
  const Vec w{1.0, 1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(effective_sample_size(w), 4.0);
  const Vec v{1.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(effective_sample_size(v), 1.0);
}

TEST(Bootstrap, MeanIntervalCoversTruth) {
  sampling::Rng rng({3, 1});
  Vec x(2000);
  for (double& v : x) v = rng.normal();
  const auto ci = bootstrap_ci(x, [](std::span<const double> s) { return mean(s); }, 400, {3, 2});
  EXPECT_LT(ci.first, 0.0 + 0.2);
  EXPECT_GT(ci.second, 0.0 - 0.2);
  EXPECT_LT(ci.first, ci.second);
  EXPECT_THROW(bootstrap_ci(x, [](std::span<const double> s) { return mean(s); }, 50, {3, 2}), DomainError);
}

TEST(Summary, MedianVarianceTv) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  const Vec x{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(variance(x), 5.0 / 3.0);
  const Vec p{0.5, 0.5, 0.0}, q{0.0, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.5);
}

TEST(Report, ThresholdAndPvalueRules) {
  const auto a = make_threshold_report("a", 0.01, 0.0, 0.02, 1000, 1);
  EXPECT_TRUE(a.pass);
  const auto b = make_threshold_report("b", 0.03, 0.0, 0.02, 50, 1);
  EXPECT_FALSE(b.pass);
  ASSERT_EQ(b.notes.size(), 1u);
  const auto c = make_pvalue_report("c", 10.0, "chi2", 0.005, 0.01, 1000, 1);
  EXPECT_FALSE(c.pass);
}

TEST(Report, JsonFieldOrderStable) {
  const auto a = make_threshold_report("x", 0.5, std::string("ref"), 1.0, 200, 7, 0.3);
  const std::string s = to_json_string({a});
  EXPECT_LT(s.find("\"name\""), s.find("\"statistic\""));
  EXPECT_LT(s.find("\"statistic\""), s.find("\"pass\""));
  EXPECT_EQ(s, to_json_string({a}));
  EXPECT_EQ(s.back(), '\n');
}
