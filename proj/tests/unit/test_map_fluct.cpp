#include <gtest/gtest.h>

#include <cmath>

#include "wpd/map_fluct.hpp"

using namespace wpd;
using namespace wpd::mapf;

namespace {

MapPath from_values(const Vec& xi) {
  Vec t(xi.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  return MapPath(t, xi, Vec(xi.size(), 1.0), 1);
}

}  // namespace

TEST(Model, Validation) {
  EXPECT_THROW(MapModel::bm_drift(0.5, -1.0), DomainError);
  sampling::RateMatrix reducible(2, {0.0, 0.0, 1.0, -1.0});
  EXPECT_THROW(MapModel::mmbm(reducible, {0.0, 0.0}, {1.0, 1.0}), DomainError);
  sampling::RateMatrix q(2, {-1.0, 1.0, 1.0, -1.0});
  EXPECT_THROW(MapModel::mmbm(q, {0.0, 0.0}, {1.0, 0.0}), DomainError);
  EXPECT_EQ(MapModel::mmbm(q, {0.0, 0.0}, {1.0, 1.0}).modulator_dim(), 2u);
}

TEST(Simulate, DeterministicLine) {
  const auto p = simulate_map(MapModel::bm_drift(1.0, 0.0), 2.0, 0.25, {1, 1});
  ASSERT_EQ(p.size(), 9u);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.xi()[i], p.times()[i], 1e-15);
  EXPECT_DOUBLE_EQ(p.times().back(), 2.0);
}

TEST(Simulate, DriftLln) {
  const auto m = MapModel::bm_drift(0.5, 1.0);
  const int n = 10000;
  const double T = 4.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += simulate_map(m, T, 0.5, sampling::SeedSpec{2, 0}.child(i)).xi().back() / T;
  // sd of xi_T / T is 1/sqrt(T).
  EXPECT_NEAR(s / n, 0.5, 3.0 / std::sqrt(T) / std::sqrt(n));
}

TEST(Simulate, IdenticalRegimesMatchBm) {
  sampling::RateMatrix q(2, {-2.0, 2.0, 1.0, -1.0});
  const auto mm = MapModel::mmbm(q, {0.3, 0.3}, {1.2, 1.2});
  const auto bm = MapModel::bm_drift(0.3, 1.2);
  const int n = 10000;
  Vec a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = simulate_map(mm, 1.0, 0.1, sampling::SeedSpec{3, 0}.child(i)).xi().back();
    b[i] = simulate_map(bm, 1.0, 0.1, sampling::SeedSpec{3, 1}.child(i)).xi().back();
  }
  // Both against the exact N(0.3, 1.44) marginal, and against each other.
  const auto cdf = [](double x) { return 0.5 * std::erfc(-(x - 0.3) / (1.2 * std::sqrt(2.0))); };
  EXPECT_LT(stats::ks_one_sample(a, cdf).statistic, 0.02);
  EXPECT_LT(stats::ks_one_sample(b, cdf).statistic, 0.02);
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.001);
}

TEST(Minimum, MonotoneIncreasing) {
  const auto rm = running_minimum(from_values({0.0, 0.5, 1.0, 3.0}));
  EXPECT_DOUBLE_EQ(rm.argmin_time, 0.0);
}

TEST(Minimum, LastAchieverWins) {
  const auto p = from_values({0.0, -1.0, -0.5, -1.0});
  const auto rm = running_minimum(p);
  EXPECT_DOUBLE_EQ(rm.min_values.back(), -1.0);
  EXPECT_DOUBLE_EQ(rm.argmin_time, 3.0);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_GE(p.xi()[i] - rm.min_values[i], 0.0);
}

TEST(Pocr, DeterministicLine) {
  const auto p = simulate_map(MapModel::bm_drift(1.0, 0.0), 20.0, 0.5, {1, 1});
  const auto s = pocr_from_path(p, 8.0);
  ASSERT_TRUE(s.has_value());
  EXPECT_DOUBLE_EQ(s->depth, 0.0);
  EXPECT_DOUBLE_EQ(*s->gtime, 0.0);
  EXPECT_FALSE(pocr_from_path(p, 25.0).has_value());
}

TEST(Pocr, SurvivalAtOneForUnitDrift) {
  const auto m = MapModel::bm_drift(1.0, 1.0);
  const int n = 20000;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    sampling::Rng rng(sampling::SeedSpec{4, 0}.child(i));
    const auto s = draw_pocr(m, 20.0, 0.01, 8.0, rng);
    ASSERT_TRUE(s.has_value());
    above += s->depth > 1.0;
  }
  EXPECT_NEAR(static_cast<double>(above) / n, std::exp(-2.0), 0.01);
}

TEST(Pocr, DepthLawExponential) {
  Vec edges;
  for (int i = 0; i <= 20; ++i) edges.push_back(0.25 * i);
  const auto h = estimate_ladder_marginal(MapModel::bm_drift(0.5, 1.0), 20000, 50.0, 0.01, 8.0, {5, 0}, edges);
  EXPECT_EQ(h.normalization + h.horizon_fails, 20000u);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  EXPECT_EQ(total, h.normalization);
  const auto reports = depth_law_reports(h, 0.5, 1.0, 5);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.statistic;
  // Dvoretzky-Kiefer-Wolfowitz style bound with grid slack.
  EXPECT_LT(reports[0].statistic, 1.36 / std::sqrt(static_cast<double>(h.normalization)) + 0.01);
}

TEST(Pocr, SymmetricModulatorAngleMarginal) {
  sampling::RateMatrix q(2, {-1.0, 1.0, 1.0, -1.0});
  const auto m = MapModel::mmbm(q, {0.5, 0.5}, {1.0, 1.0});
  // Half the paths start in each state, so state 0 and state 1 are exchangeable.
  const auto h0 = estimate_ladder_marginal(m, 10000, 40.0, 0.02, 8.0, {6, 0}, {0.0, 1.0, 2.0}, 0);
  const auto h1 = estimate_ladder_marginal(m, 10000, 40.0, 0.02, 8.0, {6, 1}, {0.0, 1.0, 2.0}, 1);
  const auto a0 = h0.angle_marginal(), a1 = h1.angle_marginal();
  ASSERT_EQ(a0.size(), 2u);
  EXPECT_NEAR(a0[0] + a0[1], 1.0, 1e-12);
  EXPECT_NEAR(0.5 * (a0[0] + a1[0]), 0.5, 0.02);
  EXPECT_NEAR(0.5 * (a0[1] + a1[1]), 0.5, 0.02);
}

TEST(Excursions, MonotoneDecreasingHasNone) {
  const auto es = extract_excursions(from_values({0.0, -1.0, -2.0, -3.0}));
  EXPECT_TRUE(es.excursions.empty());
  EXPECT_DOUBLE_EQ(es.time_at_minimum, 3.0);
}

TEST(Excursions, VShapeFinalRise) {
  const auto es = extract_excursions(from_values({0.0, -1.0, -2.0, -1.0, 0.0}));
  ASSERT_EQ(es.excursions.size(), 1u);
  const auto& e = es.excursions[0];
  EXPECT_DOUBLE_EQ(e.start_time, 2.0);
  EXPECT_DOUBLE_EQ(e.end_time, 4.0);
  EXPECT_FALSE(e.complete);
  EXPECT_DOUBLE_EQ(e.heights.front(), 0.0);
  EXPECT_DOUBLE_EQ(es.time_at_minimum, 2.0);
}

TEST(Excursions, CompleteExcursionBoundaries) {
  const auto es = extract_excursions(from_values({0.0, 1.0, 0.5, -0.2, -0.4, 0.3}));
  ASSERT_EQ(es.excursions.size(), 2u);
  EXPECT_TRUE(es.excursions[0].complete);
  EXPECT_DOUBLE_EQ(es.excursions[0].start_time, 0.0);
  EXPECT_DOUBLE_EQ(es.excursions[0].end_time, 3.0);
  for (std::size_t k = 1; k + 1 < es.excursions[0].heights.size(); ++k) EXPECT_GT(es.excursions[0].heights[k], 0.0);
  EXPECT_FALSE(es.excursions[1].complete);
}

TEST(Excursions, PartitionOfHorizon) {
  const auto p = simulate_map(MapModel::bm_drift(-0.2, 1.0), 30.0, 0.01, {7, 0});
  const auto es = extract_excursions(p);
  double total = es.time_at_minimum;
  for (const auto& e : es.excursions) total += e.lifetime();
  EXPECT_NEAR(total, 30.0, 1e-9);
}

TEST(Occupation, ZeroFunction) {
  const auto r = check_levy_occupation_identity(0.5, [](double) { return 0.0; }, 20, 20.0, 0.01, {8, 0});
  EXPECT_TRUE(r[0].pass);
  EXPECT_DOUBLE_EQ(r[0].statistic, 0.0);
}

TEST(Occupation, ExponentialTestFunction) {
  const auto r = check_levy_occupation_identity(0.5, [](double y) { return std::exp(-y); }, 400, 50.0, 0.002, {9, 0});
  for (const auto& x : r) EXPECT_TRUE(x.pass) << x.name << " " << x.statistic;
}

TEST(Reversal, DeterministicDegenerate) {
  const auto r = check_time_reversal(MapModel::bm_drift(0.7, 0.0), 2.0, 50, 0.1, {10, 0});
  for (const auto& x : r) EXPECT_DOUBLE_EQ(x.statistic, 0.0) << x.name;
}

TEST(Reversal, DriftlessAndDrifted) {
  for (double mu : {0.0, 0.5}) {
    const auto r = check_time_reversal(MapModel::bm_drift(mu, 1.0), 1.0, 20000, 1e-3, {11, 0});
    for (const auto& x : r) EXPECT_TRUE(x.pass) << x.name << " mu=" << mu << " " << x.statistic;
  }
}
