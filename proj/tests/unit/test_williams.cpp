#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wpd/parallel.hpp"
#include "wpd/stats.hpp"
#include "wpd/williams.hpp"

using namespace wpd;
using namespace wpd::williams;

namespace {

const stable::StableParams kCauchyPlane{1.0, 2};

DecompositionSpec classical_spec(std::size_t n, std::uint64_t stream) {
  DecompositionSpec s;
  s.model = ClassicalBm{0.5};
  s.T = 5.0;
  s.dt = 1e-3;
  s.n = n;
  s.seed = {31, stream};
  return s;
}

DecompositionSpec stable_spec(std::size_t n, double h, std::uint64_t stream) {
  DecompositionSpec s;
  s.model = kCauchyPlane;
  s.start = {1.0, 0.0};
  s.T = 10.0;
  s.dt = h;
  s.n = n;
  s.seed = {32, stream};
  return s;
}

double exp_cdf(double x, double rate) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); }

}  // namespace

TEST(Spec, Validation) {
  DecompositionSpec s;
  EXPECT_NO_THROW(s.validate());
  s.model = ClassicalBm{0.0};
  EXPECT_THROW(s.validate(), DomainError);
  s = stable_spec(10, 0.05, 0);
  EXPECT_NO_THROW(s.validate());
  s.start = {0.0, 0.0};
  EXPECT_THROW(s.validate(), DomainError);
  s = stable_spec(10, 0.05, 0);
  s.delta_offset = 0.0;
  EXPECT_THROW(s.validate(), DomainError);
  s = stable_spec(10, 0.05, 0);
  s.model = stable::StableParams{2.0, 3};
  s.start = {1.0, 0.0, 0.0};
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(Classical, ConstructedMinimumIsTheThreshold) {
  const double dt = 1e-3;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto c = construct_classical(0.5, 5.0, dt, {33, i});
    const double lo = *std::min_element(c.values.begin(), c.values.end());
    EXPECT_NEAR(lo, -c.f.radial_minimum, 2.0 * std::sqrt(dt));
    EXPECT_GE(lo, -c.f.radial_minimum - 1e-12);
    EXPECT_GE(c.times.back(), std::max(5.0, c.f.time_of_minimum + 1.0) - 1e-9);
    EXPECT_TRUE(std::is_sorted(c.times.begin(), c.times.end()));
  }
}

TEST(Classical, DepthLaws) {
  const auto spec = classical_spec(2000, 0);
  const auto built = constructed_ensemble(spec);
  const auto direct = direct_ensemble(spec);
  const auto flipped = constructed_ensemble(spec, true);
  const auto exp1 = [](double x) { return exp_cdf(x, 1.0); };
  EXPECT_GT(stats::ks_one_sample(built.column("radial_minimum"), exp1).p_value, 1e-3);
  EXPECT_GT(stats::ks_one_sample(direct.column("radial_minimum"), exp1).p_value, 1e-3);
  // Flipped control: the minimum of two independent Exp(1) depths.
  const auto exp2 = [](double x) { return exp_cdf(x, 2.0); };
  EXPECT_GT(stats::ks_one_sample(flipped.column("radial_minimum"), exp2).p_value, 1e-3);
}

TEST(Classical, DecompositionAgainstDirect) {
  const auto spec = classical_spec(2000, 1);
  const auto built = constructed_ensemble(spec);
  auto d = spec;
  d.seed.stream_id = 2;
  const auto direct = direct_ensemble(d);
  const std::vector<std::string> fs{"radial_minimum", "value_at_T", "time_of_minimum", "half_depth_time", "post_gain"};
  for (const auto& r : verify_decomposition(direct, built, fs, 0.0617, 1)) EXPECT_TRUE(r.pass) << r.name << " " << r.statistic;
  const auto flipped = constructed_ensemble(spec, true);
  const auto neg = verify_decomposition(direct, flipped, {"radial_minimum"}, 0.1, 1);
  EXPECT_GT(neg.at(0).statistic, 0.1);
  EXPECT_LT(conditional_independence(built, 1).statistic, 3.0);
}

TEST(Reports, IdenticalEnsemblesGiveZero) {
  const auto e = direct_ensemble(stable_spec(200, 0.01, 3));
  const auto reps = verify_decomposition(e, e, kAllFunctionals, 0.05, 1);
  ASSERT_EQ(reps.size(), 4u);
  for (const auto& r : reps) {
    EXPECT_EQ(r.statistic, 0.0) << r.name;
    EXPECT_TRUE(r.pass);
  }
  const auto c = classical_spec(50, 4);
  const auto ce = direct_ensemble(c);
  EXPECT_EQ(verify_decomposition(ce, ce, kAllFunctionals, 0.05, 1).size(), 3u);  // no angle on the line
  EXPECT_THROW(ce.column("nonsense"), DomainError);
}

TEST(Stable, ConstructedPathGlues) {
  const Vec x0{1.0, 0.0};
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto c = construct_stable(kCauchyPlane, x0, 10.0, 0.05, 1e-3, {34, i});
    ASSERT_TRUE(c.path.has_value());
    const auto& path = *c.path;
    EXPECT_LE(c.glue_gap, c.tol_glue);
    double lo = INFINITY;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
      if (path.radius(k) < lo) {
        lo = path.radius(k);
        arg = k;
      }
    // The path stays outside the ball of radius |x*| and comes within the glue tolerance of it.
    EXPECT_GT(lo, c.f.radial_minimum);
    EXPECT_LE(lo, c.f.radial_minimum + c.tol_glue);
    EXPECT_NEAR(path.times()[arg], c.f.time_of_minimum, 0.05);
    EXPECT_GE(path.times().back(), std::max(10.0, c.f.time_of_minimum + 1.0) * (1.0 - 1e-12));
  }
}

TEST(Stable, ConstructionIsDeterministic) {
  const Vec x0{1.0, 0.0};
  StableConstructionOptions o;
  o.keep_path = false;
  const auto a = construct_stable(kCauchyPlane, x0, 10.0, 0.05, 1e-3, {35, 0}, o);
  const auto b = construct_stable(kCauchyPlane, x0, 10.0, 0.05, 1e-3, {35, 0}, o);
  EXPECT_EQ(a.f.radial_minimum, b.f.radial_minimum);
  EXPECT_EQ(a.f.value_at_T, b.f.value_at_T);
  EXPECT_EQ(a.f.time_of_minimum, b.f.time_of_minimum);
  EXPECT_FALSE(a.path.has_value());
}

TEST(Stable, DecompositionAgainstDirect) {
  StableConstructionOptions o;
  o.particles = 32;
  o.post_particles = 32;
  o.keep_path = false;
  const auto built = constructed_ensemble(stable_spec(500, 0.05, 5), false, o);
  const auto direct = direct_ensemble(stable_spec(500, 5e-4, 6));
  for (const auto& r : verify_decomposition(direct, built, kAllFunctionals, 0.086, 1, 1e-3))
    EXPECT_TRUE(r.pass) << r.name << " " << r.statistic;
}

TEST(Ensembles, IndependentOfWorkerCount) {
  const auto spec = stable_spec(64, 0.01, 7);
  auto& workers = worker_count();
  const unsigned saved = workers.load();
  workers = 1;
  const auto one = direct_ensemble(spec);
  workers = 3;
  const auto three = direct_ensemble(spec);
  workers = saved;
  EXPECT_EQ(one.column("radial_minimum"), three.column("radial_minimum"));
  EXPECT_EQ(one.column("value_at_T"), three.column("value_at_T"));
}
