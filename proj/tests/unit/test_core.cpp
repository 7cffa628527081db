#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wpd/core.hpp"

using namespace wpd;

TEST(Polar, AxisPoints) {
  const Vec a{1.0, 0.0};
  const auto p = to_polar(a);
  EXPECT_DOUBLE_EQ(p.logr, 0.0);
  EXPECT_DOUBLE_EQ(p.theta[0], 1.0);
  EXPECT_DOUBLE_EQ(p.theta[1], 0.0);

  const Vec e{std::numbers::e, 0.0};
  EXPECT_NEAR(to_polar(e).logr, 1.0, 1e-15);
}

TEST(Polar, ThreeFourFive) {
  const Vec x{3.0, 4.0};
  const double r = std::hypot(3.0, 4.0);
  const auto p = to_polar(x);
  EXPECT_NEAR(p.logr, std::log(r), 1e-15);
  EXPECT_NEAR(p.theta[0], 3.0 / r, 1e-15);
  EXPECT_NEAR(p.theta[1], 4.0 / r, 1e-15);
}

TEST(Polar, ZeroVectorRejected) {
  const Vec z{0.0, 0.0, 0.0};
  EXPECT_THROW(to_polar(z), DomainError);
}

TEST(Polar, FromPolar) {
  const Vec up{0.0, 1.0};
  const auto y = from_polar(0.0, Angle::from_unit(up));
  EXPECT_DOUBLE_EQ(y[0], 0.0);
  EXPECT_DOUBLE_EQ(y[1], 1.0);
  const auto e = from_polar(1.0, Angle::from_radians(0.0));
  EXPECT_NEAR(e[0], std::numbers::e, 1e-15);
  EXPECT_DOUBLE_EQ(e[1], 0.0);
}

TEST(Polar, NonUnitAngleRejected) {
  const Vec v{1.0, 1e-4};
  EXPECT_THROW(Angle::from_unit(v), DomainError);
}

TEST(Polar, RoundTripRandom) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> scale(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    Vec x(static_cast<std::size_t>(dim(gen)));
    const double s = std::exp(scale(gen));
    for (double& c : x) c = s * nd(gen);
    const auto p = to_polar(x);
    EXPECT_NEAR(norm(p.theta.components()), 1.0, Angle::kUnitTolerance);
    const Vec y = from_polar(p.logr, p.theta);
    EXPECT_LE(distance(x, y), 1e-12 * norm(x));
  }
}

TEST(Angle, RadiansRange) {
  EXPECT_NEAR(Angle::from_radians(std::numbers::pi).radians(), std::numbers::pi, 1e-15);
  EXPECT_NEAR(Angle::from_radians(-std::numbers::pi / 2).radians(), -std::numbers::pi / 2, 1e-15);
  const Vec v{1.0, 2.0, 2.0};
  EXPECT_THROW(Angle::from_vector(v).radians(), DomainError);
}

namespace {

SsmpPath line(Vec times, const Vec& start, const Vec& end, std::optional<std::size_t> killed) {
  const std::size_t n = times.size();
  Vec c;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t k = 0; k < start.size(); ++k) c.push_back(start[k] + f * (end[k] - start[k]));
  }
  return SsmpPath(std::move(times), std::move(c), start.size(), 1.0, killed);
}

}  // namespace

TEST(Concat, GluesAtSharedPoint) {
  const Vec p{0.5, 0.5};
  const auto pre = line({0.0, 1.0, 2.0}, {1.0, 0.0}, p, 2);
  const auto post = line({0.0, 1.0}, p, {2.0, 0.0}, std::nullopt);
  const auto g = concat_paths(pre, post);
  EXPECT_EQ(g.path.size(), 4u);
  EXPECT_DOUBLE_EQ(g.gap, 0.0);
  const Vec expect_t{0.0, 1.0, 2.0, 3.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g.path.times()[i], expect_t[i]);
  EXPECT_DOUBLE_EQ(g.path.point(2)[0], 0.5);
  EXPECT_FALSE(g.path.killed().has_value());
}

TEST(Concat, SampleCountPreserved) {
  const auto pre = line({0.0, 0.3, 0.9, 1.4}, {1.0, 0.0}, {0.2, 0.1}, 3);
  const auto post = line({0.0, 0.5, 0.7}, {0.2, 0.1}, {3.0, 1.0}, std::nullopt);
  const auto g = concat_paths(pre, post);
  EXPECT_EQ(g.path.size(), pre.size() - 1 + post.size());
  for (std::size_t i = 1; i < g.path.size(); ++i) EXPECT_GT(g.path.times()[i], g.path.times()[i - 1]);
}

TEST(Concat, MismatchRaisesGlueError) {
  const auto pre = line({0.0, 1.0}, {1.0, 0.0}, {1.0, 0.5}, 1);
  const auto post = line({0.0, 1.0}, {1.0, 1.0}, {2.0, 0.0}, std::nullopt);
  try {
    concat_paths(pre, post, 1e-6);
    FAIL() << "expected GlueError";
  } catch (const GlueError& e) {
    EXPECT_NEAR(e.gap(), 0.5, 1e-15);
  }
}

TEST(Concat, PreMustBeKilled) {
  const auto pre = line({0.0, 1.0}, {1.0, 0.0}, {1.0, 0.5}, std::nullopt);
  const auto post = line({0.0, 1.0}, {1.0, 0.5}, {2.0, 0.0}, std::nullopt);
  EXPECT_THROW(concat_paths(pre, post), DomainError);
}

TEST(Paths, Validation) {
  EXPECT_THROW(MapPath({0.1, 0.2}, {0.0, 0.0}, {1.0, 1.0}, 1), DomainError);
  EXPECT_THROW(MapPath({0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, 1), DomainError);
  EXPECT_THROW(SsmpPath({0.0, 1.0}, {1.0, 0.0, 0.0, 0.0}, 2, 1.0), DomainError);
  EXPECT_NO_THROW(SsmpPath({0.0, 1.0}, {1.0, 0.0, 0.0, 0.0}, 2, 1.0, 1));
  EXPECT_THROW(SsmpPath({0.0, 1.0}, {1.0, 0.0, 1.0, 0.0}, 2, 0.0), DomainError);
}

TEST(Paths, CsvHasKillRow) {
  const auto p = line({0.0, 1.0}, {1.0, 0.0}, {0.5, 0.0}, 1);
  std::ostringstream os;
  write_csv(os, p);
  EXPECT_NE(os.str().find("#killed=1"), std::string::npos);
  EXPECT_EQ(os.str().rfind("t,x_1,x_2", 0), 0u);
}
