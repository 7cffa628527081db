#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wpd/lamperti_kiu.hpp"
#include "wpd/quadrature.hpp"

using namespace wpd;
using namespace wpd::lk;

namespace {

Vec grid(std::size_t n, double dt) {
  Vec t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * dt;
  return t;
}

MapPath constant_map(std::size_t n, double dt, double c, const Vec& theta) {
  Vec th;
  for (std::size_t i = 0; i < n; ++i) th.insert(th.end(), theta.begin(), theta.end());
  return MapPath(grid(n, dt), Vec(n, c), std::move(th), theta.size());
}

// Random step path: xi and Theta constant between unevenly spaced knots.
MapPath random_step_map(unsigned seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> gap(0.05, 0.4), lvl(-1.5, 1.5), ang(-3.0, 3.0);
  Vec t{0.0}, xi, th;
  for (std::size_t i = 1; i < n; ++i) t.push_back(t.back() + gap(gen));
  for (std::size_t i = 0; i < n; ++i) {
    xi.push_back(lvl(gen));
    const double a = ang(gen);
    th.push_back(std::cos(a));
    th.push_back(std::sin(a));
  }
  return MapPath(std::move(t), std::move(xi), std::move(th), 2);
}

}  // namespace

TEST(Clock, IdentityForZeroOrdinate) {
  const auto p = constant_map(11, 0.1, 0.0, {1.0});
  const auto tc = build_clock(p, 1.5);
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(tc.clock[k], p.times()[k], 1e-15);
  EXPECT_NEAR(*phi(tc, 0.7), 0.7, 1e-14);
}

TEST(Clock, ConstantOrdinate) {
  const double c = 0.8, alpha = 1.2;
  const auto p = constant_map(21, 0.05, c, {1.0});
  const auto tc = build_clock(p, alpha);
  for (std::size_t k = 0; k < p.size(); ++k)
    EXPECT_NEAR(tc.clock[k], p.times()[k] * std::exp(alpha * c), 1e-13);
  EXPECT_NEAR(*phi(tc, 0.9), 0.9 * std::exp(-alpha * c), 1e-13);
}

TEST(Clock, OneJumpStepFunction) {
  // xi = 0 on [0, 1), 2 on [1, 2]; clock at 2 is 1 + e^{2 alpha}.
  const double alpha = 0.5;
  const MapPath p({0.0, 1.0, 2.0}, {0.0, 2.0, 2.0}, {1.0, 1.0, 1.0}, 1);
  const auto tc = build_clock(p, alpha);
  EXPECT_DOUBLE_EQ(tc.clock[1], 1.0);
  EXPECT_NEAR(tc.clock[2], 1.0 + std::exp(2.0 * alpha), 1e-14);
}

TEST(Clock, InverseAtKnots) {
  const auto p = random_step_map(3, 50);
  const auto tc = build_clock(p, 1.0);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) EXPECT_NEAR(*phi(tc, tc.clock[k]), p.times()[k], 1e-12);
}

TEST(Clock, BeyondLifetime) {
  const auto p = constant_map(5, 0.25, 0.0, {1.0});
  const auto tc = build_clock(p, 1.0);
  EXPECT_FALSE(phi(tc, 1.5).has_value());
}

TEST(Transform, ConstantMapGivesConstantPoint) {
  const Vec theta{0.6, 0.8};
  const auto p = constant_map(11, 0.1, 0.0, theta);
  const auto x = ssmp_from_map(p, 1.0, grid(9, 0.1));
  EXPECT_FALSE(x.killed().has_value());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(x.point(i)[0], 0.6, 1e-15);
    EXPECT_NEAR(x.point(i)[1], 0.8, 1e-15);
  }
}

TEST(Transform, LinearOrdinateAgainstExactClock) {
  // xi_s = c s; exact clock (e^{alpha c s} - 1)/(alpha c), inverted by bisection.
  const double c = 0.7, alpha = 1.0, dt = 1e-4;
  const std::size_t n = 20001;
  Vec t = grid(n, dt), xi(n);
  for (std::size_t i = 0; i < n; ++i) xi[i] = c * t[i];
  const MapPath p(t, xi, Vec(n, 1.0), 1);
  const Vec out{0.0, 0.3, 0.8, 1.5};
  const auto x = ssmp_from_map(p, alpha, out);
  ASSERT_FALSE(x.killed().has_value());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = quad::bisect([&](double u) { return std::expm1(alpha * c * u) / (alpha * c) - out[i]; }, 0.0, 2.0);
    EXPECT_NEAR(x.point(i)[0], std::exp(c * s), 5.0 * dt);
  }
}

TEST(Transform, LifetimeIsFinalClock) {
  const auto p = random_step_map(5, 30);
  const MapPath killed(p.times(), p.xi(), p.theta_flat(), 2, p.size() - 1);
  const auto tc = build_clock(killed, 1.0);
  double expect = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) expect += std::exp(p.xi()[k]) * (p.times()[k + 1] - p.times()[k]);
  EXPECT_NEAR(tc.lifetime(), expect, 1e-12 * expect);
  Vec out = grid(200, tc.lifetime() / 150.0);
  const auto x = ssmp_from_map(killed, 1.0, out);
  ASSERT_TRUE(x.killed().has_value());
  EXPECT_GE(x.times()[*x.killed()], tc.lifetime());
  EXPECT_LT(x.times()[*x.killed() - 1], tc.lifetime());
}

TEST(Transform, UnitRadiusGivesZeroOrdinate) {
  const std::size_t n = 8;
  Vec c;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(std::cos(0.3 * i));
    c.push_back(std::sin(0.3 * i));
  }
  const SsmpPath x(grid(n, 0.5), c, 2, 1.3);
  const auto m = map_from_ssmp(x);
  for (double v : m.xi()) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_NEAR(m.times().back(), x.times().back(), 1e-14);
}

TEST(Transform, ConstantRadiusZeta) {
  const double r = 2.0, alpha = 1.5;
  const std::size_t n = 6;
  Vec c;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(0.0);
    c.push_back(r);
  }
  const SsmpPath x(grid(n, 0.2), c, 2, alpha);
  const auto m = map_from_ssmp(x);
  EXPECT_NEAR(m.times().back(), x.times().back() * std::pow(r, -alpha), 1e-14);
}

TEST(RoundTrip, StepPathsExact) {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto p = random_step_map(seed, 40);
    const double alpha = 0.5 + 0.07 * seed;
    const auto tc = build_clock(p, alpha);
    // Sample exactly at the clock knots so every step is seen once.
    Vec out(tc.clock.begin(), tc.clock.end() - 1);
    const auto x = ssmp_from_map(p, alpha, out);
    const auto back = map_from_ssmp(x);
    ASSERT_EQ(back.size(), p.size() - 1);
    for (std::size_t i = 0; i < back.size(); ++i) {
      EXPECT_NEAR(back.times()[i], p.times()[i], 1e-9);
      EXPECT_NEAR(back.xi()[i], p.xi()[i], 1e-9);
      for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(back.theta(i)[j], p.theta(i)[j], 1e-9);
    }
  }
}

TEST(Scaling, ShiftedOrdinateIsScaledProcess) {
  // (xi + log c, Theta) maps to c X_{c^{-alpha} t}.
  const auto p = random_step_map(11, 30);
  const double alpha = 1.3, c = 2.5;
  Vec shifted(p.xi());
  for (double& v : shifted) v += std::log(c);
  const MapPath q(p.times(), shifted, p.theta_flat(), 2);
  const auto tc = build_clock(p, alpha);
  Vec out;
  for (int i = 0; i < 50; ++i) out.push_back(0.9 * tc.lifetime() * i / 50.0);
  Vec out_scaled(out);
  for (double& v : out_scaled) v *= std::pow(c, alpha);
  const auto x = ssmp_from_map(p, alpha, out);
  const auto y = ssmp_from_map(q, alpha, out_scaled);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(y.point(i)[j], c * x.point(i)[j], 1e-12);
}

TEST(RoundTrip, KnotErrorHelper) {
  for (unsigned seed = 1; seed <= 5; ++seed) EXPECT_LE(knot_round_trip_error(random_step_map(seed, 40), 1.1), 1e-9);
}

TEST(RoundTrip, ClockErrorShrinksWithTheGrid) {
  // Linear ordinate: the exact clock is known, so only the sampling grid matters.
  const double c = 0.7, dtf = 1e-4;
  const std::size_t n = 20001;
  Vec t = grid(n, dtf), xi(n);
  for (std::size_t i = 0; i < n; ++i) xi[i] = c * t[i];
  const MapPath p(t, xi, Vec(n, 1.0), 1);
  const double coarse = clock_round_trip_error(p, 1.0, 0.02, 1.5);
  const double fine = clock_round_trip_error(p, 1.0, 0.01, 1.5);
  EXPECT_GT(coarse / fine, 1.8);
  EXPECT_THROW(clock_round_trip_error(p, 1.0, 0.01, 100.0), DomainError);
}
