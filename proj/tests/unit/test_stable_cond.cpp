#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "wpd/quadrature.hpp"
#include "wpd/stable_cond.hpp"
#include "wpd/stats.hpp"

using namespace wpd;
using namespace wpd::stable;
using std::numbers::pi;

namespace {

const StableParams kCauchyPlane{1.0, 2};

// Radial density of the closest-reach point from (1, 0), by quadrature over the angle.
double radial_density_by_quadrature(double u, const StableParams& p) {
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  const Vec x{1.0, 0.0};
  const auto f = [&](double phi) {
    const Vec y{u * std::cos(phi), u * std::sin(phi)};
    const double ry = norm(y);
    if (!(ry > 0.0 && ry < 1.0)) return 0.0;
    return pocr_density(x, y, p) * u;
  };
  return 2.0 * ts.integrate(f, 0.0, pi, 1e-12);
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_THROW((StableParams{0.0, 2}.validate()), DomainError);
  EXPECT_THROW((StableParams{1.5, 1}.validate()), DomainError);
  EXPECT_THROW((StableParams{2.0, 2}.validate()), DomainError);
  EXPECT_NO_THROW((StableParams{2.0, 3}.validate()));
  EXPECT_NO_THROW((StableParams{0.8, 1}.validate()));
}

TEST(Simulate, BrownianQuadraticMartingale) {
  const StableParams p{2.0, 3};
  const Vec x0{1.0, 0.5, -0.5};
  const int n = 20000;
  const double T = 0.8;
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    const auto path = simulate_stable(p, x0, T, 0.1, sampling::SeedSpec{1, 0}.child(i));
    const double r = path.radius(path.size() - 1);
    v[i] = r * r - 1.5 - 3.0 * T;
  }
  EXPECT_NEAR(stats::mean(v), 0.0, 3.0 * std::sqrt(stats::variance(v) / n));
}

TEST(Simulate, IncrementIsotropy) {
  const Vec x0{1.0, 0.0};
  const int n = 12000;
  Vec ang(n);
  sampling::Rng rng({2, 0});
  for (int i = 0; i < n; ++i) {
    Vec x = x0;
    stable_step(kCauchyPlane, x, 0.01, rng);
    ang[i] = std::atan2(x[1], x[0] - 1.0);
  }
  Vec edges, probs(12, 1.0 / 12);
  for (int k = 0; k <= 12; ++k) edges.push_back(-pi + 2.0 * pi * k / 12.0);
  EXPECT_GT(stats::chi_square_fit(ang, edges, probs).p_value, 0.01);
}

TEST(Simulate, SelfSimilarity) {
  const StableParams p{1.3, 2};
  const double c = 2.0, t = 0.5;
  const Vec x0{1.0, 0.0}, cx0{c, 0.0};
  const int n = 10000;
  Vec a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const auto s = simulate_stable(p, x0, std::pow(c, -p.alpha) * t, 0.01, sampling::SeedSpec{3, 0}.child(i));
    a[i] = c * s.radius(s.size() - 1);
    const auto q = simulate_stable(p, cx0, t, 0.01, sampling::SeedSpec{3, 1}.child(i));
    b[i] = q.radius(q.size() - 1);
  }
  EXPECT_LT(stats::ks_two_sample(a, b).statistic, 0.02);
}

TEST(Pocr, PrefactorPlaneCauchy) {
  EXPECT_NEAR(pocr_prefactor(kCauchyPlane), 1.0 / (pi * pi), 1e-15);
  const StableParams p{1.2, 3};
  const double expect = std::pow(pi, -1.5) * std::tgamma(1.5) * std::tgamma(1.5) / (std::tgamma(0.9) * std::tgamma(0.6));
  EXPECT_NEAR(pocr_prefactor(p), expect, 1e-14);
}

TEST(Pocr, DomainChecks) {
  const Vec x{1.0, 0.0}, out{1.5, 0.0}, zero{0.0, 0.0};
  EXPECT_THROW(pocr_density(x, out, kCauchyPlane), DomainError);
  EXPECT_THROW(pocr_density(x, zero, kCauchyPlane), DomainError);
  EXPECT_THROW(pocr_density(x, x, kCauchyPlane), DomainError);
}

TEST(Pocr, Isotropy) {
  const Vec x{1.3, 0.4}, y{0.2, -0.5};
  const double a = 0.77;
  const auto rot = [&](const Vec& v) { return Vec{std::cos(a) * v[0] - std::sin(a) * v[1], std::sin(a) * v[0] + std::cos(a) * v[1]}; };
  EXPECT_NEAR(pocr_density(x, y, kCauchyPlane), pocr_density(rot(x), rot(y), kCauchyPlane), 1e-13);
}

TEST(Pocr, RadialMarginalIsBeta) {
  // |y|^2 ~ Beta((d - alpha)/2, alpha/2) for the planar case.
  for (const StableParams p : {StableParams{0.6, 2}, StableParams{1.5, 2}}) {
    const double a = (p.d - p.alpha) / 2.0, b = p.alpha / 2.0;
    const double inv_beta = std::tgamma(a + b) / (std::tgamma(a) * std::tgamma(b));
    for (double u : {0.2, 0.5, 0.8, 0.95}) {
      const double u2 = u * u;
      const double expect = 2.0 * u * inv_beta * std::pow(u2, a - 1.0) * std::pow(1.0 - u2, b - 1.0);
      EXPECT_NEAR(radial_density_by_quadrature(u, p) / expect, 1.0, 1e-7) << "alpha=" << p.alpha << " u=" << u;
    }
  }
}

TEST(Pocr, TotalMassIsOne) {
  for (const StableParams p : {StableParams{1.0, 2}, StableParams{0.6, 2}, StableParams{1.5, 2}, StableParams{1.2, 3}})
  {
    // Radii within machine epsilon of the sphere are not representable; they hold mass ~ eps^(alpha/2).
    const double tol = std::max(1e-6, 4.0 * std::pow(std::numeric_limits<double>::epsilon(), 0.5 * p.alpha));
    EXPECT_NEAR(pocr_total_mass(p), 1.0, tol) << "alpha=" << p.alpha << " d=" << p.d;
  }
}

TEST(Pocr, LibraryRadialDensityMatchesAngularQuadrature) {
  for (double u : {0.05, 0.5, 0.97}) EXPECT_NEAR(pocr_radial_density(u, kCauchyPlane), radial_density_by_quadrature(u, kCauchyPlane), 1e-8);
}

TEST(Pocr, PlaneCauchyRadialClosedForm) {
  for (double u : {0.1, 0.5, 0.9, 0.99}) EXPECT_NEAR(radial_density_by_quadrature(u, kCauchyPlane), 2.0 / pi / std::sqrt(1.0 - u * u), 1e-7);
}

TEST(Pocr, SamplerRadiusMarginal) {
  const Vec x{1.0, 0.0};
  PocrSampler s(kCauchyPlane);
  sampling::Rng rng({4, 0});
  const int n = 10000;
  Vec radii(n), ang(n);
  for (int i = 0; i < n; ++i) {
    const Vec y = s.sample(x, rng);
    radii[i] = norm(y);
    ang[i] = std::atan2(y[1], y[0]);
    ASSERT_LT(radii[i], 1.0);
  }
  Vec edges, probs;
  for (int k = 0; k <= 20; ++k) edges.push_back(k / 20.0);
  for (int k = 0; k < 20; ++k)
    probs.push_back(quad::integrate_singular([](double u) { return radial_density_by_quadrature(u, kCauchyPlane); },
                                             edges[k], edges[k + 1], 1e-9));
  EXPECT_GT(stats::chi_square_fit(radii, edges, probs).p_value, 0.01);
  EXPECT_NEAR(stats::mean(ang), 0.0, 3.0 * std::sqrt(stats::variance(ang) / n));
  EXPECT_GT(s.acceptance_rate(), 0.5);
}

TEST(Pocr, SamplerScalesWithStart) {
  const StableParams p{1.4, 3};
  const Vec x{0.0, 3.0, 4.0};
  PocrSampler s(p);
  sampling::Rng rng({5, 0});
  for (int i = 0; i < 2000; ++i) ASSERT_LT(norm(s.sample(x, rng)), 5.0);
}

TEST(HDown, VanishesAtSphere) {
  const Vec theta{1.0, 0.0};
  const auto t = Target::at(theta);
  const Vec near{-1.0 - 1e-10, 0.0};
  EXPECT_LT(h_down(near, t, kCauchyPlane), 1e-4);
  const Vec inside{0.5, 0.0};
  EXPECT_THROW(h_down(inside, t, kCauchyPlane), DomainError);
}

TEST(HDown, NearSideLarger) {
  const Vec theta{1.0, 0.0};
  const auto t = Target::at(theta);
  const Vec a{2.0, 0.0}, b{-2.0, 0.0};
  EXPECT_GT(h_down(a, t, kCauchyPlane), h_down(b, t, kCauchyPlane));
}

TEST(HDown, SphereEqualsIntegratedPoint) {
  const Vec x{1.7, -0.4};
  const double point_integral =
      quad::integrate([&](double phi) { return h_down(x, Target::at(Vec{std::cos(phi), std::sin(phi)}), kCauchyPlane); },
                      -pi, pi) /
      (2.0 * pi);
  EXPECT_NEAR(h_down(x, Target::sphere(), kCauchyPlane), point_integral, 1e-6);
  EXPECT_NEAR(h_down(x, Target::arc(-pi, pi), kCauchyPlane), point_integral, 1e-6);
  const StableParams p3{1.0, 3};
  const Vec x3{0.3, 1.5, 0.2}, pole{0.0, 0.0, 1.0};
  EXPECT_NEAR(h_down(x3, Target::cap(pole, pi), p3), h_down(x3, Target::sphere(), p3), 1e-6);
}

TEST(HUp, Values) {
  const Vec one{1.0, 0.0}, r2{1.0, 1.0};
  EXPECT_DOUBLE_EQ(h_up(one, kCauchyPlane), 0.0);
  EXPECT_NEAR(h_up(r2, kCauchyPlane), 2.0 * std::atan(1.0), 1e-10);
  EXPECT_NEAR(h_up_limit(kCauchyPlane), std::tgamma(0.5) * std::tgamma(0.5) / std::tgamma(1.0), 1e-12);
  const Vec inside{0.9, 0.0};
  EXPECT_THROW(h_up(inside, kCauchyPlane), DomainError);
}

TEST(HUp, ClosedFormPlaneCauchy) {
  for (double r : {1.01, 1.5, 3.0, 10.0, 1000.0}) {
    const Vec x{r, 0.0};
    EXPECT_NEAR(h_up(x, kCauchyPlane), 2.0 * std::atan(std::sqrt(r * r - 1.0)), 1e-9);
  }
}

TEST(HUp, MonotoneAndBounded) {
  for (const StableParams p : {StableParams{1.0, 2}, StableParams{0.5, 3}, StableParams{1.8, 2}}) {
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
      Vec x(p.d, 0.0);
      x[0] = 1.0 + 0.2 * i * i;
      const double h = h_up(x, p);
      EXPECT_GT(h, prev);
      EXPECT_LT(h, h_up_limit(p));
      prev = h;
    }
  }
}

TEST(Doob, StaticPathAndBallEntry) {
  const SsmpPath still({0.0, 1.0}, {2.0, 0.0, 2.0, 0.0}, 2, 1.0);
  EXPECT_DOUBLE_EQ(doob_weight(still, Conditioning::up(), 0.0, kCauchyPlane).weight, 1.0);
  const SsmpPath dip({0.0, 1.0, 2.0}, {2.0, 0.0, 0.5, 0.0, 3.0, 0.0}, 2, 1.0);
  const auto w = doob_weight(dip, Conditioning::up(), 0.0, kCauchyPlane);
  EXPECT_DOUBLE_EQ(w.weight, 0.0);
  EXPECT_FALSE(w.alive);
}

TEST(Doob, MartingaleUp) {
  const Vec x{2.0, 0.0};
  const auto r = check_doob_martingale(x, Conditioning::up(), 0.0, kCauchyPlane, {0.5}, 1e-3, 10000, {6, 0});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].pass) << r[0].statistic;
}

TEST(Conditioned, UpHasNoWeightInsideBall) {
  const Vec x{1.5, 0.0};
  const auto e = simulate_conditioned(x, Conditioning::up(), 0.0, kCauchyPlane, 1.0, 0.01, 2000, {7, 0});
  double inside = 0.0;
  for (std::size_t i = 0; i < e.paths.size(); ++i) {
    const auto& p = e.paths[i];
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p.radius(k) < 1.0) inside += e.weights[i];
  }
  EXPECT_DOUBLE_EQ(inside, 0.0);
  EXPECT_NEAR(stats::mean(e.weights), 1.0, 1e-12);
}

TEST(Conditioned, DownPointMinimumDecreasesInT) {
  const Vec x{2.0, 0.0}, theta{0.0, 1.0};
  auto weighted_median_min = [&](double T) {
    const auto e = simulate_conditioned(x, Conditioning::down(Target::at(theta)), 0.0, kCauchyPlane, T, 0.005, 3000,
                                        {8, 0});
    std::vector<std::pair<double, double>> v;
    for (std::size_t i = 0; i < e.paths.size(); ++i) {
      double m = INFINITY;
      for (std::size_t k = 0; k < e.paths[i].alive_count(); ++k) m = std::min(m, e.paths[i].radius(k));
      v.emplace_back(m, e.weights[i]);
    }
    std::sort(v.begin(), v.end());
    double acc = 0.0, half = 0.5 * static_cast<double>(v.size());
    for (const auto& [m, w] : v)
      if ((acc += w) >= half) return m;
    return v.back().first;
  };
  EXPECT_LT(weighted_median_min(2.0), weighted_median_min(0.5));
}

TEST(Conditioned, BrownianInverseRadiusStable) {
  // Barrier far inside the start: weights are close to 1 and 1/|X| is harmonic.
  const StableParams p{2.0, 3};
  const Vec x{5.0, 0.0, 0.0};
  auto mean_inv = [&](double T, Vec& vals) {
    // Weights stay near 1, so resampling would only add duplicate-particle noise.
    ConditionedOptions opt;
    opt.t_resample = 0.0;
    const auto e = simulate_conditioned(x, Conditioning::up(), -10.0, p, T, 0.01, 10000, {9, 0}, opt);
    vals.clear();
    double s = 0.0;
    for (std::size_t i = 0; i < e.paths.size(); ++i) {
      const auto& q = e.paths[i];
      const double v = e.weights[i] / q.radius(q.size() - 1);
      vals.push_back(v);
      s += v;
    }
    return s / static_cast<double>(vals.size());
  };
  Vec a, b;
  const double m1 = mean_inv(0.5, a), m2 = mean_inv(1.0, b);
  const double se = std::sqrt(stats::variance(a) / a.size() + stats::variance(b) / b.size());
  EXPECT_NEAR(m1, m2, 3.0 * se);
  EXPECT_NEAR(m1, 0.2, 3.0 * std::sqrt(stats::variance(a) / a.size()));
}

TEST(Harmonicity, StartOnShellIsExact) {
  const Vec x{1.8, 0.0}, theta{0.0, 1.0};
  const auto r = check_harmonicity_hdown(kCauchyPlane, Target::at(theta), x, {1.5, 2.0}, 10, {10, 0});
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
}

TEST(Harmonicity, BrownianShellAwayFromBarrier) {
  const StableParams p{2.0, 3};
  const Vec x{2.5, 0.5, 0.0}, theta{0.0, 1.0, 0.0};
  const auto r = check_harmonicity_hdown(p, Target::at(theta), x, {1.5, 2.0}, 10000, {12, 0}, 2.5e-4, 1e3);
  EXPECT_LT(r.statistic, 0.03) << r.notes[0];
}

TEST(Harmonicity, CauchyShellNearBarrier) {
  // Stopped values have a power tail near the target, so the tolerance is loose.
  const Vec x{3.0, 0.5}, theta{0.0, 1.0};
  const auto r = check_harmonicity_hdown(kCauchyPlane, Target::at(theta), x, {1.01, 2.0}, 20000, {11, 0}, 2e-3, 1e3);
  EXPECT_LT(r.statistic, 0.15) << r.notes[0];
}

TEST(Harmonicity, CauchySkipsDistantShell) {
  // Paths that jump over the shell and reach the target carry the missing mass.
  const Vec x{3.0, 0.5}, theta{0.0, 1.0};
  const auto r = check_harmonicity_hdown(kCauchyPlane, Target::at(theta), x, {1.5, 2.0}, 20000, {11, 0}, 2e-3, 1e3);
  EXPECT_GT(r.statistic, 0.15) << r.notes[0];
}
