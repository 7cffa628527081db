#include "wpd/stable_cond.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/uniform_on_sphere.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "wpd/kernels/kernels.hpp"
#include "wpd/parallel.hpp"
#include "wpd/quadrature.hpp"

namespace wpd::stable {

using sampling::Rng;
using sampling::SeedSpec;

void StableParams::validate() const {
  if (d < 1) throw DomainError("stable: dimension must be positive");
  if (alpha == 2.0) {
    if (d < 3) throw DomainError("stable: alpha = 2 requires d >= 3 (transience)");
    return;
  }
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable: alpha must lie in (0, 2]");
  if (!(alpha < static_cast<double>(d))) throw DomainError("stable: transience requires alpha < d");
}

namespace {

void check_point(const StableParams& p, std::span<const double> x) {
  if (x.size() != p.d) throw DomainError("stable: point has wrong dimension");
  if (!(norm(x) > 0.0)) throw DomainError("stable: point must be nonzero");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double relative_gap(double a, double b) {
  const double d = std::abs(a - b);
  return b != 0.0 ? d / std::abs(b) : d;
}

}  // namespace

void stable_step(const StableParams& p, std::span<double> x, double dt, Rng& rng) {
  if (p.alpha == 2.0) {
    // Standard Brownian motion in the alpha = 2 case.
    const double s = std::sqrt(dt);
    for (double& c : x) c += s * rng.normal();
    return;
  }
  const double a = sampling::positive_stable(0.5 * p.alpha, rng);
  const double scale = std::pow(dt, 1.0 / p.alpha) * std::sqrt(2.0 * a);
  for (double& c : x) c += scale * rng.normal();
}

SsmpPath simulate_stable(const StableParams& p, std::span<const double> x0, double T, double dt, SeedSpec seed) {
  p.validate();
  check_point(p, x0);
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("simulate_stable: T and dt must be positive");
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / dt - 1e-9)));
  Rng rng(seed);
  Vec times(steps + 1), coords;
  coords.reserve((steps + 1) * p.d);
  coords.insert(coords.end(), x0.begin(), x0.end());
  Vec x(x0.begin(), x0.end());
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = k + 1 == steps ? T : static_cast<double>(k + 1) * dt;
    stable_step(p, x, t1 - times[k], rng);
    times[k + 1] = t1;
    // A draw landing exactly on the origin has probability zero; nudge it off.
    if (norm(x) == 0.0) x[0] = std::numeric_limits<double>::min();
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return SsmpPath(std::move(times), std::move(coords), p.d, p.alpha);
}

std::optional<RadialMinimum> draw_radial_minimum(const StableParams& p, std::span<const double> x0, double h,
                                                 double margin, Rng& rng, std::size_t max_steps) {
  p.validate();
  check_point(p, x0);
  if (!(h > 0.0) || !(margin > 0.0)) throw DomainError("draw_radial_minimum: h and margin must be positive");
  Vec x(x0.begin(), x0.end());
  RadialMinimum best{x, 0.0, 0.0};
  double r = norm(x), rmin = r, t = 0.0;
  const double ratio = std::exp(margin);
  for (std::size_t k = 0; k < max_steps; ++k) {
    const double dt = lamperti_step(p, r, h);
    stable_step(p, x, dt, rng);
    t += dt;
    r = norm(x);
    if (r <= rmin) {
      rmin = r;
      best.point = x;
      best.time = t;
    } else if (r > ratio * rmin) {
      best.final_radius = r;
      return best;
    }
  }
  return std::nullopt;
}

double pocr_prefactor(const StableParams& p) {
  p.validate();
  const double d = static_cast<double>(p.d);
  const double g = std::tgamma(0.5 * d);
  return std::pow(std::numbers::pi, -0.5 * d) * g * g /
         (std::tgamma(0.5 * (d - p.alpha)) * std::tgamma(0.5 * p.alpha));
}

double pocr_density(std::span<const double> x, std::span<const double> y, const StableParams& p) {
  check_point(p, x);
  if (y.size() != p.d) throw DomainError("pocr_density: point has wrong dimension");
  const double rx = norm(x), ry = norm(y);
  if (!(ry > 0.0) || !(ry < rx)) throw DomainError("pocr_density: need 0 < |y| < |x|");
  const double dist = distance(x, y);
  return pocr_prefactor(p) * std::pow(rx * rx - ry * ry, 0.5 * p.alpha) /
         (std::pow(dist, static_cast<double>(p.d)) * std::pow(ry, p.alpha));
}

PocrSampler::PocrSampler(StableParams p) : p_(p) {
  p_.validate();
  if (p_.alpha == 2.0) throw DomainError("sample_pocr: requires alpha < 2");
}

Vec PocrSampler::sample(std::span<const double> x, Rng& rng) {
  check_point(p_, x);
  const std::size_t d = p_.d;
  const double rx = norm(x);
  Vec xhat(x.begin(), x.end());
  for (double& c : xhat) c /= rx;

  boost::random::beta_distribution<double> beta(0.5 * (static_cast<double>(d) - p_.alpha), 0.5 * p_.alpha);
  double u = 0.0;
  do u = std::sqrt(beta(rng));
  while (!(u > 0.0 && u < 1.0));

  boost::random::uniform_on_sphere<double> sphere(static_cast<int>(d));
  const double envelope = 1.0 + u;
  Vec theta(d);
  for (;;) {
    ++proposals_;
    const Vec w = sphere(rng);
    // Ray from a = u xhat in direction w meets the unit sphere at a + s w.
    const double aw = u * dot(xhat, w);
    const double s = -aw + std::sqrt(aw * aw + 1.0 - u * u);
    for (std::size_t i = 0; i < d; ++i) theta[i] = u * xhat[i] + s * w[i];
    // target / proposal = (1 - u^2) / (1 - theta.a), at most 1 + u. The
    // denominator is written as (1 - u) + u |theta - xhat|^2 / 2 for accuracy near u = 1.
    double gap2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) gap2 += (theta[i] - xhat[i]) * (theta[i] - xhat[i]);
    const double ratio = (1.0 - u) * (1.0 + u) / ((1.0 - u) + 0.5 * u * gap2);
    if (ratio > envelope * (1.0 + 1e-12)) throw std::logic_error("sample_pocr: envelope violated");
    if (rng.uniform() * envelope <= ratio) break;
  }
  ++accepted_;
  Vec y(d);
  for (std::size_t i = 0; i < d; ++i) y[i] = rx * u * theta[i];
  return y;
}

double PocrSampler::acceptance_rate() const {
  return proposals_ ? static_cast<double>(accepted_) / static_cast<double>(proposals_) : 0.0;
}

double pocr_radial_density(double u, const StableParams& p, double tol) {
  p.validate();
  if (p.d != 2 && p.d != 3) throw DomainError("pocr_radial_density: d must be 2 or 3");
  if (p.alpha == 2.0) throw DomainError("pocr_radial_density: requires alpha < 2");
  // Near 1 the point y can round onto the sphere |y| = |x|; near 0 its norm
  // underflows. Both cut-offs drop far less than rounding-level mass.
  if (!(u > 1e-100 && u < 1.0 - 8.0 * std::numeric_limits<double>::epsilon())) return 0.0;
  Vec x(p.d, 0.0);
  x[0] = 1.0;
  // Angular integral at radius u, axis along x. The map
  // tan(phi/2) = c tan(psi/2), c = (1 - u)/(1 + u), flattens the peak at phi = 0,
  // and the tolerance is floored at the rounding level of |x - y| ~ 1 - u.
  const double c = (1.0 - u) / (1.0 + u);
  const auto f = [&](double psi) {
    const double t = std::tan(0.5 * psi);
    const double phi = 2.0 * std::atan(c * t);
    const double jac = c * (1.0 + t * t) / (1.0 + c * c * t * t);
    Vec y(p.d, 0.0);
    y[0] = u * std::cos(phi);
    y[1] = u * std::sin(phi);
    const double w = p.d == 2 ? 2.0 * u : 2.0 * std::numbers::pi * u * u * std::sin(phi);
    return w * jac * pocr_density(x, y, p);
  };
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() / (1.0 - u);
  return quad::integrate(f, 0.0, std::numbers::pi * (1.0 - 1e-15), 0.0, std::max(tol, floor));
}

double pocr_total_mass(const StableParams& p, double tol) {
  p.validate();
  if (p.d != 2 && p.d != 3) throw DomainError("pocr_total_mass: d must be 2 or 3");
  if (p.alpha == 2.0) throw DomainError("pocr_total_mass: requires alpha < 2");
  const double d = static_cast<double>(p.d);
  const auto shell = [&](double u) { return pocr_radial_density(u, p, tol); };
  // u = w^k near 0 and u = 1 - w^k near 1 flatten the endpoint powers.
  const double k0 = 2.0 / (d - p.alpha), k1 = 2.0 / p.alpha;
  const double a = quad::integrate(
      [&](double w) { return w > 0.0 ? shell(std::pow(w, k0)) * k0 * std::pow(w, k0 - 1.0) : 0.0; }, 0.0,
      std::pow(0.5, 1.0 / k0), 0.0, tol);
  const double b = quad::integrate(
      [&](double w) { return w > 0.0 ? shell(1.0 - std::pow(w, k1)) * k1 * std::pow(w, k1 - 1.0) : 0.0; }, 0.0,
      std::pow(0.5, 1.0 / k1), 0.0, tol);
  return a + b;
}

Vec sample_pocr(std::span<const double> x, const StableParams& p, SeedSpec seed) {
  PocrSampler s(p);
  Rng rng(seed);
  return s.sample(x, rng);
}

Target Target::at(std::span<const double> theta) {
  Target t;
  t.kind = Kind::Point;
  const Angle a = Angle::from_unit(theta);
  t.point.assign(a.components().begin(), a.components().end());
  return t;
}

Target Target::arc(double lo, double hi) {
  if (!(hi > lo) || hi - lo > 2.0 * std::numbers::pi + 1e-12) throw DomainError("arc: need lo < hi <= lo + 2 pi");
  Target t;
  t.kind = Kind::Arc;
  t.lo = lo;
  t.hi = hi;
  return t;
}

Target Target::cap(std::span<const double> centre, double angular_radius) {
  if (centre.size() != 3) throw DomainError("cap: only d = 3 caps are supported");
  if (!(angular_radius > 0.0 && angular_radius <= std::numbers::pi)) throw DomainError("cap: radius in (0, pi]");
  Target t;
  t.kind = Kind::Cap;
  const Angle c = Angle::from_unit(centre);
  t.point.assign(c.components().begin(), c.components().end());
  t.radius = angular_radius;
  return t;
}

Target Target::sphere() {
  Target t;
  t.kind = Kind::Sphere;
  return t;
}

double h_down(std::span<const double> x, const Target& target, const StableParams& p) {
  p.validate();
  if (x.size() != p.d) throw DomainError("h_down: point has wrong dimension");
  const double r = norm(x);
  if (!(r > 1.0)) throw DomainError("h_down: need |x| > 1");
  const double d = static_cast<double>(p.d);
  const double lead = std::pow(r * r - 1.0, 0.5 * p.alpha);
  switch (target.kind) {
    case Target::Kind::Point:
      if (target.point.size() != p.d) throw DomainError("h_down: target has wrong dimension");
      return lead * std::pow(distance(x, target.point), -d);
    case Target::Kind::Arc: {
      if (p.d != 2) throw DomainError("h_down: arcs need d = 2");
      const auto f = [&](double phi) {
        const double a = x[0] - std::cos(phi), b = x[1] - std::sin(phi);
        return 1.0 / (a * a + b * b);
      };
      return lead * quad::integrate(f, target.lo, target.hi, 1e-13, 1e-12) / (2.0 * std::numbers::pi);
    }
    case Target::Kind::Cap: {
      if (p.d != 3) throw DomainError("h_down: caps need d = 3");
      // Frame with the cap centre as pole.
      const Vec& c = target.point;
      Vec e1(3), e2(3);
      const std::size_t k = std::abs(c[0]) < 0.9 ? 0 : 1;
      Vec ref(3, 0.0);
      ref[k] = 1.0;
      const double cr = dot(c, ref);
      for (int i = 0; i < 3; ++i) e1[i] = ref[i] - cr * c[i];
      const double n1 = norm(e1);
      for (double& v : e1) v /= n1;
      e2 = {c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]};
      const auto inner = [&](double psi) {
        const double sp = std::sin(psi), cp = std::cos(psi);
        const auto g = [&](double beta) {
          double s = 0.0;
          for (int i = 0; i < 3; ++i) {
            const double th = cp * c[i] + sp * (std::cos(beta) * e1[i] + std::sin(beta) * e2[i]);
            s += (x[i] - th) * (x[i] - th);
          }
          return std::pow(s, -1.5);
        };
        return sp * quad::integrate(g, 0.0, 2.0 * std::numbers::pi, 1e-13, 1e-11);
      };
      return lead * quad::integrate(inner, 0.0, target.radius, 1e-13, 1e-10) / (4.0 * std::numbers::pi);
    }
    case Target::Kind::Sphere:
      // Exterior Poisson integral: mean of |x - theta|^{-d} over the sphere is |x|^{2-d} / (|x|^2 - 1).
      return lead * std::pow(r, 2.0 - d) / (r * r - 1.0);
  }
  return 0.0;
}

double h_up(std::span<const double> x, const StableParams& p) {
  p.validate();
  if (x.size() != p.d) throw DomainError("h_up: point has wrong dimension");
  const double r = norm(x);
  if (r < 1.0) throw DomainError("h_up: need |x| >= 1");
  if (r == 1.0) return 0.0;
  // u = v^{2/alpha} removes the u^{alpha/2 - 1} endpoint singularity.
  const double a = p.alpha, hd = 0.5 * static_cast<double>(p.d);
  const double top = std::pow(r * r - 1.0, 0.5 * a);
  const auto f = [a, hd](double v) { return (2.0 / a) * std::pow(std::pow(v, 2.0 / a) + 1.0, -hd); };
  if (top <= 1.0) return quad::integrate(f, 0.0, top, 1e-13, 1e-12);
  // v = e^s on [1, top] keeps the slowly decaying tail on a short interval.
  const auto g = [&f](double s) { return f(std::exp(s)) * std::exp(s); };
  return quad::integrate(f, 0.0, 1.0, 1e-13, 1e-12) + quad::integrate(g, 0.0, std::log(top), 1e-13, 1e-12);
}

double h_up_limit(const StableParams& p) {
  p.validate();
  return boost::math::beta(0.5 * p.alpha, 0.5 * (static_cast<double>(p.d) - p.alpha));
}

double h_value(std::span<const double> x, const Conditioning& c, double y, const StableParams& p) {
  Vec z(x.begin(), x.end());
  const double s = std::exp(-y);
  for (double& v : z) v *= s;
  const double r = norm(z);
  if (c.kind == Conditioning::Kind::Up) return r < 1.0 ? 0.0 : h_up(z, p);
  return r <= 1.0 ? 0.0 : h_down(z, c.target, p);
}

DoobWeightedPath doob_weight(const SsmpPath& path, const Conditioning& c, double y, const StableParams& p) {
  if (path.size() == 0) throw DomainError("doob_weight: empty path");
  const double barrier = std::exp(y);
  if (!(path.radius(0) > barrier)) throw DomainError("doob_weight: start must lie outside the barrier");
  DoobWeightedPath out{path, 0.0, false};
  if (path.killed()) return out;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (path.radius(i) < barrier) return out;
  const double h0 = h_value(path.point(0), c, y, p);
  out.weight = h_value(path.point(path.size() - 1), c, y, p) / h0;
  out.alive = true;
  return out;
}

WeightedEnsemble simulate_conditioned(std::span<const double> x, const Conditioning& c, double y,
                                      const StableParams& p, double T, double dt, std::size_t n, SeedSpec seed,
                                      const ConditionedOptions& opt) {
  p.validate();
  check_point(p, x);
  if (n == 0) throw DomainError("simulate_conditioned: need at least one path");
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("simulate_conditioned: T and dt must be positive");
  if (opt.record_every == 0) throw DomainError("simulate_conditioned: record_every must be positive");
  const double barrier = std::exp(y);
  if (!(norm(x) > barrier)) throw DomainError("simulate_conditioned: start must lie outside the barrier");
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / dt - 1e-9)));
  const std::size_t every = opt.t_resample > 0.0
                                ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.t_resample / dt)))
                                : steps;

  struct Particle {
    Vec x;
    Vec times, coords;
    double h_prev = 0.0;
    bool alive = true;
  };
  const double h0 = h_value(x, c, y, p);
  std::vector<Particle> parts(n);
  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    parts[i].x.assign(x.begin(), x.end());
    parts[i].times = {0.0};
    parts[i].coords.assign(x.begin(), x.end());
    parts[i].h_prev = h0;
    rngs.emplace_back(seed.child(i));
  }
  Rng resampler(seed.child(~std::uint64_t{0}));
  WeightedEnsemble out;
  out.min_ess = static_cast<double>(n);
  Vec w(n);

  auto increments = [&] {
    for (std::size_t i = 0; i < n; ++i)
      w[i] = parts[i].alive ? h_value(parts[i].x, c, y, p) / parts[i].h_prev : 0.0;
  };

  std::size_t k = 0;
  while (k < steps) {
    const std::size_t stop = std::min(steps, k + every);
    parallel_for(n, [&](std::size_t i) {
      Particle& q = parts[i];
      for (std::size_t j = k; j < stop; ++j) {
        if (!q.alive) break;
        const double t0 = static_cast<double>(j) * dt;
        const double t1 = j + 1 == steps ? T : static_cast<double>(j + 1) * dt;
        stable_step(p, q.x, t1 - t0, rngs[i]);
        if (norm(q.x) < barrier) q.alive = false;
        if ((j + 1) % opt.record_every == 0 || j + 1 == steps || !q.alive) {
          q.times.push_back(t1);
          q.coords.insert(q.coords.end(), q.x.begin(), q.x.end());
        }
      }
    });
    k = stop;
    increments();
    const double ess = stats::effective_sample_size(w);
    out.min_ess = std::min(out.min_ess, ess);
    if (k == steps) break;
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) {
      out.warnings.push_back("all particles absorbed before T");
      break;
    }
    out.log_normalizer += std::log(total / static_cast<double>(n));
    // Multinomial resampling from a dedicated stream.
    Vec cum(n);
    std::partial_sum(w.begin(), w.end(), cum.begin());
    std::vector<Particle> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = resampler.uniform() * total;
      const auto j = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      next[i] = parts[std::min(j, n - 1)];
    }
    parts = std::move(next);
    for (auto& q : parts) q.h_prev = h_value(q.x, c, y, p);
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (total > 0.0) out.log_normalizer += std::log(total / static_cast<double>(n));
  out.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.weights[i] = total > 0.0 ? w[i] * static_cast<double>(n) / total : 0.0;
  if (out.min_ess < 0.05 * static_cast<double>(n))
    out.warnings.push_back("effective sample size fell below 5% of N");
  out.paths.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& q = parts[i];
    const std::size_t m = q.times.size();
    std::optional<std::size_t> killed;
    if (!q.alive) killed = m - 1;
    out.paths.emplace_back(std::move(q.times), std::move(q.coords), p.d, p.alpha, killed);
  }
  return out;
}

std::vector<stats::TestReport> check_doob_martingale(std::span<const double> x, const Conditioning& c, double y,
                                                     const StableParams& p, const Vec& checkpoints, double dt,
                                                     std::size_t n, SeedSpec seed, double n_se) {
  p.validate();
  check_point(p, x);
  if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()) || !(checkpoints[0] > 0.0))
    throw DomainError("check_doob_martingale: checkpoints must be positive and sorted");
  if (n < 2) throw DomainError("check_doob_martingale: need at least two paths");
  const double barrier = std::exp(y);
  const double h0 = h_value(x, c, y, p);
  const std::size_t m = checkpoints.size();
  Vec weights(n * m, 0.0);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(seed.child(i));
    Vec z(x.begin(), x.end());
    double t = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      while (t < checkpoints[j]) {
        const double step = std::min(dt, checkpoints[j] - t);
        stable_step(p, z, step, rng);
        t = checkpoints[j] - t <= dt ? checkpoints[j] : t + step;
        if (norm(z) < barrier) return;
      }
      weights[j * n + i] = h_value(z, c, y, p) / h0;
    }
  });
  std::vector<stats::TestReport> out;
  const Vec ones(n, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::span<const double> wj(weights.data() + j * n, n);
    const auto mo = kernels::weighted_moments(ones, wj);
    const double nn = static_cast<double>(n);
    const double mean = mo.sum_wf / nn;
    const double var = std::max(0.0, (mo.sum_wf2 - nn * mean * mean) / (nn - 1.0));
    const double se = std::sqrt(var / nn);
    const double z = se > 0.0 ? std::abs(mean - 1.0) / se : (mean == 1.0 ? 0.0 : INFINITY);
    auto r = stats::make_threshold_report("doob_mean_weight_t" + std::to_string(checkpoints[j]), z, 1.0, n_se, n,
                                          seed.master_seed);
    r.notes.push_back("mean=" + std::to_string(mean) + " se=" + std::to_string(se));
    out.push_back(std::move(r));
  }
  return out;
}

stats::TestReport check_harmonicity_hdown(const StableParams& p, const Target& target, std::span<const double> x0,
                                          Shell shell, std::size_t n, SeedSpec seed, double h, double r_max,
                                          double rel_tol) {
  p.validate();
  check_point(p, x0);
  if (!(shell.inner > 1.0 && shell.outer > shell.inner)) throw DomainError("harmonicity: need 1 < inner < outer");
  if (!(r_max > shell.outer)) throw DomainError("harmonicity: r_max must exceed the shell");
  if (n == 0) throw DomainError("harmonicity: need at least one path");
  const double r0 = norm(x0);
  const double exact = h_down(x0, target, p);
  const auto in_shell = [&](double r) { return r >= shell.inner && r <= shell.outer; };
  Vec values(n, 0.0);
  std::vector<char> truncated(n, 0);
  if (!in_shell(r0)) {
    parallel_for(n, [&](std::size_t i) {
      Rng rng(seed.child(i));
      Vec z(x0.begin(), x0.end());
      double r = r0;
      for (;;) {
        stable_step(p, z, lamperti_step(p, r, h), rng);
        r = norm(z);
        if (r <= 1.0) return;
        if (in_shell(r)) {
          values[i] = h_down(z, target, p);
          return;
        }
        if (r > r_max) {
          truncated[i] = 1;
          return;
        }
      }
    });
  } else {
    std::fill(values.begin(), values.end(), exact);
  }
  const double est = stats::mean(values);
  const double se = std::sqrt(stats::variance(values) / static_cast<double>(n));
  auto rep = stats::make_threshold_report("harmonicity_hdown", relative_gap(est, exact), exact, rel_tol, n,
                                          seed.master_seed);
  rep.notes.push_back("estimate=" + std::to_string(est) + " se=" + std::to_string(se));
  rep.notes.push_back("paths past r_max=" + std::to_string(std::count(truncated.begin(), truncated.end(), 1)));
  return rep;
}

}  // namespace wpd::stable
