#include "wpd/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wpd/bridge.hpp"
#include "wpd/kernels/kernels.hpp"
#include "wpd/parallel.hpp"

namespace wpd::cone {

using sampling::Rng;
using sampling::SeedSpec;

namespace {

constexpr double kPi = std::numbers::pi;

double arg_of(double v, const ConeParams& c) { return kPi * (v + c.phi0) / (2.0 * c.phi0); }

void check_angle(double v, const ConeParams& c, const char* fn) {
  if (!(std::abs(v) < c.phi0)) throw DomainError(std::string(fn) + ": angle must lie in (-phi0, phi0)");
}

// Sums term(k) for k = 1, 2, ... until k > K and bound(k) < kSeriesTail.
// Returns NaN if kMaxTerms is reached first.
template <class Term, class Bound>
double sum_series(const ConeParams& c, Term&& term, Bound&& bound) {
  double s = 0.0;
  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    if (k > c.K && bound(k) < kSeriesTail) return s;
    s += term(k);
  }
  return kDivergent;
}

// Integral of sin(a) sin(k a) da.
double sin_sin_antiderivative(std::size_t k, double a) {
  if (k == 1) return 0.5 * (a - 0.5 * std::sin(2.0 * a));
  const double km = static_cast<double>(k - 1), kp = static_cast<double>(k + 1);
  return 0.5 * (std::sin(km * a) / km - std::sin(kp * a) / kp);
}

// Integral of exp(-r y) over [y0, y1).
double exp_integral(double r, double y0, double y1) {
  const double hi = std::isinf(y1) ? 0.0 : std::exp(-r * y1);
  return (std::exp(-r * y0) - hi) / r;
}

// Shared cell integral: sum_k sin(k a(phi)) Y_k Theta_k / phi0 where Theta_k
// integrates sin(k a(theta)) against M(theta) (weighted) or 1.
double series_cell(double y0, double y1, double t0, double t1, double phi, const ConeParams& c, bool weighted) {
  c.validate();
  check_angle(phi, c, "cone cell");
  if (!(y0 >= 0.0) || !(y1 > y0) || !(t0 < t1) || t0 < -c.phi0 || t1 > c.phi0)
    throw DomainError("cone cell: need 0 <= y0 < y1 and -phi0 <= theta0 < theta1 <= phi0");
  const double ap = arg_of(phi, c), a0 = arg_of(t0, c), a1 = arg_of(t1, c);
  const double jac = 2.0 * c.phi0 / kPi;
  const double rate = kPi / (2.0 * c.phi0);
  double s = 0.0;
  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    const double kk = static_cast<double>(k);
    const double yk = exp_integral(rate * (kk + 1.0), y0, y1);
    // |Theta_k| <= jac * (2 / (k - 1)) weighted, jac * 2 / k plain; Y_k <= exp(-r y0) / r.
    const double theta_bound = weighted ? jac * (k == 1 ? kPi : 2.0 / (kk - 1.0)) : jac * 2.0 / kk;
    const double bound = std::exp(-rate * (kk + 1.0) * y0) / (rate * (kk + 1.0)) * theta_bound / c.phi0;
    if (k > c.K && bound < kSeriesTail) break;
    const double tk = weighted ? jac * (sin_sin_antiderivative(k, a1) - sin_sin_antiderivative(k, a0))
                               : jac * (std::cos(kk * a0) - std::cos(kk * a1)) / kk;
    s += std::sin(kk * ap) * yk * tk;
  }
  s /= c.phi0;
  if (weighted) s *= (kPi / c.phi0) / ground_state(phi, c);
  return s;
}

double bridge_stays_inside(double a, double b, double level_lo, double level_hi, double s2) {
  // Probability that a Brownian bridge from a to b stays inside (lo, hi).
  const double p_lo = bridge::crossing_probability(a, b, level_lo, s2);
  const double p_hi = bridge::crossing_probability(-a, -b, -level_hi, s2);
  return std::max(0.0, (1.0 - p_lo) * (1.0 - p_hi));
}

}  // namespace

void ConeParams::validate() const {
  if (!(phi0 > 0.0 && phi0 < kPi)) throw DomainError("ConeParams: phi0 must lie in (0, pi)");
  if (K < 1) throw DomainError("ConeParams: K must be at least 1");
}

double ground_state(double phi, const ConeParams& c) {
  c.validate();
  if (!(std::abs(phi) <= c.phi0)) throw DomainError("ground_state: angle outside [-phi0, phi0]");
  return std::sin(arg_of(phi, c));
}

double lambda1(const ConeParams& c) {
  c.validate();
  return kPi * kPi / (4.0 * c.phi0 * c.phi0);
}

double taboo_density(double phi, double theta, double s, const ConeParams& c) {
  c.validate();
  check_angle(phi, c, "taboo_density");
  check_angle(theta, c, "taboo_density");
  if (!(s > 0.0)) throw DomainError("taboo_density: s must be positive");
  const double l1 = lambda1(c), ap = arg_of(phi, c), at = arg_of(theta, c);
  const double sum = sum_series(
      c,
      [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return std::exp(-0.5 * l1 * kk * kk * s) * (std::sin(kk * ap) * std::sin(kk * at));
      },
      [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return std::exp(-0.5 * l1 * kk * kk * s) / c.phi0;
      });
  return sum / c.phi0;
}

double taboo_survival(double phi, double s, const ConeParams& c) {
  c.validate();
  check_angle(phi, c, "taboo_survival");
  if (!(s > 0.0)) throw DomainError("taboo_survival: s must be positive");
  const double l1 = lambda1(c), ap = arg_of(phi, c);
  // The theta-integral of sin(k a(theta)) is 4 phi0 / (k pi) for odd k, 0 for even k.
  return sum_series(
      c,
      [&](std::size_t k) {
        if (k % 2 == 0) return 0.0;
        const double kk = static_cast<double>(k);
        return 4.0 / (kk * kPi) * std::exp(-0.5 * l1 * kk * kk * s) * std::sin(kk * ap);
      },
      [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return 4.0 / (kk * kPi) * std::exp(-0.5 * l1 * kk * kk * s);
      });
}

double ladder_density_cone(double y, double theta, double phi, const ConeParams& c) {
  c.validate();
  check_angle(phi, c, "ladder_density_cone");
  check_angle(theta, c, "ladder_density_cone");
  if (!(y >= 0.0)) throw DomainError("ladder_density_cone: y must be nonnegative");
  if (y == 0.0) return kDivergent;
  const double rate = kPi / (2.0 * c.phi0), ap = arg_of(phi, c), at = arg_of(theta, c);
  const double sum = sum_series(
      c,
      [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return std::exp(-rate * (kk + 1.0) * y) * (std::sin(kk * ap) * std::sin(kk * at));
      },
      [&](std::size_t k) { return std::exp(-rate * (static_cast<double>(k) + 1.0) * y) / c.phi0; });
  return sum / c.phi0;
}

double closest_reach_density(double y, double theta, double phi, const ConeParams& c) {
  const double u = ladder_density_cone(y, theta, phi, c);
  return (kPi / c.phi0) * ground_state(theta, c) / ground_state(phi, c) * u;
}

double closest_reach_cell(double y0, double y1, double theta0, double theta1, double phi, const ConeParams& c) {
  return series_cell(y0, y1, theta0, theta1, phi, c, true);
}

double ladder_cell(double y0, double y1, double theta0, double theta1, double phi, const ConeParams& c) {
  return series_cell(y0, y1, theta0, theta1, phi, c, false);
}

Vec ladder_density_table(const Vec& ys, const Vec& thetas, double phi, const ConeParams& c, bool closest_reach) {
  c.validate();
  check_angle(phi, c, "ladder_density_table");
  for (double t : thetas) check_angle(t, c, "ladder_density_table");
  const std::size_t m = thetas.size();
  const double rate = kPi / (2.0 * c.phi0);
  const double m_phi = ground_state(phi, c);
  Vec a(m), b(m, arg_of(phi, c)), factor(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = arg_of(thetas[j], c);
    if (closest_reach) factor[j] = (kPi / c.phi0) * ground_state(thetas[j], c) / m_phi;
  }
  Vec out(ys.size() * m, kDivergent), row(m), rho(m), pre(m);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = ys[i];
    if (!(y >= 0.0)) throw DomainError("ladder_density_table: y must be nonnegative");
    if (y == 0.0) continue;
    // First k with exp(-rate (k+1) y) / phi0 below the tail.
    const double kreq = std::ceil(std::log(1.0 / (c.phi0 * kSeriesTail)) / (rate * y)) - 1.0;
    if (kreq > static_cast<double>(kMaxTerms)) continue;
    const std::size_t terms = std::max<std::size_t>(c.K, static_cast<std::size_t>(std::max(1.0, kreq)));
    const double q = std::exp(-rate * y);
    std::fill(rho.begin(), rho.end(), q);
    for (std::size_t j = 0; j < m; ++j) pre[j] = q / c.phi0 * factor[j];
    kernels::sine_series(a, b, rho, pre, Vec(terms, 1.0), row);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(i * m));
  }
  return out;
}

Vec taboo_density_table(double phi, const Vec& thetas, double s, const ConeParams& c) {
  c.validate();
  check_angle(phi, c, "taboo_density_table");
  for (double t : thetas) check_angle(t, c, "taboo_density_table");
  if (!(s > 0.0)) throw DomainError("taboo_density_table: s must be positive");
  const double l1 = lambda1(c);
  Vec w;
  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    const double kk = static_cast<double>(k);
    const double e = std::exp(-0.5 * l1 * kk * kk * s);
    if (k > c.K && e / c.phi0 < kSeriesTail) break;
    w.push_back(e);
  }
  if (w.size() == kMaxTerms) return Vec(thetas.size(), kDivergent);
  const std::size_t m = thetas.size();
  Vec a(m), b(m, arg_of(phi, c)), rho(m, 1.0), pre(m, 1.0 / c.phi0), out(m);
  for (std::size_t j = 0; j < m; ++j) a[j] = arg_of(thetas[j], c);
  kernels::sine_series(a, b, rho, pre, w, out);
  return out;
}

double survival_ladder(double y, const ConeParams& c) {
  if (!(c.phi0 > 0.0 && c.phi0 <= kPi)) throw DomainError("survival_ladder: phi0 must lie in (0, pi]");
  if (!(y >= 0.0)) throw DomainError("survival_ladder: y must be nonnegative");
  return std::exp(-y * kPi / c.phi0);
}

double inverse_local_time_density(double s, double y) {
  if (!(s > 0.0) || !(y > 0.0)) throw DomainError("inverse_local_time_density: s and y must be positive");
  return y / std::sqrt(2.0 * kPi * s * s * s) * std::exp(-y * y / (2.0 * s));
}

double u_dagger_density(double s, double y, double theta, double phi, const ConeParams& c) {
  c.validate();
  check_angle(phi, c, "u_dagger_density");
  check_angle(theta, c, "u_dagger_density");
  if (!(s > 0.0) || !(y > 0.0)) throw DomainError("u_dagger_density: s and y must be positive");
  const double pre = y / (c.phi0 * std::sqrt(2.0 * kPi)) * std::exp(-y * y / (2.0 * s)) * std::pow(s, -1.5);
  if (pre == 0.0) return 0.0;
  const double r = kPi * kPi * s / (8.0 * c.phi0 * c.phi0);
  const double ap = arg_of(phi, c), at = arg_of(theta, c);
  const double sum = sum_series(
      c,
      [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return std::exp(-r * kk * kk) * (std::sin(kk * ap) * std::sin(kk * at));
      },
      [&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return std::exp(-r * kk * kk) / c.phi0;
      });
  return pre * sum;
}

double cone_com_weight(const SsmpPath& path, std::span<const double> x, const ConeParams& c) {
  c.validate();
  if (path.dim() != 2 || x.size() != 2) throw DomainError("cone_com_weight: planar paths only");
  const double r0 = std::hypot(x[0], x[1]);
  if (!(r0 > 0.0)) throw DomainError("cone_com_weight: start at the apex");
  const double a0 = std::atan2(x[1], x[0]);
  check_angle(a0, c, "cone_com_weight");
  const std::size_t n = path.alive_count();
  if (n == 0) return 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = path.point(i);
    if (!(std::abs(std::atan2(p[1], p[0])) < c.phi0)) return 0.0;
  }
  const auto end = path.point(n - 1);
  const double lam = kPi / (2.0 * c.phi0);
  return ground_state(std::atan2(end[1], end[0]), c) / ground_state(a0, c) *
         std::pow(std::hypot(end[0], end[1]) / r0, lam);
}

stats::TestReport check_taboo_survival(double phi, double s, const ConeParams& c, std::size_t n, double dt,
                                       SeedSpec seed, double rel_tol) {
  const double exact = taboo_survival(phi, s, c);
  if (n < 2 || !(dt > 0.0)) throw DomainError("check_taboo_survival: need n >= 2 and dt > 0");
  Vec surv(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(seed.child(i));
    double th = phi, t = 0.0, w = 1.0;
    while (t < s) {
      const double step = std::min(dt, s - t);
      const double next = th + std::sqrt(step) * rng.normal();
      if (!(std::abs(next) < c.phi0)) return;
      w *= bridge_stays_inside(th, next, -c.phi0, c.phi0, step);
      th = next;
      t = s - t <= dt ? s : t + step;
    }
    surv[i] = w;
  });
  const double est = stats::mean(surv);
  const double se = std::sqrt(stats::variance(surv) / static_cast<double>(n));
  auto r = stats::make_threshold_report("taboo_survival_rel_err", std::abs(est / exact - 1.0), exact, rel_tol, n,
                                        seed.master_seed);
  r.notes.push_back("mc=" + std::to_string(est) + " se=" + std::to_string(se));
  return r;
}

std::vector<stats::TestReport> check_cone_martingale(std::span<const double> x, const ConeParams& c,
                                                     const Vec& checkpoints, double dt, std::size_t n, SeedSpec seed,
                                                     double n_se) {
  c.validate();
  if (x.size() != 2) throw DomainError("check_cone_martingale: planar start required");
  const double a0 = std::atan2(x[1], x[0]);
  check_angle(a0, c, "check_cone_martingale");
  if (checkpoints.empty() || !(checkpoints.front() > 0.0) || !std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw DomainError("check_cone_martingale: checkpoints must be positive and sorted");
  if (n < 2 || !(dt > 0.0)) throw DomainError("check_cone_martingale: need n >= 2 and dt > 0");
  const double lam = kPi / (2.0 * c.phi0);
  const double r0 = std::hypot(x[0], x[1]);
  const double m0 = ground_state(a0, c);
  // Unit directions of the boundary rays and inward normals of their lines.
  const double ux[2] = {std::cos(c.phi0), std::cos(c.phi0)};
  const double uy[2] = {std::sin(c.phi0), -std::sin(c.phi0)};
  const double nx[2] = {std::sin(c.phi0), std::sin(c.phi0)};
  const double ny[2] = {-std::cos(c.phi0), std::cos(c.phi0)};
  // At phi0 = pi/2 both rays lie on one line; count it once.
  const bool one_line = std::abs(c.phi0 - kPi / 2.0) < 1e-15;
  const std::size_t m = checkpoints.size();
  Vec weights(n * m, 0.0);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(seed.child(i));
    double px = x[0], py = x[1], t = 0.0, surv = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      while (t < checkpoints[j]) {
        const double step = std::min(dt, checkpoints[j] - t);
        const double sd = std::sqrt(step);
        const double qx = px + sd * rng.normal(), qy = py + sd * rng.normal();
        if (!(std::abs(std::atan2(qy, qx)) < c.phi0)) return;
        for (int b = 0; b < (one_line ? 1 : 2); ++b) {
          // The ray matters once either end projects onto it.
          if (!one_line && px * ux[b] + py * uy[b] < 0.0 && qx * ux[b] + qy * uy[b] < 0.0) continue;
          const double d0 = px * nx[b] + py * ny[b], d1 = qx * nx[b] + qy * ny[b];
          if (d0 <= 0.0 || d1 <= 0.0) continue;
          surv *= 1.0 - bridge::crossing_probability(d0, d1, 0.0, step);
        }
        px = qx;
        py = qy;
        t = checkpoints[j] - t <= dt ? checkpoints[j] : t + step;
      }
      weights[j * n + i] = surv * ground_state(std::atan2(py, px), c) / m0 * std::pow(std::hypot(px, py) / r0, lam);
    }
  });
  std::vector<stats::TestReport> out;
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) {
    const std::span<const double> wj(weights.data() + j * n, n);
    const double mean = stats::mean(wj);
    const double se = std::sqrt(stats::variance(wj) / nn);
    const double z = se > 0.0 ? std::abs(mean - 1.0) / se : (mean == 1.0 ? 0.0 : INFINITY);
    auto r = stats::make_threshold_report("cone_mean_weight_t" + std::to_string(checkpoints[j]), z, 1.0, n_se, n,
                                          seed.master_seed);
    r.notes.push_back("mean=" + std::to_string(mean) + " se=" + std::to_string(se));
    out.push_back(std::move(r));
  }
  return out;
}

double simulate_taboo(double phi, double s, double dt, const ConeParams& c, Rng& rng, double chunk) {
  c.validate();
  check_angle(phi, c, "simulate_taboo");
  if (!(s >= 0.0) || !(dt > 0.0) || !(chunk > 0.0)) throw DomainError("simulate_taboo: bad horizon or step");
  double th = phi, t = 0.0;
  while (t < s) {
    const double len = std::min(chunk, s - t);
    for (;;) {
      double z = th, u = 0.0;
      bool alive = true;
      while (u < len && alive) {
        const double step = std::min(dt, len - u);
        const double next = z + std::sqrt(step) * rng.normal();
        alive = std::abs(next) < c.phi0 && rng.uniform() < bridge_stays_inside(z, next, -c.phi0, c.phi0, step);
        z = next;
        u = len - u <= dt ? len : u + step;
      }
      if (alive && rng.uniform() < ground_state(z, c)) {
        th = z;
        break;
      }
    }
    t += len;
  }
  return th;
}

namespace {

struct Minimum {
  double depth;
  double time;
};

// Brownian motion with drift mu from 0 on a dt grid; exact bridge minima.
Minimum drifted_minimum(double mu, double dt, Rng& rng, double margin = 8.0) {
  double x = 0.0, t = 0.0, lo = 0.0, g = 0.0;
  const double sd = std::sqrt(dt);
  while (x - lo <= margin) {
    const double next = x + mu * dt + sd * rng.normal();
    const double m = bridge::sample_minimum(x, next, dt, rng);
    if (m < lo) {
      lo = m;
      g = t + bridge::minimum_offset(x, next, m, dt);
    }
    x = next;
    t += dt;
  }
  return {-lo, g};
}

}  // namespace

std::vector<LadderSample> sample_closest_reach(double phi, const ConeParams& c, std::size_t n, double dt,
                                               SeedSpec seed, LadderMethod method) {
  c.validate();
  check_angle(phi, c, "sample_closest_reach");
  if (!(dt > 0.0)) throw DomainError("sample_closest_reach: dt must be positive");
  const double lam = kPi / (2.0 * c.phi0);
  const double l1 = lambda1(c);
  const double m0 = ground_state(phi, c);
  std::vector<LadderSample> out(n);
  parallel_for(n, [&](std::size_t i) {
    const SeedSpec si = seed.child(i);
    Rng radial(si.child(0));
    Rng angular(si.child(1));
    const Minimum mn = drifted_minimum(lam, dt, radial);
    if (method == LadderMethod::Taboo) {
      out[i] = {mn.depth, simulate_taboo(phi, mn.time, dt, c, angular), 1.0};
      return;
    }
    double th = phi, t = 0.0, w = 1.0;
    while (t < mn.time) {
      const double step = std::min(dt, mn.time - t);
      const double next = th + std::sqrt(step) * angular.normal();
      if (!(std::abs(next) < c.phi0)) {
        w = 0.0;
        break;
      }
      w *= bridge_stays_inside(th, next, -c.phi0, c.phi0, step);
      th = next;
      t = mn.time - t <= dt ? mn.time : t + step;
    }
    if (w > 0.0) w *= std::exp(0.5 * l1 * mn.time) * ground_state(th, c) / m0;
    out[i] = {mn.depth, th, w};
  });
  return out;
}

namespace {

void check_grid(const LadderGrid& grid) {
  if (grid.ny < 2 || grid.ntheta < 1 || !(grid.y_max > 0.0)) throw DomainError("cone: bad ladder grid");
}

}  // namespace

Vec ladder_histogram(const std::vector<LadderSample>& sample, const ConeParams& c, const LadderGrid& grid) {
  c.validate();
  check_grid(grid);
  const double dy = grid.y_max / static_cast<double>(grid.ny - 1);
  const double dth = 2.0 * c.phi0 / static_cast<double>(grid.ntheta);
  Vec hist(grid.ny * grid.ntheta, 0.0);
  double total = 0.0;
  for (const auto& s : sample) {
    if (!(s.weight > 0.0)) continue;
    const auto a = std::min<std::size_t>(grid.ny - 1, static_cast<std::size_t>(s.y / dy));
    const auto b = std::min<std::size_t>(grid.ntheta - 1, static_cast<std::size_t>((s.theta + c.phi0) / dth));
    hist[a * grid.ntheta + b] += s.weight;
    total += s.weight;
  }
  if (!(total > 0.0)) throw DomainError("ladder_histogram: all weights vanish");
  for (double& h : hist) h /= total;
  return hist;
}

Vec ladder_reference_cells(double phi, const ConeParams& c, LadderReference reference, const LadderGrid& grid) {
  c.validate();
  check_grid(grid);
  const double dy = grid.y_max / static_cast<double>(grid.ny - 1);
  const double dth = 2.0 * c.phi0 / static_cast<double>(grid.ntheta);
  Vec ref(grid.ny * grid.ntheta);
  for (std::size_t a = 0; a < grid.ny; ++a) {
    const double y0 = dy * static_cast<double>(a);
    const double y1 = a + 1 == grid.ny ? INFINITY : y0 + dy;
    for (std::size_t b = 0; b < grid.ntheta; ++b) {
      const double t0 = -c.phi0 + dth * static_cast<double>(b);
      const double t1 = b + 1 == grid.ntheta ? c.phi0 : t0 + dth;
      ref[a * grid.ntheta + b] = reference == LadderReference::ClosestReach ? closest_reach_cell(y0, y1, t0, t1, phi, c)
                                                                           : ladder_cell(y0, y1, t0, t1, phi, c);
    }
  }
  return ref;
}

stats::TestReport ladder_law_report(const std::vector<LadderSample>& sample, double phi, const ConeParams& c,
                                    LadderReference reference, const LadderGrid& grid, double tv_threshold,
                                    std::uint64_t seed) {
  if (sample.empty()) throw DomainError("ladder_law_report: empty sample");
  const Vec hist = ladder_histogram(sample, c, grid);
  const Vec ref = ladder_reference_cells(phi, c, reference, grid);
  Vec w;
  w.reserve(sample.size());
  for (const auto& s : sample) w.push_back(s.weight);
  double ref_mass = 0.0;
  for (double r : ref) ref_mass += r;
  const std::string label = reference == LadderReference::ClosestReach ? "closest_reach" : "ladder_series";
  auto r = stats::make_threshold_report("cone_" + label + "_tv", stats::total_variation(hist, ref), label,
                                        tv_threshold, sample.size(), seed);
  r.notes.push_back("ess=" + std::to_string(stats::effective_sample_size(w)));
  r.notes.push_back("reference_mass=" + std::to_string(ref_mass));
  return r;
}

stats::TestReport check_ladder_law(double phi, const ConeParams& c, std::size_t n, double dt, SeedSpec seed,
                                   LadderReference reference, const LadderGrid& grid, double tv_threshold,
                                   LadderMethod method) {
  const auto sample = sample_closest_reach(phi, c, n, dt, seed, method);
  return ladder_law_report(sample, phi, c, reference, grid, tv_threshold, seed.master_seed);
}

}  // namespace wpd::cone
