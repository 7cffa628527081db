#include "wpd/map_fluct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wpd/bridge.hpp"
#include "wpd/parallel.hpp"
#include "wpd/quadrature.hpp"

namespace wpd::mapf {

using sampling::Rng;
using sampling::SeedSpec;

MapModel MapModel::bm_drift(double mu, double sigma) {
  if (!std::isfinite(mu)) throw DomainError("bm_drift: mu must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("bm_drift: sigma must be finite and >= 0");
  return MapModel(BmDrift{mu, sigma});
}

MapModel MapModel::mmbm(sampling::RateMatrix q, Vec drifts, Vec sigmas) {
  const std::size_t n = q.size();
  if (drifts.size() != n || sigmas.size() != n) throw DomainError("mmbm: one drift and sigma per state");
  if (!q.irreducible()) throw DomainError("mmbm: modulating chain must be irreducible");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(drifts[i])) throw DomainError("mmbm: drifts must be finite");
    if (!(sigmas[i] > 0.0) || !std::isfinite(sigmas[i])) throw DomainError("mmbm: sigmas must be positive");
  }
  return MapModel(Mmbm{std::move(q), std::move(drifts), std::move(sigmas)});
}

std::size_t MapModel::modulator_dim() const { return is_bm() ? 1 : modulated().q.size(); }

namespace {

// Advances the ordinate across one grid cell. on_piece(a, c, s2, t0, len,
// state) is called for each stretch of constant regime, in time order.
template <class F>
double advance(const MapModel& m, std::size_t& state, double x, double t, double dt, Rng& rng, F&& on_piece) {
  if (m.is_bm()) {
    const auto& b = m.bm();
    const double c = x + sampling::gaussian_increment(dt, b.mu, b.sigma, rng);
    on_piece(x, c, b.sigma * b.sigma * dt, t, dt, state);
    return c;
  }
  const auto& mm = m.modulated();
  double remaining = dt;
  for (;;) {
    const double rate = mm.q.exit_rate(state);
    const double hold = rate > 0.0 ? rng.exponential() / rate : std::numeric_limits<double>::infinity();
    const double len = std::min(hold, remaining);
    const double sig = mm.sigmas[state];
    const double c = x + sampling::gaussian_increment(len, mm.drifts[state], sig, rng);
    on_piece(x, c, sig * sig * len, t, len, state);
    x = c;
    t += len;
    if (hold >= remaining) return x;
    remaining -= hold;
    double u = rng.uniform() * rate;
    std::size_t next = state;
    for (std::size_t j = 0; j < mm.q.size(); ++j) {
      if (j == state) continue;
      next = j;
      u -= mm.q(state, j);
      if (u <= 0.0) break;
    }
    state = next;
  }
}

std::size_t grid_steps(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0) || !std::isfinite(T) || !std::isfinite(dt))
    throw DomainError("simulate_map: T and dt must be positive and finite");
  const double r = T / dt;
  const auto n = static_cast<std::size_t>(std::ceil(r - 1e-9));
  return std::max<std::size_t>(n, 1);
}

void check_state(const MapModel& m, std::size_t s) {
  if (s >= m.modulator_dim()) throw DomainError("initial modulator state out of range");
}

Angle state_angle(const MapModel& m, std::size_t s) { return Angle::basis(m.modulator_dim(), s); }

std::size_t angle_bin(const Angle& a) {
  const auto c = a.components();
  return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
}

double relative_gap(double a, double b) {
  const double d = std::abs(a - b);
  return b != 0.0 ? d / std::abs(b) : d;
}

// Grid path of a BM model stopped at the first node where xi >= level.
MapPath simulate_until_level(const MapModel& model, double level, double dt, SeedSpec seed) {
  Rng rng(seed);
  std::size_t state = 0;
  Vec times{0.0}, xi{0.0};
  const auto noop = [](double, double, double, double, double, std::size_t) {};
  while (xi.back() < level) {
    xi.push_back(advance(model, state, xi.back(), times.back(), dt, rng, noop));
    times.push_back(static_cast<double>(times.size()) * dt);
  }
  const std::size_t n = xi.size();
  return MapPath(std::move(times), std::move(xi), Vec(n, 1.0), 1);
}

}  // namespace

MapPath simulate_map(const MapModel& model, double T, double dt, SeedSpec seed, std::size_t initial_state) {
  const std::size_t steps = grid_steps(T, dt);
  check_state(model, initial_state);
  const std::size_t d = model.modulator_dim();
  Rng rng(seed);
  Vec times(steps + 1), xi(steps + 1), theta((steps + 1) * d, 0.0);
  std::size_t state = initial_state;
  theta[state] = 1.0;
  const auto noop = [](double, double, double, double, double, std::size_t) {};
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double t1 = k + 1 == steps ? T : static_cast<double>(k + 1) * dt;
    xi[k + 1] = advance(model, state, xi[k], t0, t1 - t0, rng, noop);
    times[k + 1] = t1;
    theta[(k + 1) * d + state] = 1.0;
  }
  return MapPath(std::move(times), std::move(xi), std::move(theta), d);
}

RunningMinimum running_minimum(const MapPath& path) {
  if (path.size() == 0) throw DomainError("running_minimum: empty path");
  RunningMinimum r;
  r.min_values.resize(path.size());
  double m = path.xi()[0];
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path.xi()[i] <= m) {
      m = path.xi()[i];
      r.argmin_index = i;
    }
    r.min_values[i] = m;
  }
  r.argmin_time = path.times()[r.argmin_index];
  r.argmin_state = path.state(r.argmin_index);
  return r;
}

std::optional<PocrSample> pocr_from_path(const MapPath& path, double margin) {
  if (!(margin >= 0.0)) throw DomainError("pocr_from_path: margin must be nonnegative");
  const RunningMinimum rm = running_minimum(path);
  const std::size_t last = path.size() - 1;
  if (last > 0 && !(path.xi()[last] - rm.min_values[last] > margin)) return std::nullopt;
  if (last == 0 && margin > 0.0) return std::nullopt;
  return PocrSample{path.xi()[0] - rm.min_values[last], rm.argmin_state.theta, rm.argmin_time};
}

ExcursionSet extract_excursions(const MapPath& path, double eps_grid) {
  if (!(eps_grid >= 0.0)) throw DomainError("extract_excursions: eps_grid must be nonnegative");
  ExcursionSet out;
  const std::size_t n = path.size();
  if (n < 2) return out;
  const RunningMinimum rm = running_minimum(path);
  Vec u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = path.xi()[i] - rm.min_values[i];
  const std::size_t d = path.theta_dim();
  const auto& t = path.times();

  std::size_t k = 0;
  while (k + 1 < n) {
    if (u[k] <= eps_grid && u[k + 1] <= eps_grid) {
      out.time_at_minimum += t[k + 1] - t[k];
      ++k;
      continue;
    }
    const std::size_t g = k;
    std::size_t e = k + 1;
    while (e + 1 < n && u[e] > eps_grid) ++e;
    Excursion ex;
    ex.start_time = t[g];
    ex.end_time = t[e];
    ex.theta_dim = d;
    ex.complete = u[e] <= eps_grid;
    ex.heights.assign(u.begin() + static_cast<std::ptrdiff_t>(g), u.begin() + static_cast<std::ptrdiff_t>(e + 1));
    const auto& th = path.theta_flat();
    ex.modulator.assign(th.begin() + static_cast<std::ptrdiff_t>(g * d),
                        th.begin() + static_cast<std::ptrdiff_t>((e + 1) * d));
    out.excursions.push_back(std::move(ex));
    k = e;
  }
  return out;
}

std::optional<PocrSample> draw_pocr(const MapModel& model, double T, double dt, double margin, Rng& rng,
                                    int max_retries, std::size_t initial_state) {
  if (!(margin >= 0.0)) throw DomainError("draw_pocr: margin must be nonnegative");
  if (max_retries < 0) throw DomainError("draw_pocr: max_retries must be nonnegative");
  grid_steps(T, dt);
  check_state(model, initial_state);
  std::size_t state = initial_state;
  double x = 0.0, t = 0.0;
  double m = 0.0, g = 0.0;
  std::size_t g_state = initial_state;
  const auto on_piece = [&](double a, double c, double s2, double t0, double len, std::size_t st) {
    if (c <= m) {
      m = c;
      g = t0 + len;
      g_state = st;
    }
    if (!(s2 > 0.0)) return;
    if (2.0 * (a - m) * (c - m) >= bridge::kNegligibleExponent * s2) return;
    const double low = bridge::sample_minimum(a, c, s2, rng);
    if (low < m) {
      m = low;
      g = t0 + bridge::minimum_offset(a, c, low, len);
      g_state = st;
    }
  };
  double horizon = T;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    while (t < horizon) {
      const double step = std::min(dt, horizon - t);
      x = advance(model, state, x, t, step, rng, on_piece);
      t += step;
      if (horizon - t < 1e-12 * horizon) t = horizon;
    }
    if (x - m > margin) return PocrSample{-m, state_angle(model, g_state), g};
    horizon *= 2.0;
  }
  return std::nullopt;
}

double LadderHistogram::mass(std::size_t depth_bin, std::size_t a) const {
  if (normalization == 0) return 0.0;
  return static_cast<double>(counts.at(depth_bin * angle_bins + a)) / static_cast<double>(normalization);
}

Vec LadderHistogram::angle_marginal() const {
  Vec out(angle_bins, 0.0);
  if (normalization == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i % angle_bins] += static_cast<double>(counts[i]);
  for (double& v : out) v /= static_cast<double>(normalization);
  return out;
}

LadderHistogram estimate_ladder_marginal(const MapModel& model, std::size_t n, double T, double dt, double margin,
                                         SeedSpec seed, Vec depth_edges, std::size_t initial_state) {
  if (n == 0) throw DomainError("estimate_ladder_marginal: need at least one path");
  if (depth_edges.size() < 2 || !std::is_sorted(depth_edges.begin(), depth_edges.end()))
    throw DomainError("estimate_ladder_marginal: depth edges must be sorted, at least two");
  std::vector<std::optional<PocrSample>> draws(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(seed.child(i));
    draws[i] = draw_pocr(model, T, dt, margin, rng, 4, initial_state);
  });
  LadderHistogram h;
  h.depth_edges = std::move(depth_edges);
  h.angle_bins = model.modulator_dim();
  const std::size_t nd = h.depth_edges.size();  // bins + overflow
  h.counts.assign(nd * h.angle_bins, 0);
  for (const auto& dr : draws) {
    if (!dr) {
      ++h.horizon_fails;
      continue;
    }
    const double y = dr->depth;
    const auto it = std::upper_bound(h.depth_edges.begin(), h.depth_edges.end(), y);
    std::size_t bin = nd - 1;
    if (y >= h.depth_edges.front() && y < h.depth_edges.back())
      bin = static_cast<std::size_t>(it - h.depth_edges.begin()) - 1;
    const std::size_t a = angle_bin(dr->angle);
    ++h.counts[bin * h.angle_bins + a];
    h.depths.push_back(y);
    h.angle_index.push_back(a);
    ++h.normalization;
  }
  return h;
}

std::vector<stats::TestReport> depth_law_reports(const LadderHistogram& h, double mu, double sigma,
                                                 std::uint64_t seed, double ks_threshold) {
  if (!(mu > 0.0) || !(sigma > 0.0)) throw DomainError("depth_law_reports: mu, sigma must be positive");
  if (h.depths.empty()) throw DomainError("depth_law_reports: no accepted samples");
  const double rate = 2.0 * mu / (sigma * sigma);
  const auto ks = stats::ks_one_sample(h.depths, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
  std::vector<stats::TestReport> out;
  out.push_back(stats::make_threshold_report("depth_ks_exp", ks.statistic, "Exp(" + std::to_string(rate) + ")",
                                             ks_threshold, h.depths.size(), seed, ks.p_value));
  // 20 equal-probability bins under the reference law.
  Vec edges(21), probs(20, 0.05);
  for (int i = 0; i < 20; ++i) edges[static_cast<std::size_t>(i)] = -std::log1p(-0.05 * i) / rate;
  edges[20] = std::numeric_limits<double>::max();
  probs.back() = 0.05;
  const auto chi = stats::chi_square_fit(h.depths, edges, probs);
  out.push_back(stats::make_pvalue_report("depth_chi_square", chi.statistic, "Exp(" + std::to_string(rate) + ")",
                                          chi.p_value, 0.01, h.depths.size(), seed));
  if (h.horizon_fails > 0)
    out.back().notes.push_back("horizon fails: " + std::to_string(h.horizon_fails));
  return out;
}

OccupationEstimate estimate_occupation(double mu, const std::function<double(double)>& g, std::size_t n, double T,
                                       double dt, SeedSpec seed) {
  if (!(mu > 0.0)) throw DomainError("occupation identity: mu must be positive");
  if (n == 0) throw DomainError("occupation identity: need at least one path");
  const MapModel model = MapModel::bm_drift(mu, 1.0);
  struct PerPath {
    double sum_g = 0.0, elapsed = 0.0, local = 0.0, depth_g = 0.0;
    bool depth_ok = false;
  };
  std::vector<PerPath> acc(n);
  parallel_for(n, [&](std::size_t i) {
    const MapPath p = simulate_until_level(model, mu * T, dt, seed.child(2 * i));
    // Excursions of xi from its maximum are excursions of -xi from its minimum.
    Vec neg(p.xi());
    for (double& v : neg) v = -v;
    const MapPath dual(p.times(), std::move(neg), p.theta_flat(), p.theta_dim());
    const ExcursionSet es = extract_excursions(dual);
    PerPath& r = acc[i];
    r.sum_g = g(0.0) * es.time_at_minimum;
    r.elapsed = es.time_at_minimum;
    for (const auto& ex : es.excursions) {
      if (!ex.complete) continue;
      double s = 0.0;
      for (std::size_t k = 0; k + 1 < ex.heights.size(); ++k) s += g(ex.heights[k]);
      r.sum_g += s * ex.lifetime() / static_cast<double>(ex.heights.size() - 1);
      r.elapsed += ex.lifetime();
    }
    r.local = p.xi().back() - p.xi()[0];
    Rng rng(seed.child(2 * i + 1));
    const auto draw = draw_pocr(model, T, dt, 8.0, rng);
    if (draw) {
      r.depth_g = g(draw->depth);
      r.depth_ok = true;
    }
  });
  OccupationEstimate out;
  double sg = 0.0, el = 0.0, lo = 0.0, dg = 0.0;
  std::size_t nd = 0;
  for (const auto& r : acc) {
    sg += r.sum_g;
    el += r.elapsed;
    lo += r.local;
    if (r.depth_ok) {
      dg += r.depth_g;
      ++nd;
    }
  }
  if (!(el > 0.0) || !(lo > 0.0) || nd == 0) throw DomainError("occupation identity: degenerate sample");
  out.ratio = sg / el;
  out.time_per_local = el / lo;
  out.mc_depth_mean = dg / static_cast<double>(nd);
  out.paths = n;
  return out;
}

std::vector<stats::TestReport> check_levy_occupation_identity(double mu, const std::function<double(double)>& g,
                                                              std::size_t n, double T, double dt, SeedSpec seed,
                                                              double rel_tol) {
  const OccupationEstimate e = estimate_occupation(mu, g, n, T, dt, seed);
  const double rate = 2.0 * mu;
  const double analytic =
      quad::integrate_to_infinity([&](double y) { return rate * std::exp(-rate * y) * g(y); }, 0.0, 1e-13, 1e-11);
  std::vector<stats::TestReport> out;
  auto rel = [&](std::string name, double lhs, double rhs) {
    auto r = stats::make_threshold_report(std::move(name), relative_gap(lhs, rhs), rhs, rel_tol, n, seed.master_seed);
    r.notes.push_back("lhs=" + std::to_string(lhs));
    out.push_back(std::move(r));
  };
  rel("occupation_vs_analytic", e.ratio, analytic);
  rel("occupation_vs_mc_depth", e.ratio, e.mc_depth_mean);
  rel("time_per_local_time", e.time_per_local, 1.0 / mu);
  return out;
}

std::vector<stats::TestReport> check_time_reversal(const MapModel& model, double t, std::size_t n, double dt,
                                                   SeedSpec seed, double ks_threshold) {
  if (!model.is_bm()) throw DomainError("check_time_reversal: only the BM_DRIFT dual is explicit");
  if (!(t > 0.0)) throw DomainError("check_time_reversal: t must be positive");
  if (n == 0) throw DomainError("check_time_reversal: need at least one path");
  const auto& b = model.bm();
  const MapModel dual = MapModel::bm_drift(-b.mu, b.sigma);
  ReversalSample fwd{Vec(n), Vec(n)}, rev{Vec(n), Vec(n)};
  auto one = [&](const MapModel& m, Rng& rng, double& depth_out, double& g_out, bool reversed) {
    // Finite horizon: margin 0 and no retries never fails, so every draw is kept.
    double x = 0.0, cur = 0.0, mn = 0.0, g = 0.0;
    std::size_t st = 0;
    const std::size_t steps = grid_steps(t, dt);
    const auto on_piece = [&](double a, double c, double s2, double t0, double len, std::size_t) {
      if (c <= mn) {
        mn = c;
        g = t0 + len;
      }
      if (!(s2 > 0.0)) return;
      if (2.0 * (a - mn) * (c - mn) >= bridge::kNegligibleExponent * s2) return;
      const double low = bridge::sample_minimum(a, c, s2, rng);
      if (low < mn) {
        mn = low;
        g = t0 + bridge::minimum_offset(a, c, low, len);
      }
    };
    for (std::size_t k = 0; k < steps; ++k) {
      const double t1 = k + 1 == steps ? t : static_cast<double>(k + 1) * dt;
      x = advance(m, st, x, cur, t1 - cur, rng, on_piece);
      cur = t1;
    }
    if (reversed) {
      depth_out = x - mn;
      g_out = t - g;
    } else {
      depth_out = -mn;
      g_out = g;
    }
  };
  parallel_for(n, [&](std::size_t i) {
    Rng r1(seed.child(2 * i));
    one(model, r1, fwd.depth[i], fwd.gtime[i], true);
    Rng r2(seed.child(2 * i + 1));
    one(dual, r2, rev.depth[i], rev.gtime[i], false);
  });
  std::vector<stats::TestReport> out;
  auto ks = [&](std::string name, const Vec& a, const Vec& c) {
    const auto r = stats::ks_two_sample(a, c);
    out.push_back(stats::make_threshold_report(std::move(name), r.statistic, "two-sample", ks_threshold, n,
                                               seed.master_seed, r.p_value));
  };
  ks("reversal_depth_ks", rev.depth, fwd.depth);
  ks("reversal_gtime_ks", rev.gtime, fwd.gtime);
  return out;
}

}  // namespace wpd::mapf
