#include "wpd/williams.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wpd/bridge.hpp"
#include "wpd/parallel.hpp"

namespace wpd::williams {

using sampling::Rng;
using sampling::SeedSpec;
using stable::StableParams;

void DecompositionSpec::validate() const {
  if (const auto* bm = std::get_if<ClassicalBm>(&model)) {
    if (!(bm->mu > 0.0)) throw DomainError("williams: classical model needs mu > 0");
  } else {
    const auto& p = std::get<StableParams>(model);
    p.validate();
    if (p.alpha == 2.0) throw DomainError("williams: stable construction needs alpha < 2");
    if (start.size() != p.d || !(norm(start) > 0.0)) throw DomainError("williams: start must be a nonzero point of R^d");
  }
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("williams: T and dt must be positive");
  if (n == 0) throw DomainError("williams: need at least one path");
  if (!(delta_offset > 0.0)) throw DomainError("williams: delta_offset must be positive");
  if (!(margin > 0.0)) throw DomainError("williams: margin must be positive");
}

namespace {

constexpr std::size_t kClassicalMaxSteps = 200'000'000;

// Value at the first sample at or after t (the last sample if none).
double value_at_or_after(const Vec& times, const Vec& xs, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - times.begin()), xs.size() - 1);
  return xs[i];
}

double first_time_at_or_below(const Vec& times, const Vec& xs, double level) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] <= level) return times[i];
  return times.back();
}

void check_classical(double mu, double T, double dt) {
  if (!(mu > 0.0)) throw DomainError("williams: mu must be positive");
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("williams: T and dt must be positive");
}

// Functionals of a classical path whose minimum m is attained at g.
Functionals classical_functionals(const Vec& times, const Vec& xs, double T, double m, double g) {
  Functionals f;
  f.radial_minimum = -m;
  f.value_at_T = value_at_or_after(times, xs, T);
  f.time_of_minimum = g;
  f.half_depth_time = first_time_at_or_below(times, xs, 0.5 * m);
  f.post_gain = value_at_or_after(times, xs, g + 1.0) - m;
  return f;
}

}  // namespace

ClassicalPath simulate_classical(double mu, double T, double dt, double margin, SeedSpec seed) {
  check_classical(mu, T, dt);
  if (!(margin > 0.0)) throw DomainError("simulate_classical: margin must be positive");
  Rng rng(seed);
  Vec times{0.0}, xs{0.0};
  double x = 0.0, m = 0.0, g = 0.0;
  for (std::size_t k = 0; k < kClassicalMaxSteps; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double c = x + sampling::gaussian_increment(dt, mu, 1.0, rng);
    if (2.0 * (x - m) * (c - m) < bridge::kNegligibleExponent * dt) {
      const double b = bridge::sample_minimum(x, c, dt, rng);
      if (b < m) {
        m = b;
        g = t0 + bridge::minimum_offset(x, c, b, dt);
      }
    }
    x = c;
    const double t1 = static_cast<double>(k + 1) * dt;
    times.push_back(t1);
    xs.push_back(x);
    if (x - m > margin && t1 >= T && t1 >= g + 1.0) {
      Functionals f = classical_functionals(times, xs, T, m, g);
      return {std::move(times), std::move(xs), f};
    }
  }
  throw std::runtime_error("simulate_classical: step limit reached");
}

ClassicalPath construct_classical(double mu, double T, double dt, SeedSpec seed, bool flip_drift, double margin) {
  check_classical(mu, T, dt);
  Rng rng(seed);
  const double level = -sampling::exponential_sample(2.0 * mu, rng);
  const double drift = flip_drift ? mu : -mu;
  Vec times{0.0}, xs{0.0};
  double x = 0.0, own_min = 0.0, own_g = 0.0;
  std::optional<double> tau;
  std::size_t k = 0;
  for (; k < kClassicalMaxSteps; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double c = x + sampling::gaussian_increment(dt, drift, 1.0, rng);
    if (2.0 * (x - own_min) * (c - own_min) < bridge::kNegligibleExponent * dt) {
      const double b = bridge::sample_minimum(x, c, dt, rng);
      const double off = bridge::minimum_offset(x, c, b, dt);
      if (b <= level) {
        // First passage precedes the cell minimum; split its offset by descent.
        tau = t0 + off * (x - level) / (x - b);
        break;
      }
      if (b < own_min) {
        own_min = b;
        own_g = t0 + off;
      }
    }
    x = c;
    times.push_back(static_cast<double>(k + 1) * dt);
    xs.push_back(x);
    // Negative control: the level was not reached and the path has left its own minimum for good.
    if (flip_drift && x - own_min > margin) break;
  }
  if (k == kClassicalMaxSteps) throw std::runtime_error("construct_classical: step limit reached");

  if (!tau) {
    // The control path is BM(+mu) itself from here on.
    const double stop = std::max(T, own_g + 1.0);
    for (++k; times.back() < stop; ++k) {
      x += sampling::gaussian_increment(dt, mu, 1.0, rng);
      times.push_back(static_cast<double>(k + 1) * dt);
      xs.push_back(x);
    }
    Functionals f = classical_functionals(times, xs, T, own_min, own_g);
    return {std::move(times), std::move(xs), f};
  }

  const double start = *tau;
  if (start <= times.back()) {
    xs.back() = level;
  } else {
    times.push_back(start);
    xs.push_back(level);
  }
  // Post-minimum: |W + mu t e1| for a 3-d Brownian motion W.
  double w[3] = {0.0, 0.0, 0.0};
  const double sd = std::sqrt(dt);
  const double stop = std::max(T, start + 1.0);
  for (std::size_t j = 1; times.back() < stop; ++j) {
    w[0] += mu * dt + sd * rng.normal();
    w[1] += sd * rng.normal();
    w[2] += sd * rng.normal();
    times.push_back(start + static_cast<double>(j) * dt);
    xs.push_back(level + std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]));
  }
  Functionals f = classical_functionals(times, xs, T, level, start);
  return {std::move(times), std::move(xs), f};
}

// ---------------------------------------------------------------------------
// Stable case.

namespace {

// Spline of log h_up in s = log(|x| - 1) for barrier 1, with the small- and
// large-radius asymptotes outside the table.
class HUpTable {
 public:
  explicit HUpTable(const StableParams& p) : alpha_(p.alpha), limit_(stable::h_up_limit(p)) {
    Vec logs;
    Vec x(p.d, 0.0);
    for (std::size_t i = 0; i <= kCount; ++i) {
      x[0] = 1.0 + std::exp(kLo + kStep * static_cast<double>(i));
      logs.push_back(std::log(stable::h_up(x, p)));
    }
    spline_ = std::make_unique<Spline>(logs.begin(), logs.end(), kLo, kStep);
  }

  double operator()(double r) const {
    if (!(r > 1.0)) return 0.0;
    const double e = r - 1.0;
    const double s = std::log(e);
    if (s < kLo) return (2.0 / alpha_) * std::pow(e * (2.0 + e), 0.5 * alpha_);
    if (s > kHi) return limit_;
    return std::exp((*spline_)(s));
  }

 private:
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  static constexpr double kLo = -36.0, kStep = 0.05;
  static constexpr std::size_t kCount = 1440;
  static constexpr double kHi = kLo + kStep * static_cast<double>(kCount);
  double alpha_, limit_;
  std::unique_ptr<Spline> spline_;
};

const HUpTable& hup_table(const StableParams& p) {
  static std::mutex mu;
  static std::map<std::pair<double, std::size_t>, std::unique_ptr<HUpTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{p.alpha, p.d}];
  if (!slot) slot = std::make_unique<HUpTable>(p);
  return *slot;
}

// Path history as a chain of immutable segments, so resampled particles share it.
struct Segment {
  std::shared_ptr<const Segment> prev;
  Vec times, coords;
};

struct Particle {
  Vec z;                // simulation state
  double t = 0.0;       // scaled time of X
  double h = 0.0;       // harmonic function at z
  double anchor = 1.0;  // h at the last resampling
  double rmin = INFINITY;
  bool alive = true;
  bool done = false;
  Vec marks;            // |X| at the first step at or past each mark time, NaN until then
  double half_time = NAN;
  std::shared_ptr<const Segment> hist;
  Vec buf_t, buf_x;

  double weight() const { return alive ? h / anchor : 0.0; }
};

// A phase simulates a stable process z, killed outside `inside`, weighted by
// `harmonic`. When `to_x` is set, X = to_x(z) runs on the clock
// dt_X = time_factor(z) dt_z (trapezoid per step); otherwise X = z and steps
// are clamped to land on the mark times and t_end.
struct PhaseSpec {
  const StableParams* p = nullptr;
  std::function<double(const Vec&)> step;
  std::function<bool(const Vec&)> inside;
  std::function<double(const Vec&)> harmonic;
  std::function<bool(const Vec&)> finished;
  std::function<Vec(const Vec&)> to_x;
  std::function<double(const Vec&)> time_factor;
  double t_end = INFINITY;
  Vec mark_times;            // sorted scaled times at which |X| is recorded
  double half_radius = 0.0;  // record the first time |X| <= half_radius
  bool keep_path = false;
  std::size_t max_steps = 0;
};

void flush(Particle& q) {
  if (q.buf_t.empty()) return;
  auto s = std::make_shared<Segment>();
  s->prev = q.hist;
  s->times = std::move(q.buf_t);
  s->coords = std::move(q.buf_x);
  q.hist = std::move(s);
  q.buf_t.clear();
  q.buf_x.clear();
}

void record(Particle& q, const Vec& x, bool keep) {
  q.rmin = std::min(q.rmin, norm(x));
  if (keep) {
    q.buf_t.push_back(q.t);
    q.buf_x.insert(q.buf_x.end(), x.begin(), x.end());
  }
}

Vec x_of(const PhaseSpec& ps, const Vec& z) { return ps.to_x ? ps.to_x(z) : z; }

void advance(Particle& q, const PhaseSpec& ps, Rng& rng) {
  double dt = ps.step(q.z);
  if (!ps.to_x) {
    for (double m : ps.mark_times)
      if (m > q.t) {
        dt = std::min(dt, m - q.t);
        break;
      }
    dt = std::min(dt, ps.t_end - q.t);
  }
  const double f0 = ps.time_factor ? ps.time_factor(q.z) : 1.0;
  stable::stable_step(*ps.p, q.z, dt, rng);
  if (!ps.inside(q.z)) {
    q.alive = false;
    return;
  }
  q.t += ps.time_factor ? 0.5 * (f0 + ps.time_factor(q.z)) * dt : dt;
  const Vec x = x_of(ps, q.z);
  const double r = norm(x);
  for (std::size_t i = 0; i < ps.mark_times.size(); ++i)
    if (std::isnan(q.marks[i]) && q.t >= ps.mark_times[i]) q.marks[i] = r;
  if (std::isnan(q.half_time) && r <= ps.half_radius) q.half_time = q.t;
  q.h = ps.harmonic(q.z);
  record(q, x, ps.keep_path);
  if (q.t >= ps.t_end || ps.finished(q.z)) q.done = true;
}

std::size_t draw_index(const Vec& cum, Rng& rng) {
  const double u = rng.uniform() * cum.back();
  const auto j = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  return std::min(j, cum.size() - 1);
}

// One SMC ensemble from z0; returns a weight-proportional draw among finished
// particles, or nothing if every particle was absorbed.
std::optional<Particle> run_phase(const Vec& z0, const PhaseSpec& ps, std::size_t m, SeedSpec seed) {
  std::vector<Particle> parts(m);
  std::vector<Rng> rngs;
  rngs.reserve(m);
  const double h0 = ps.harmonic(z0);
  for (std::size_t i = 0; i < m; ++i) {
    auto& q = parts[i];
    q.z = z0;
    q.h = h0;
    q.anchor = h0;
    q.marks.assign(ps.mark_times.size(), NAN);
    record(q, x_of(ps, z0), ps.keep_path);
    if (ps.finished(z0)) q.done = true;
    rngs.emplace_back(seed.child(i));
  }
  Rng resampler(seed.child(m));
  Vec w(m), cum(m);
  for (std::size_t steps = 0;; ++steps) {
    if (steps > ps.max_steps) throw std::runtime_error("williams: SMC step limit reached");
    bool active = false;
    for (std::size_t i = 0; i < m; ++i) {
      auto& q = parts[i];
      if (q.alive && !q.done) {
        advance(q, ps, rngs[i]);
        active = active || (q.alive && !q.done);
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += (w[i] = parts[i].weight());
    if (!(total > 0.0)) return std::nullopt;
    if (!active) break;
    // Active particles with negligible weight are dropped.
    double sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (parts[i].alive && !parts[i].done && w[i] < 1e-14 * total) {
        parts[i].alive = false;
        w[i] = 0.0;
      }
      sq += w[i] * w[i];
    }
    if (total * total < 0.5 * static_cast<double>(m) * sq) {
      for (auto& q : parts) flush(q);
      std::partial_sum(w.begin(), w.end(), cum.begin());
      // Systematic: one uniform per round, so nearby weight vectors select nearby indices.
      std::vector<Particle> next(m);
      const double u0 = resampler.uniform(), width = cum.back() / static_cast<double>(m);
      std::size_t j = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const double u = (u0 + static_cast<double>(i)) * width;
        while (j + 1 < m && cum[j] <= u) ++j;
        next[i] = parts[j];
        next[i].anchor = next[i].h;
      }
      parts = std::move(next);
    }
  }
  std::partial_sum(w.begin(), w.end(), cum.begin());
  Particle pick = parts[draw_index(cum, resampler)];
  flush(pick);
  return pick;
}

// Unwinds a particle history, mapped back to the unscaled frame.
SsmpPath unwind(const Particle& q, const StableParams& p, double s, bool kill_last) {
  std::vector<const Segment*> chain;
  for (const Segment* g = q.hist.get(); g; g = g->prev.get()) chain.push_back(g);
  const double ts = std::pow(s, p.alpha);
  Vec times, coords;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    for (double t : (*it)->times) times.push_back(ts * t);
    for (double c : (*it)->coords) coords.push_back(s * c);
  }
  std::optional<std::size_t> killed;
  if (kill_last) killed = times.size() - 1;
  return SsmpPath(std::move(times), std::move(coords), p.d, p.alpha, killed);
}

double angle_of(std::span<const double> x) { return x.size() == 2 ? std::atan2(x[1], x[0]) : NAN; }

void check_stable(const StableParams& p, std::span<const double> x0, double T, double h) {
  p.validate();
  if (p.alpha == 2.0) throw DomainError("williams: stable model needs alpha < 2");
  if (x0.size() != p.d || !(norm(x0) > 0.0)) throw DomainError("williams: start must be a nonzero point of R^d");
  if (!(T > 0.0) || !(h > 0.0)) throw DomainError("williams: T and h must be positive");
}

}  // namespace

StableConstruction construct_stable(const StableParams& p, std::span<const double> x0, double T, double h,
                                    double delta, SeedSpec seed, const StableConstructionOptions& opt) {
  check_stable(p, x0, T, h);
  if (!(delta > 0.0)) throw DomainError("construct_stable: delta must be positive");
  if (opt.particles == 0 || opt.post_particles == 0 || !(opt.eps_hit > 0.0)) throw DomainError("construct_stable: bad options");
  const double alpha = p.alpha;
  const HUpTable& hup = hup_table(p);

  Rng rng(seed);
  stable::PocrSampler sampler(p);
  const Vec xstar = sampler.sample(x0, rng);
  const double s = norm(xstar), ts = std::pow(s, alpha);
  Vec theta = xstar;
  for (double& c : theta) c /= s;

  StableConstruction out;
  out.tol_glue = s * (delta + opt.eps_hit);

  // Pre-minimum, in the frame scaled by 1/s. Inversion about theta with
  // radius^2 2, w = 2 (x - theta)/|x - theta|^2, maps the unit sphere to the
  // plane theta.w = -1 and the process conditioned to reach theta to a stable
  // process conditioned to stay in the half-space {theta.w > -1} (weight
  // dist^(alpha/2)), on the clock dt_x = 2^alpha |w|^(-2 alpha) dt_w. Reaching
  // within eps_hit of theta is |w| > 2/eps_hit.
  const auto invert = [&](const Vec& v) {
    Vec u(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) u[j] = v[j] - theta[j];
    const double k = 2.0 / std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
    for (double& c : u) c *= k;
    return u;
  };
  const auto plane_gap = [&](const Vec& w) { return std::inner_product(w.begin(), w.end(), theta.begin(), 1.0); };
  PhaseSpec pre;
  pre.p = &p;
  pre.step = [&](const Vec& w) { return h * std::pow(std::min(plane_gap(w), norm(w)), alpha); };
  pre.inside = [&](const Vec& w) { return plane_gap(w) > 0.0; };
  pre.harmonic = [&](const Vec& w) { return std::pow(plane_gap(w), 0.5 * alpha); };
  pre.finished = [&](const Vec& w) { return norm(w) * opt.eps_hit > 2.0; };
  pre.to_x = [&](const Vec& w) {
    Vec x = w;
    const double k = 2.0 / std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = theta[j] + k * w[j];
    return x;
  };
  const double clock = std::pow(2.0, alpha);
  pre.time_factor = [&](const Vec& w) { return clock * std::pow(norm(w), -2.0 * alpha); };
  pre.mark_times = {T / ts};
  pre.half_radius = std::sqrt(norm(x0) / s);
  pre.keep_path = opt.keep_path;
  pre.max_steps = opt.max_steps;
  Vec z0(x0.begin(), x0.end());
  for (double& c : z0) c /= s;
  z0 = invert(z0);

  constexpr std::size_t kAttempts = 50;
  std::optional<Particle> a;
  for (std::size_t k = 0; k < kAttempts && !a; ++k) {
    a = run_phase(z0, pre, opt.particles, seed.child(2 * k + 1));
    if (!a) ++out.restarts;
  }
  if (!a) throw std::runtime_error("construct_stable: pre-minimum ensembles kept dying out");
  const double zeta = ts * a->t;

  // Post-minimum: avoid the unit ball, from (1 + delta) theta.
  PhaseSpec post;
  post.p = &p;
  post.step = [&](const Vec& z) { return h * std::pow(std::max(norm(z) - 1.0, 0.1 * delta), alpha); };
  post.inside = [](const Vec& z) { return norm(z) > 1.0; };
  post.harmonic = [&](const Vec& z) { return hup(norm(z)); };
  post.finished = [](const Vec&) { return false; };
  const double one = 1.0 / ts, at_T = (T - zeta) / ts;
  post.t_end = std::max(one, at_T);
  post.mark_times = {one};
  if (at_T > 0.0 && at_T != one)
    post.mark_times.insert(at_T < one ? post.mark_times.begin() : post.mark_times.end(), at_T);
  post.keep_path = opt.keep_path;
  post.max_steps = opt.max_steps;
  Vec w0 = theta;
  for (double& c : w0) c *= 1.0 + delta;
  std::optional<Particle> b;
  for (std::size_t k = 0; k < kAttempts && !b; ++k) {
    b = run_phase(w0, post, opt.post_particles, seed.child(2 * k + 2));
    if (!b) ++out.restarts;
  }
  if (!b) throw std::runtime_error("construct_stable: post-minimum ensembles kept dying out");
  const auto mark = [&](double t) {
    const auto it = std::find(post.mark_times.begin(), post.mark_times.end(), t);
    return b->marks[static_cast<std::size_t>(it - post.mark_times.begin())];
  };

  out.glue_gap = s * distance(pre.to_x(a->z), w0);
  if (out.glue_gap > out.tol_glue * (1.0 + 1e-12))
    throw GlueError("construct_stable: closest approach outside the glue tolerance", out.glue_gap);

  Functionals& f = out.f;
  f.radial_minimum = s;  // both phases stay outside the ball of radius |x*|
  f.time_of_minimum = zeta;
  f.angle_at_minimum = angle_of(theta);
  f.half_depth_time = std::isnan(a->half_time) ? zeta : ts * a->half_time;
  f.value_at_T = s * (at_T > 0.0 ? mark(at_T) : a->marks[0]);
  f.post_gain = std::log(mark(one));

  if (opt.keep_path)
    out.path = concat_paths(unwind(*a, p, s, true), unwind(*b, p, s, false), out.tol_glue * (1.0 + 1e-12)).path;
  return out;
}

StableConstruction simulate_stable_direct(const StableParams& p, std::span<const double> x0, double T, double h,
                                          double margin, SeedSpec seed, bool keep_path) {
  check_stable(p, x0, T, h);
  if (!(margin > 0.0)) throw DomainError("simulate_stable_direct: margin must be positive");
  constexpr std::size_t kMaxSteps = 50'000'000;
  Rng rng(seed);
  Vec x(x0.begin(), x0.end());
  Vec times{0.0}, radii{norm(x)}, coords;
  if (keep_path) coords = x;
  double t = 0.0, rmin = radii[0], g = 0.0;
  Vec argmin = x;
  const double ratio = std::exp(margin);
  for (std::size_t k = 0; k < kMaxSteps; ++k) {
    double dt = stable::lamperti_step(p, radii.back(), h);
    const bool lands_on_T = t < T && dt >= T - t;
    if (lands_on_T) dt = T - t;
    stable::stable_step(p, x, dt, rng);
    t = lands_on_T ? T : t + dt;
    const double r = norm(x);
    times.push_back(t);
    radii.push_back(r);
    if (keep_path) coords.insert(coords.end(), x.begin(), x.end());
    if (r < rmin) {
      rmin = r;
      g = t;
      argmin = x;
    }
    if (r > ratio * rmin && t >= T && t >= g + 1.0) {
      StableConstruction out;
      Functionals& f = out.f;
      f.radial_minimum = rmin;
      f.value_at_T = value_at_or_after(times, radii, T);
      f.time_of_minimum = g;
      f.angle_at_minimum = angle_of(argmin);
      f.half_depth_time = first_time_at_or_below(times, radii, std::sqrt(radii[0] * rmin));
      f.post_gain = std::log(value_at_or_after(times, radii, g + 1.0) / rmin);
      if (keep_path) out.path = SsmpPath(std::move(times), std::move(coords), p.d, p.alpha);
      return out;
    }
  }
  throw std::runtime_error("simulate_stable_direct: step limit reached");
}

// ---------------------------------------------------------------------------
// Ensembles and reports.

Vec Ensemble::column(const std::string& functional) const {
  double Functionals::*field = nullptr;
  if (functional == "radial_minimum") field = &Functionals::radial_minimum;
  else if (functional == "value_at_T") field = &Functionals::value_at_T;
  else if (functional == "time_of_minimum") field = &Functionals::time_of_minimum;
  else if (functional == "angle_at_minimum") field = &Functionals::angle_at_minimum;
  else if (functional == "half_depth_time") field = &Functionals::half_depth_time;
  else if (functional == "post_gain") field = &Functionals::post_gain;
  else throw DomainError("unknown functional: " + functional);
  Vec out;
  out.reserve(items.size());
  for (const auto& f : items) out.push_back(f.*field);
  return out;
}

Ensemble direct_ensemble(const DecompositionSpec& spec) {
  spec.validate();
  Ensemble e;
  e.items.resize(spec.n);
  if (spec.classical()) {
    const double mu = std::get<ClassicalBm>(spec.model).mu;
    parallel_for(spec.n, [&](std::size_t i) {
      e.items[i] = simulate_classical(mu, spec.T, spec.dt, spec.margin, spec.seed.child(i)).f;
    });
  } else {
    const auto& p = std::get<StableParams>(spec.model);
    parallel_for(spec.n, [&](std::size_t i) {
      e.items[i] = simulate_stable_direct(p, spec.start, spec.T, spec.dt, spec.margin, spec.seed.child(i), false).f;
    });
  }
  return e;
}

Ensemble constructed_ensemble(const DecompositionSpec& spec, bool flip_drift, const StableConstructionOptions& opt) {
  spec.validate();
  Ensemble e;
  e.items.resize(spec.n);
  if (spec.classical()) {
    const double mu = std::get<ClassicalBm>(spec.model).mu;
    parallel_for(spec.n, [&](std::size_t i) {
      e.items[i] = construct_classical(mu, spec.T, spec.dt, spec.seed.child(i), flip_drift, spec.margin).f;
    });
    return e;
  }
  if (flip_drift) throw DomainError("constructed_ensemble: the drift flip applies to the classical model only");
  const auto& p = std::get<StableParams>(spec.model);
  std::vector<std::size_t> restarts(spec.n, 0);
  parallel_for(spec.n, [&](std::size_t i) {
    const auto c = construct_stable(p, spec.start, spec.T, spec.dt, spec.delta_offset, spec.seed.child(i), opt);
    e.items[i] = c.f;
    restarts[i] = c.restarts;
  });
  e.restarts = std::accumulate(restarts.begin(), restarts.end(), std::size_t{0});
  return e;
}

std::vector<stats::TestReport> verify_decomposition(const Ensemble& direct, const Ensemble& constructed,
                                                    const std::vector<std::string>& functionals,
                                                    double ks_threshold, std::uint64_t seed, double angle_p_floor) {
  if (direct.items.empty() || constructed.items.empty()) throw DomainError("verify_decomposition: empty ensemble");
  const std::size_t n = std::min(direct.items.size(), constructed.items.size());
  std::vector<stats::TestReport> out;
  for (const auto& name : functionals) {
    const Vec a = direct.column(name), b = constructed.column(name);
    if (name == "angle_at_minimum") {
      const auto has_nan = [](const Vec& v) { return std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); }); };
      if (has_nan(a) || has_nan(b)) continue;  // planar models only
      Vec edges(13);
      for (std::size_t k = 0; k <= 12; ++k)
        edges[k] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / 12.0;
      edges.back() = std::nextafter(std::numbers::pi, 4.0);
      const auto r = stats::chi_square_two_sample(a, b, edges);
      auto rep = stats::make_pvalue_report("williams." + name, r.statistic, "direct ensemble", r.p_value,
                                           angle_p_floor, n, seed);
      rep.notes.push_back("chi-square homogeneity, 12 bins, " + std::to_string(r.bins_used) + " used");
      out.push_back(std::move(rep));
      continue;
    }
    const auto r = stats::ks_two_sample(a, b);
    out.push_back(stats::make_threshold_report("williams." + name, r.statistic, "direct ensemble", ks_threshold, n,
                                               seed, r.p_value));
  }
  return out;
}

namespace {

Vec ranks(const Vec& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  Vec r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const Vec& a, const Vec& b) {
  const double ma = stats::mean(a), mb = stats::mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

}  // namespace

stats::TestReport conditional_independence(const Ensemble& e, std::uint64_t seed, double z) {
  if (e.items.size() < 16) throw DomainError("conditional_independence: need at least 16 paths");
  const Vec depth = e.column("radial_minimum"), pre = e.column("half_depth_time"), post = e.column("post_gain");
  std::vector<std::size_t> order(depth.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return depth[i] < depth[j]; });
  double worst = 0.0;
  std::string note = "spearman by depth quartile:";
  for (std::size_t q = 0; q < 4; ++q) {
    const std::size_t lo = q * order.size() / 4, hi = (q + 1) * order.size() / 4;
    Vec a, b;
    for (std::size_t k = lo; k < hi; ++k) {
      a.push_back(pre[order[k]]);
      b.push_back(post[order[k]]);
    }
    const double rho = pearson(ranks(a), ranks(b));
    worst = std::max(worst, std::abs(rho) * std::sqrt(static_cast<double>(a.size() - 1)));
    note += " " + std::to_string(rho);
  }
  auto rep = stats::make_threshold_report("williams.conditional_independence", worst, 0.0, z, e.items.size(), seed);
  rep.notes.push_back(note);
  return rep;
}

stats::TestReport delta_stability(const Ensemble& direct, const Ensemble& at_delta, const Ensemble& at_half_delta,
                                  const std::string& functional, std::uint64_t seed, std::size_t replicates) {
  const Vec a = direct.column(functional), b = at_delta.column(functional), c = at_half_delta.column(functional);
  const auto ks = [](std::span<const double> x, std::span<const double> y) {
    return stats::ks_two_sample(x, y).statistic;
  };
  const double ks_b = ks(a, b), ks_c = ks(a, c);
  const double se = stats::bootstrap_se_two_sample(a, c, ks, replicates, SeedSpec{seed, 0});
  auto rep = stats::make_threshold_report("williams.delta_stability." + functional, std::abs(ks_b - ks_c), 0.0, se,
                                          std::min({a.size(), b.size(), c.size()}), seed);
  rep.notes.push_back("KS at delta " + std::to_string(ks_b) + ", at delta/2 " + std::to_string(ks_c) +
                      ", bootstrap SE " + std::to_string(se));
  return rep;
}

}  // namespace wpd::williams
