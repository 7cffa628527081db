#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wpd/core.hpp"
#include "wpd/sampling.hpp"
#include "wpd/stable_cond.hpp"
#include "wpd/stats.hpp"

namespace wpd::williams {

struct ClassicalBm {
  double mu = 0.5;
};

struct DecompositionSpec {
  std::variant<ClassicalBm, stable::StableParams> model = ClassicalBm{};
  Vec start{0.0};        // ignored for the classical model (the path starts at 0)
  double T = 10.0;       // fixed time for the X_T functional
  double dt = 1e-3;      // classical grid step; stable Lamperti step factor h
  std::size_t n = 10000;
  double delta_offset = 1e-3;
  double margin = 8.0;   // direct simulation stops once the path is this far above its minimum
  sampling::SeedSpec seed{};

  void validate() const;
  bool classical() const { return std::holds_alternative<ClassicalBm>(model); }
};

// Per-path summaries compared between the direct and constructed ensembles.
// Classical: depth below 0, X_T, and increments. Stable: radial minimum,
// |X_T|, and log-radius increments.
struct Functionals {
  double radial_minimum = 0.0;
  double value_at_T = 0.0;
  double time_of_minimum = 0.0;
  double angle_at_minimum = std::numeric_limits<double>::quiet_NaN();
  double half_depth_time = 0.0;  // first time halfway from the start to the minimum
  double post_gain = 0.0;        // increment over one time unit after the minimum
};

// Real-valued path on a time grid (it crosses 0, so it is not an SsmpPath).
struct ClassicalPath {
  Vec times;
  Vec values;
  Functionals f;
};

// Classical case: depth m ~ Exp(2 mu); BM with drift -mu until it first hits
// -m (bridge crossing within each cell); then -m plus the norm of a 3-d
// Brownian motion with drift of size mu, which is BM(+mu) conditioned to stay
// above -m. The path covers at least [0, max(T, tau + 1)].
// `flip_drift` runs the first phase with drift +mu instead (negative control).
ClassicalPath construct_classical(double mu, double T, double dt, sampling::SeedSpec seed, bool flip_drift = false,
                                  double margin = 8.0);

// Direct BM(+mu) from 0 with exact bridge minima, stopped once the path is
// `margin` above its running minimum and past max(T, argmin + 1).
ClassicalPath simulate_classical(double mu, double T, double dt, double margin, sampling::SeedSpec seed);

struct StableConstructionOptions {
  std::size_t particles = 64;       // pre-minimum SMC ensemble
  std::size_t post_particles = 64;  // post-minimum ensemble (bounded weights, so smaller suffices)
  double eps_hit = 1e-3;       // pre-minimum stop radius around x*, relative to |x*|
  bool keep_path = true;
  std::size_t max_steps = 2'000'000;
};

struct StableConstruction {
  std::optional<SsmpPath> path;
  Functionals f;
  double glue_gap = 0.0;
  double tol_glue = 0.0;
  std::size_t restarts = 0;  // pre-minimum ensembles that died out
};

// x* from the point-of-closest-reach law; pre-minimum by an SMC ensemble
// weighted with h_down toward x*/|x*| at barrier |x*|, stopped within
// eps_hit |x*| of x*; post-minimum by an SMC ensemble weighted with h_up from
// (1 + delta) x*. One weight-proportional draw per phase. Computed in the
// frame scaled by 1/|x*| (self-similarity) with steps dt = h (|X| - 1)^alpha.
StableConstruction construct_stable(const stable::StableParams& p, std::span<const double> x0, double T, double h,
                                    double delta, sampling::SeedSpec seed, const StableConstructionOptions& opt = {});

// Direct stable path with Lamperti-adaptive steps dt = h |X|^alpha (clamped
// to land on T); minimum at the grid. Stops once |X| exceeds e^margin times
// the running minimum and the clock is past max(T, argmin + 1).
StableConstruction simulate_stable_direct(const stable::StableParams& p, std::span<const double> x0, double T,
                                          double h, double margin, sampling::SeedSpec seed, bool keep_path = true);

struct Ensemble {
  std::vector<Functionals> items;
  std::size_t restarts = 0;
  std::size_t failures = 0;

  Vec column(const std::string& functional) const;
};

Ensemble direct_ensemble(const DecompositionSpec& spec);
Ensemble constructed_ensemble(const DecompositionSpec& spec, bool flip_drift = false,
                              const StableConstructionOptions& opt = {});

inline const std::vector<std::string> kAllFunctionals{"radial_minimum", "value_at_T", "time_of_minimum",
                                                      "angle_at_minimum"};

// Two-sample KS per functional (12-bin chi-square homogeneity for the angle,
// gated on its p-value against `angle_p_floor`).
std::vector<stats::TestReport> verify_decomposition(const Ensemble& direct, const Ensemble& constructed,
                                                    const std::vector<std::string>& functionals,
                                                    double ks_threshold, std::uint64_t seed,
                                                    double angle_p_floor = 0.01);

// Correlation of half_depth_time and post_gain within depth quartiles; the
// statistic is the largest |r| sqrt(n_bin), gated at `z`.
stats::TestReport conditional_independence(const Ensemble& e, std::uint64_t seed, double z = 3.0);

// Change of the KS statistic against `direct` when delta is halved, gated by
// the bootstrap standard error of that statistic. Both constructed ensembles
// should share their seed so that only delta differs.
stats::TestReport delta_stability(const Ensemble& direct, const Ensemble& at_delta, const Ensemble& at_half_delta,
                                  const std::string& functional, std::uint64_t seed, std::size_t replicates = 200);

}  // namespace wpd::williams
