#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "wpd/core.hpp"
#include "wpd/sampling.hpp"
#include "wpd/stats.hpp"

namespace wpd::mapf {

struct BmDrift {
  double mu = 0.0;
  double sigma = 1.0;
};

struct Mmbm {
  sampling::RateMatrix q;
  Vec drifts;
  Vec sigmas;
};

class MapModel {
 public:
  // sigma = 0 is accepted and gives the deterministic path mu * t.
  static MapModel bm_drift(double mu, double sigma = 1.0);
  static MapModel mmbm(sampling::RateMatrix q, Vec drifts, Vec sigmas);

  bool is_bm() const noexcept { return std::holds_alternative<BmDrift>(kind_); }
  const BmDrift& bm() const { return std::get<BmDrift>(kind_); }
  const Mmbm& modulated() const { return std::get<Mmbm>(kind_); }
  // Dimension of the modulator vectors: 1 for BM, number of states for MMBM.
  std::size_t modulator_dim() const;

 private:
  explicit MapModel(std::variant<BmDrift, Mmbm> k) : kind_(std::move(k)) {}
  std::variant<BmDrift, Mmbm> kind_;
};

// Grid path on [0, T] started from (0, state). MMBM states are encoded as
// basis vectors e_k; the BM modulator is the single point 1.
MapPath simulate_map(const MapModel& model, double T, double dt, sampling::SeedSpec seed,
                     std::size_t initial_state = 0);

struct RunningMinimum {
  Vec min_values;
  std::size_t argmin_index = 0;
  double argmin_time = 0.0;
  MapState argmin_state;
};

// Last time achieving the minimum (ties go to the later sample).
RunningMinimum running_minimum(const MapPath& path);

// Accepts the running minimum as the global one if xi_T - min > margin;
// otherwise nullopt (horizon-fail).
std::optional<PocrSample> pocr_from_path(const MapPath& path, double margin);

struct Excursion {
  double start_time = 0.0;
  double end_time = 0.0;
  Vec heights;     // U at the grid nodes from start to end inclusive
  Vec modulator;   // flattened, theta_dim per node
  std::size_t theta_dim = 1;
  bool complete = false;

  double lifetime() const noexcept { return end_time - start_time; }
};

struct ExcursionSet {
  std::vector<Excursion> excursions;
  double time_at_minimum = 0.0;
};

// Grid cell [t_k, t_{k+1}) belongs to an excursion unless U vanishes
// (is <= eps_grid) at both ends; such cells count as time at the minimum.
ExcursionSet extract_excursions(const MapPath& path, double eps_grid = 0.0);

// Streams one path with exact Brownian-bridge minima between grid nodes.
// The horizon is doubled (continuing the same path) up to max_retries times
// before giving up.
std::optional<PocrSample> draw_pocr(const MapModel& model, double T, double dt, double margin,
                                    sampling::Rng& rng, int max_retries = 4,
                                    std::size_t initial_state = 0);

struct LadderHistogram {
  Vec depth_edges;
  std::size_t angle_bins = 1;
  // (depth bins + 1 overflow) x angle_bins, row-major by depth.
  std::vector<std::size_t> counts;
  std::size_t normalization = 0;
  std::size_t horizon_fails = 0;
  Vec depths;
  std::vector<std::size_t> angle_index;

  double mass(std::size_t depth_bin, std::size_t angle_bin) const;
  Vec angle_marginal() const;
};

LadderHistogram estimate_ladder_marginal(const MapModel& model, std::size_t n, double T, double dt,
                                         double margin, sampling::SeedSpec seed, Vec depth_edges,
                                         std::size_t initial_state = 0);

// KS of the depth sample against Exp(2 mu / sigma^2) and a 20-bin chi-square.
std::vector<stats::TestReport> depth_law_reports(const LadderHistogram& h, double mu, double sigma,
                                                 std::uint64_t seed, double ks_threshold = 0.02);

struct OccupationEstimate {
  double ratio = 0.0;           // sum int g / elapsed time, over complete cycles
  double time_per_local = 0.0;  // elapsed time per unit increase of the maximum
  double mc_depth_mean = 0.0;   // mean of g over independent depth draws
  std::size_t paths = 0;
};

// Each path runs until its maximum first reaches mu * T, a renewal time, so
// every cycle is complete and the expected horizon is T.
OccupationEstimate estimate_occupation(double mu, const std::function<double(double)>& g, std::size_t n,
                                       double T, double dt, sampling::SeedSpec seed);

// Reports: ratio vs analytic depth integral, ratio vs Monte Carlo depth
// integral, and elapsed time per unit local time vs 1/mu.
std::vector<stats::TestReport> check_levy_occupation_identity(double mu, const std::function<double(double)>& g,
                                                              std::size_t n, double T, double dt,
                                                              sampling::SeedSpec seed, double rel_tol = 0.05);

struct ReversalSample {
  Vec depth;  // -min under the dual, or xi_t - min under P
  Vec gtime;  // argmin time under the dual, or t - argmin time under P
};

// Two KS reports: (-min_t under the dual vs xi_t - min_t) and (g_t under the
// dual vs t - g_t). The dual of BM with drift mu is BM with drift -mu.
std::vector<stats::TestReport> check_time_reversal(const MapModel& model, double t, std::size_t n, double dt,
                                                   sampling::SeedSpec seed, double ks_threshold = 0.02);

}  // namespace wpd::mapf
