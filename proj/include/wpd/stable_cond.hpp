#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpd/core.hpp"
#include "wpd/sampling.hpp"
#include "wpd/stats.hpp"

namespace wpd::stable {

struct StableParams {
  double alpha = 1.0;
  std::size_t d = 2;

  // alpha in (0, 2) with alpha < d, or alpha = 2 with d >= 3.
  void validate() const;
};

// One exact increment of the isotropic stable process over dt, added to x.
void stable_step(const StableParams& p, std::span<double> x, double dt, sampling::Rng& rng);

// Grid path on [0, T] with steps dt; no killing.
SsmpPath simulate_stable(const StableParams& p, std::span<const double> x0, double T, double dt,
                         sampling::SeedSpec seed);

// Step size dt = h |X|^alpha: a fixed step in Lamperti time.
inline double lamperti_step(const StableParams& p, double radius, double h) {
  return h * std::pow(radius, p.alpha);
}

struct RadialMinimum {
  Vec point;        // X at the grid minimum of |X|
  double time = 0;  // grid time of that minimum
  double final_radius = 0;
};

// Lamperti-adaptive walk from x0, stopped once log(|X| / min |X|) > margin.
// nullopt if max_steps is exhausted first.
std::optional<RadialMinimum> draw_radial_minimum(const StableParams& p, std::span<const double> x0, double h,
                                                 double margin, sampling::Rng& rng,
                                                 std::size_t max_steps = 50'000'000);

// pi^{-d/2} Gamma(d/2)^2 / (Gamma((d-alpha)/2) Gamma(alpha/2)).
double pocr_prefactor(const StableParams& p);
double pocr_density(std::span<const double> x, std::span<const double> y, const StableParams& p);

// Rejection sampler for the point of closest reach. The radius ratio
// u = |y|/|x| is drawn from its Beta-type law (u^2 ~ Beta((d-alpha)/2, alpha/2));
// the direction is proposed by projecting a uniform ray from u x/|x| onto the
// unit sphere, with acceptance (1-u)/(1 - theta.a) under the envelope 1+u.
class PocrSampler {
 public:
  explicit PocrSampler(StableParams p);
  Vec sample(std::span<const double> x, sampling::Rng& rng);
  double acceptance_rate() const;

 private:
  StableParams p_;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

Vec sample_pocr(std::span<const double> x, const StableParams& p, sampling::SeedSpec seed);

// Density of |X*| / |x| by angular quadrature of pocr_density (d = 2 or 3).
double pocr_radial_density(double u, const StableParams& p, double tol = 1e-10);

// Total mass of pocr_density over the ball, by polar quadrature (d = 2 or 3).
// Scale invariance lets the start sit on the unit sphere. Radii within machine
// epsilon of the sphere are lost, which caps the accuracy at about eps^(alpha/2).
double pocr_total_mass(const StableParams& p, double tol = 1e-8);

// Patch or point target on the unit sphere for the downward conditioning.
// Patch integrals use the normalized surface measure.
struct Target {
  enum class Kind { Point, Arc, Cap, Sphere };
  Kind kind = Kind::Point;
  Vec point;          // Point: unit vector; Cap: unit centre
  double lo = 0.0;    // Arc: start angle (radians), d = 2
  double hi = 0.0;    // Arc: end angle
  double radius = 0;  // Cap: angular radius, d = 3

  static Target at(std::span<const double> theta);
  static Target arc(double lo, double hi);
  static Target cap(std::span<const double> centre, double angular_radius);
  static Target sphere();
};

// |(|x|^2 - 1)|^{alpha/2} times the patch integral of |theta - x|^{-d}, or
// the kernel at the target point.
double h_down(std::span<const double> x, const Target& target, const StableParams& p);

// int_0^{|x|^2-1} (u+1)^{-d/2} u^{alpha/2-1} du.
double h_up(std::span<const double> x, const StableParams& p);
// Limit of h_up as |x| -> infinity: Beta(alpha/2, (d-alpha)/2).
double h_up_limit(const StableParams& p);

struct Conditioning {
  enum class Kind { Up, Down };
  Kind kind = Kind::Up;
  Target target;

  static Conditioning up() { return {}; }
  static Conditioning down(Target t) { return {Kind::Down, std::move(t)}; }
};

// H(x e^{-y}) for the chosen conditioning.
double h_value(std::span<const double> x, const Conditioning& c, double y, const StableParams& p);

struct DoobWeightedPath {
  SsmpPath path;
  double weight = 0.0;
  bool alive = false;
};

DoobWeightedPath doob_weight(const SsmpPath& path, const Conditioning& c, double y, const StableParams& p);

struct ConditionedOptions {
  double t_resample = 0.1;   // 0 disables resampling
  std::size_t record_every = 1;
};

struct WeightedEnsemble {
  std::vector<SsmpPath> paths;
  Vec weights;              // normalized to mean 1 over the ensemble
  double log_normalizer = 0.0;  // log of the product of mean weights at resampling times
  double min_ess = 0.0;
  std::vector<std::string> warnings;
};

WeightedEnsemble simulate_conditioned(std::span<const double> x, const Conditioning& c, double y,
                                      const StableParams& p, double T, double dt, std::size_t n,
                                      sampling::SeedSpec seed, const ConditionedOptions& opt = {});

// Raw Doob weights (no resampling) at each checkpoint; one report per
// checkpoint comparing the mean weight with 1 in units of its standard error.
std::vector<stats::TestReport> check_doob_martingale(std::span<const double> x, const Conditioning& c, double y,
                                                     const StableParams& p, const Vec& checkpoints, double dt,
                                                     std::size_t n, sampling::SeedSpec seed, double n_se = 3.0);

struct Shell {
  double inner;
  double outer;
};

// Invariance check for h_down: walks from x0 with Lamperti-adaptive steps until
// the grid first lands in the shell, enters the unit ball, or passes r_max, and
// compares the stopped mean of h_down with h_down(x0) (relative error).
// With jumps the path can skip the shell and still reach the target, so the
// identity only holds once the shell reaches down to the barrier; for point
// targets the stopped values are then heavy tailed near the target.
stats::TestReport check_harmonicity_hdown(const StableParams& p, const Target& target, std::span<const double> x0,
                                          Shell shell, std::size_t n, sampling::SeedSpec seed, double h = 1e-3,
                                          double r_max = 1e4, double rel_tol = 0.05);

}  // namespace wpd::stable
