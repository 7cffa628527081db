#pragma once

#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "wpd/core.hpp"
#include "wpd/sampling.hpp"
#include "wpd/stats.hpp"

// Planar Brownian motion and the cone {(r, phi): |phi| < phi0}. In Lamperti
// time the log-radius xi and the winding angle theta are independent
// standard Brownian motions.
namespace wpd::cone {

struct ConeParams {
  double phi0 = std::numbers::pi / 2;
  std::size_t K = 1;  // minimum number of series terms; the tail rule may add more

  void validate() const;
};

// Series are summed until the first omitted term bound is below this.
inline constexpr double kSeriesTail = 1e-12;
inline constexpr std::size_t kMaxTerms = 2'000'000;

// M(phi) = sin(pi (phi + phi0) / 2 phi0), zero at the edges.
double ground_state(double phi, const ConeParams& c);
double lambda1(const ConeParams& c);  // pi^2 / (4 phi0^2)

// Density of theta_s at `theta` for a Brownian motion from `phi` killed on
// leaving (-phi0, phi0).
double taboo_density(double phi, double theta, double s, const ConeParams& c);
// Integral of taboo_density over theta (termwise).
double taboo_survival(double phi, double s, const ConeParams& c);

// Descending ladder series
//   (1/phi0) sum_k exp(-pi (k+1) y / 2 phi0) sin(k a(phi)) sin(k a(theta)),
// a(v) = pi (v + phi0) / 2 phi0. Returns kDivergent when the tail rule cannot
// be met within kMaxTerms (in particular at y = 0).
double ladder_density_cone(double y, double theta, double phi, const ConeParams& c);
inline constexpr double kDivergent = std::numeric_limits<double>::quiet_NaN();

// Joint density of the depth y* = -inf xi and angle theta* at the radial
// minimum under the cone conditioning: the ladder series times the
// ground-state ratio M(theta)/M(phi) (from integrating u_dagger against the
// change of measure over s) times the killing rate pi/phi0. Integrates to 1.
double closest_reach_density(double y, double theta, double phi, const ConeParams& c);
// Its integral over [y0, y1) x [theta0, theta1), y1 may be +inf.
double closest_reach_cell(double y0, double y1, double theta0, double theta1, double phi, const ConeParams& c);
// Integral of the ladder series itself over the same cell. Its total mass is
// not 1 (about 0.559 at phi = 0, phi0 = pi/2).
double ladder_cell(double y0, double y1, double theta0, double theta1, double phi, const ConeParams& c);

// Tables on a (y, theta) grid, row-major by y, through the batched sine-series
// kernel; each row uses the term count of its y. Rows with y = 0 hold
// kDivergent. `closest_reach` applies the closest_reach_density factor.
Vec ladder_density_table(const Vec& ys, const Vec& thetas, double phi, const ConeParams& c,
                         bool closest_reach = false);
// taboo_density(phi, theta, s) over thetas.
Vec taboo_density_table(double phi, const Vec& thetas, double s, const ConeParams& c);

// exp(-y pi / phi0); accepts phi0 = pi.
double survival_ladder(double y, const ConeParams& c);

// Density of the first passage time of a standard Brownian motion below -y
// (1/2-stable): y exp(-y^2 / 2s) / sqrt(2 pi s^3).
double inverse_local_time_density(double s, double y);

// Ladder potential density before the change of measure: passage density
// times the killed-angle series.
double u_dagger_density(double s, double y, double theta, double phi, const ConeParams& c);

// Change of measure at the final time of a planar path started at x:
// M(arg X_t)/M(arg x) (|X_t|/|x|)^(pi/2phi0), zero once a grid point leaves
// the cone.
double cone_com_weight(const SsmpPath& path, std::span<const double> x, const ConeParams& c);

// Monte Carlo.

// Exit survival of the killed angle from phi at time s, against taboo_survival
// (relative error). Exits between grid points use the bridge crossing law.
stats::TestReport check_taboo_survival(double phi, double s, const ConeParams& c, std::size_t n, double dt,
                                       sampling::SeedSpec seed, double rel_tol = 0.01);

// Mean of the cone weight at each checkpoint for planar Brownian paths from x
// (grid step dt), in units of its standard error. Each cell multiplies the
// weight by the bridge probability of not crossing either boundary ray.
std::vector<stats::TestReport> check_cone_martingale(std::span<const double> x, const ConeParams& c,
                                                     const Vec& checkpoints, double dt, std::size_t n,
                                                     sampling::SeedSpec seed, double n_se = 3.0);

// Draw from the angle process conditioned to stay in (-phi0, phi0), over
// time s from phi: Brownian chunks of length `chunk` accepted with
// probability M(end) (rejection on exit), restitched.
double simulate_taboo(double phi, double s, double dt, const ConeParams& c, sampling::Rng& rng, double chunk = 0.25);

struct LadderSample {
  double y;
  double theta;
  double weight;
};

enum class LadderMethod { Weighted, Taboo };

// Depth and angle at the radial minimum under the cone conditioning, starting
// at |x| = 1, arg x = phi. xi is Brownian motion with drift pi/2phi0 (exact
// bridge minima, margin rule). Weighted: the angle is an unconditioned
// Brownian motion up to the argmin time g, weighted by
// exp(lambda1 g / 2) M(theta_g)/M(phi) and the bridge survival factor.
// Taboo: the angle at g is drawn from simulate_taboo, weight 1.
std::vector<LadderSample> sample_closest_reach(double phi, const ConeParams& c, std::size_t n, double dt,
                                               sampling::SeedSpec seed, LadderMethod method = LadderMethod::Weighted);

// Reference cell masses for check_ladder_law.
enum class LadderReference { Series, ClosestReach };

struct LadderGrid {
  std::size_t ny = 20;
  std::size_t ntheta = 12;
  double y_max = 3.0;  // the last row also holds y >= y_max
};

// Normalized weighted histogram of a sample on the grid, row-major by y.
Vec ladder_histogram(const std::vector<LadderSample>& sample, const ConeParams& c, const LadderGrid& grid);
// Reference cell masses on the same grid.
Vec ladder_reference_cells(double phi, const ConeParams& c, LadderReference reference, const LadderGrid& grid);

// Total variation between the (weighted) histogram of sample_closest_reach and
// the reference cell masses on the grid; notes carry the effective sample size.
stats::TestReport check_ladder_law(double phi, const ConeParams& c, std::size_t n, double dt, sampling::SeedSpec seed,
                                   LadderReference reference, const LadderGrid& grid = {},
                                   double tv_threshold = 0.05, LadderMethod method = LadderMethod::Weighted);

// The same comparison for a sample already drawn.
stats::TestReport ladder_law_report(const std::vector<LadderSample>& sample, double phi, const ConeParams& c,
                                    LadderReference reference, const LadderGrid& grid, double tv_threshold,
                                    std::uint64_t seed);

}  // namespace wpd::cone
