#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpd {

// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when two path pieces cannot be glued end to end.
class GlueError : public std::runtime_error {
 public:
  GlueError(const std::string& what, double gap) : std::runtime_error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

using Vec = std::vector<double>;

double norm(std::span<const double> x);
double distance(std::span<const double> a, std::span<const double> b);

// A point of the unit sphere S^{d-1}, stored in Cartesian components.
// For d = 2 a radian view in (-pi, pi] is available.
class Angle {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  // Normalizes `v`; throws DomainError for the zero vector.
  static Angle from_vector(std::span<const double> v);
  // Accepts `u` only if it already has unit norm within `tol`.
  static Angle from_unit(std::span<const double> u, double tol = 1e-9);
  static Angle from_radians(double phi);
  // Basis vector e_k of R^n, used for finite modulators.
  static Angle basis(std::size_t n, std::size_t k);

  std::size_t dim() const noexcept { return u_.size(); }
  std::span<const double> components() const noexcept { return u_; }
  double operator[](std::size_t i) const { return u_[i]; }
  // Only defined for d = 2.
  double radians() const;

 private:
  explicit Angle(Vec u) : u_(std::move(u)) {}
  Vec u_;
};

struct MapState {
  double xi = 0.0;
  Angle theta = Angle::from_radians(0.0);
};

// Discretized (ordinate, modulator) trajectory. The modulator is stored as
// unit vectors of dimension `theta_dim`, flattened row-major.
class MapPath {
 public:
  MapPath(Vec times, Vec xi, Vec theta, std::size_t theta_dim,
          std::optional<std::size_t> killed = std::nullopt);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t theta_dim() const noexcept { return theta_dim_; }
  const Vec& times() const noexcept { return times_; }
  const Vec& xi() const noexcept { return xi_; }
  std::span<const double> theta(std::size_t i) const {
    return {theta_.data() + i * theta_dim_, theta_dim_};
  }
  const Vec& theta_flat() const noexcept { return theta_; }
  MapState state(std::size_t i) const;
  std::optional<std::size_t> killed() const noexcept { return killed_; }

 private:
  Vec times_;
  Vec xi_;
  Vec theta_;
  std::size_t theta_dim_;
  std::optional<std::size_t> killed_;
};

// Discretized trajectory in R^d \ {0}.
class SsmpPath {
 public:
  SsmpPath(Vec times, Vec coords, std::size_t dim, double alpha,
           std::optional<std::size_t> killed = std::nullopt);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double alpha() const noexcept { return alpha_; }
  const Vec& times() const noexcept { return times_; }
  const Vec& coords() const noexcept { return coords_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::optional<std::size_t> killed() const noexcept { return killed_; }
  // Number of samples strictly before the kill index (all of them if alive).
  std::size_t alive_count() const noexcept { return killed_ ? *killed_ : size(); }
  double radius(std::size_t i) const { return norm(point(i)); }

 private:
  Vec times_;
  Vec coords_;
  std::size_t dim_;
  double alpha_;
  std::optional<std::size_t> killed_;
};

struct PocrSample {
  double depth = 0.0;
  Angle angle = Angle::from_radians(0.0);
  std::optional<double> gtime;
};

struct PolarPoint {
  double logr;
  Angle theta;
};

PolarPoint to_polar(std::span<const double> x);
Vec from_polar(double logr, const Angle& theta);

struct GluedPath {
  SsmpPath path;
  double gap;  // endpoint mismatch that was accepted
};

inline constexpr double kDefaultGlueTolerance = 1e-9;

// `pre` must be killed; its kill sample is the glue point and is replaced by
// the first sample of `post`, whose times are shifted by pre's lifetime.
GluedPath concat_paths(const SsmpPath& pre, const SsmpPath& post,
                       double tol_glue = kDefaultGlueTolerance);

void write_csv(std::ostream& os, const SsmpPath& p);
void write_csv(std::ostream& os, const MapPath& p);

}  // namespace wpd
