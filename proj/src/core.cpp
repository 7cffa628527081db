#include "wpd/core.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace wpd {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Angle Angle::from_vector(std::span<const double> v) {
  const double r = norm(v);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("angle of a zero or non-finite vector");
  Vec u(v.begin(), v.end());
  for (double& c : u) c /= r;
  return Angle(std::move(u));
}

Angle Angle::from_unit(std::span<const double> u, double tol) {
  if (u.empty() || std::abs(norm(u) - 1.0) > tol) throw DomainError("angle is not a unit vector");
  return Angle(Vec(u.begin(), u.end()));
}

Angle Angle::from_radians(double phi) { return Angle(Vec{std::cos(phi), std::sin(phi)}); }

Angle Angle::basis(std::size_t n, std::size_t k) {
  if (k >= n) throw DomainError("basis index out of range");
  Vec u(n, 0.0);
  u[k] = 1.0;
  return Angle(std::move(u));
}

double Angle::radians() const {
  if (u_.size() != 2) throw DomainError("radian view requires d = 2");
  double phi = std::atan2(u_[1], u_[0]);
  if (phi <= -std::numbers::pi) phi += 2.0 * std::numbers::pi;
  return phi;
}

namespace {

void check_times(const Vec& times) {
  if (times.empty()) throw DomainError("empty path");
  if (times.front() != 0.0) throw DomainError("path must start at time 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("path times must be strictly increasing");
}

}  // namespace

MapPath::MapPath(Vec times, Vec xi, Vec theta, std::size_t theta_dim,
                 std::optional<std::size_t> killed)
    : times_(std::move(times)),
      xi_(std::move(xi)),
      theta_(std::move(theta)),
      theta_dim_(theta_dim),
      killed_(killed) {
  check_times(times_);
  if (theta_dim_ == 0) throw DomainError("modulator dimension must be positive");
  if (xi_.size() != times_.size() || theta_.size() != times_.size() * theta_dim_)
    throw DomainError("map path length mismatch");
  if (killed_ && *killed_ >= times_.size()) throw DomainError("kill index out of range");
  for (double v : xi_)
    if (!std::isfinite(v)) throw DomainError("ordinate must be finite");
}

MapState MapPath::state(std::size_t i) const { return {xi_[i], Angle::from_unit(theta(i))}; }

SsmpPath::SsmpPath(Vec times, Vec coords, std::size_t dim, double alpha,
                   std::optional<std::size_t> killed)
    : times_(std::move(times)),
      coords_(std::move(coords)),
      dim_(dim),
      alpha_(alpha),
      killed_(killed) {
  check_times(times_);
  if (dim_ == 0) throw DomainError("dimension must be positive");
  if (!(alpha_ > 0.0)) throw DomainError("alpha must be positive");
  if (coords_.size() != times_.size() * dim_) throw DomainError("ssmp path length mismatch");
  if (killed_ && *killed_ >= times_.size()) throw DomainError("kill index out of range");
  for (std::size_t i = 0; i < alive_count(); ++i)
    if (!(norm(point(i)) > 0.0)) throw DomainError("ssmp path visits the origin before its lifetime");
}

PolarPoint to_polar(std::span<const double> x) {
  const double r = norm(x);
  if (!(r > 0.0)) throw DomainError("to_polar of the zero vector");
  return {std::log(r), Angle::from_vector(x)};
}

Vec from_polar(double logr, const Angle& theta) {
  if (std::abs(norm(theta.components()) - 1.0) > 1e-9) throw DomainError("non-unit angle");
  const double r = std::exp(logr);
  Vec x(theta.components().begin(), theta.components().end());
  for (double& c : x) c *= r;
  return x;
}

GluedPath concat_paths(const SsmpPath& pre, const SsmpPath& post, double tol_glue) {
  if (!pre.killed()) throw DomainError("pre-path must have a finite lifetime");
  if (pre.dim() != post.dim()) throw DomainError("dimension mismatch");
  const std::size_t k = *pre.killed();
  const double gap = distance(pre.point(k), post.point(0));
  if (gap > tol_glue) throw GlueError("glue endpoint mismatch", gap);

  const double lifetime = pre.times()[k];
  const std::size_t d = pre.dim();
  Vec times(pre.times().begin(), pre.times().begin() + static_cast<std::ptrdiff_t>(k));
  Vec coords(pre.coords().begin(), pre.coords().begin() + static_cast<std::ptrdiff_t>(k * d));
  times.reserve(k + post.size());
  for (double t : post.times()) times.push_back(lifetime + t);
  coords.insert(coords.end(), post.coords().begin(), post.coords().end());

  std::optional<std::size_t> killed;
  if (post.killed()) killed = k + *post.killed();
  return {SsmpPath(std::move(times), std::move(coords), d, post.alpha(), killed), gap};
}

void write_csv(std::ostream& os, const SsmpPath& p) {
  os << "t";
  for (std::size_t j = 0; j < p.dim(); ++j) os << ",x_" << (j + 1);
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << p.times()[i];
    for (double c : p.point(i)) os << ',' << c;
    os << '\n';
  }
  if (p.killed()) os << "#killed=" << *p.killed() << '\n';
}

void write_csv(std::ostream& os, const MapPath& p) {
  os << "t,xi";
  for (std::size_t j = 0; j < p.theta_dim(); ++j) os << ",theta_" << (j + 1);
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << p.times()[i] << ',' << p.xi()[i];
    for (double c : p.theta(i)) os << ',' << c;
    os << '\n';
  }
  if (p.killed()) os << "#killed=" << *p.killed() << '\n';
}

}  // namespace wpd
