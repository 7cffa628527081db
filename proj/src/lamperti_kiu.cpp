#include "wpd/lamperti_kiu.hpp"

#include <algorithm>
#include <cmath>

namespace wpd::lk {

TimeChange build_clock(const MapPath& path, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("build_clock: alpha must be positive");
  const std::size_t n = path.killed() ? *path.killed() + 1 : path.size();
  TimeChange tc{alpha, Vec(path.times().begin(), path.times().begin() + static_cast<std::ptrdiff_t>(n)),
                Vec(n, 0.0), path.killed().has_value()};
  for (std::size_t k = 0; k + 1 < n; ++k)
    tc.clock[k + 1] = tc.clock[k] + std::exp(alpha * path.xi()[k]) * (tc.times[k + 1] - tc.times[k]);
  return tc;
}

std::optional<ClockLocation> locate(const TimeChange& tc, double t) {
  if (t < 0.0) throw DomainError("phi: negative time");
  const double end = tc.lifetime();
  if (t > end || (t == end && tc.killed)) return std::nullopt;
  if (t == end) return ClockLocation{tc.times.back(), tc.times.size() - 1};
  // Last k with clock[k] <= t.
  const auto it = std::upper_bound(tc.clock.begin(), tc.clock.end(), t);
  const auto k = static_cast<std::size_t>(it - tc.clock.begin()) - 1;
  const double width = tc.clock[k + 1] - tc.clock[k];
  const double s = tc.times[k] + (t - tc.clock[k]) / width * (tc.times[k + 1] - tc.times[k]);
  return ClockLocation{s, k};
}

std::optional<double> phi(const TimeChange& tc, double t) {
  const auto loc = locate(tc, t);
  if (!loc) return std::nullopt;
  return loc->s;
}

SsmpPath ssmp_from_map(const MapPath& path, double alpha, std::span<const double> out_times) {
  if (out_times.empty()) throw DomainError("ssmp_from_map: no output times");
  const TimeChange tc = build_clock(path, alpha);
  const std::size_t d = path.theta_dim();
  Vec times, coords;
  times.reserve(out_times.size());
  coords.reserve(out_times.size() * d);
  std::optional<std::size_t> killed;
  auto emit = [&](double t, std::size_t k) {
    times.push_back(t);
    const double r = std::exp(path.xi()[k]);
    for (double c : path.theta(k)) coords.push_back(r * c);
  };
  for (double t : out_times) {
    const auto loc = locate(tc, t);
    if (!loc) {
      killed = times.size();
      emit(t, tc.times.size() - 1);
      break;
    }
    emit(t, loc->cell);
  }
  return SsmpPath(std::move(times), std::move(coords), d, alpha, killed);
}

MapPath map_from_ssmp(const SsmpPath& path) {
  const double alpha = path.alpha();
  const std::size_t d = path.dim();
  const std::size_t alive = path.alive_count();
  if (alive == 0) throw DomainError("map_from_ssmp: path has no alive samples");
  Vec times{0.0}, xi, theta;
  for (std::size_t k = 0; k < alive; ++k) {
    const auto x = path.point(k);
    const double r = norm(x);
    if (!(r > 0.0)) throw DomainError("map_from_ssmp: zero point before kill");
    xi.push_back(std::log(r));
    for (double c : x) theta.push_back(c / r);
    if (k + 1 < path.size())
      times.push_back(times.back() + std::pow(r, -alpha) * (path.times()[k + 1] - path.times()[k]));
  }
  std::optional<std::size_t> killed;
  if (path.killed()) {
    killed = alive;
    const auto x = path.point(alive);
    const double r = norm(x);
    if (r > 0.0) {
      xi.push_back(std::log(r));
      for (double c : x) theta.push_back(c / r);
    } else {
      // Killed at the origin: hold the last alive state at the lifetime.
      xi.push_back(xi.back());
      const Vec last(theta.end() - static_cast<std::ptrdiff_t>(d), theta.end());
      theta.insert(theta.end(), last.begin(), last.end());
    }
  }
  times.resize(xi.size());
  return MapPath(std::move(times), std::move(xi), std::move(theta), d, killed);
}

double knot_round_trip_error(const MapPath& path, double alpha) {
  if (path.size() < 2) throw DomainError("knot_round_trip_error: need at least two samples");
  const auto tc = build_clock(path, alpha);
  const Vec out(tc.clock.begin(), tc.clock.end() - 1);
  const auto back = map_from_ssmp(ssmp_from_map(path, alpha, out));
  if (back.size() != out.size()) return INFINITY;
  double err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    err = std::max({err, std::abs(back.times()[i] - path.times()[i]), std::abs(back.xi()[i] - path.xi()[i])});
    for (std::size_t j = 0; j < path.theta_dim(); ++j) err = std::max(err, std::abs(back.theta(i)[j] - path.theta(i)[j]));
  }
  return err;
}

double clock_round_trip_error(const MapPath& path, double alpha, double dt, double horizon) {
  const auto tc = build_clock(path, alpha);
  if (!(dt > 0.0) || !(horizon > 0.0) || !(horizon < tc.lifetime()))
    throw DomainError("clock_round_trip_error: need 0 < dt and 0 < horizon < lifetime");
  Vec out;
  for (std::size_t k = 0; static_cast<double>(k) * dt <= horizon; ++k) out.push_back(static_cast<double>(k) * dt);
  const auto back = map_from_ssmp(ssmp_from_map(path, alpha, out));
  double err = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) err = std::max(err, std::abs(back.times()[k] - *phi(tc, out[k])));
  return err;
}

}  // namespace wpd::lk
