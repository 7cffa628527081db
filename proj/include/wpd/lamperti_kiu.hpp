#pragma once

#include <optional>
#include <span>

#include "wpd/core.hpp"

// Space-time transform between MAP paths (xi, Theta) and ssMp paths
// X_t = exp(xi_{phi(t)}) Theta_{phi(t)}, with phi the inverse of the
// clock s -> int_0^s exp(alpha xi_u) du.
namespace wpd::lk {

struct TimeChange {
  double alpha;
  Vec times;  // MAP grid
  Vec clock;  // clock[k] = sum_{j<k} exp(alpha xi_j) (t_{j+1} - t_j)
  bool killed = false;

  double lifetime() const { return clock.back(); }
};

// Left-endpoint quadrature; exact for paths constant between grid points.
TimeChange build_clock(const MapPath& path, double alpha);

struct ClockLocation {
  double s;          // phi(t)
  std::size_t cell;  // grid index k with clock[k] <= t < clock[k+1]
};

// Generalized inverse of the clock, linear inside a cell. Empty once t
// reaches the lifetime of a killed path, or exceeds the clock range.
std::optional<ClockLocation> locate(const TimeChange& tc, double t);
std::optional<double> phi(const TimeChange& tc, double t);

// Samples X at `out_times` (out_times[0] = 0, strictly increasing). The first
// time at or beyond the lifetime becomes the kill sample, carrying the final
// MAP state; later times are dropped.
SsmpPath ssmp_from_map(const MapPath& path, double alpha, std::span<const double> out_times);

// Inverse direction: xi = log|X|, Theta = X/|X| on the grid of the clock
// zeta(t) = int_0^t |X_s|^{-alpha} ds (left-endpoint).
MapPath map_from_ssmp(const SsmpPath& path);

// Sup-norm distance (times, ordinate, modulator) between `path` and the
// round trip through the ssMp sampled at the clock knots. Zero up to rounding
// for paths constant between knots.
double knot_round_trip_error(const MapPath& path, double alpha);

// Samples X on a uniform grid of step dt over [0, horizon], rebuilds the clock
// from the samples and returns its largest gap to phi at the grid times.
double clock_round_trip_error(const MapPath& path, double alpha, double dt, double horizon);

}  // namespace wpd::lk
