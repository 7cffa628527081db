#pragma once

#include "wpd/sampling.hpp"

namespace wpd::bridge {

// Brownian bridge over one cell: value a at the left end, c at the right,
// variance s2 = sigma^2 * dt across the cell.

// P(min of the bridge <= level), level <= min(a, c).
double crossing_probability(double a, double c, double level, double s2);

// Exact draw of the bridge minimum.
double sample_minimum(double a, double c, double s2, sampling::Rng& rng);

// Time of the bridge minimum m within [0, dt]: deterministic split of dt in
// proportion to the descent on each side.
double minimum_offset(double a, double c, double m, double dt);

// Number of squared-standard-deviation units beyond which a cell cannot
// undercut `level` by any representable amount.
inline constexpr double kNegligibleExponent = 40.0;

}  // namespace wpd::bridge
