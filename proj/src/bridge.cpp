#include "wpd/bridge.hpp"

#include <algorithm>
#include <cmath>

namespace wpd::bridge {

double crossing_probability(double a, double c, double level, double s2) {
  if (level >= std::min(a, c)) return 1.0;
  if (!(s2 > 0.0)) return 0.0;
  return std::exp(-2.0 * (a - level) * (c - level) / s2);
}

double sample_minimum(double a, double c, double s2, sampling::Rng& rng) {
  if (!(s2 > 0.0)) return std::min(a, c);
  const double d = a - c;
  const double m = 0.5 * (a + c - std::sqrt(d * d - 2.0 * s2 * std::log(rng.uniform())));
  return std::min(m, std::min(a, c));
}

double minimum_offset(double a, double c, double m, double dt) {
  const double left = a - m, right = c - m;
  if (left + right <= 0.0) return 0.0;
  return dt * left / (left + right);
}

}  // namespace wpd::bridge
