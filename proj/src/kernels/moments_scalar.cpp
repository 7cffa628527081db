#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels::detail {

WeightedMoments weighted_moments_scalar(const double* w, const double* f, std::size_t n) {
  double s[4] = {}, s2[4] = {}, sf[4] = {}, sf2[4] = {};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double wl = w[i + l];
      const double wf = wl * f[i + l];
      s[l] = s[l] + wl;
      s2[l] = s2[l] + wl * wl;
      sf[l] = sf[l] + wf;
      sf2[l] = sf2[l] + wf * f[i + l];
    }
  }
  WeightedMoments m;
  m.sum_w = (s[0] + s[1]) + (s[2] + s[3]);
  m.sum_w2 = (s2[0] + s2[1]) + (s2[2] + s2[3]);
  m.sum_wf = (sf[0] + sf[1]) + (sf[2] + sf[3]);
  m.sum_wf2 = (sf2[0] + sf2[1]) + (sf2[2] + sf2[3]);
  for (; i < n; ++i) {
    const double wf = w[i] * f[i];
    m.sum_w += w[i];
    m.sum_w2 += w[i] * w[i];
    m.sum_wf += wf;
    m.sum_wf2 += wf * f[i];
  }
  return m;
}

}  // namespace wpd::kernels::detail
