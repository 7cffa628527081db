#include <arm_neon.h>

#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels::detail {

WeightedMoments weighted_moments_neon(const double* w, const double* f, std::size_t n) {
  // Two registers emulate the four reference lanes: lo = {0,1}, hi = {2,3}.
  float64x2_t s_lo = vdupq_n_f64(0.0), s_hi = s_lo, s2_lo = s_lo, s2_hi = s_lo;
  float64x2_t sf_lo = s_lo, sf_hi = s_lo, sf2_lo = s_lo, sf2_hi = s_lo;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t w_lo = vld1q_f64(w + i), w_hi = vld1q_f64(w + i + 2);
    const float64x2_t f_lo = vld1q_f64(f + i), f_hi = vld1q_f64(f + i + 2);
    const float64x2_t wf_lo = vmulq_f64(w_lo, f_lo), wf_hi = vmulq_f64(w_hi, f_hi);
    s_lo = vaddq_f64(s_lo, w_lo);
    s_hi = vaddq_f64(s_hi, w_hi);
    s2_lo = vaddq_f64(s2_lo, vmulq_f64(w_lo, w_lo));
    s2_hi = vaddq_f64(s2_hi, vmulq_f64(w_hi, w_hi));
    sf_lo = vaddq_f64(sf_lo, wf_lo);
    sf_hi = vaddq_f64(sf_hi, wf_hi);
    sf2_lo = vaddq_f64(sf2_lo, vmulq_f64(wf_lo, f_lo));
    sf2_hi = vaddq_f64(sf2_hi, vmulq_f64(wf_hi, f_hi));
  }
  auto fold = [](float64x2_t lo, float64x2_t hi) {
    return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  };
  WeightedMoments m{fold(s_lo, s_hi), fold(s2_lo, s2_hi), fold(sf_lo, sf_hi), fold(sf2_lo, sf2_hi)};
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
