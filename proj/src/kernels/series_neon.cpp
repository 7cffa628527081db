#include <arm_neon.h>

#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels::detail {

void sine_series_neon(const SeriesArgs& args) {
  std::size_t i = 0;
  for (; i + 2 <= args.n; i += 2) {
    const float64x2_t ca = vld1q_f64(args.two_cos_a + i);
    const float64x2_t cb = vld1q_f64(args.two_cos_b + i);
    const float64x2_t r = vld1q_f64(args.rho + i);
    float64x2_t sa_prev = vdupq_n_f64(0.0), sa = vld1q_f64(args.sin_a + i);
    float64x2_t sb_prev = vdupq_n_f64(0.0), sb = vld1q_f64(args.sin_b + i);
    float64x2_t pw = r;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < args.terms; ++k) {
      const float64x2_t wk = vdupq_n_f64(args.w[k]);
      acc = vaddq_f64(acc, vmulq_f64(vmulq_f64(vmulq_f64(wk, pw), sa), sb));
      const float64x2_t sa_next = vsubq_f64(vmulq_f64(ca, sa), sa_prev);
      const float64x2_t sb_next = vsubq_f64(vmulq_f64(cb, sb), sb_prev);
      sa_prev = sa;
      sa = sa_next;
      sb_prev = sb;
      sb = sb_next;
      pw = vmulq_f64(pw, r);
    }
    vst1q_f64(args.out + i, vmulq_f64(vld1q_f64(args.pre + i), acc));
  }
  if (i < args.n) {
    SeriesArgs tail = args;
    tail.two_cos_a += i;
    tail.sin_a += i;
    tail.two_cos_b += i;
    tail.sin_b += i;
    tail.rho += i;
    tail.pre += i;
    tail.out += i;
    tail.n = args.n - i;
    sine_series_scalar(tail);
  }
}

}  // namespace wpd::kernels::detail
