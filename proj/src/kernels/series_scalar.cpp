#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels::detail {

void sine_series_scalar(const SeriesArgs& args) {
  for (std::size_t i = 0; i < args.n; ++i) {
    const double ca = args.two_cos_a[i], cb = args.two_cos_b[i], r = args.rho[i];
    double sa_prev = 0.0, sa = args.sin_a[i];
    double sb_prev = 0.0, sb = args.sin_b[i];
    double pw = r;
    double acc = 0.0;
    for (std::size_t k = 0; k < args.terms; ++k) {
      acc = acc + ((args.w[k] * pw) * sa) * sb;
      const double sa_next = ca * sa - sa_prev;
      const double sb_next = cb * sb - sb_prev;
      sa_prev = sa;
      sa = sa_next;
      sb_prev = sb;
      sb = sb_next;
      pw = pw * r;
    }
    args.out[i] = args.pre[i] * acc;
  }
}

}  // namespace wpd::kernels::detail
