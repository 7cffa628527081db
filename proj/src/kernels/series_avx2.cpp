#include <immintrin.h>

#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels::detail {

void sine_series_avx2(const SeriesArgs& args) {
  std::size_t i = 0;
  for (; i + 4 <= args.n; i += 4) {
    const __m256d ca = _mm256_loadu_pd(args.two_cos_a + i);
    const __m256d cb = _mm256_loadu_pd(args.two_cos_b + i);
    const __m256d r = _mm256_loadu_pd(args.rho + i);
    __m256d sa_prev = _mm256_setzero_pd(), sa = _mm256_loadu_pd(args.sin_a + i);
    __m256d sb_prev = _mm256_setzero_pd(), sb = _mm256_loadu_pd(args.sin_b + i);
    __m256d pw = r;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < args.terms; ++k) {
      const __m256d wk = _mm256_set1_pd(args.w[k]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(wk, pw), sa), sb));
      const __m256d sa_next = _mm256_sub_pd(_mm256_mul_pd(ca, sa), sa_prev);
      const __m256d sb_next = _mm256_sub_pd(_mm256_mul_pd(cb, sb), sb_prev);
      sa_prev = sa;
      sa = sa_next;
      sb_prev = sb;
      sb = sb_next;
      pw = _mm256_mul_pd(pw, r);
    }
    _mm256_storeu_pd(args.out + i, _mm256_mul_pd(_mm256_loadu_pd(args.pre + i), acc));
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
