#include <immintrin.h>

#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels::detail {

namespace {

double fold(__m256d v) {
  alignas(32) double l[4];
  _mm256_store_pd(l, v);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

}  // namespace

WeightedMoments weighted_moments_avx2(const double* w, const double* f, std::size_t n) {
  __m256d s = _mm256_setzero_pd(), s2 = s, sf = s, sf2 = s;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wl = _mm256_loadu_pd(w + i);
    const __m256d fl = _mm256_loadu_pd(f + i);
    const __m256d wf = _mm256_mul_pd(wl, fl);
    s = _mm256_add_pd(s, wl);
    s2 = _mm256_add_pd(s2, _mm256_mul_pd(wl, wl));
    sf = _mm256_add_pd(sf, wf);
    sf2 = _mm256_add_pd(sf2, _mm256_mul_pd(wf, fl));
  }
  WeightedMoments m{fold(s), fold(s2), fold(sf), fold(sf2)};
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
