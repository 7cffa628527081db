#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops with a scalar reference and vector variants
// selected at runtime. All variants use the same per-lane operation order,
// so results are bitwise identical across instruction sets.
namespace wpd::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
// Best instruction set supported by this build and CPU.
Isa detected_isa();
// Currently selected variant; defaults to detected_isa().
Isa active_isa();
// Forces a variant (for equivalence tests). Throws if unsupported here.
void set_isa(Isa isa);
bool isa_supported(Isa isa);

// out[i] = pre[i] * sum_{k=1..K} w[k-1] * rho[i]^k * sin(k a[i]) * sin(k b[i]),  K = w.size().
void sine_series(std::span<const double> a, std::span<const double> b, std::span<const double> rho,
                 std::span<const double> pre, std::span<const double> w, std::span<double> out);

struct WeightedMoments {
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  double sum_wf = 0.0;
  double sum_wf2 = 0.0;
};

// Sums of w, w^2, w f, w f^2 accumulated in four interleaved lanes.
WeightedMoments weighted_moments(std::span<const double> w, std::span<const double> f);

namespace detail {

struct SeriesArgs {
  const double* two_cos_a;
  const double* sin_a;
  const double* two_cos_b;
  const double* sin_b;
  const double* rho;
  const double* pre;
  const double* w;
  std::size_t n;
  std::size_t terms;
  double* out;
};

void sine_series_scalar(const SeriesArgs& args);
void sine_series_avx2(const SeriesArgs& args);
void sine_series_neon(const SeriesArgs& args);

WeightedMoments weighted_moments_scalar(const double* w, const double* f, std::size_t n);
WeightedMoments weighted_moments_avx2(const double* w, const double* f, std::size_t n);
WeightedMoments weighted_moments_neon(const double* w, const double* f, std::size_t n);

}  // namespace detail

}  // namespace wpd::kernels
