#include <atomic>
#include <cmath>
#include <vector>

#include "wpd/core.hpp"
#include "wpd/kernels/kernels.hpp"

namespace wpd::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(WPD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<int>& selected() {
  static std::atomic<int> isa{static_cast<int>(detected_isa())};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    case Isa::Neon:
#if defined(WPD_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return static_cast<Isa>(selected().load(std::memory_order_relaxed)); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) throw DomainError("instruction set not supported on this machine");
  selected().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void sine_series(std::span<const double> a, std::span<const double> b, std::span<const double> rho,
                 std::span<const double> pre, std::span<const double> w, std::span<double> out) {
  const std::size_t n = a.size();
  if (b.size() != n || rho.size() != n || pre.size() != n || out.size() != n)
    throw DomainError("sine_series: argument size mismatch");
  std::vector<double> ca(n), sa(n), cb(n), sb(n);
  for (std::size_t i = 0; i < n; ++i) {
    ca[i] = 2.0 * std::cos(a[i]);
    sa[i] = std::sin(a[i]);
    cb[i] = 2.0 * std::cos(b[i]);
    sb[i] = std::sin(b[i]);
  }
  const detail::SeriesArgs args{ca.data(), sa.data(), cb.data(), sb.data(), rho.data(),
                                pre.data(), w.data(), n,         w.size(), out.data()};
  switch (active_isa()) {
#if defined(WPD_HAVE_AVX2)
    case Isa::Avx2: detail::sine_series_avx2(args); return;
#endif
#if defined(WPD_HAVE_NEON)
    case Isa::Neon: detail::sine_series_neon(args); return;
#endif
    default: detail::sine_series_scalar(args); return;
  }
}

WeightedMoments weighted_moments(std::span<const double> w, std::span<const double> f) {
  if (w.size() != f.size()) throw DomainError("weighted_moments: size mismatch");
  switch (active_isa()) {
#if defined(WPD_HAVE_AVX2)
    case Isa::Avx2: return detail::weighted_moments_avx2(w.data(), f.data(), w.size());
#endif
#if defined(WPD_HAVE_NEON)
    case Isa::Neon: return detail::weighted_moments_neon(w.data(), f.data(), w.size());
#endif
    default: return detail::weighted_moments_scalar(w.data(), f.data(), w.size());
  }
}

}  // namespace wpd::kernels
