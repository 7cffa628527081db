#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "wpd/kernels/kernels.hpp"

using namespace wpd::kernels;

namespace {

struct SeriesCase {
  std::vector<double> a, b, rho, pre, w;
};

SeriesCase make_case(std::size_t n, std::size_t terms, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ang(-3.0, 3.0), r(0.0, 0.95), p(-2.0, 2.0);
  SeriesCase c;
  for (std::size_t i = 0; i < n; ++i) {
    c.a.push_back(ang(gen));
    c.b.push_back(ang(gen));
    c.rho.push_back(r(gen));
    c.pre.push_back(p(gen));
  }
  for (std::size_t k = 0; k < terms; ++k) c.w.push_back(p(gen));
  return c;
}

std::vector<double> run_series(Isa isa, const SeriesCase& c) {
  set_isa(isa);
  std::vector<double> out(c.a.size());
  sine_series(c.a, c.b, c.rho, c.pre, c.w, out);
  return out;
}

bool bitwise_equal(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

class KernelIsa : public ::testing::Test {
 protected:
  void TearDown() override { set_isa(detected_isa()); }
};

}  // namespace

TEST_F(KernelIsa, ScalarSeriesMatchesDirectSum) {
  const auto c = make_case(37, 25, 1);
  const auto out = run_series(Isa::Scalar, c);
  for (std::size_t i = 0; i < c.a.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= c.w.size(); ++k)
      s += c.w[k - 1] * std::pow(c.rho[i], static_cast<double>(k)) * std::sin(k * c.a[i]) * std::sin(k * c.b[i]);
    EXPECT_NEAR(out[i], c.pre[i] * s, 1e-12 * (1.0 + std::abs(c.pre[i] * s)));
  }
}

TEST_F(KernelIsa, VectorSeriesBitwiseEqual) {
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_supported(isa)) continue;
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 64u, 1001u}) {
      const auto c = make_case(n, 40, static_cast<unsigned>(n) + 7);
      EXPECT_TRUE(bitwise_equal(run_series(Isa::Scalar, c), run_series(isa, c))) << isa_name(isa) << " n=" << n;
    }
  }
}

TEST_F(KernelIsa, VectorMomentsBitwiseEqual) {
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> ex(1.0);
  std::normal_distribution<double> nd;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_supported(isa)) continue;
    for (std::size_t n : {0u, 1u, 2u, 7u, 8u, 9u, 12345u}) {
      std::vector<double> w(n), f(n);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = ex(gen);
        f[i] = nd(gen);
      }
      set_isa(Isa::Scalar);
      const auto s = weighted_moments(w, f);
      set_isa(isa);
      const auto v = weighted_moments(w, f);
      EXPECT_EQ(std::memcmp(&s, &v, sizeof s), 0) << isa_name(isa) << " n=" << n;
    }
  }
}

TEST_F(KernelIsa, MomentsValues) {
  set_isa(Isa::Scalar);
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0, 5.0}, f{1.0, -1.0, 2.0, 0.0, 1.0};
  const auto m = weighted_moments(w, f);
  EXPECT_DOUBLE_EQ(m.sum_w, 15.0);
  EXPECT_DOUBLE_EQ(m.sum_w2, 55.0);
  EXPECT_DOUBLE_EQ(m.sum_wf, 1.0 - 2.0 + 6.0 + 5.0);
  EXPECT_DOUBLE_EQ(m.sum_wf2, 1.0 + 2.0 + 12.0 + 5.0);
}

TEST_F(KernelIsa, SizeMismatchThrows) {
  std::vector<double> a(3), b(2), out(3);
  EXPECT_ANY_THROW(sine_series(a, b, a, a, a, out));
  EXPECT_ANY_THROW(weighted_moments(a, b));
}

TEST(KernelDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(isa_supported(Isa::Scalar));
  EXPECT_TRUE(isa_supported(detected_isa()));
  EXPECT_EQ(active_isa(), detected_isa());
}
