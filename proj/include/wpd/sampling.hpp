#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "wpd/core.hpp"

namespace wpd::sampling {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  // Child stream for sub-task `i` of this stream. Pure function of the inputs.
  SeedSpec child(std::uint64_t i) const;
};

std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256** engine; one instance per stream, never shared across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(SeedSpec seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

 private:
  std::uint64_t s_[4];
};

double gaussian_increment(double dt, double drift, double sigma, Rng& rng);
double exponential_sample(double rate, Rng& rng);

// Positive strictly (beta)-stable variable with Laplace transform
// E exp(-lambda A) = exp(-lambda^beta), 0 < beta < 1 (Kanter / Chambers-Mallows-Stuck).
double positive_stable(double beta, Rng& rng);

// Increment over time dt of the isotropic alpha-stable Levy process with
// characteristic exponent |theta|^alpha, built as sqrt(A) * N(0, 2 I_d) with
// A positive (alpha/2)-stable. Written into `out` (size d).
void isotropic_stable_increment(double alpha, double dt, std::span<double> out, Rng& rng);
Vec isotropic_stable_increment(double alpha, std::size_t d, double dt, Rng& rng);

// Continuous-time Markov chain generator, row-major n x n.
class RateMatrix {
 public:
  RateMatrix(std::size_t n, std::vector<double> q);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return q_[i * n_ + j]; }
  double exit_rate(std::size_t i) const { return -q_[i * n_ + i]; }
  bool irreducible() const;

 private:
  std::size_t n_;
  std::vector<double> q_;
};

// Exact state after time dt (exponential holding times, no Euler stepping).
std::size_t markov_chain_step(const RateMatrix& q, std::size_t state, double dt, Rng& rng);

}  // namespace wpd::sampling
