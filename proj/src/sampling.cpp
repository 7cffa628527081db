#include "wpd/sampling.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <numbers>

namespace wpd::sampling {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t i) const {
  std::uint64_t s = stream_id ^ 0x6a09e667f3bcc909ULL;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = a + i;
  return {master_seed, splitmix64(t)};
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(SeedSpec seed) {
  std::uint64_t sm = seed.master_seed;
  const std::uint64_t m = splitmix64(sm);
  std::uint64_t st = seed.stream_id ^ rotl(m, 17);
  const std::uint64_t k = splitmix64(st) ^ m;
  std::uint64_t mix = k;
  for (auto& w : s_) w = splitmix64(mix);
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  boost::random::normal_distribution<double> nd;
  return nd(*this);
}

double Rng::exponential() {
  boost::random::exponential_distribution<double> ed;
  return ed(*this);
}

double gaussian_increment(double dt, double drift, double sigma, Rng& rng) {
  if (!(dt > 0.0)) throw DomainError("gaussian_increment: dt must be positive");
  if (sigma < 0.0) throw DomainError("gaussian_increment: sigma must be nonnegative");
  if (sigma == 0.0) return drift * dt;
  return drift * dt + sigma * std::sqrt(dt) * rng.normal();
}

double exponential_sample(double rate, Rng& rng) {
  if (!(rate > 0.0)) throw DomainError("exponential_sample: rate must be positive");
  return rng.exponential() / rate;
}

double positive_stable(double beta, Rng& rng) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("positive_stable: beta must lie in (0,1)");
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double a = std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta);
  const double b = std::pow(std::sin((1.0 - beta) * u) / e, (1.0 - beta) / beta);
  return a * b;
}

void isotropic_stable_increment(double alpha, double dt, std::span<double> out, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable increment: alpha must lie in (0,2)");
  if (!(dt > 0.0)) throw DomainError("stable increment: dt must be positive");
  const double a = positive_stable(0.5 * alpha, rng);
  const double scale = std::pow(dt, 1.0 / alpha) * std::sqrt(2.0 * a);
  for (double& c : out) c = scale * rng.normal();
}

Vec isotropic_stable_increment(double alpha, std::size_t d, double dt, Rng& rng) {
  if (d == 0) throw DomainError("stable increment: dimension must be positive");
  Vec out(d);
  isotropic_stable_increment(alpha, dt, out, rng);
  return out;
}

RateMatrix::RateMatrix(std::size_t n, std::vector<double> q) : n_(n), q_(std::move(q)) {
  if (n_ == 0 || q_.size() != n_ * n_) throw DomainError("rate matrix must be n x n");
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = q_[i * n_ + j];
      if (!std::isfinite(v)) throw DomainError("rate matrix entries must be finite");
      if (i != j && v < 0.0) throw DomainError("negative off-diagonal rate");
      row += v;
      scale += std::abs(v);
    }
    if (std::abs(row) > 1e-12 * (1.0 + scale)) throw DomainError("rate matrix rows must sum to zero");
  }
}

bool RateMatrix::irreducible() const {
  // Every state reaches every other state through positive rates.
  for (std::size_t s = 0; s < n_; ++s) {
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n_; ++j)
        if (j != i && !seen[j] && (*this)(i, j) > 0.0) {
          seen[j] = true;
          stack.push_back(j);
        }
    }
    for (bool b : seen)
      if (!b) return false;
  }
  return true;
}

std::size_t markov_chain_step(const RateMatrix& q, std::size_t state, double dt, Rng& rng) {
  if (state >= q.size()) throw DomainError("markov_chain_step: state out of range");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw DomainError("markov_chain_step: dt must be finite and nonnegative");
  double remaining = dt;
  for (;;) {
    const double rate = q.exit_rate(state);
    if (!(rate > 0.0)) return state;
    const double hold = rng.exponential() / rate;
    if (hold >= remaining) return state;
    remaining -= hold;
    double u = rng.uniform() * rate;
    std::size_t next = state;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j == state) continue;
      next = j;
      u -= q(state, j);
      if (u <= 0.0) break;
    }
    state = next;
  }
}

}  // namespace wpd::sampling
