#include "wpd/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "wpd/quadrature.hpp"

namespace wpd::stats {

void TestReport::decide() {
  if (rule == PassRule::StatisticAtMost) {
    pass = statistic <= threshold;
  } else if (rule == PassRule::StatisticAtLeast) {
    pass = statistic >= threshold;
  } else {
    pass = p_value.has_value() && *p_value >= threshold;
  }
}

TestReport make_threshold_report(std::string name, double statistic, std::variant<double, std::string> reference,
                                 double threshold, std::size_t n, std::uint64_t seed,
                                 std::optional<double> p_value) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.reference = std::move(reference);
  r.threshold = threshold;
  r.p_value = p_value;
  r.n = n;
  r.seed = seed;
  r.rule = PassRule::StatisticAtMost;
  if (n < kSmallSample) r.notes.emplace_back("small-sample, threshold-rule only");
  r.decide();
  return r;
}

TestReport make_floor_report(std::string name, double statistic, std::variant<double, std::string> reference,
                             double floor, std::size_t n, std::uint64_t seed) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.reference = std::move(reference);
  r.threshold = floor;
  r.n = n;
  r.seed = seed;
  r.rule = PassRule::StatisticAtLeast;
  r.decide();
  return r;
}

TestReport make_pvalue_report(std::string name, double statistic, std::variant<double, std::string> reference,
                              double p_value, double floor, std::size_t n, std::uint64_t seed) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.reference = std::move(reference);
  r.threshold = floor;
  r.p_value = p_value;
  r.n = n;
  r.seed = seed;
  r.rule = PassRule::PValueAtLeast;
  r.decide();
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_pvalue(double d, double ne) {
  const double s = std::sqrt(ne);
  return kolmogorov_q((s + 0.12 + 0.11 / s) * d);
}

}  // namespace

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_pvalue(d, na * nb / (na + nb))};
}

TestResult ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_pvalue(d, n)};
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

ChiSquareResult chi_square_fit(std::span<const double> samples, std::span<const double> edges,
                               std::span<const double> probabilities, std::span<const double> weights) {
  if (edges.size() < 2 || probabilities.size() != edges.size() - 1)
    throw DomainError("chi_square_fit: need bins + 1 edges");
  if (!weights.empty() && weights.size() != samples.size())
    throw DomainError("chi_square_fit: weight count mismatch");
  const std::size_t nb = probabilities.size();
  std::vector<double> observed(nb + 1, 0.0);
  double total_w = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total_w += w;
    const double v = samples[i];
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (v < edges.front() || v >= edges.back()) {
      observed[nb] += w;
    } else {
      observed[static_cast<std::size_t>(it - edges.begin()) - 1] += w;
    }
  }
  const double n_eff = weights.empty() ? static_cast<double>(samples.size()) : effective_sample_size(weights);
  std::vector<double> probs(probabilities.begin(), probabilities.end());
  const double mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(mass > 0.0)) throw DomainError("chi_square_fit: all-zero expected mass");
  probs.push_back(std::max(0.0, 1.0 - mass));
  if (total_w <= 0.0) throw DomainError("chi_square_fit: zero total weight");
  for (double& o : observed) o = o / total_w * n_eff;

  // Merge adjacent sparse bins (overflow bin is merged last).
  std::vector<double> e_m, o_m;
  double e_acc = 0.0, o_acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    e_acc += probs[i] * n_eff;
    o_acc += observed[i];
    if (e_acc >= 5.0) {
      e_m.push_back(e_acc);
      o_m.push_back(o_acc);
      e_acc = o_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (e_m.empty()) {
      e_m.push_back(e_acc);
      o_m.push_back(o_acc);
    } else {
      e_m.back() += e_acc;
      o_m.back() += o_acc;
    }
  }
  if (e_m.size() <= 1) return {0.0, 1.0, e_m.size(), n_eff};
  double stat = 0.0;
  for (std::size_t i = 0; i < e_m.size(); ++i) stat += (o_m[i] - e_m[i]) * (o_m[i] - e_m[i]) / e_m[i];
  const double df = static_cast<double>(e_m.size() - 1);
  return {stat, boost::math::gamma_q(0.5 * df, 0.5 * stat), e_m.size(), n_eff};
}

ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      std::span<const double> edges) {
  if (edges.size() < 2) throw DomainError("chi_square_two_sample: need at least one bin");
  if (a.empty() || b.empty()) throw DomainError("chi_square_two_sample: empty sample");
  const std::size_t nb = edges.size() - 1;
  auto count = [&](std::span<const double> x) {
    std::vector<double> c(nb + 1, 0.0);
    for (double v : x) {
      if (v < edges.front() || v >= edges.back()) {
        c[nb] += 1.0;
      } else {
        c[static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1] += 1.0;
      }
    }
    return c;
  };
  const auto ca = count(a), cb = count(b);
  std::vector<double> ma, mb;
  double acc_a = 0.0, acc_b = 0.0;
  for (std::size_t i = 0; i <= nb; ++i) {
    acc_a += ca[i];
    acc_b += cb[i];
    if (acc_a + acc_b >= 10.0) {
      ma.push_back(acc_a);
      mb.push_back(acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (ma.empty()) {
      ma.push_back(acc_a);
      mb.push_back(acc_b);
    } else {
      ma.back() += acc_a;
      mb.back() += acc_b;
    }
  }
  const double na = static_cast<double>(a.size()), nb_ = static_cast<double>(b.size()), n = na + nb_;
  if (ma.size() <= 1) return {0.0, 1.0, ma.size(), n};
  double stat = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double col = ma[i] + mb[i];
    const double ea = na * col / n, eb = nb_ * col / n;
    stat += (ma[i] - ea) * (ma[i] - ea) / ea + (mb[i] - eb) * (mb[i] - eb) / eb;
  }
  const double df = static_cast<double>(ma.size() - 1);
  return {stat, boost::math::gamma_q(0.5 * df, 0.5 * stat), ma.size(), n};
}

ChiSquareResult chi_square_density_fit(std::span<const double> samples, std::span<const double> edges,
                                       const std::function<double(double)>& density,
                                       std::span<const double> weights) {
  if (edges.size() < 2) throw DomainError("chi_square_density_fit: need at least one bin");
  std::vector<double> probs(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    probs[i] = quad::integrate_singular(density, edges[i], edges[i + 1], 1e-10);
  return chi_square_fit(samples, edges, probs, weights);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance needs two samples");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) {
  if (x.empty()) throw DomainError("median of empty sample");
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (x.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(x.begin(), mid);
  return 0.5 * (lo + hi);
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples,
                                       const std::function<double(std::span<const double>)>& functional,
                                       std::size_t replicates, sampling::SeedSpec seed, double level) {
  if (replicates < 100) throw DomainError("bootstrap_ci: at least 100 replicates required");
  if (samples.empty()) throw DomainError("bootstrap_ci: empty sample");
  sampling::Rng rng(seed);
  std::vector<double> values(replicates), resample(samples.size());
  const auto n = samples.size();
  for (auto& v : values) {
    for (auto& r : resample) r = samples[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))];
    v = functional(resample);
  }
  std::sort(values.begin(), values.end());
  const double tail = 0.5 * (1.0 - level);
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(replicates - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, replicates - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(tail), at(1.0 - tail)};
}

double bootstrap_se_two_sample(std::span<const double> a, std::span<const double> b,
                               const std::function<double(std::span<const double>, std::span<const double>)>& stat,
                               std::size_t replicates, sampling::SeedSpec seed) {
  if (a.empty() || b.empty()) throw DomainError("bootstrap_se_two_sample: empty sample");
  sampling::Rng rng(seed);
  std::vector<double> ra(a.size()), rb(b.size()), values(replicates);
  for (auto& v : values) {
    for (auto& r : ra) r = a[static_cast<std::size_t>(rng.uniform() * static_cast<double>(a.size()))];
    for (auto& r : rb) r = b[static_cast<std::size_t>(rng.uniform() * static_cast<double>(b.size()))];
    v = stat(ra, rb);
  }
  return std::sqrt(variance(values));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace wpd::stats
