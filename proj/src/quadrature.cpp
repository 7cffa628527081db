#include "wpd/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "wpd/core.hpp"

namespace wpd::quad {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

struct Piece {
  double a, b, value, err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

Piece rule(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double v = Kronrod::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

// Global adaptive bisection: always split the piece with the largest error
// estimate, up to a fixed number of pieces.
double global_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                       double rel_tol) {
  constexpr std::size_t kMaxPieces = 2000;
  std::priority_queue<Piece> heap;
  Piece first = rule(f, a, b);
  double total = first.value, err = first.err;
  heap.push(first);
  while (heap.size() < kMaxPieces && err > std::max(abs_tol, rel_tol * std::abs(total))) {
    const Piece worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) break;
    heap.pop();
    const Piece l = rule(f, worst.a, m), r = rule(f, m, worst.b);
    total += l.value + r.value - worst.value;
    err += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, abs_tol, rel_tol);
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: finite limits required");
  return global_adaptive(f, a, b, abs_tol, rel_tol);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double abs_tol, double rel_tol) {
  // x = a + t / (1 - t) maps [0, 1) onto [a, inf).
  const auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  return global_adaptive(g, 0.0, 1.0, abs_tol, rel_tol);
}

double integrate_singular(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, rel_tol);
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw DomainError("bisect: root not bracketed");
  for (int it = 0; it < 200 && (b - a) > tol * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace wpd::quad
