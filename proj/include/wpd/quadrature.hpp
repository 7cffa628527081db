#pragma once

#include <functional>

namespace wpd::quad {

// Globally adaptive Gauss-Kronrod (61 point) on a finite interval; stops once
// the summed error estimate drops below max(abs_tol, rel_tol * |I|) or after
// a fixed number of subintervals.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-12);

// Same, on [a, +inf).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double abs_tol = 1e-12, double rel_tol = 1e-12);

// Tanh-sinh on (a, b); tolerant of integrable endpoint singularities.
double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12);

// Bisection root of a monotone function on [a, b] with f(a), f(b) of opposite sign.
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14);

}  // namespace wpd::quad
