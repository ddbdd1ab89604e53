#pragma once
// Gauss–Legendre rules plus thin wrappers around adaptive Gauss–Kronrod for
// non-oscillatory scalar integrals.

#include <functional>
#include <vector>

#include "kdvdet/common.hpp"

namespace kdv {

struct QuadRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss–Legendre rule of order n (Newton iteration on Legendre polynomials;
// nodes accurate to machine precision).
const QuadRule& gauss_legendre(int n);

// Same rule mapped onto [a, b].
QuadRule gauss_legendre_on(double a, double b, int n);

// Adaptive Gauss–Kronrod integral of a real function over [a, b]; b may be
// +inf. Throws NumericalError if the error estimate exceeds the request.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_floor = 1e-14);

// Composite Simpson over a uniform sample (n odd number of points).
double simpson_uniform(const std::vector<double>& values, double h);

}  // namespace kdv
