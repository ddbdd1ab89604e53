#include "kdvdet/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace kdv {

static QuadRule make_gauss_legendre(int n) {
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0, p1, dp;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = x;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

const QuadRule& gauss_legendre(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

QuadRule gauss_legendre_on(double a, double b, int n) {
  const QuadRule& base = gauss_legendre(n);
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * base.nodes[i];
    r.weights[i] = half * base.weights[i];
  }
  return r;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_floor) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double val = gauss_kronrod<double, 31>::integrate(f, a, b, 14, rel_tol, &err);
  if (err > rel_tol * std::max(1.0, std::abs(val)) * 100.0 + abs_floor * 100.0)
    throw NumericalError("integrate_adaptive: error estimate " + std::to_string(err) +
                         " above request");
  return val;
}

double simpson_uniform(const std::vector<double>& values, double h) {
  std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) throw NumericalError("simpson_uniform: need odd point count >= 3");
  double s = values.front() + values.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += values[i] * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace kdv
