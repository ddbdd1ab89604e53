#include <doctest.h>

#include <cmath>

#include <kdvdet/quadrature.hpp>

using namespace kdv;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  // int_{-1}^{1} x^p dx = 0 (odd) or 2/(p+1) (even)
  for (int n : {4, 16, 48}) {
    const QuadRule& r = gauss_legendre(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += r.weights[i] * std::pow(r.nodes[i], p);
      double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(acc - exact) < 5e-14);
    }
  }
}

TEST_CASE("gauss-legendre nodes are symmetric and weights positive") {
  const QuadRule& r = gauss_legendre(34);
  for (int i = 0; i < 34; ++i) {
    CHECK(r.weights[i] > 0.0);
    CHECK(r.nodes[i] == doctest::Approx(-r.nodes[33 - i]).epsilon(1e-15));
  }
}

TEST_CASE("mapped rule reproduces a shifted gaussian integral") {
  QuadRule r = gauss_legendre_on(-3.0, 5.0, 64);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * std::exp(-sqr(r.nodes[i] - 1.0));
  CHECK(std::abs(acc - std::sqrt(kPi)) < 1e-13);  // tails beyond [-3,5] are ~1e-16
}

TEST_CASE("adaptive integrator hits closed forms") {
  double v1 = integrate_adaptive([](double x) { return x * std::exp(x); }, 0.0, 1.0);
  CHECK(v1 == doctest::Approx(1.0).epsilon(1e-12));  // int x e^x = 1

  double v2 = integrate_adaptive([](double x) { return std::sin(50.0 * x); }, 0.0, 2.0, 1e-11);
  CHECK(v2 == doctest::Approx((1.0 - std::cos(100.0)) / 50.0).epsilon(1e-9));

  // half-line: int_0^inf e^{-x^2} = sqrt(pi)/2
  double v3 = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, kInf);
  CHECK(v3 == doctest::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-11));
}

TEST_CASE("adaptive integrator reports unreachable tolerance") {
  // |x|^{1/2} has a derivative singularity; demanding 1e-15 relative must throw
  // rather than silently return a wrong value.
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0,
                                     1e-15, 1e-16),
                  NumericalError);
}

TEST_CASE("simpson on uniform samples") {
  std::vector<double> v;
  const int n = 201;
  const double h = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) v.push_back(std::exp(i * h));
  CHECK(simpson_uniform(v, h) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
}
