#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <kdvdet/oscillatory.hpp>
#include <kdvdet/quadrature.hpp>

using namespace kdv;

namespace {

// Brute-force reference: real/imag parts via the adaptive rule. Usable only
// while the total phase stays modest or the amplitude decays.
Complex brute(const AmpFn& a, double c3, double c1, double lo, double hi, double s) {
  auto ph = [&](double k) { return c3 * k * k * k + (c1 + s) * k; };
  double re = integrate_adaptive([&](double k) { return (a(k) * std::exp(kI * ph(k))).real(); },
                                 lo, hi, 1e-12, 1e-15);
  double im = integrate_adaptive([&](double k) { return (a(k) * std::exp(kI * ph(k))).imag(); },
                                 lo, hi, 1e-12, 1e-15);
  return {re, im};
}

}  // namespace

TEST_CASE("cubic-phase engine matches adaptive quadrature across s regimes") {
  AmpFn amp = [](double k) { return Complex(std::exp(-0.3 * k) / (1.0 + k * k), 0.1 * k); };
  const double c3 = 0.8, c1 = 2.0, lo = 0.5, hi = 12.0;
  OscillatorEngine eng({amp}, c3, c1, lo, hi);
  // s spans the GL branch (|omega| small) and the moment branch (|omega| large)
  for (double s : {0.0, 3.0, 17.0, 55.0, 140.0}) {
    Complex ref = brute(amp, c3, c1, lo, hi, s);
    Complex got = eng.eval_many({s})[0][0];
    CAPTURE(s);
    CHECK(std::abs(got - ref) < 1e-10);
  }
}

TEST_CASE("degenerate linear phase (c3 = 0) stays exact") {
  AmpFn amp = [](double k) { return Complex(1.0 / (1.0 + k), -0.2); };
  OscillatorEngine eng({amp}, 0.0, 0.0, 0.0, 6.0);
  for (double s : {0.5, 9.0, 31.0}) {
    Complex ref = brute(amp, 0.0, 0.0, 0.0, 6.0, s);
    CHECK(std::abs(eng.eval_many({s})[0][0] - ref) < 1e-10);
  }
}

TEST_CASE("panels split until a rapidly varying amplitude is resolved") {
  // Oscillatory amplitude e^{2ik}/k^2-style: the cubic-phase budget alone
  // would size panels far too wide for it.
  AmpFn amp = [](double k) { return std::exp(Complex(0.0, 2.0 * k)) / (k * k); };
  const double c3 = 2.4, c1 = 1.4, lo = 2.0, hi = 40.0;
  OscillatorEngine coarse({amp}, c3, c1, lo, hi, [] {
    OscOptions o;
    o.max_split_depth = 0;  // splitting disabled
    return o;
  }());
  OscillatorEngine fine({amp}, c3, c1, lo, hi);
  CHECK(fine.num_panels() > coarse.num_panels());
  for (double s : {4.0, 26.0}) {
    Complex ref = brute(amp, c3, c1, lo, hi, s);
    CHECK(std::abs(fine.eval_many({s})[0][0] - ref) < 1e-9);
  }
}

TEST_CASE("multi-channel evaluation equals per-channel runs") {
  AmpFn a0 = [](double k) { return Complex(std::cos(k), 0.0); };
  AmpFn a1 = [](double k) { return Complex(0.0, k * std::exp(-k)); };
  OscillatorEngine both({a0, a1}, 0.3, -1.0, 0.0, 8.0);
  OscillatorEngine e0({a0}, 0.3, -1.0, 0.0, 8.0);
  OscillatorEngine e1({a1}, 0.3, -1.0, 0.0, 8.0);
  std::vector<double> ss{0.0, 11.0, 42.0};
  auto vb = both.eval_many(ss);
  auto v0 = e0.eval_many(ss);
  auto v1 = e1.eval_many(ss);
  for (std::size_t j = 0; j < ss.size(); ++j) {
    CHECK(std::abs(vb[0][j] - v0[0][j]) < 1e-13);
    CHECK(std::abs(vb[1][j] - v1[0][j]) < 1e-13);
  }
}

TEST_CASE("eval and eval_many agree") {
  AmpFn amp = [](double k) { return Complex(1.0, 0.0) / (1.0 + 0.5 * k); };
  OscillatorEngine eng({amp}, 1.1, 0.0, 0.0, 10.0);
  std::vector<double> ss{0.7, 23.0};
  auto many = eng.eval_many(ss);
  for (std::size_t j = 0; j < ss.size(); ++j) {
    Complex one;
    eng.eval(ss[j], &one);
    CHECK(std::abs(many[0][j] - one) == 0.0);  // same code path, same result
  }
}
