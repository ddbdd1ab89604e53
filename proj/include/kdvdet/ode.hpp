#pragma once
// Adaptive Dormand–Prince 5(4) integrator for small fixed-size complex systems.
// Used for Jost solutions and Riccati flows; the right-hand sides are smooth,
// so an embedded RK pair with PI step control is the whole story. Steps are
// clipped to land exactly on requested output points.

#include <array>
#include <cmath>
#include <functional>

#include "kdvdet/common.hpp"

namespace kdv {

template <int N>
using CVec = std::array<Complex, N>;

template <int N>
struct OdeOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  double initial_step = 1e-3;
  double max_step = 1.0;
  long max_steps = 2000000;
};

namespace detail {
// Dormand–Prince coefficients (classic DOPRI5 tableau).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace detail

// Integrates y' = f(x, y) from x0 to x1 (either direction). Calls
// on_point(x, y) at every requested grid value if out_grid is non-empty;
// out_grid must be sorted in the direction of integration and contained in
// [x0, x1] (inclusive). Returns y(x1).
template <int N>
CVec<N> integrate_ode(const std::function<void(double, const CVec<N>&, CVec<N>&)>& f, double x0,
                      double x1, CVec<N> y, const OdeOptions<N>& opt = {},
                      const std::vector<double>& out_grid = {},
                      const std::function<void(double, const CVec<N>&)>& on_point = nullptr) {
  using namespace detail;
  const double dir = (x1 >= x0) ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);
  if (span == 0.0) {
    if (on_point && !out_grid.empty()) on_point(x0, y);
    return y;
  }

  double x = x0;
  double h = std::min(opt.initial_step, std::min(opt.max_step, span)) * dir;
  std::size_t next_out = 0;
  // Emit grid points equal to the start.
  while (on_point && next_out < out_grid.size() && (out_grid[next_out] - x) * dir <= 1e-14 * span) {
    on_point(out_grid[next_out], y);
    ++next_out;
  }

  CVec<N> k1, k2, k3, k4, k5, k6, k7, yt, y5;
  f(x, y, k1);
  long steps = 0;
  while ((x1 - x) * dir > 1e-14 * span) {
    if (++steps > opt.max_steps) throw NumericalError("ode: step limit exceeded");
    // Clip to the next output point and to the interval end.
    double target = x1;
    if (next_out < out_grid.size() && (out_grid[next_out] - target) * dir < 0) target = out_grid[next_out];
    if ((x + h - target) * dir > 0) h = target - x;

    for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a21 * k1[i]);
    f(x + c2 * h, yt, k2);
    for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(x + c3 * h, yt, k3);
    for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(x + c4 * h, yt, k4);
    for (int i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(x + c5 * h, yt, k5);
    for (int i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(x + h, yt, k6);
    for (int i = 0; i < N; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(x + h, y5, k7);

    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      Complex e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }

    if (err <= 1.0) {
      x += h;
      y = y5;
      k1 = k7;  // FSAL
      while (on_point && next_out < out_grid.size() &&
             (out_grid[next_out] - x) * dir <= 1e-14 * span) {
        on_point(out_grid[next_out], y);
        ++next_out;
      }
    }
    double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) > opt.max_step) h = opt.max_step * dir;
    if (std::abs(h) < 1e-14 * span) throw NumericalError("ode: step size underflow");
  }
  while (on_point && next_out < out_grid.size()) {
    on_point(out_grid[next_out], y);
    ++next_out;
  }
  return y;
}

}  // namespace kdv
