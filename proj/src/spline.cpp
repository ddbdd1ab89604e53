#include "kdvdet/spline.hpp"

#include <cmath>

namespace kdv {

CubicSpline::CubicSpline(std::vector<double> x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw NumericalError("spline: bad input sizes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw NumericalError("spline: knots not increasing");

  x_ = std::move(x);
  std::vector<double> M(n, 0.0);  // second derivatives
  if (n >= 4) {
    // Not-a-knot: continuous third derivative at the second and second-to-last
    // knots, eliminated into the interior tridiagonal system.
    const std::size_t m = n - 2;  // unknowns M[1..n-2]
    std::vector<double> dl(m, 0.0), dg(m, 0.0), du(m, 0.0), rhs(m, 0.0);
    auto h = [&](std::size_t i) { return x_[i + 1] - x_[i]; };
    auto r = [&](std::size_t i) {
      return (y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1);
    };
    for (std::size_t i = 1; i + 1 < n; ++i) {
      std::size_t j = i - 1;
      dl[j] = h(i - 1) / 6.0;
      dg[j] = (h(i - 1) + h(i)) / 3.0;
      du[j] = h(i) / 6.0;
      rhs[j] = r(i);
    }
    // Fold M0 = (1 + h0/h1) M1 - (h0/h1) M2 into the first row.
    double q0 = h(0) / h(1);
    dg[0] += dl[0] * (1.0 + q0);
    du[0] -= dl[0] * q0;
    dl[0] = 0.0;
    // Fold Mn-1 analogously into the last row.
    double q1 = h(n - 2) / h(n - 3);
    dg[m - 1] += du[m - 1] * (1.0 + q1);
    dl[m - 1] -= du[m - 1] * q1;
    du[m - 1] = 0.0;
    // Thomas.
    for (std::size_t j = 1; j < m; ++j) {
      double w = dl[j] / dg[j - 1];
      dg[j] -= w * du[j - 1];
      rhs[j] -= w * rhs[j - 1];
    }
    M[n - 2] = rhs[m - 1] / dg[m - 1];
    for (std::size_t j = m - 1; j-- > 0;) M[j + 1] = (rhs[j] - du[j] * M[j + 2]) / dg[j];
    M[0] = (1.0 + q0) * M[1] - q0 * M[2];
    M[n - 1] = (1.0 + q1) * M[n - 2] - q1 * M[n - 3];
  } else if (n == 3) {
    // Single quadratic through three points: constant second derivative.
    double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
    double m2 = 2.0 * ((y[2] - y[1]) / h1 - (y[1] - y[0]) / h0) / (h0 + h1);
    M.assign(3, m2);
  }

  a_.resize(n - 1);
  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double hi = x_[i + 1] - x_[i];
    a_[i] = y[i];
    c_[i] = M[i] / 2.0;
    d_[i] = (M[i + 1] - M[i]) / (6.0 * hi);
    b_[i] = (y[i + 1] - y[i]) / hi - hi * (2.0 * M[i] + M[i + 1]) / 6.0;
  }
}

double CubicSpline::operator()(double xq) const {
  if (x_.empty()) throw NumericalError("spline: empty");
  double lo = x_.front(), hi = x_.back();
  double slack = 1e-9 * (hi - lo) + 1e-300;
  if (xq < lo - slack || xq > hi + slack) throw NumericalError("spline: query outside knots");
  xq = std::min(std::max(xq, lo), hi);
  auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i + 2 > x_.size()) i = x_.size() - 2;
  double t = xq - x_[i];
  return a_[i] + t * (b_[i] + t * (c_[i] + t * d_[i]));
}

}  // namespace kdv
