#pragma once
// Not-a-knot cubic splines on strictly increasing knots; real and complex
// variants. Small, allocation-light, evaluation is a binary search plus a
// cubic.

#include <algorithm>
#include <vector>

#include "kdvdet/common.hpp"

namespace kdv {

class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, const std::vector<double>& y);

  double operator()(double xq) const;
  bool empty() const { return x_.empty(); }
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

private:
  std::vector<double> x_, a_, b_, c_, d_;  // piece i: a + b*t + c*t^2 + d*t^3, t = xq - x_[i]
};

class ComplexSpline {
public:
  ComplexSpline() = default;
  ComplexSpline(const std::vector<double>& x, const std::vector<Complex>& y) {
    std::vector<double> re(y.size()), im(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      re[i] = y[i].real();
      im[i] = y[i].imag();
    }
    re_ = CubicSpline(x, re);
    im_ = CubicSpline(x, im);
  }
  Complex operator()(double xq) const { return {re_(xq), im_(xq)}; }
  bool empty() const { return re_.empty(); }
  double x_front() const { return re_.x_front(); }
  double x_back() const { return re_.x_back(); }

private:
  CubicSpline re_, im_;
};

}  // namespace kdv
