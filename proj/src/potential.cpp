#include "kdvdet/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kdvdet/quadrature.hpp"

namespace kdv {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Quintic smoothstep: 0 at s<=0, 1 at s>=1, C^2 across.
double smoother(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}
}  // namespace

Potential::Potential(Zero) {
  eval_ = [](double) { return 0.0; };
  base_support_ = {0.0, 0.0};
  window_ = {1.0, -1.0};  // empty
  tag_ = "zero";
  params_ = "";
  refresh_support();
}

Potential::Potential(SechWell w) {
  eval_ = [w](double x) {
    double s = sech((x - w.center) / w.width);
    return w.depth * s * s;
  };
  base_support_ = {-kInf, kInf};
  tag_ = "sech_well";
  params_ = "depth=" + fmt(w.depth) + ",width=" + fmt(w.width) + ",center=" + fmt(w.center);
  refresh_support();
}

Potential::Potential(SquareWell w) {
  if (!(w.hi > w.lo)) throw ConfigError("square well: need hi > lo");
  eval_ = [w](double x) { return (x >= w.lo && x <= w.hi) ? w.depth : 0.0; };
  base_support_ = {w.lo, w.hi};
  base_breaks_ = {w.lo, w.hi};
  tag_ = "square_well";
  params_ = "depth=" + fmt(w.depth) + ",lo=" + fmt(w.lo) + ",hi=" + fmt(w.hi);
  refresh_support();
}

Potential::Potential(GaussianWell w) {
  if (!(w.sigma > 0)) throw ConfigError("gaussian well: need sigma > 0");
  eval_ = [w](double x) {
    double u = (x - w.center) / w.sigma;
    return (std::abs(u) > 40.0) ? 0.0 : w.depth * std::exp(-0.5 * u * u);
  };
  base_support_ = {-kInf, kInf};
  tag_ = "gaussian_well";
  params_ = "depth=" + fmt(w.depth) + ",center=" + fmt(w.center) + ",sigma=" + fmt(w.sigma);
  refresh_support();
}

Potential::Potential(SlowDecayTail w) {
  if (!(w.p > 0)) throw ConfigError("slow decay tail: need p > 0");
  eval_ = [w](double x) { return (x > 0.0) ? w.c * std::pow(1.0 + x, -w.p) : 0.0; };
  base_support_ = {0.0, kInf};
  base_breaks_ = {0.0};
  tag_ = "slow_decay";
  params_ = "c=" + fmt(w.c) + ",p=" + fmt(w.p);
  refresh_support();
}

Potential::Potential(LeftOscillation w) {
  eval_ = [w](double x) {
    if (x >= -1.0) return 0.0;
    return w.amplitude * std::sin(w.wavenumber * x) * smoother(-1.0 - x);
  };
  base_support_ = {-kInf, -1.0};
  base_breaks_ = {-2.0, -1.0};
  left_integrable_ = false;
  tag_ = "left_oscillation";
  params_ = "amplitude=" + fmt(w.amplitude) + ",wavenumber=" + fmt(w.wavenumber);
  refresh_support();
}

Potential::Potential(SampledProfile w) {
  if (w.x.size() != w.q.size() || w.x.size() < 2)
    throw ConfigError("sampled profile: need matching x/q arrays, length >= 2");
  for (std::size_t i = 1; i < w.x.size(); ++i)
    if (!(w.x[i] > w.x[i - 1])) throw ConfigError("sampled profile: x not increasing");
  base_support_ = {w.x.front(), w.x.back()};
  std::string blob;
  blob.reserve(w.x.size() * 36);
  for (std::size_t i = 0; i < w.x.size(); ++i) blob += fmt(w.x[i]) + ":" + fmt(w.q[i]) + ";";
  params_ = "n=" + std::to_string(w.x.size()) + ",lo=" + fmt(w.x.front()) +
            ",hi=" + fmt(w.x.back()) + ",hash=" + std::to_string(fnv1a64(blob));
  auto data = std::make_shared<SampledProfile>(std::move(w));
  base_breaks_ = data->x;
  eval_ = [data](double x) {
    const auto& xs = data->x;
    if (x < xs.front() || x > xs.back()) return 0.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = (it == xs.begin()) ? 0 : (it - xs.begin()) - 1;
    if (i + 2 > xs.size()) i = xs.size() - 2;
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - t) * data->q[i] + t * data->q[i + 1];
  };
  tag_ = "sampled";
  refresh_support();
}

void Potential::refresh_support() {
  if (!parts_.empty()) {
    support_ = {kInf, -kInf};
    for (const auto& p : parts_) {
      Interval s = p->support();
      support_.lo = std::min(support_.lo, s.lo);
      support_.hi = std::max(support_.hi, s.hi);
    }
    return;
  }
  support_.lo = std::max(base_support_.lo + shift_, window_.lo);
  support_.hi = std::min(base_support_.hi + shift_, window_.hi);
  if (support_.lo > support_.hi) support_ = {0.0, 0.0};  // empty -> degenerate point
}

double Potential::operator()(double x) const {
  if (!parts_.empty()) {
    double s = 0.0;
    for (const auto& p : parts_) s += (*p)(x);
    return s;
  }
  if (x < window_.lo || x > window_.hi) return 0.0;
  if (open_lo_ && x == window_.lo) return 0.0;
  return eval_(x - shift_);
}

Potential Potential::truncate_left(double b) const {
  Potential r = *this;
  if (!parts_.empty()) {
    r.parts_.clear();
    for (const auto& p : parts_) r.parts_.push_back(std::make_shared<Potential>(p->truncate_left(b)));
    r.refresh_support();
    return r;
  }
  if (b > r.window_.lo) {
    r.window_.lo = b;
    r.open_lo_ = true;
  }
  r.refresh_support();
  return r;
}

Potential Potential::restrict(Interval w) const {
  Potential r = *this;
  if (!parts_.empty()) {
    r.parts_.clear();
    for (const auto& p : parts_) r.parts_.push_back(std::make_shared<Potential>(p->restrict(w)));
    r.refresh_support();
    return r;
  }
  if (w.lo > r.window_.lo) {
    r.window_.lo = w.lo;
    r.open_lo_ = false;
  }
  r.window_.hi = std::min(r.window_.hi, w.hi);
  r.refresh_support();
  return r;
}

Potential Potential::restrict_open_lo(Interval w) const {
  Potential r = *this;
  if (!parts_.empty()) {
    r.parts_.clear();
    for (const auto& p : parts_)
      r.parts_.push_back(std::make_shared<Potential>(p->restrict_open_lo(w)));
    r.refresh_support();
    return r;
  }
  if (w.lo >= r.window_.lo) {
    r.window_.lo = w.lo;
    r.open_lo_ = true;
  }
  r.window_.hi = std::min(r.window_.hi, w.hi);
  r.refresh_support();
  return r;
}

Potential Potential::shift(double x0) const {
  Potential r = *this;
  if (!parts_.empty()) {
    r.parts_.clear();
    for (const auto& p : parts_) r.parts_.push_back(std::make_shared<Potential>(p->shift(x0)));
    r.refresh_support();
    return r;
  }
  r.shift_ += x0;
  if (r.window_.lo > -kInf) r.window_.lo += x0;
  if (r.window_.hi < kInf) r.window_.hi += x0;
  r.refresh_support();
  return r;
}

Potential Potential::mirror() const {
  Potential r;
  auto inner = std::make_shared<const Potential>(*this);
  r.parts_.clear();
  r.eval_ = [inner](double x) { return (*inner)(-x); };
  r.base_support_.lo = support_.hi >= kInf ? -kInf : -support_.hi;
  r.base_support_.hi = support_.lo <= -kInf ? kInf : -support_.lo;
  r.base_breaks_.clear();
  for (double b : breakpoints()) r.base_breaks_.push_back(-b);
  std::sort(r.base_breaks_.begin(), r.base_breaks_.end());
  r.window_ = {-kInf, kInf};
  r.open_lo_ = false;
  r.shift_ = 0.0;
  r.left_integrable_ = true;  // every family decays on the right
  r.tag_ = is_zero() ? "zero" : "mirror";
  r.params_ = canonical();
  r.refresh_support();
  return r;
}

std::vector<double> Potential::breakpoints() const {
  std::vector<double> br;
  if (!parts_.empty()) {
    for (const auto& p : parts_) {
      auto pb = p->breakpoints();
      br.insert(br.end(), pb.begin(), pb.end());
    }
  } else {
    for (double b : base_breaks_) {
      double xb = b + shift_;
      if (xb > window_.lo && xb < window_.hi) br.push_back(xb);
    }
    if (window_.lo > -kInf && window_.lo > base_support_.lo + shift_) br.push_back(window_.lo);
    if (window_.hi < kInf && window_.hi < base_support_.hi + shift_) br.push_back(window_.hi);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           br.end());
  return br;
}

bool Potential::integrable_left() const {
  if (!parts_.empty()) {
    for (const auto& p : parts_)
      if (!p->integrable_left()) return false;
    return true;
  }
  return left_integrable_ || window_.lo > -kInf;
}

bool Potential::is_zero() const {
  if (!parts_.empty()) {
    for (const auto& p : parts_)
      if (!p->is_zero()) return false;
    return true;
  }
  return tag_ == "zero" || window_.lo > window_.hi;
}

std::string Potential::describe() const {
  if (!parts_.empty()) {
    std::string s = "sum(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + parts_[i]->describe();
    return s + ")";
  }
  return tag_;
}

std::string Potential::canonical() const {
  if (!parts_.empty()) {
    std::string s = "sum[";
    for (const auto& p : parts_) s += p->canonical() + "|";
    return s + "]";
  }
  std::ostringstream os;
  os << tag_ << "(" << params_ << ")";
  os << ";win=[" << fmt(window_.lo) << "," << fmt(window_.hi) << "]";
  os << ";open=" << (open_lo_ ? 1 : 0) << ";shift=" << fmt(shift_);
  return os.str();
}

Potential sum_of(std::vector<Potential> parts) {
  if (parts.empty()) return Potential();
  Potential r;
  r.parts_.clear();
  for (auto& p : parts) r.parts_.push_back(std::make_shared<Potential>(std::move(p)));
  r.tag_ = "sum";
  r.refresh_support();
  return r;
}

double local_negative_bound(const Potential& q, double scan_step) {
  Interval s = q.support();
  double lo = std::max(s.lo, -60.0), hi = std::min(s.hi, 60.0);
  if (!(hi > lo)) return 0.0;
  auto qneg = [&q](double x) { return std::max(-q(x), 0.0); };

  // Coarse cumulative scan to bracket the best unit window.
  double h = scan_step;
  long n = static_cast<long>(std::ceil((hi - lo + 2.0) / h));
  std::vector<double> cum(n + 1, 0.0);
  double x0 = lo - 1.0;
  double prev = qneg(x0);
  for (long i = 1; i <= n; ++i) {
    double cur = qneg(x0 + i * h);
    cum[i] = cum[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  long steps_per_unit = static_cast<long>(std::round(1.0 / h));
  double best = 0.0, ybest = x0;
  for (long i = 0; i + steps_per_unit <= n; ++i) {
    double v = cum[i + steps_per_unit] - cum[i];
    if (v > best) {
      best = v;
      ybest = x0 + i * h;
    }
  }
  if (best == 0.0) return 0.0;

  // Refine around the bracket with adaptive integrals and ternary search.
  auto window = [&](double y) {
    return integrate_adaptive([&](double x) { return qneg(x); }, y, y + 1.0, 1e-12, 1e-15);
  };
  double a = ybest - 2.0 * h, b = ybest + 2.0 * h;
  for (int it = 0; it < 80; ++it) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (window(m1) < window(m2))
      a = m1;
    else
      b = m2;
    if (b - a < 1e-11) break;
  }
  return std::max(best, window(0.5 * (a + b)));
}

double weighted_right_tail(const Potential& q, double a, double N) {
  Interval s = q.support();
  if (a >= s.hi) return 0.0;
  double hi = s.hi;
  auto f = [&](double x) { return std::pow(1.0 + std::abs(x), N) * std::abs(q(x)); };
  if (hi < kInf) return integrate_adaptive(f, a, hi, 1e-10, 1e-14);
  return integrate_adaptive(f, a, kInf, 1e-10, 1e-14);
}

AdmissibilityReport check_admissibility(const Potential& q, double N, double a) {
  AdmissibilityReport rep;
  rep.N = N;
  rep.a = a;
  rep.left_ok = q.integrable_left();
  rep.local_negative = local_negative_bound(q);
  try {
    rep.right_tail = weighted_right_tail(q, a, N);
    rep.admissible = std::isfinite(rep.right_tail) && std::isfinite(rep.local_negative);
  } catch (const NumericalError&) {
    rep.right_tail = kInf;
    rep.admissible = false;
  }
  return rep;
}

}  // namespace kdv
