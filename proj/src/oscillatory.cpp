#include "kdvdet/oscillatory.hpp"

#include <cmath>

#include "kdvdet/quadrature.hpp"

namespace kdv {

namespace {
constexpr int kNGauss = 34;
constexpr double kOmegaSwitch = 28.0;  // GL-34 is past machine accuracy here

// Residual phase after linearizing c3*k^3 about kc: c3*(3*kc*u^2 + u^3).
inline double resid_phase(double c3, double kc, double u) {
  return c3 * (3.0 * kc * u * u + u * u * u);
}

// Worst-case residual over a panel of width d starting at k0.
inline double resid_bound(double c3, double k0, double d) {
  double kc = k0 + 0.5 * d, h = 0.5 * d;
  return std::abs(c3) * (3.0 * std::abs(kc) * h * h + h * h * h);
}
}  // namespace

OscillatorEngine::OscillatorEngine(std::vector<AmpFn> channels, double c3, double c1, double a,
                                   double b, OscOptions opt)
    : n_ch_(static_cast<int>(channels.size())),
      n_cheb_(opt.n_cheb),
      c3_(c3),
      c1_(c1),
      a_(a),
      b_(b) {
  if (n_ch_ == 0) throw NumericalError("oscillator: no amplitude channels");
  if (!(b > a)) throw NumericalError("oscillator: empty integration range");

  const QuadRule& gl = gauss_legendre(kNGauss);
  gl_nodes_ = gl.nodes;
  gl_weights_ = gl.weights;

  const int M = n_cheb_ - 1;
  cheb_nodes_.resize(n_cheb_);
  for (int j = 0; j <= M; ++j) cheb_nodes_[j] = std::cos(kPi * j / M);
  // DCT-I style map from Lobatto values to coefficients b_n with the
  // endpoint-halving absorbed, so f(xi) = sum_n b_n T_n(xi) plainly.
  dct_.assign(n_cheb_ * n_cheb_, 0.0);
  for (int n = 0; n <= M; ++n) {
    double cn = (n == 0 || n == M) ? 1.0 : 2.0;
    for (int j = 0; j <= M; ++j) {
      double pj = (j == 0 || j == M) ? 0.5 : 1.0;
      dct_[n * n_cheb_ + j] = (cn / M) * pj * std::cos(kPi * n * j / M);
    }
  }

  double k0 = a;
  while (k0 < b - 1e-14 * (b - a)) {
    double cap = std::min(opt.panel_max, b - k0);
    if (opt.local_cap) cap = std::min(cap, std::max(1e-8, opt.local_cap(k0)));
    double d = cap;
    if (resid_bound(c3_, k0, d) > opt.rad_budget) {
      double lo = 0.0, hi = d;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (resid_bound(c3_, k0, mid) > opt.rad_budget ? hi : lo) = mid;
      }
      d = lo;
      if (d <= 0.0) throw NumericalError("oscillator: panel width underflow");
    }
    add_panel(k0, k0 + d, channels, opt, 0);
    k0 += d;
    if (static_cast<long>(panels_.size()) > opt.max_panels)
      throw NumericalError("oscillator: panel limit exceeded");
  }

  amp_at_a_ = std::abs(channels[0](a));
  amp_at_b_ = std::abs(channels[0](b));
}

void OscillatorEngine::add_panel(double k0, double k1, const std::vector<AmpFn>& channels,
                                 const OscOptions& opt, int depth) {
  double tail = build_panel(k0, k1, channels);
  if (tail <= opt.cheb_tail_tol || depth >= opt.max_split_depth) return;
  panels_.pop_back();
  double mid = 0.5 * (k0 + k1);
  add_panel(k0, mid, channels, opt, depth + 1);
  add_panel(mid, k1, channels, opt, depth + 1);
}

double OscillatorEngine::build_panel(double k0, double k1, const std::vector<AmpFn>& channels) {
  Panel p;
  p.half = 0.5 * (k1 - k0);
  p.kc = 0.5 * (k0 + k1);
  p.theta_c = c3_ * p.kc * p.kc * p.kc + c1_ * p.kc;
  p.slope0 = 3.0 * c3_ * p.kc * p.kc + c1_;
  p.cheb.assign(n_ch_ * n_cheb_, Complex(0, 0));
  p.glw.assign(n_ch_ * kNGauss, Complex(0, 0));

  double tail = 0.0;
  std::vector<Complex> vals(n_cheb_);
  for (int ch = 0; ch < n_ch_; ++ch) {
    for (int j = 0; j < n_cheb_; ++j) {
      double u = p.half * cheb_nodes_[j];
      double r = resid_phase(c3_, p.kc, u);
      vals[j] = channels[ch](p.kc + u) * Complex(std::cos(r), std::sin(r));
    }
    double cmax = 0.0;
    for (int n = 0; n < n_cheb_; ++n) {
      Complex acc(0, 0);
      for (int j = 0; j < n_cheb_; ++j) acc += dct_[n * n_cheb_ + j] * vals[j];
      p.cheb[ch * n_cheb_ + n] = acc;
      cmax = std::max(cmax, std::abs(acc));
    }
    if (cmax > 0.0)
      tail = std::max(tail, (std::abs(p.cheb[ch * n_cheb_ + n_cheb_ - 1]) +
                             std::abs(p.cheb[ch * n_cheb_ + n_cheb_ - 2])) /
                                cmax);
    for (int j = 0; j < kNGauss; ++j) {
      double u = p.half * gl_nodes_[j];
      double r = resid_phase(c3_, p.kc, u);
      p.glw[ch * kNGauss + j] =
          gl_weights_[j] * channels[ch](p.kc + u) * Complex(std::cos(r), std::sin(r));
    }
  }
  panels_.push_back(std::move(p));
  return tail;
}

void OscillatorEngine::eval(double s, Complex* out) const {
  for (int ch = 0; ch < n_ch_; ++ch) out[ch] = Complex(0, 0);
  std::vector<Complex> mom(n_cheb_);
  std::vector<Complex> ex(kNGauss);

  for (const Panel& p : panels_) {
    const double omega = (p.slope0 + s) * p.half;
    const double ph = p.theta_c + s * p.kc;
    const Complex pref = p.half * Complex(std::cos(ph), std::sin(ph));

    if (std::abs(omega) <= kOmegaSwitch) {
      for (int j = 0; j < kNGauss; ++j) {
        double t = omega * gl_nodes_[j];
        ex[j] = Complex(std::cos(t), std::sin(t));
      }
      for (int ch = 0; ch < n_ch_; ++ch) {
        Complex acc(0, 0);
        const Complex* g = &p.glw[ch * kNGauss];
        for (int j = 0; j < kNGauss; ++j) acc += g[j] * ex[j];
        out[ch] += pref * acc;
      }
    } else {
      // Chebyshev moments I_n = int_-1^1 T_n e^{i omega xi} d xi by the
      // forward recurrence (stable for degree < |omega|).
      const Complex eio = Complex(std::cos(omega), std::sin(omega));
      const Complex emio = std::conj(eio);
      const Complex iw = Complex(0, omega);
      const double so = std::sin(omega), co = std::cos(omega);
      mom[0] = 2.0 * so / omega;
      if (n_cheb_ > 1) mom[1] = Complex(0, 2.0 / omega) * (so / omega - co);
      if (n_cheb_ > 2) mom[2] = ((eio - emio) - 4.0 * mom[1]) / iw;  // B_2 = 2i sin
      for (int n = 2; n + 1 < n_cheb_; ++n) {
        Complex Bnp = eio - (n % 2 == 0 ? -1.0 : 1.0) * emio;  // B_{n+1}
        Complex Bnm = eio - (n % 2 == 0 ? -1.0 : 1.0) * emio;  // B_{n-1}, same parity
        mom[n + 1] =
            (double(n + 1) / iw) * (Bnp / double(n + 1) - Bnm / double(n - 1) +
                                    iw * mom[n - 1] / double(n - 1) - 2.0 * mom[n]);
      }
      for (int ch = 0; ch < n_ch_; ++ch) {
        Complex acc(0, 0);
        const Complex* c = &p.cheb[ch * n_cheb_];
        for (int n = 0; n < n_cheb_; ++n) acc += c[n] * mom[n];
        out[ch] += pref * acc;
      }
    }
  }
}

std::vector<std::vector<Complex>> OscillatorEngine::eval_many(const std::vector<double>& s) const {
  std::vector<std::vector<Complex>> res(n_ch_, std::vector<Complex>(s.size()));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(s.size()); ++j) {
    std::vector<Complex> out(n_ch_);
    eval(s[j], out.data());
    for (int ch = 0; ch < n_ch_; ++ch) res[ch][j] = out[ch];
  }
  return res;
}

double OscillatorEngine::boundary_estimate(double s) const {
  double da = std::abs(3.0 * c3_ * a_ * a_ + c1_ + s);
  double db = std::abs(3.0 * c3_ * b_ * b_ + c1_ + s);
  double e = 0.0;
  e += amp_at_a_ / std::max(da, 1e-6);
  e += amp_at_b_ / std::max(db, 1e-6);
  return e;
}

}  // namespace kdv
