#include "kdvdet/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "kdvdet/oscillatory.hpp"
#include "kdvdet/quadrature.hpp"

namespace kdv {

namespace {

Complex pow_int(Complex b, int e) {
  Complex r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Derivative multiplier for order (m, n) at spectral point k.
Complex order_mult(Complex k, const KernelOrder& o) {
  return pow_int(2.0 * kI * k, o.m) * pow_int(8.0 * kI * k * k * k, o.n);
}

double order_mult_mag(double ak, const KernelOrder& o) {
  return std::pow(2.0 * ak, o.m) * std::pow(8.0 * ak * ak * ak, o.n);
}

std::vector<double> cheb_lobatto_nodes(double lo, double hi, int n) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j)
    x[j] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(kPi * j / (n - 1));
  x.front() = lo;
  x.back() = hi;
  return x;
}

// Barycentric interpolation on Chebyshev-Lobatto nodes.
Complex barycentric(const std::vector<double>& nodes, const std::vector<Complex>& vals,
                    double x) {
  const int n = static_cast<int>(nodes.size());
  Complex num = 0.0;
  double den = 0.0;
  double sign = 1.0;
  for (int j = 0; j < n; ++j) {
    double d = x - nodes[j];
    if (std::abs(d) < 1e-14 * std::max(1.0, std::abs(x))) return vals[j];
    double w = sign * ((j == 0 || j == n - 1) ? 0.5 : 1.0) / d;
    num += w * vals[j];
    den += w;
    sign = -sign;
  }
  return num / den;
}

}  // namespace

ReflectionChannel::ReflectionChannel(const CoefficientGrid& grid) {
  for (std::size_t i = 0; i < grid.k.size(); ++i)
    if (grid.k[i] > 0.0) {
      knots_.push_back(grid.k[i]);
      vals_.push_back(grid.R[i]);
    }
  build();
}

ReflectionChannel::ReflectionChannel(std::vector<double> k_pos, std::vector<Complex> r_pos)
    : knots_(std::move(k_pos)), vals_(std::move(r_pos)) {
  build();
}

void ReflectionChannel::build() {
  if (knots_.size() < 4) throw NumericalError("reflection channel: need at least 4 samples");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (knots_[i] <= 0.0) throw NumericalError("reflection channel: samples must have k > 0");
    if (i && knots_[i] <= knots_[i - 1])
      throw NumericalError("reflection channel: samples must ascend");
  }
  // Quadratic extrapolation to k = 0; R(0) is real by conjugate symmetry.
  Complex r0c = 0.0;
  for (int j = 0; j < 3; ++j) {
    double l = 1.0;
    for (int r = 0; r < 3; ++r)
      if (r != j) l *= (0.0 - knots_[r]) / (knots_[j] - knots_[r]);
    r0c += l * vals_[j];
  }
  r0_ = std::min(1.0, std::max(-1.0, r0c.real()));
  knots_.insert(knots_.begin(), 0.0);
  vals_.insert(vals_.begin(), Complex(r0_, 0.0));
  spl_ = ComplexSpline(knots_, vals_);
}

Complex ReflectionChannel::operator()(double k) const {
  double ak = std::abs(k);
  if (ak > knots_.back()) return 0.0;
  Complex v = spl_(ak);
  return k < 0.0 ? std::conj(v) : v;
}

ContourData build_contour(const Potential& q, const std::vector<BoundState>& states,
                          double t_min, double tol, int n_samples,
                          const ScatteringOptions& opt) {
  if (!(t_min > 0.0)) throw NumericalError("build_contour: need t_min > 0");
  if (!(tol > 0.0)) throw NumericalError("build_contour: need tol > 0");
  ContourData c;
  c.h = 1.0;
  for (const BoundState& b : states) c.h = std::max(c.h, b.kappa + 1.0);
  // Gaussian damping exp(-24 t h u^2) sets the reach; allow |G| up to ~1e2.
  double need = std::log(1e2 / tol);
  c.u_max = std::sqrt(need / (24.0 * t_min * c.h)) + 1.0;
  c.u_max = std::min(c.u_max, 60.0);
  int n = n_samples > 0 ? n_samples : static_cast<int>(std::ceil(c.u_max / 0.02)) * 2 + 1;
  if (n < 33) n = 33;
  c.us.resize(n);
  for (int j = 0; j < n; ++j) c.us[j] = -c.u_max + 2.0 * c.u_max * j / (n - 1);
  c.gs = contour_G(q, c.h, c.us, opt);
  c.spline = ComplexSpline(c.us, c.gs);
  for (int j = 0; j < n / 2; ++j)
    c.symmetry_defect =
        std::max(c.symmetry_defect, std::abs(c.gs[j] - std::conj(c.gs[n - 1 - j])));
  return c;
}

HankelSymbol assemble_symbol(const ScatteringData& data, double x, double t) {
  HankelSymbol s;
  // The data describes the profile shifted by applied_shift (when the
  // wronskian-floor retry fired); translate the evaluation point to match.
  s.x = x + data.applied_shift;
  s.t = t;
  s.poles = data.states;
  s.reflection = ReflectionChannel(data.grid);
  return s;
}

HankelSymbol phi_symbol(std::shared_ptr<const ContourData> contour, double x, double t) {
  HankelSymbol s;
  s.x = x;
  s.t = t;
  s.contour = std::move(contour);
  return s;
}

KernelProfile kernel_profile(const HankelSymbol& sym, const std::vector<KernelOrder>& orders,
                             const std::vector<double>& s, const DiscretizationParams& par) {
  const int n_ord = static_cast<int>(orders.size());
  const int n_s = static_cast<int>(s.size());
  KernelProfile out;
  out.orders = orders;
  out.values.assign(n_ord, std::vector<double>(n_s, 0.0));
  if (n_ord == 0 || n_s == 0) return out;
  const double x = sym.x, t = sym.t;

  // Discrete part.
  {
    std::vector<double> es(n_s);
    for (const BoundState& b : sym.poles) {
      double A = 8.0 * b.kappa * b.kappa * b.kappa * t - 2.0 * b.kappa * x;
      if (A > 690.0) throw NumericalError("kernel: pole amplitude overflows; x too far left");
      double base = b.c * std::exp(A);
      for (int j = 0; j < n_s; ++j) es[j] = std::exp(-b.kappa * s[j]);
      for (int o = 0; o < n_ord; ++o) {
        double mult = std::pow(-2.0 * b.kappa, orders[o].m) *
                      std::pow(8.0 * b.kappa * b.kappa * b.kappa, orders[o].n);
        for (int j = 0; j < n_s; ++j) out.values[o][j] += base * mult * es[j];
      }
    }
  }

  double s_lo = *std::min_element(s.begin(), s.end());
  double s_hi = *std::max_element(s.begin(), s.end());

  // Reflection integral over [0, k_hi_eff], conjugate-even in k: the full
  // line contributes (1/pi) Re of the half-line integral.
  if (!sym.reflection.empty()) {
    const ReflectionChannel& rc = sym.reflection;
    const std::vector<double>& kk = rc.knots();
    const std::vector<Complex>& rv = rc.values();
    // Samples below r_floor are ODE-solver noise; without the floor the
    // derivative multipliers drag the cutoff out to k_max on reflectionless
    // data and the panels then resolve pure noise.
    int cut = -1;
    for (int i = static_cast<int>(kk.size()) - 1; i >= 1; --i) {
      if (std::abs(rv[i]) <= par.r_floor) continue;
      double w = 0.0;
      for (const KernelOrder& o : orders) w = std::max(w, order_mult_mag(kk[i], o));
      if (std::abs(rv[i]) * w >= par.tail_cut) {
        cut = i;
        break;
      }
    }
    if (cut >= 0) {
      out.k_hi_eff = kk[std::min<std::size_t>(cut + 1, kk.size() - 1)];
      {
        double w = 0.0;
        for (const KernelOrder& o : orders) w = std::max(w, order_mult_mag(out.k_hi_eff, o));
        out.tail_estimate = std::abs(rc(out.k_hi_eff)) * w;
      }
      double gap_hi = kk[1];

      // Gap stub: fixed Gauss rule, direct for every s.
      {
        auto [gn, gw] = gauss_legendre_on(0.0, gap_hi, par.gap_nodes);
        std::vector<Complex> base(gn.size());
        std::vector<std::vector<Complex>> coef(n_ord, std::vector<Complex>(gn.size()));
        for (std::size_t g = 0; g < gn.size(); ++g) {
          double k = gn[g];
          base[g] = std::exp(kI * (8.0 * k * k * k * t + 2.0 * k * x));
          Complex rk = rc(k);
          for (int o = 0; o < n_ord; ++o)
            coef[o][g] = gw[g] * rk * order_mult(Complex(k, 0.0), orders[o]);
        }
        for (int j = 0; j < n_s; ++j)
          for (std::size_t g = 0; g < gn.size(); ++g) {
            Complex ph = base[g] * std::exp(kI * (gn[g] * s[j]));
            for (int o = 0; o < n_ord; ++o)
              out.values[o][j] += (coef[o][g] * ph).real() / kPi;
          }
      }

      if (out.k_hi_eff > gap_hi) {
        std::vector<AmpFn> amps;
        for (const KernelOrder& o : orders)
          amps.push_back([&rc, o](double k) { return rc(k) * order_mult(Complex(k, 0.0), o); });
        OscOptions oo;
        oo.rad_budget = par.rad_budget;
        oo.n_cheb = par.n_cheb;
        OscillatorEngine eng(amps, 8.0 * t, 2.0 * x, gap_hi, out.k_hi_eff, oo);

        // One integration-by-parts term for the tail cut off at k_hi_eff.
        // Slowly decaying reflections (discontinuous q) otherwise leave an
        // e^{i k_hi (2x+s)} ripple whose size is set by the derivative
        // multipliers rather than by tail_cut. Folding it in before the
        // s-interpolation matters: the corrected value is entire in s while
        // the bare cut integral oscillates right at the interpolant's
        // resolution limit.
        double K = out.k_hi_eff;
        Complex rk = rc(K);
        bool correct_tail = 24.0 * t * K * K + 2.0 * x + s_lo >= 8.0;
        auto tail_term = [&](const KernelOrder& o, double sv) {
          double thp = 24.0 * t * K * K + 2.0 * x + sv;
          Complex ph = std::exp(kI * (8.0 * t * K * K * K + (2.0 * x + sv) * K));
          return kI * rk * order_mult(Complex(K, 0.0), o) * ph / thp;
        };

        int n_cheb_s =
            static_cast<int>(std::ceil(1.15 * (s_hi - s_lo) * out.k_hi_eff / kPi)) + 24;
        bool interp = !par.force_direct_s && n_s > par.s_interp_factor * n_cheb_s;
        if (interp) {
          std::vector<double> sn = cheb_lobatto_nodes(s_lo, s_hi, n_cheb_s);
          std::vector<std::vector<Complex>> iv = eng.eval_many(sn);
          for (int o = 0; o < n_ord; ++o) {
            if (correct_tail)
              for (std::size_t j = 0; j < sn.size(); ++j) iv[o][j] += tail_term(orders[o], sn[j]);
            for (int j = 0; j < n_s; ++j)
              out.values[o][j] += barycentric(sn, iv[o], s[j]).real() / kPi;
          }
        } else {
          std::vector<std::vector<Complex>> iv = eng.eval_many(s);
          for (int o = 0; o < n_ord; ++o) {
            if (correct_tail)
              for (int j = 0; j < n_s; ++j) iv[o][j] += tail_term(orders[o], s[j]);
            for (int j = 0; j < n_s; ++j) out.values[o][j] += iv[o][j].real() / kPi;
          }
        }
      }
    }
  }

  // Analytic part on the shifted contour.
  if (sym.contour) {
    const ContourData& c = *sym.contour;
    double damp_a = 24.0 * t * c.h;
    double pref_exp = 8.0 * t * c.h * c.h * c.h - 2.0 * x * c.h;
    if (pref_exp > 690.0)
      throw NumericalError("kernel: contour prefactor overflows; x too far left");
    double u_eff = 0.0;
    for (std::size_t i = 0; i < c.us.size(); ++i) {
      double au = std::abs(c.us[i]);
      double km = std::hypot(au, c.h);
      double w = 0.0;
      for (const KernelOrder& o : orders) w = std::max(w, order_mult_mag(km, o));
      if (std::abs(c.gs[i]) * std::exp(-damp_a * au * au) * w * std::exp(pref_exp - s_lo * c.h) >=
          par.tail_cut)
        u_eff = std::max(u_eff, au);
    }
    out.u_eff = std::min(u_eff + 0.5, c.u_max);
    if (out.u_eff > 0.0) {
      std::vector<AmpFn> amps;
      for (const KernelOrder& o : orders)
        amps.push_back([&c, damp_a, o](double u) {
          return c.spline(u) * std::exp(-damp_a * u * u) * order_mult(Complex(u, c.h), o);
        });
      OscOptions oo;
      oo.rad_budget = par.rad_budget;
      oo.n_cheb = par.n_cheb;
      OscillatorEngine eng(amps, 8.0 * t, 2.0 * x - damp_a * c.h, -out.u_eff, out.u_eff, oo);

      int n_cheb_s = static_cast<int>(std::ceil(1.15 * (s_hi - s_lo) * out.u_eff / kPi)) + 24;
      bool interp = !par.force_direct_s && n_s > par.s_interp_factor * n_cheb_s;
      auto add = [&](const std::vector<double>& sv, int j_out, int o,
                     const Complex& integral) {
        Complex v = std::exp(pref_exp - sv[j_out] * c.h) * integral / (2.0 * kPi);
        out.values[o][j_out] += v.real();
        out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
      };
      if (interp) {
        std::vector<double> sn = cheb_lobatto_nodes(s_lo, s_hi, n_cheb_s);
        std::vector<std::vector<Complex>> iv = eng.eval_many(sn);
        for (int o = 0; o < n_ord; ++o)
          for (int j = 0; j < n_s; ++j) add(s, j, o, barycentric(sn, iv[o], s[j]));
      } else {
        std::vector<std::vector<Complex>> iv = eng.eval_many(s);
        for (int o = 0; o < n_ord; ++o)
          for (int j = 0; j < n_s; ++j) add(s, j, o, iv[o][j]);
      }
    }
  }
  return out;
}

double auto_s_window(const HankelSymbol& sym) {
  double L = 34.0;
  for (const BoundState& b : sym.poles) {
    // Windowing the pole term c e^{theta - kappa(s+s')} at L loses a rank-one
    // piece of eigenvalue (c/2kappa) e^{theta} e^{-2 kappa L}. What it does to
    // u is that times the curvature factor 4 kappa^2 (two x-derivatives of
    // e^{-2 kappa x}); budgeting the u-error at 1e-9 instead of the raw
    // eigenvalue keeps weak near-threshold states -- which cutting an
    // oscillatory tail always produces, with kappa -> 0 and c = O(kappa^2) --
    // from demanding unbounded windows for contributions they cannot make.
    double theta = 8.0 * b.kappa * b.kappa * b.kappa * sym.t - 2.0 * b.kappa * sym.x;
    double impact = theta + std::log(std::max(2.0 * b.kappa * b.c, 1e-300));
    if (impact <= -17.3) continue;  // total effect on u is already below budget
    L = std::max(L, (impact + 17.3) / (2.0 * b.kappa));
  }
  // Threshold states have c = O(kappa), so the demanded window grows like
  // |log kappa| / kappa without bound; but past the clamp the residual
  // 2 kappa c e^{theta - 2 kappa L} stays below ~1e-6 for any kappa, so
  // clamping is sound where refusing would not be.
  return std::min(L, 2000.0);
}

HankelDiscretization nystrom_matrix(const HankelSymbol& sym,
                                    const std::vector<KernelOrder>& orders,
                                    const DiscretizationParams& par) {
  HankelDiscretization d;
  d.orders = orders;
  double L = par.L_s > 0.0 ? par.L_s : auto_s_window(sym);
  d.L_s = L;
  std::vector<double> sn, sw;
  if (L <= 120.0) {
    auto [qn, qw] = gauss_legendre_on(0.0, L, par.n_quad);
    sn = std::move(qn);
    sw = std::move(qw);
  } else {
    // Windows this long only happen when a weak near-threshold pole forces a
    // slow e^{-kappa s} tail. The oscillatory kernel mass lives at small s;
    // give it a full-density head panel and cover the smooth tail coarsely.
    auto [hn, hw] = gauss_legendre_on(0.0, 60.0, par.n_quad);
    auto [tn, tw] = gauss_legendre_on(60.0, L, (2 * par.n_quad) / 3);
    sn = std::move(hn);
    sw = std::move(hw);
    sn.insert(sn.end(), tn.begin(), tn.end());
    sw.insert(sw.end(), tw.begin(), tw.end());
  }
  const int n = static_cast<int>(sn.size());
  d.s = sn;
  d.w = sw;

  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) sums.push_back(sn[i] + sn[j]);

  KernelProfile kp = kernel_profile(sym, orders, sums, par);
  d.k_hi_eff = kp.k_hi_eff;
  d.max_imag = kp.max_imag;

  for (std::size_t o = 0; o < orders.size(); ++o) {
    Eigen::MatrixXd m(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double v = std::sqrt(sw[i] * sw[j]) * kp.values[o][idx++];
        m(i, j) = v;
        m(j, i) = v;
      }
    d.mats.push_back(std::move(m));
  }

  DiscretizationParams tp = par;
  tp.force_direct_s = true;
  KernelProfile tail = kernel_profile(sym, {{0, 0}}, {2.0 * L}, tp);
  d.tail_value = std::abs(tail.values[0][0]);
  return d;
}

SplitCheckResult symbol_split_check(const ScatteringData& sd, const ScatteringData& sd_plus,
                                    std::shared_ptr<const ContourData> contour, double x,
                                    double t, const DiscretizationParams& par) {
  if (!(t > 0.0 || x > 0.0))
    throw NumericalError("symbol_split_check: need t > 0 or x > 0 for the analytic part");
  HankelSymbol full = assemble_symbol(sd, x, t);
  HankelSymbol plus = assemble_symbol(sd_plus, x, t);
  HankelSymbol phi = phi_symbol(std::move(contour), x, t);

  SplitCheckResult r;
  DiscretizationParams pl = par;
  pl.L_s = par.L_s > 0.0 ? par.L_s : auto_s_window(full);
  r.L_s = pl.L_s;
  std::vector<KernelOrder> ord{{0, 0}};
  HankelDiscretization df = nystrom_matrix(full, ord, pl);
  HankelDiscretization dp = nystrom_matrix(plus, ord, pl);
  HankelDiscretization dg = nystrom_matrix(phi, ord, pl);
  Eigen::MatrixXd diff = df.mats[0] - dp.mats[0] - dg.mats[0];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("symbol_split_check: eigensolver failed");
  r.op_defect = es.eigenvalues().cwiseAbs().maxCoeff();

  r.s = df.s;
  r.f_full = kernel_profile(full, ord, r.s, pl).values[0];
  r.f_plus = kernel_profile(plus, ord, r.s, pl).values[0];
  r.f_phi = kernel_profile(phi, ord, r.s, pl).values[0];
  for (std::size_t j = 0; j < r.s.size(); ++j)
    r.max_kernel_diff =
        std::max(r.max_kernel_diff, std::abs(r.f_full[j] - r.f_plus[j] - r.f_phi[j]));
  return r;
}

SingularValueReport singular_value_report(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw NumericalError("singular_value_report: square input only");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalError("singular_value_report: eigensolver failed");
  SingularValueReport rep;
  rep.lambda.assign(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(rep.lambda.begin(), rep.lambda.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  double acc = 0.0;
  rep.partial_logdet.reserve(rep.lambda.size());
  for (double l : rep.lambda) {
    if (l <= -1.0)
      throw NumericalError("singular_value_report: eigenvalue at or below -1");
    acc += std::log1p(l);
    rep.partial_logdet.push_back(acc);
    rep.trace_norm += std::abs(l);
  }
  rep.logdet = acc;
  // Geometric tail: median successive ratio across the cleanly decaying band.
  std::vector<double> ratios;
  double top = rep.lambda.empty() ? 0.0 : std::abs(rep.lambda.front());
  for (std::size_t i = 0; i + 1 < rep.lambda.size(); ++i) {
    double a = std::abs(rep.lambda[i]), b = std::abs(rep.lambda[i + 1]);
    if (a < 1e-2 * top && a > 1e-13 * top && b > 0.0) ratios.push_back(b / a);
  }
  if (ratios.size() >= 3) {
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    rep.tail_ratio = ratios[ratios.size() / 2];
  }
  return rep;
}

Complex phi_analytic(const ContourData& c, double x, double t, Complex k) {
  if (!(k.imag() < c.h - 1e-9)) throw NumericalError("phi_analytic: need Im k < h");
  double damp_a = 24.0 * t * c.h;
  double pref_exp = 8.0 * t * c.h * c.h * c.h - 2.0 * x * c.h;
  double c1 = 2.0 * x - damp_a * c.h;
  auto f = [&](double u) {
    Complex num = c.spline(u) * std::exp(-damp_a * u * u) *
                  std::exp(kI * (8.0 * t * u * u * u + c1 * u));
    return num / (Complex(u, c.h) - k);
  };
  double re = integrate_adaptive([&](double u) { return f(u).real(); }, -c.u_max, c.u_max,
                                 1e-12, 1e-15);
  double im = integrate_adaptive([&](double u) { return f(u).imag(); }, -c.u_max, c.u_max,
                                 1e-12, 1e-15);
  return -std::exp(pref_exp) * Complex(re, im) / (2.0 * kPi * kI);
}

void write_matrix_bin(const std::string& path, const Eigen::MatrixXd& m) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw NumericalError("write_matrix_bin: cannot open " + path);
  std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                           static_cast<std::uint64_t>(m.cols())};
  bool ok = std::fwrite(dims, sizeof(dims), 1, f) == 1;
  for (Eigen::Index i = 0; ok && i < m.rows(); ++i)
    for (Eigen::Index j = 0; ok && j < m.cols(); ++j) {
      double v = m(i, j);
      ok = std::fwrite(&v, sizeof(v), 1, f) == 1;
    }
  ok = std::fclose(f) == 0 && ok;
  if (!ok) throw NumericalError("write_matrix_bin: short write to " + path);
}

Eigen::MatrixXd read_matrix_bin(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw NumericalError("read_matrix_bin: cannot open " + path);
  std::uint64_t dims[2];
  if (std::fread(dims, sizeof(dims), 1, f) != 1) {
    std::fclose(f);
    throw NumericalError("read_matrix_bin: truncated header in " + path);
  }
  if (dims[0] > (1u << 20) || dims[1] > (1u << 20)) {
    std::fclose(f);
    throw NumericalError("read_matrix_bin: implausible dimensions in " + path);
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v;
      if (std::fread(&v, sizeof(v), 1, f) != 1) {
        std::fclose(f);
        throw NumericalError("read_matrix_bin: truncated data in " + path);
      }
      m(i, j) = v;
    }
  std::fclose(f);
  return m;
}

}  // namespace kdv
