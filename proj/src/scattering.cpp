#include "kdvdet/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "kdvdet/ode.hpp"
#include "kdvdet/oracles.hpp"
#include "kdvdet/oscillatory.hpp"
#include "kdvdet/quadrature.hpp"
#include "kdvdet/spline.hpp"

namespace kdv {

namespace {

// Distinct type so the retry logic can recognize a Wronskian collapse.
struct WronskianFloor : NumericalError {
  using NumericalError::NumericalError;
};

double weighted_left_tail(const Potential& q, double a, double N) {
  Interval s = q.support();
  if (a <= s.lo) return 0.0;
  auto f = [&](double x) { return std::pow(1.0 + std::abs(x), N) * std::abs(q(x)); };
  double lo = s.lo;
  if (lo > -kInf) return integrate_adaptive(f, lo, a, 1e-10, 1e-14);
  return integrate_adaptive(f, -kInf, a, 1e-10, 1e-14);
}

// Smallest x (searched by doubling + bisection) with the weighted right tail
// below tol. Capped to avoid absurd windows for very slowly decaying tails.
double right_tail_edge(const Potential& q, double tol) {
  Interval s = q.support();
  if (s.hi < kInf) return s.hi;
  double lo = std::max(1.0, s.lo), hi = lo;
  for (int it = 0;; ++it) {
    if (weighted_right_tail(q, hi, 1.0) < tol) break;
    hi *= 2.0;
    if (hi > 2e4 || it > 60)
      throw NumericalError("scattering window: right tail too fat for tail_tol; raise tail_tol");
  }
  for (int it = 0; it < 60 && hi - lo > 1e-3; ++it) {
    double mid = 0.5 * (lo + hi);
    (weighted_right_tail(q, mid, 1.0) < tol ? hi : lo) = mid;
  }
  return hi;
}

double left_tail_edge(const Potential& q, double tol) {
  Interval s = q.support();
  if (s.lo > -kInf) return s.lo;
  if (!q.integrable_left())
    throw NumericalError("scattering window: profile not integrable on the left; truncate first");
  double hi = std::min(-1.0, s.hi), lo = hi;
  for (int it = 0;; ++it) {
    if (weighted_left_tail(q, lo, 1.0) < tol) break;
    lo *= 2.0;
    if (lo < -2e4 || it > 60)
      throw NumericalError("scattering window: left tail too fat for tail_tol; raise tail_tol");
  }
  for (int it = 0; it < 60 && hi - lo > 1e-3; ++it) {
    double mid = 0.5 * (lo + hi);
    (weighted_left_tail(q, mid, 1.0) < tol ? lo : hi) = mid;
  }
  return lo;
}

OdeOptions<2> ode_options(const ScatteringOptions& opt) {
  OdeOptions<2> o;
  o.rel_tol = opt.ode_rel_tol;
  o.abs_tol = opt.ode_abs_tol;
  o.max_step = 2.0;
  return o;
}

// Integrate a 2-component system across [x0, x1] (either direction),
// splitting at profile breakpoints so the stepper never straddles a jump.
CVec<2> integrate_across(const std::function<void(double, const CVec<2>&, CVec<2>&)>& f,
                         const Potential& q, double x0, double x1, CVec<2> y,
                         const OdeOptions<2>& opt, const std::vector<double>* out_grid = nullptr,
                         const std::function<void(double, const CVec<2>&)>& on_point = nullptr) {
  std::vector<double> cuts;
  for (double b : q.breakpoints()) {
    if ((b - x0) * (b - x1) < 0.0) cuts.push_back(b);  // strictly inside
  }
  if (x1 < x0) std::sort(cuts.begin(), cuts.end(), std::greater<double>());
  cuts.push_back(x1);

  const bool fwd = x1 >= x0;
  std::size_t gi = 0;
  std::vector<double> seg_grid;
  double cur = x0;
  for (double nxt : cuts) {
    seg_grid.clear();
    if (out_grid) {
      while (gi < out_grid->size()) {
        double g = (*out_grid)[gi];
        bool inside = fwd ? (g <= nxt + 1e-14) : (g >= nxt - 1e-14);
        if (!inside) break;
        seg_grid.push_back(g);
        ++gi;
      }
    }
    y = integrate_ode<2>(f, cur, nxt, y, opt, seg_grid, on_point);
    cur = nxt;
  }
  return y;
}

}  // namespace

std::vector<double> sinh_k_grid(const KGridParams& p) {
  if (p.n_half < 2 || !(p.k_max > p.k_min) || !(p.k_min > 0))
    throw ConfigError("k grid: need n_half >= 2, 0 < k_min < k_max");
  double u0 = std::asinh(p.k_min), u1 = std::asinh(p.k_max);
  std::vector<double> k(p.n_half);
  for (int j = 0; j < p.n_half; ++j) {
    double u = u0 + (u1 - u0) * j / (p.n_half - 1);
    k[j] = std::sinh(u);
  }
  k.front() = p.k_min;
  k.back() = p.k_max;
  return k;
}

Interval scattering_window(const Potential& q, double tail_tol) {
  if (q.is_zero()) return {0.0, 0.0};
  return {left_tail_edge(q, tail_tol), right_tail_edge(q, tail_tol)};
}

JostValue jost_right_stripped(const Potential& q, Complex k, double x_eval, double x_start,
                              const ScatteringOptions& opt) {
  // y'' + 2ik y' = q y, y(x_start) = 1, y'(x_start) = 0, integrated leftward.
  if (x_eval > x_start) throw NumericalError("jost_right: eval point right of start");
  const Complex twoik = 2.0 * kI * k;
  auto f = [&](double x, const CVec<2>& y, CVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = q(x) * y[0] - twoik * y[1];
  };
  CVec<2> y = integrate_across(f, q, x_start, x_eval, {1.0, 0.0}, ode_options(opt));
  return {y[0], y[1]};
}

JostValue jost_left_stripped(const Potential& q, Complex k, double x_eval, double x_start,
                             const ScatteringOptions& opt) {
  // y'' - 2ik y' = q y, y(x_start) = 1, y'(x_start) = 0, integrated rightward.
  if (x_eval < x_start) throw NumericalError("jost_left: eval point left of start");
  const Complex twoik = 2.0 * kI * k;
  auto f = [&](double x, const CVec<2>& y, CVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = q(x) * y[0] + twoik * y[1];
  };
  CVec<2> y = integrate_across(f, q, x_start, x_eval, {1.0, 0.0}, ode_options(opt));
  return {y[0], y[1]};
}

std::vector<Complex> jost_right(const Potential& q, Complex k, const std::vector<double>& xs,
                                const ScatteringOptions& opt) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw NumericalError("jost_right: grid not ascending");
  Interval w = scattering_window(q, opt.tail_tol);
  double x_start = std::max(w.hi, xs.empty() ? w.hi : xs.back());
  std::vector<double> rev(xs.rbegin(), xs.rend());
  std::vector<Complex> out(xs.size());
  std::size_t idx = 0;
  const Complex twoik = 2.0 * kI * k;
  auto f = [&](double x, const CVec<2>& y, CVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = q(x) * y[0] - twoik * y[1];
  };
  auto emit = [&](double x, const CVec<2>& y) {
    // psi_+ = e^{ikx} y
    out[xs.size() - 1 - idx] = std::exp(kI * k * x) * y[0];
    ++idx;
  };
  double x_end = std::min(w.lo, xs.empty() ? w.lo : xs.front());
  integrate_across(f, q, x_start, x_end, {1.0, 0.0}, ode_options(opt), &rev, emit);
  return out;
}

std::vector<Complex> jost_left(const Potential& q, Complex k, const std::vector<double>& xs,
                               const ScatteringOptions& opt) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw NumericalError("jost_left: grid not ascending");
  Interval w = scattering_window(q, opt.tail_tol);
  double x_start = std::min(w.lo, xs.empty() ? w.lo : xs.front());
  std::vector<Complex> out(xs.size());
  std::size_t idx = 0;
  const Complex twoik = 2.0 * kI * k;
  auto f = [&](double x, const CVec<2>& y, CVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = q(x) * y[0] + twoik * y[1];
  };
  auto emit = [&](double x, const CVec<2>& y) {
    out[idx] = std::exp(-kI * k * x) * y[0];
    ++idx;
  };
  double x_end = std::max(w.hi, xs.empty() ? w.hi : xs.back());
  integrate_across(f, q, x_start, x_end, {1.0, 0.0}, ode_options(opt), &xs, emit);
  return out;
}

namespace {
struct StrippedPair {
  Complex ym, ymp;  // y_- and derivative at the matching point
  Complex yp, ypp;  // y_+ and derivative
  double x_m;
};

StrippedPair stripped_pair(const Potential& q, Complex k, const Interval& w,
                           const ScatteringOptions& opt) {
  StrippedPair s;
  s.x_m = std::min(std::max(0.0, w.lo), w.hi);
  JostValue r = jost_right_stripped(q, k, s.x_m, w.hi, opt);
  JostValue l = jost_left_stripped(q, k, s.x_m, w.lo, opt);
  s.yp = r.y;
  s.ypp = r.yp;
  s.ym = l.y;
  s.ymp = l.yp;
  return s;
}
}  // namespace

ScatteringTriple scattering_triple(const Potential& q, double k, const Interval& window,
                                   const ScatteringOptions& opt) {
  if (!(k > 0)) throw NumericalError("scattering_triple: need k > 0");
  StrippedPair s = stripped_pair(q, Complex(k, 0.0), window, opt);
  const Complex twoik(0.0, 2.0 * k);
  Complex W = s.ym * s.ypp - s.ymp * s.yp + twoik * s.ym * s.yp;
  if (std::abs(W) < opt.wronskian_floor)
    throw WronskianFloor("scattering: Wronskian below floor at k = " + std::to_string(k));
  ScatteringTriple t;
  t.wronskian = W;
  t.T = twoik / W;
  Complex phase_m = std::exp(Complex(0.0, -2.0 * k * s.x_m));
  t.R = -phase_m * (s.ym * std::conj(s.ypp) - s.ymp * std::conj(s.yp)) / W;
  t.L = std::conj(phase_m) * (s.yp * std::conj(s.ymp) - s.ypp * std::conj(s.ym)) / W;
  return t;
}

namespace {
CoefficientGrid coefficients_impl(const Potential& q, const KGridParams& grid,
                                  const ScatteringOptions& opt, bool parallel) {
  std::vector<double> kp = sinh_k_grid(grid);
  const int n = static_cast<int>(kp.size());
  Interval w = scattering_window(q, opt.tail_tol);

  std::vector<Complex> R(n), T(n), L(n);
  std::string error_msg;
  bool wf_error = false, other_error = false;

  auto node = [&](int j) {
    ScatteringTriple t = scattering_triple(q, kp[j], w, opt);
    R[j] = t.R;
    T[j] = t.T;
    L[j] = t.L;
  };

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int j = 0; j < n; ++j) {
    try {
      node(j);
    } catch (const WronskianFloor& e) {
#pragma omp critical
      {
        wf_error = true;
        error_msg = e.what();
      }
    } catch (const std::exception& e) {
#pragma omp critical
      {
        other_error = true;
        error_msg = e.what();
      }
    }
  }
  if (wf_error) throw WronskianFloor(error_msg);
  if (other_error) throw NumericalError(error_msg);

  CoefficientGrid g;
  g.k.resize(2 * n);
  g.R.resize(2 * n);
  g.T.resize(2 * n);
  g.L.resize(2 * n);
  for (int j = 0; j < n; ++j) {
    g.k[n + j] = kp[j];
    g.R[n + j] = R[j];
    g.T[n + j] = T[j];
    g.L[n + j] = L[j];
    g.k[n - 1 - j] = -kp[j];
    g.R[n - 1 - j] = std::conj(R[j]);
    g.T[n - 1 - j] = std::conj(T[j]);
    g.L[n - 1 - j] = std::conj(L[j]);
  }
  double defect = 0.0;
  for (int j = 0; j < n; ++j)
    defect = std::max(defect, std::abs(std::norm(R[j]) + std::norm(T[j]) - 1.0));
  g.unitarity_defect = defect;
  return g;
}
}  // namespace

CoefficientGrid scattering_coefficients(const Potential& q, const KGridParams& grid,
                                        const ScatteringOptions& opt) {
  return coefficients_impl(q, grid, opt, true);
}

CoefficientGrid scattering_coefficients_serial(const Potential& q, const KGridParams& grid,
                                               const ScatteringOptions& opt) {
  return coefficients_impl(q, grid, opt, false);
}

namespace {
// Stripped Wronskian at k = i kappa; real arithmetic throughout.
double bound_state_wronskian(const Potential& q, double kappa, const Interval& w,
                             const ScatteringOptions& opt) {
  StrippedPair s = stripped_pair(q, Complex(0.0, kappa), w, opt);
  Complex W = s.ym * s.ypp - s.ymp * s.yp - 2.0 * kappa * s.ym * s.yp;
  return W.real();
}

// Inverse squared L2 norm of psi_+(., i kappa), with analytic tail closures.
// Each Jost solution is integrated only from its own side into the well;
// continuing psi_+ past the well would amplify root error by e^{2 kappa |x|}.
// The halves are joined by an L2 projection over an overlap strip, which
// stays well-conditioned at eigenfunction nodes.
double pole_coefficient(const Potential& q, double kappa, const Interval& w,
                        const ScatteringOptions& opt) {
  double h = 0.01 / std::max(1.0, kappa);
  long n_cells = std::max(64L, static_cast<long>(std::ceil((w.hi - w.lo) / h)));
  if (n_cells % 2 == 1) ++n_cells;
  h = (w.hi - w.lo) / n_cells;

  std::vector<double> grid(n_cells + 1);
  for (long i = 0; i <= n_cells; ++i) grid[i] = w.lo + i * h;

  long i_m = std::lround((std::min(std::max(0.0, w.lo), w.hi) - w.lo) / h);
  i_m = std::clamp(i_m + (i_m % 2), 0L, n_cells);  // even index: Simpson halves
  long n_ov = std::lround(1.0 / h);
  long i_ov_lo = std::max(0L, i_m - n_ov), i_ov_hi = std::min(n_cells, i_m + n_ov);

  const Complex k(0.0, kappa);
  const Complex twoik = 2.0 * kI * k;
  auto f_right = [&](double x, const CVec<2>& y, CVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = q(x) * y[0] - twoik * y[1];
  };
  auto f_left = [&](double x, const CVec<2>& y, CVec<2>& dy) {
    dy[0] = y[1];
    dy[1] = q(x) * y[0] + twoik * y[1];
  };

  // psi_+ on [i_ov_lo, n_cells], rightward-normalized, swept leftward.
  std::vector<double> psi_p(n_cells + 1, 0.0);
  {
    std::vector<double> rev(grid.rbegin(), grid.rend() - i_ov_lo);
    std::size_t idx = 0;
    auto emit = [&](double x, const CVec<2>& y) {
      psi_p[n_cells - idx] = std::exp(-kappa * x) * y[0].real();
      ++idx;
    };
    integrate_across(f_right, q, w.hi, grid[i_ov_lo], {1.0, 0.0}, ode_options(opt), &rev, emit);
  }

  double norm2 = 0.0;
  if (i_m < n_cells) {
    std::vector<double> seg(psi_p.begin() + i_m, psi_p.end());
    for (double& v : seg) v *= v;
    norm2 += simpson_uniform(seg, h);
  }
  // Right tail: psi ~ e^{-kappa x} (stripped y = 1 at the window edge).
  norm2 += std::exp(-2.0 * kappa * w.hi) / (2.0 * kappa);

  if (i_m > 0) {
    // psi_- on [0, i_ov_hi], leftward-normalized, swept rightward.
    std::vector<double> psi_m(n_cells + 1, 0.0);
    std::vector<double> fwd(grid.begin(), grid.begin() + i_ov_hi + 1);
    std::size_t idx = 0;
    auto emit = [&](double x, const CVec<2>& y) {
      psi_m[idx] = std::exp(kappa * x) * y[0].real();
      ++idx;
    };
    integrate_across(f_left, q, w.lo, grid[i_ov_hi], {1.0, 0.0}, ode_options(opt), &fwd, emit);

    double num = 0.0, den = 0.0;
    for (long j = i_ov_lo; j <= i_ov_hi; ++j) {
      num += psi_p[j] * psi_m[j];
      den += psi_m[j] * psi_m[j];
    }
    if (!(den > 0.0)) throw NumericalError("pole coefficient: degenerate overlap");
    double b = num / den;  // psi_+ = b psi_- through the well
    if (!std::isfinite(b)) throw NumericalError("pole coefficient: match overflow");

    std::vector<double> seg(i_m + 1);
    for (long j = 0; j <= i_m; ++j) seg[j] = b * psi_m[j] * b * psi_m[j];
    norm2 += simpson_uniform(seg, h);
    // Left tail: pure decaying branch, integral (b psi_-(lo))^2 / (2 kappa).
    norm2 += seg.front() / (2.0 * kappa);
  } else {
    norm2 += psi_p.front() * psi_p.front() / (2.0 * kappa);
  }

  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw NumericalError("pole coefficient: bad norm");
  return 1.0 / norm2;
}
}  // namespace

std::vector<BoundState> bound_states(const Potential& q, const ScatteringOptions& opt) {
  if (q.is_zero()) return {};
  Interval w = scattering_window(q, opt.tail_tol);

  // Upper bound for kappa from the profile minimum.
  double qmin = 0.0;
  {
    double lo = std::max(w.lo, -80.0), hi = std::min(w.hi, 80.0);
    long n = static_cast<long>((hi - lo) / 0.005) + 2;
    for (long i = 0; i <= n; ++i) qmin = std::min(qmin, q(lo + (hi - lo) * i / n));
  }
  if (qmin >= 0.0) return {};
  double kappa_max = std::sqrt(-qmin);

  // Independent count: Sturm sequence on a Dirichlet box. Reliable for
  // kappa >~ 0.2 with this padding; weaker states are left to the scan.
  const double pad = 30.0;
  std::vector<double> box_eigs =
      oracle::schrodinger_eigs(q, w.lo - pad, w.hi + pad, 6000, true);
  int expected_strong = 0;
  for (double e : box_eigs)
    if (std::sqrt(std::max(0.0, -e)) >= 0.2) ++expected_strong;

  auto W = [&](double kappa) { return bound_state_wronskian(q, kappa, w, opt); };

  std::vector<double> roots;
  int n_scan = 800;
  for (int attempt = 0; attempt < 4; ++attempt) {
    roots.clear();
    double lo = opt.kappa_floor, hi = kappa_max * (1.0 + 1e-12) + 1e-12;
    double prev = W(lo);
    for (int i = 1; i <= n_scan; ++i) {
      double kap = lo + (hi - lo) * i / n_scan;
      double cur = W(kap);
      if (prev == 0.0) prev = -cur;  // exact hit, count once
      if (prev * cur < 0.0) {
        double a = lo + (hi - lo) * (i - 1) / n_scan, b = kap;
        double fa = prev;
        for (int it = 0; it < 200; ++it) {
          double m = 0.5 * (a + b);
          double fm = W(m);
          if (fa * fm <= 0.0)
            b = m;
          else {
            a = m;
            fa = fm;
          }
          if (b - a < opt.kappa_tol * std::max(1.0, b)) break;
        }
        roots.push_back(0.5 * (a + b));
      }
      prev = cur;
    }
    int found_strong = 0;
    for (double r : roots)
      if (r >= 0.2) ++found_strong;
    if (found_strong == expected_strong) break;
    if (attempt == 3)
      throw NumericalError("bound states: root count " + std::to_string(found_strong) +
                           " disagrees with eigensolver count " +
                           std::to_string(expected_strong));
    n_scan *= 4;
  }

  std::vector<BoundState> out;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it)  // descending kappa
    out.push_back({*it, pole_coefficient(q, *it, w, opt)});
  return out;
}

namespace {
ScatteringData one_sided_scattering(const Potential& q, const KGridParams& grid,
                                    const ScatteringOptions& opt) {
  ScatteringData d;
  d.kgrid = grid;
  Potential use = q;
  double shift = 0.0;
  for (int attempt = 0;; ++attempt) {
    try {
      d.grid = scattering_coefficients(use, grid, opt);
      d.states = bound_states(use, opt);
      break;
    } catch (const WronskianFloor&) {
      if (attempt >= 1) throw;
      shift = opt.retry_shift;
      use = q.shift(shift);
    }
  }
  d.applied_shift = shift;
  d.source = use.canonical();
  return d;
}
}  // namespace

ScatteringData compute_scattering(const Potential& q, const KGridParams& grid,
                                  const ScatteringOptions& opt) {
  ScatteringData d = one_sided_scattering(q, grid, opt);
  if (!d.states.empty() && q.integrable_left()) {
    Potential used = d.applied_shift != 0.0 ? q.shift(d.applied_shift) : q;
    d.mirror = std::make_shared<const ScatteringData>(
        one_sided_scattering(used.mirror(), grid, opt));
  }
  return d;
}

PieceAmplitudes scattering_pieces(const Potential& q, Complex k, const ScatteringOptions& opt) {
  if (k.imag() < -1e-14) throw NumericalError("scattering_pieces: need Im k >= 0");
  PieceAmplitudes p;
  const Complex twoik = 2.0 * kI * k;

  Potential qp = q.right_part();
  if (qp.is_zero() || qp.support().hi <= qp.support().lo) {
    p.T_plus = 1.0;
    p.L_plus = 0.0;
  } else {
    double hi = right_tail_edge(qp, opt.tail_tol);
    JostValue v = jost_right_stripped(qp, k, 0.0, hi, opt);
    Complex den = v.yp + twoik * v.y;
    if (std::abs(den) < opt.wronskian_floor)
      throw WronskianFloor("scattering_pieces: right-piece Wronskian below floor");
    p.T_plus = twoik / den;
    p.L_plus = -v.yp / den;
  }

  Potential qm = q.left_part();
  if (qm.is_zero() || qm.support().hi <= qm.support().lo) {
    p.R_minus = 0.0;
  } else {
    double lo = left_tail_edge(qm, opt.tail_tol);
    JostValue v = jost_left_stripped(qm, k, 0.0, lo, opt);
    Complex den = twoik * v.y - v.yp;
    if (std::abs(den) < opt.wronskian_floor)
      throw WronskianFloor("scattering_pieces: left-piece denominator below floor");
    p.R_minus = v.yp / den;
  }

  Complex dg = 1.0 - p.L_plus * p.R_minus;
  if (std::abs(dg) < opt.denominator_floor)
    throw NumericalError("scattering_pieces: 1 - L_+ R_- below denominator floor");
  p.G = p.T_plus * p.T_plus * p.R_minus / dg;
  return p;
}

ReflectionSplit split_reflection(const Potential& q, const std::vector<double>& k_nodes,
                                 const ScatteringOptions& opt) {
  ReflectionSplit s;
  s.k = k_nodes;
  const int n = static_cast<int>(k_nodes.size());
  s.R_full.resize(n);
  s.R_plus.resize(n);
  s.G.resize(n);
  s.T_plus.resize(n);
  s.L_plus.resize(n);
  s.R_minus.resize(n);
  Interval w = scattering_window(q, opt.tail_tol);

  Potential qp = q.right_part();
  bool have_right = !(qp.is_zero() || qp.support().hi <= qp.support().lo);
  double hi_edge = have_right ? right_tail_edge(qp, opt.tail_tol) : 0.0;

  std::string error_msg;
  bool failed = false;
#pragma omp parallel for schedule(dynamic, 4)
  for (int j = 0; j < n; ++j) {
    try {
      double k = k_nodes[j];
      s.R_full[j] = scattering_triple(q, k, w, opt).R;
      PieceAmplitudes p = scattering_pieces(q, Complex(k, 0.0), opt);
      s.T_plus[j] = p.T_plus;
      s.L_plus[j] = p.L_plus;
      s.R_minus[j] = p.R_minus;
      s.G[j] = p.G;
      if (have_right) {
        JostValue v = jost_right_stripped(qp, Complex(k, 0.0), 0.0, hi_edge, opt);
        Complex den = v.yp + Complex(0.0, 2.0 * k) * v.y;
        s.R_plus[j] = -std::conj(v.yp) / den;
      } else {
        s.R_plus[j] = 0.0;
      }
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        error_msg = e.what();
      }
    }
  }
  if (failed) throw NumericalError(error_msg);

  for (int j = 0; j < n; ++j)
    s.max_defect = std::max(s.max_defect, std::abs(s.R_full[j] - s.R_plus[j] - s.G[j]));
  return s;
}

MFunctionResult m_function_left(const Potential& q, const std::vector<Complex>& lambdas,
                                double x_left, const ScatteringOptions& opt) {
  if (!(x_left < 0.0)) throw NumericalError("m_function_left: need x_left < 0");

  auto m_at = [&](Complex lam, double xl) -> Complex {
    // Riccati r' = (q - lam^2) - r^2 from the outgoing free value.
    OdeOptions<1> ro;
    ro.rel_tol = opt.ode_rel_tol;
    ro.abs_tol = opt.ode_abs_tol;
    ro.max_step = 2.0;
    const Complex lam2 = lam * lam;
    bool blew_up = false;
    auto f = [&](double x, const CVec<1>& r, CVec<1>& dr) {
      dr[0] = (q(x) - lam2) - r[0] * r[0];
    };
    Complex r_end;
    try {
      std::vector<double> cuts;
      for (double b : q.breakpoints())
        if (b > xl && b < 0.0) cuts.push_back(b);
      cuts.push_back(0.0);
      CVec<1> r = {-kI * lam};
      double cur = xl;
      for (double nxt : cuts) {
        r = integrate_ode<1>(f, cur, nxt, r, ro);
        if (std::abs(r[0]) > 1e7) {
          blew_up = true;
          break;
        }
        cur = nxt;
      }
      r_end = r[0];
    } catch (const NumericalError&) {
      blew_up = true;  // step underflow near a Riccati pole
    }
    if (!blew_up) return -r_end;

    // Fallback: normalized linear pair (projective form), pole-free.
    JostValue v = jost_left_stripped(q, lam, 0.0, xl, opt);
    return kI * lam - v.yp / v.y;
  };

  MFunctionResult res;
  res.m.resize(lambdas.size());
  res.R.resize(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    Complex lam = lambdas[j];
    if (lam.imag() < -1e-14) throw NumericalError("m_function_left: need Im lambda >= 0");
    Complex m = m_at(lam, x_left);
    res.m[j] = m;
    Complex den = kI * lam + m;
    if (std::abs(den) < 1e-13) throw NumericalError("m_function_left: i lam + m vanishes");
    res.R[j] = (kI * lam - m) / den;
  }
  // Convergence indicator on a subsample.
  std::size_t step = std::max<std::size_t>(1, lambdas.size() / 8);
  for (std::size_t j = 0; j < lambdas.size(); j += step) {
    Complex m2 = m_at(lambdas[j], 2.0 * x_left);
    res.convergence_delta = std::max(res.convergence_delta, std::abs(m2 - res.m[j]));
  }
  return res;
}

namespace {

// Lagrange interpolation of node values v[0..count-1] (unit spacing) at
// position p, cubic where possible, degree-limited near edges.
double interp_nodes(const double* v, int count, double p) {
  if (count == 1) return v[0];
  int deg = std::min(3, count - 1);
  int base = static_cast<int>(std::floor(p)) - 1;
  base = std::max(0, std::min(base, count - 1 - deg));
  double s = 0.0;
  for (int t = 0; t <= deg; ++t) {
    double l = 1.0;
    for (int r = 0; r <= deg; ++r)
      if (r != t) l *= (p - (base + r)) / (t - r);
    s += l * v[base + t];
  }
  return s;
}

// Composite quadrature weights for nodes 0..j at unit spacing (scaled by h by
// the caller): Simpson for even j, Simpson + 3/8 tail for odd j >= 3,
// trapezoid for j = 1.
std::vector<double> composite_weights(int j) {
  std::vector<double> w(j + 1, 0.0);
  if (j == 0) return w;
  if (j == 1) {
    w[0] = w[1] = 0.5;
    return w;
  }
  int simpson_end = (j % 2 == 0) ? j : j - 3;
  for (int m = 0; m + 2 <= simpson_end; m += 2) {
    w[m] += 1.0 / 3.0;
    w[m + 1] += 4.0 / 3.0;
    w[m + 2] += 1.0 / 3.0;
  }
  if (j % 2 == 1) {
    w[j - 3] += 3.0 / 8.0;
    w[j - 2] += 9.0 / 8.0;
    w[j - 1] += 9.0 / 8.0;
    w[j] += 3.0 / 8.0;
  }
  return w;
}

// 3-point Gauss integral of fn over [lo, hi], split at any listed interior
// breakpoints so nodes never straddle (or land on) a jump of q.
template <class F>
double cell_integral(double lo, double hi, const std::vector<double>& breaks, F&& fn) {
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  auto lb = std::lower_bound(breaks.begin(), breaks.end(), lo + 1e-12 * (hi - lo));
  double cur = lo, acc = 0.0;
  auto piece = [&](double a, double b) {
    double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int g = 0; g < 3; ++g) s += gw[g] * fn(c + r * gx[g]);
    acc += s * r;
  };
  for (; lb != breaks.end() && *lb < hi - 1e-12 * (hi - lo); ++lb) {
    piece(cur, *lb);
    cur = *lb;
  }
  piece(cur, hi);
  return acc;
}

}  // namespace

TriangularKernel transformation_kernel(const Potential& q_plus, double a, int n) {
  if (!(a > 0.0) || n < 8) throw NumericalError("transformation_kernel: need a > 0, n >= 8");
  TriangularKernel K;
  K.a = a;
  K.n = n;
  K.B.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  K.dyB.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  if (q_plus.is_zero()) return K;
  const double h = a / n;

  std::vector<double> breaks;
  for (double b : q_plus.breakpoints())
    if (b > 1e-9 && b < a - 1e-9) breaks.push_back(b);

  // Suffix integrals of q: f(x_l) = int_{x_l}^{a} q.
  std::vector<double> f(n + 1, 0.0);
  for (int l = n - 1; l >= 0; --l)
    f[l] = f[l + 1] + cell_integral(l * h, (l + 1) * h, breaks, [&](double t) { return q_plus(t); });

  // C rows: C(m, l) = int_{x_l}^{a - y_m} q B(., y_m), row-major (n+1)^2.
  std::vector<double> C(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  auto Crow = [&](int m) { return C.data() + static_cast<std::size_t>(m) * (n + 1); };
  auto Brow = [&](int j, int i) -> double& {
    return K.B[static_cast<std::size_t>(i) * (n + 1) + j];
  };

  std::vector<double> rowbuf(n + 1);
  auto rebuild_c_row = [&](int m) {
    int len = n - m;  // B(., y_m) lives on nodes 0..len, zero at len
    for (int i = 0; i <= len; ++i) rowbuf[i] = Brow(m, i);
    double* c = Crow(m);
    c[len] = 0.0;
    for (int l = len - 1; l >= 0; --l) {
      double cell = cell_integral(l * h, (l + 1) * h, breaks, [&](double t) {
        return q_plus(t) * interp_nodes(rowbuf.data(), len + 1, t / h);
      });
      c[l] = c[l + 1] + cell;
    }
    for (int l = len + 1; l <= n; ++l) c[l] = 0.0;
  };

  // Row 0 is the plain suffix integral of q.
  for (int i = 0; i <= n; ++i) Brow(0, i) = f[i];
  rebuild_c_row(0);

  std::vector<double> fixed(n + 1);
  for (int j = 1; j <= n; ++j) {
    std::vector<double> w = composite_weights(j);
    const int len = n - j;
#pragma omp parallel for schedule(static) if (len > 64)
    for (int i = 0; i < len; ++i) {
      double s = 0.0;
      for (int m = 0; m < j; ++m) s += w[m] * Crow(m)[i + j - m];
      fixed[i] = f[i + j] + h * s;
    }
    for (int i = 0; i < len; ++i) Brow(j, i) = fixed[i];
    Brow(j, len) = 0.0;
    // The node m = j couples back to this row; a short fixed point closes it
    // (contraction ~ h * ||q||_1 per sweep).
    for (int sweep = 0; sweep < 4; ++sweep) {
      rebuild_c_row(j);
      for (int i = 0; i < len; ++i) Brow(j, i) = fixed[i] + h * w[j] * Crow(j)[i];
    }
    rebuild_c_row(j);
  }

  // One-sided node values of q, averaged across interior jumps.
  std::vector<double> qnode(n + 1);
  const double eps = 1e-7 * h;
  qnode[0] = q_plus(eps);
  qnode[n] = q_plus(a - eps);
  for (int l = 1; l < n; ++l) {
    double x = l * h;
    bool at_break = false;
    for (double b : breaks) at_break |= std::abs(b - x) < 1e-9;
    qnode[l] = at_break ? 0.5 * (q_plus(x - eps) + q_plus(x + eps)) : q_plus(x);
  }

  // d/dy B(x,y) = -q(x+y) + C(x,y) - int_0^y q(x+y-z) B(x+y-z, z) dz.
  for (int j = 0; j <= n; ++j) {
    std::vector<double> w = composite_weights(j);
    const int len = n - j;
#pragma omp parallel for schedule(static) if (len > 64)
    for (int i = 0; i <= len; ++i) {
      double s = 0.0;
      for (int m = 0; m <= j; ++m) s += w[m] * qnode[i + j - m] * Brow(m, i + j - m);
      K.dyB[static_cast<std::size_t>(i) * (n + 1) + j] = -qnode[i + j] + Crow(j)[i] - h * s;
    }
  }
  return K;
}

RPlusRepresentation r_plus_representation(const Potential& q, const std::vector<double>& k_nodes,
                                          int n_grid, const ScatteringOptions& opt) {
  RPlusRepresentation rep;
  rep.k = k_nodes;
  const int nk = static_cast<int>(k_nodes.size());
  rep.R_direct.assign(nk, 0.0);
  rep.R_recon.assign(nk, 0.0);
  rep.G0.assign(nk, 0.0);
  rep.G1.assign(nk, 0.0);

  Potential qp = q.right_part();
  if (qp.is_zero()) return rep;
  double a = right_tail_edge(qp, opt.tail_tol);

  // Align the largest interior jump with the grid; extend a to keep it
  // on-grid (the extension only adds zero cells).
  std::vector<double> ibreaks;
  for (double b : qp.breakpoints())
    if (b > 1e-9 && b < a - 1e-9) ibreaks.push_back(b);
  double h;
  int n;
  if (!ibreaks.empty()) {
    double b = ibreaks.back();
    int m = std::max(1, static_cast<int>(std::lround(n_grid * b / a)));
    h = b / m;
    n = static_cast<int>(std::ceil(a / h - 1e-9));
    if (n * h < a) ++n;
    a = n * h;
  } else {
    n = n_grid;
    h = a / n;
  }
  rep.a = a;
  rep.n = n;

  TriangularKernel K = transformation_kernel(qp, a, n);
  rep.y.resize(n + 1);
  for (int l = 0; l <= n; ++l) rep.y[l] = l * h;
  rep.B0.resize(n + 1);
  for (int l = 0; l <= n; ++l) rep.B0[l] = K.at(l, 0);
  for (double v : K.B) rep.max_B = std::max(rep.max_B, std::abs(v));

  // Q(y) = int_0^y q(z) B(z, y-z) dz, integrated along anti-diagonals.
  rep.Q.assign(n + 1, 0.0);
  std::vector<double> diag(n + 1);
  {
    std::vector<double> breaks = ibreaks;
#pragma omp parallel for schedule(dynamic, 8) firstprivate(diag)
    for (int j = 1; j <= n; ++j) {
      for (int m = 0; m <= j; ++m) diag[m] = K.at(m, j - m);
      double s = 0.0;
      for (int m = 0; m < j; ++m)
        s += cell_integral(m * h, (m + 1) * h, breaks, [&](double z) {
          return qp(z) * interp_nodes(diag.data(), j + 1, z / h);
        });
      rep.Q[j] = s;
    }
  }

  // Q'(y) = q(y) B(y,0) + int_0^y q(z) dyB(z, y-z) dz, for the bound check.
  std::vector<double> qnode(n + 1);
  const double eps = 1e-7 * h;
  qnode[0] = qp(eps);
  qnode[n] = qp(a - eps);
  std::vector<bool> near_break(n + 1, false);
  for (int l = 1; l < n; ++l) {
    double x = l * h;
    bool at_break = false;
    for (double b : ibreaks)
      if (std::abs(b - x) < 1e-9) at_break = true;
    qnode[l] = at_break ? 0.5 * (qp(x - eps) + qp(x + eps)) : qp(x);
    for (double b : ibreaks)
      if (std::abs(b - x) < 1.5 * h) near_break[l] = true;
  }
  rep.Qp.assign(n + 1, 0.0);
  for (int j = 0; j <= n; ++j) {
    std::vector<double> w = composite_weights(j);
    double s = 0.0;
    for (int m = 0; m <= j; ++m)
      s += w[m] * qnode[m] * K.dyB[static_cast<std::size_t>(m) * (n + 1) + (j - m)];
    rep.Qp[j] = qnode[j] * K.at(j, 0) + h * s;
  }

  // eta(x) = int_x^a |q|, gamma(x) = int_x^a (t - x)|q(t)| dt.
  std::vector<double> eta(n + 1, 0.0), tq_suffix(n + 1, 0.0);
  for (int l = n - 1; l >= 0; --l) {
    eta[l] = eta[l + 1] +
             cell_integral(l * h, (l + 1) * h, ibreaks, [&](double t) { return std::abs(qp(t)); });
    tq_suffix[l] = tq_suffix[l + 1] + cell_integral(l * h, (l + 1) * h, ibreaks, [&](double t) {
                     return t * std::abs(qp(t));
                   });
  }
  auto gamma = [&](int l) { return tq_suffix[l] - l * h * eta[l]; };

  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      double den = eta[i + j] * std::exp(gamma(i));
      if (den > 1e-14 * eta[0])
        rep.bound_ratio_B = std::max(rep.bound_ratio_B, std::abs(K.at(i, j)) / den);
    }
  double c1 = eta[0] * (std::exp(gamma(0)) + 1.0);
  double c2 = 2.0 * eta[0] * eta[0] * std::exp(gamma(0));
  for (int j = 0; j <= n; ++j) {
    if (near_break[j]) continue;
    double den = c1 * std::abs(qnode[j]) + c2 * eta[j];
    if (den > 1e-14 * eta[0])
      rep.bound_ratio_Qp = std::max(rep.bound_ratio_Qp, std::abs(rep.Qp[j]) / den);
  }

  // Fourier side: G0 = FT of q, and G1 = 2ik FT of Q (exact parts
  // integration, Q(0) = Q(a) = 0), evaluated per smooth segment.
  std::vector<double> seg_edges{0.0};
  for (double b : ibreaks) seg_edges.push_back(b);
  seg_edges.push_back(a);
  std::vector<double> svals(nk);
  for (int j = 0; j < nk; ++j) {
    if (!(k_nodes[j] > 0.0)) throw NumericalError("r_plus_representation: need k > 0");
    svals[j] = -2.0 * k_nodes[j];
  }
  std::vector<Complex> g0(nk, 0.0), gq(nk, 0.0);
  for (std::size_t seg = 0; seg + 1 < seg_edges.size(); ++seg) {
    double lo = seg_edges[seg], hi = seg_edges[seg + 1];
    int l_lo = static_cast<int>(std::lround(lo / h));
    int l_hi = static_cast<int>(std::lround(hi / h));
    if (l_hi - l_lo < 1) continue;
    std::vector<double> xs(rep.y.begin() + l_lo, rep.y.begin() + l_hi + 1);
    std::vector<double> qs(rep.Q.begin() + l_lo, rep.Q.begin() + l_hi + 1);
    CubicSpline qspline(xs, qs);
    double nudge = 1e-12 * (hi - lo);
    std::vector<AmpFn> amps = {
        [&, lo, hi, nudge](double u) -> Complex {
          return qp(std::min(std::max(u, lo + nudge), hi - nudge));
        },
        [&qspline, lo, hi](double u) -> Complex {
          return qspline(std::min(std::max(u, lo), hi));
        }};
    OscillatorEngine eng(amps, 0.0, 0.0, lo, hi, {});
    std::vector<std::vector<Complex>> vals = eng.eval_many(svals);
    for (int j = 0; j < nk; ++j) {
      g0[j] += vals[0][j];
      gq[j] += vals[1][j];
    }
  }

  for (int j = 0; j < nk; ++j) {
    double k = k_nodes[j];
    Complex twoik(0.0, 2.0 * k);
    JostValue v = jost_right_stripped(qp, Complex(k, 0.0), 0.0, a, opt);
    Complex den = v.yp + twoik * v.y;
    if (std::abs(den) < opt.wronskian_floor)
      throw WronskianFloor("r_plus_representation: denominator below floor");
    Complex t_plus = twoik / den;
    rep.R_direct[j] = -std::conj(v.yp) / den;
    rep.G0[j] = g0[j];
    rep.G1[j] = twoik * gq[j];
    rep.R_recon[j] = t_plus * (g0[j] + gq[j]) / twoik;
    rep.max_defect = std::max(rep.max_defect, std::abs(rep.R_direct[j] - rep.R_recon[j]));
  }
  return rep;
}

std::vector<Complex> contour_G(const Potential& q, double h, const std::vector<double>& us,
                               const ScatteringOptions& opt) {
  std::vector<Complex> g(us.size());
  std::string error_msg;
  bool failed = false;
#pragma omp parallel for schedule(dynamic, 4)
  for (long j = 0; j < static_cast<long>(us.size()); ++j) {
    try {
      g[j] = scattering_pieces(q, Complex(us[j], h), opt).G;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        error_msg = e.what();
      }
    }
  }
  if (failed) throw NumericalError(error_msg);
  return g;
}

}  // namespace kdv
