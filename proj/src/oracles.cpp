#include "kdvdet/oracles.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>

namespace kdv::oracle {

double soliton_exact(double kappa, double x0, double x, double t) {
  double s = sech(kappa * (x - 4.0 * kappa * kappa * t) - x0);
  return -2.0 * kappa * kappa * s * s;
}

namespace {
using Mat2 = std::array<Complex, 4>;  // row-major [[m00,m01],[m10,m11]]

Mat2 mul(const Mat2& A, const Mat2& B) {
  return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3], A[2] * B[0] + A[3] * B[2],
          A[2] * B[1] + A[3] * B[3]};
}

// Propagator of (psi, psi') across a slab of constant q and width d, where
// psi'' = (q - k^2) psi. mu = sqrt(k^2 - q); cos/sinc are entire in mu^2, so
// the branch does not matter.
Mat2 slab_propagator(double q, double d, double k) {
  Complex mu2(k * k - q, 0.0);
  Complex mu = std::sqrt(mu2);
  Complex z = mu * d;
  Complex c, s_over_mu;
  if (std::abs(z) < 1e-4) {
    Complex z2 = z * z;
    c = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
    s_over_mu = d * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    c = std::cos(z);
    s_over_mu = std::sin(z) / mu;
  }
  return {c, s_over_mu, -mu2 * s_over_mu, c};
}
}  // namespace

ScatteringTriple transfer_matrix_scattering(const PiecewiseConstant& q, double k) {
  if (k == 0.0) throw NumericalError("transfer matrix: k = 0");
  if (q.edges.size() != q.values.size() + 1 || q.values.empty())
    throw NumericalError("transfer matrix: inconsistent slab data");

  // Propagate (psi, psi') from the left edge to the right edge.
  Mat2 P = {1.0, 0.0, 0.0, 1.0};
  for (std::size_t j = 0; j < q.values.size(); ++j) {
    double d = q.edges[j + 1] - q.edges[j];
    P = mul(slab_propagator(q.values[j], d, k), P);
  }

  const double xl = q.edges.front(), xr = q.edges.back();
  const Complex ik(0.0, k);
  auto split = [&](Complex psi, Complex dpsi, double x) {
    // psi = alpha e^{ikx} + beta e^{-ikx}
    Complex eikx = std::exp(ik * x);
    Complex alpha = (dpsi + ik * psi) / (2.0 * ik * eikx);
    Complex beta = (ik * psi - dpsi) / (2.0 * ik) * eikx;
    return std::pair<Complex, Complex>(alpha, beta);
  };

  ScatteringTriple out;
  {
    // Wave incident from the right: psi = e^{-ikx} on the left.
    Complex psi = std::exp(-ik * xl), dpsi = -ik * std::exp(-ik * xl);
    Complex psir = P[0] * psi + P[1] * dpsi;
    Complex dpsir = P[2] * psi + P[3] * dpsi;
    auto [alpha, beta] = split(psir, dpsir, xr);
    out.T = 1.0 / beta;
    out.R = alpha / beta;
  }
  {
    // Wave incident from the left: psi = e^{ikx} on the right.
    // Invert P (det = 1 for these propagators).
    Mat2 Pi = {P[3], -P[1], -P[2], P[0]};
    Complex psi = std::exp(ik * xr), dpsi = ik * std::exp(ik * xr);
    Complex psil = Pi[0] * psi + Pi[1] * dpsi;
    Complex dpsil = Pi[2] * psi + Pi[3] * dpsi;
    auto [alpha, beta] = split(psil, dpsil, xl);
    out.L = beta / alpha;
  }
  return out;
}

PiecewiseConstant sample_piecewise(const Potential& q, double lo, double hi, int n_slabs) {
  PiecewiseConstant pc;
  pc.edges.resize(n_slabs + 1);
  pc.values.resize(n_slabs);
  double h = (hi - lo) / n_slabs;
  for (int j = 0; j <= n_slabs; ++j) pc.edges[j] = lo + j * h;
  for (int j = 0; j < n_slabs; ++j) pc.values[j] = q(lo + (j + 0.5) * h);
  return pc;
}

namespace {
// Number of eigenvalues of the tridiagonal (diag, off) below lambda, by the
// Sturm sequence of the shifted LDL^T factorization.
int sturm_count(const std::vector<double>& diag, double off, double lambda) {
  int cnt = 0;
  const double off2 = off * off;
  double d = diag[0] - lambda;  // first pivot has no off-diagonal term
  if (d < 0.0) ++cnt;
  if (d == 0.0) d = -1e-300;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    d = diag[i] - lambda - off2 / d;
    if (d < 0.0) ++cnt;
    if (d == 0.0) d = -1e-300;
  }
  return cnt;
}

std::vector<double> negative_eigs_on_grid(const Potential& q, double a, double b, int n) {
  // Interior points x_1..x_{n-1}, Dirichlet walls.
  double h = (b - a) / n;
  std::vector<double> diag(n - 1);
  for (int i = 1; i < n; ++i) diag[i - 1] = 2.0 / (h * h) + q(a + i * h);
  double off = -1.0 / (h * h);

  double lo = 2.0 / (h * h);  // a crude lower bound: min diag - 2|off|
  for (double d : diag) lo = std::min(lo, d);
  lo -= 2.0 / (h * h);
  int total_neg = sturm_count(diag, off, 0.0);
  std::vector<double> eigs(total_neg);
  for (int j = 0; j < total_neg; ++j) {
    double l = lo, r = 0.0;
    for (int it = 0; it < 200; ++it) {
      double m = 0.5 * (l + r);
      (sturm_count(diag, off, m) >= j + 1 ? r : l) = m;
      if (r - l < 1e-14 * std::max(1.0, std::abs(l))) break;
    }
    eigs[j] = 0.5 * (l + r);
  }
  return eigs;
}
}  // namespace

std::vector<double> schrodinger_eigs(const Potential& q, double a, double b, int n,
                                     bool richardson) {
  std::vector<double> e1 = negative_eigs_on_grid(q, a, b, n);
  if (!richardson) return e1;
  std::vector<double> e2 = negative_eigs_on_grid(q, a, b, 2 * n);
  // Counts can differ for states marginally bound on the coarse grid; pair up
  // from the ground state, keep fine-grid values for any extras.
  std::vector<double> out;
  for (std::size_t j = 0; j < e2.size(); ++j) {
    if (j < e1.size())
      out.push_back((4.0 * e2[j] - e1[j]) / 3.0);
    else
      out.push_back(e2[j]);
  }
  // Richardson may push a near-zero eigenvalue above 0; keep negatives only.
  std::vector<double> neg;
  for (double e : out)
    if (e < 0.0) neg.push_back(e);
  return neg;
}

std::vector<double> schrodinger_bound_kappas(const Potential& q, double a, double b, int n) {
  std::vector<double> eigs = schrodinger_eigs(q, a, b, n);
  std::vector<double> kap;
  for (double e : eigs) kap.push_back(std::sqrt(-e));
  return kap;  // eigenvalues ascend, so kappas descend
}

SplitStepResult split_step_kdv(const std::vector<double>& u0, double box_length, double dt,
                               long n_steps) {
  const int n = static_cast<int>(u0.size());
  if (n < 16) throw NumericalError("split step: grid too small");
  const double L = box_length;

  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_complex* spec = fftw_alloc_complex(n);
  fftw_plan fwd = fftw_plan_dft_1d(n, buf, spec, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_1d(n, spec, buf, FFTW_BACKWARD, FFTW_ESTIMATE);

  std::vector<double> km(n);  // signed wavenumbers 2 pi j / L
  for (int j = 0; j < n; ++j) {
    int jj = (j <= n / 2) ? j : j - n;
    km[j] = 2.0 * kPi * jj / L;
  }
  const int j_dealias = n / 3;  // keep |j| <= n/3

  std::vector<Complex> u(n), work(n);
  for (int j = 0; j < n; ++j) u[j] = u0[j];

  auto to_spec = [&](const std::vector<Complex>& v) {
    for (int j = 0; j < n; ++j) {
      buf[j][0] = v[j].real();
      buf[j][1] = v[j].imag();
    }
    fftw_execute(fwd);
  };
  auto from_spec = [&](std::vector<Complex>& v) {
    fftw_execute(bwd);
    for (int j = 0; j < n; ++j) v[j] = Complex(buf[j][0], buf[j][1]) / double(n);
  };

  // 3 d/dx (v^2) with 2/3 dealiasing.
  auto nonlinear = [&](const std::vector<Complex>& v, std::vector<Complex>& out) {
    for (int j = 0; j < n; ++j) work[j] = v[j] * v[j];
    to_spec(work);
    for (int j = 0; j < n; ++j) {
      int jj = (j <= n / 2) ? j : j - n;
      Complex s(spec[j][0], spec[j][1]);
      s *= (std::abs(jj) <= j_dealias) ? Complex(0.0, 3.0 * km[j]) : 0.0;
      spec[j][0] = s.real();
      spec[j][1] = s.imag();
    }
    from_spec(out);
  };

  auto half_nonlinear = [&](double step) {
    // Midpoint: u* = u + (step/2) N(u); u <- u + step N(u*).
    std::vector<Complex> n1(n), n2(n), ustar(n);
    nonlinear(u, n1);
    for (int j = 0; j < n; ++j) ustar[j] = u[j] + 0.5 * step * n1[j];
    nonlinear(ustar, n2);
    for (int j = 0; j < n; ++j) u[j] += step * n2[j];
  };

  double mass0 = 0.0;
  for (int j = 0; j < n; ++j) mass0 += u0[j];
  mass0 *= L / n;

  double max_abs = 0.0;
  for (double v : u0) max_abs = std::max(max_abs, std::abs(v));
  const double blow_up = 1e3 * std::max(1.0, max_abs);

  for (long s = 0; s < n_steps; ++s) {
    half_nonlinear(0.5 * dt);
    // Exact linear flow u_t = -u_xxx: multiplier exp(i k^3 dt).
    to_spec(u);
    for (int j = 0; j < n; ++j) {
      double ph = km[j] * km[j] * km[j] * dt;
      Complex m(std::cos(ph), std::sin(ph));
      Complex v(spec[j][0], spec[j][1]);
      v *= m;
      spec[j][0] = v.real();
      spec[j][1] = v.imag();
    }
    from_spec(u);
    half_nonlinear(0.5 * dt);

    double amax = 0.0;
    for (int j = 0; j < n; ++j) amax = std::max(amax, std::abs(u[j]));
    max_abs = std::max(max_abs, amax);
    if (amax > blow_up) {
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(bwd);
      fftw_free(buf);
      fftw_free(spec);
      throw NumericalError("split step: solution blow-up at step " + std::to_string(s));
    }
  }

  SplitStepResult res;
  res.u.resize(n);
  double mass1 = 0.0;
  for (int j = 0; j < n; ++j) {
    res.u[j] = u[j].real();
    mass1 += res.u[j];
  }
  mass1 *= L / n;
  res.mass_drift = std::abs(mass1 - mass0);
  res.max_abs = max_abs;

  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);
  fftw_free(spec);
  return res;
}

}  // namespace kdv::oracle
