#include "kdvdet/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kdv {

double fredholm_logdet(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw NumericalError("fredholm_logdet: square input only");
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.rows(), m.cols()) + m;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double acc = 0.0;
  int sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double d = lu.matrixLU()(i, i);
    if (d == 0.0) throw NumericalError("fredholm_logdet: singular I + M");
    if (d < 0.0) sign = -sign;
    acc += std::log(std::abs(d));
  }
  if (sign < 0) throw NumericalError("fredholm_logdet: det(I + M) is negative");
  return acc;
}

namespace {

// log det at a shifted x with the discretization window frozen.
double logdet_at(const ScatteringData& data, double x, double t,
                 const DiscretizationParams& par) {
  HankelSymbol sym = assemble_symbol(data, x, t);
  HankelDiscretization d = nystrom_matrix(sym, {{0, 0}}, par);
  return fredholm_logdet(d.mats[0]);
}

}  // namespace

// Above this pole exponent the direct determinant has lost ~e^{theta} eps
// to roundoff; the mirrored representation (exact by the x -> -x, t -> -t
// invariance) is used instead when it is better conditioned.
constexpr double kMirrorSwitch = 15.0;

UPoint u_point(const ScatteringData& data, double x, double t, const SolveOptions& opt) {
  if (data.mirror && !data.states.empty()) {
    double x_eff = x + data.applied_shift;
    double th_max = -kInf, th_min = kInf;
    for (const BoundState& b : data.states) {
      double th = 8.0 * b.kappa * b.kappa * b.kappa * t - 2.0 * b.kappa * x_eff;
      th_max = std::max(th_max, th);
      th_min = std::min(th_min, th);
    }
    if (th_max > kMirrorSwitch && -th_min < th_max)
      return u_point(*data.mirror, -x_eff, -t, opt);
  }

  UPoint p;
  HankelSymbol sym = assemble_symbol(data, x, t);
  DiscretizationParams par = opt.disc;
  if (par.L_s <= 0.0) par.L_s = auto_s_window(sym);

  HankelDiscretization d = nystrom_matrix(sym, {{0, 0}, {1, 0}, {2, 0}}, par);
  const Eigen::MatrixXd& m0 = d.mats[0];
  const Eigen::MatrixXd& m1 = d.mats[1];
  const Eigen::MatrixXd& m2 = d.mats[2];
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m0.rows(), m0.cols()) + m0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);

  {
    double acc = 0.0;
    int sign = lu.permutationP().determinant();
    for (Eigen::Index i = 0; i < m0.rows(); ++i) {
      double dd = lu.matrixLU()(i, i);
      if (dd == 0.0) throw NumericalError("u_point: singular I + M");
      if (dd < 0.0) sign = -sign;
      acc += std::log(std::abs(dd));
    }
    if (sign < 0) throw NumericalError("u_point: det(I + M) is negative");
    p.logdet = acc;
  }

  Eigen::MatrixXd am2 = lu.solve(m2);
  Eigen::MatrixXd am1 = lu.solve(m1);
  double term1 = am2.trace();
  double term2 = (am1 * am1).trace();
  p.u = -2.0 * (term1 - term2);

  if (opt.cross_check) {
    double h = opt.fd_step;
    auto g = [&](double xi) { return xi == x ? p.logdet : logdet_at(data, xi, t, par); };
    auto second = [&](double hh) {
      return (-g(x - 2.0 * hh) + 16.0 * g(x - hh) - 30.0 * p.logdet + 16.0 * g(x + hh) -
              g(x + 2.0 * hh)) /
             (12.0 * hh * hh);
    };
    double d1 = second(h), d2 = second(0.5 * h);
    double rich = (16.0 * d2 - d1) / 15.0;
    p.fd_value = -2.0 * rich;
    p.fd_delta = std::abs(p.u - p.fd_value);
    p.cross_checked = true;
  }
  return p;
}

namespace {

std::vector<double> field_impl(const ScatteringData& data, const std::vector<double>& xs,
                               double t, const SolveOptions& opt, bool parallel) {
  std::vector<double> u(xs.size());
  std::string error_msg;
  bool failed = false;
  SolveOptions per = opt;
  per.cross_check = false;
#pragma omp parallel for schedule(dynamic, 2) if (parallel)
  for (long j = 0; j < static_cast<long>(xs.size()); ++j) {
    try {
      u[j] = u_point(data, xs[j], t, per).u;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        error_msg = e.what();
      }
    }
  }
  if (failed) throw NumericalError(error_msg);
  return u;
}

}  // namespace

std::vector<double> u_field(const ScatteringData& data, const std::vector<double>& xs, double t,
                            const SolveOptions& opt) {
  return field_impl(data, xs, t, opt, true);
}

std::vector<double> u_field_serial(const ScatteringData& data, const std::vector<double>& xs,
                                   double t, const SolveOptions& opt) {
  return field_impl(data, xs, t, opt, false);
}

ResidualReport kdv_residual(const ScatteringData& data, double x_lo, double x_hi, int n_x,
                            double t, double dt, const SolveOptions& opt) {
  if (n_x < 5) throw NumericalError("kdv_residual: need at least 6 grid points");
  if (!(dt > 0.0)) throw NumericalError("kdv_residual: need dt > 0");
  const double h = (x_hi - x_lo) / n_x;
  std::vector<double> xs(n_x + 1);
  for (int i = 0; i <= n_x; ++i) xs[i] = x_lo + i * h;

  std::vector<double> um = u_field(data, xs, t - dt, opt);
  std::vector<double> u0 = u_field(data, xs, t, opt);
  std::vector<double> up = u_field(data, xs, t + dt, opt);

  ResidualReport r;
  for (int i = 2; i <= n_x - 2; ++i) {
    double ut = (up[i] - um[i]) / (2.0 * dt);
    double ux = (u0[i + 1] - u0[i - 1]) / (2.0 * h);
    double uxxx = (u0[i + 2] - 2.0 * u0[i + 1] + 2.0 * u0[i - 1] - u0[i - 2]) / (2.0 * h * h * h);
    double res = ut - 6.0 * u0[i] * ux + uxxx;
    r.x.push_back(xs[i]);
    r.residual.push_back(res);
    r.max_abs = std::max(r.max_abs, std::abs(res));
  }
  return r;
}

namespace {

double real_block_logdet(const Eigen::MatrixXd& m) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  double acc = 0.0;
  int sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double d = lu.matrixLU()(i, i);
    if (d == 0.0) throw NumericalError("block determinant: singular embedding");
    if (d < 0.0) sign = -sign;
    acc += std::log(std::abs(d));
  }
  if (sign < 0) throw NumericalError("block determinant: negative embedding determinant");
  return acc;
}

}  // namespace

BlockDeterminants block_det_variants(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                                     double psd_tol) {
  const Eigen::Index n = p.rows();
  if (p.cols() != n || q.rows() != n || q.cols() != n)
    throw NumericalError("block_det_variants: shape mismatch");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  BlockDeterminants out;
  out.direct = fredholm_logdet(p + q);

  auto add = [&](const char* name, const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                 const Eigen::MatrixXd& a21, const Eigen::MatrixXd& a22) {
    Eigen::MatrixXd big(2 * n, 2 * n);
    big << a11, a12, a21, a22;
    out.names.emplace_back(name);
    out.logdets.push_back(real_block_logdet(big));
  };
  add("v1", id + p, q, -id, id);
  add("v2", id + q, p, -id, id);
  add("v4", id + p, -q, id, id);
  add("v5", id, q, -id, id + p);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()));
  if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() >= -psd_tol) {
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd s = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXcd big(2 * n, 2 * n);
    Complex ii(0.0, 1.0);
    big.topLeftCorner(n, n) = (id + p).cast<Complex>();
    big.topRightCorner(n, n) = ii * s.cast<Complex>();
    big.bottomLeftCorner(n, n) = ii * s.cast<Complex>();
    big.bottomRightCorner(n, n) = id.cast<Complex>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(big);
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) acc += std::log(lu.matrixLU()(i, i));
    if (lu.permutationP().determinant() < 0) acc += Complex(0.0, kPi);
    double wrapped = std::remainder(acc.imag(), 2.0 * kPi);
    out.names.emplace_back("v3");
    out.logdets.push_back(acc.real());
    out.max_defect = std::max(out.max_defect, std::abs(wrapped));
    out.v3_used = true;
  }

  for (double ld : out.logdets)
    out.max_defect = std::max(out.max_defect, std::abs(ld - out.direct));
  return out;
}

TruncationStudy truncation_study(const Potential& q, const std::vector<double>& bs, double x,
                                 double t, const KGridParams& grid, const SolveOptions& opt) {
  if (bs.size() < 2) throw NumericalError("truncation_study: need at least 2 truncations");
  for (std::size_t i = 1; i < bs.size(); ++i)
    if (!(bs[i] < bs[i - 1])) throw NumericalError("truncation_study: bs must decrease");

  TruncationStudy st;
  st.b = bs;
  for (double b : bs) {
    // The cut at b imprints e^{2ikb} fringes on R_b; keep the k grid dense
    // enough to resolve them or the deltas bottom out at aliasing noise.
    KGridParams g = grid;
    g.n_half = std::max(g.n_half, static_cast<int>(std::ceil(170.0 * std::abs(b))));
    ScatteringData data = compute_scattering(q.truncate_left(b), g, opt.scat);
    st.u_b.push_back(u_point(data, x, t, opt).u);
  }
  st.u_ref = st.u_b.back();
  for (std::size_t j = 0; j + 1 < bs.size(); ++j)
    st.delta.push_back(std::abs(st.u_b[j + 1] - st.u_b[j]));
  for (std::size_t j = 0; j + 1 < st.delta.size(); ++j)
    if (st.delta[j + 1] > st.delta[j] * (1.0 + 1e-9) + 1e-12) st.monotone = false;
  return st;
}

SmoothingProbe smoothing_probe(const ScatteringData& data, double x, double t, int max_order,
                               double h0, const SolveOptions& opt) {
  if (max_order < 1 || max_order > 5) throw NumericalError("smoothing_probe: order in 1..5");
  if (!(h0 > 0.0)) throw NumericalError("smoothing_probe: need h0 > 0");
  // 2nd-order central stencils on offsets -3..3, scale 1/h^m.
  static const double st[5][7] = {
      {0, 0, -0.5, 0, 0.5, 0, 0},
      {0, 0, 1, -2, 1, 0, 0},
      {0, -0.5, 1, 0, -1, 0.5, 0},
      {0, 1, -4, 6, -4, 1, 0},
      {-0.5, 2, -2.5, 0, 2.5, -2, 0.5},
  };

  SmoothingProbe pr;
  pr.h_levels = {h0, 0.5 * h0, 0.25 * h0};

  // One deduplicated field sweep over every stencil point of every level.
  std::map<long long, double> values;  // key: round(xi / (h0/4) * 4) at finest resolution
  auto key = [&](double xi) { return std::llround((xi - x) / (0.25 * h0) * 4.0); };
  std::vector<double> xs;
  for (double h : pr.h_levels)
    for (int j = -3; j <= 3; ++j) {
      double xi = x + j * h;
      if (!values.count(key(xi))) {
        values[key(xi)] = 0.0;
        xs.push_back(xi);
      }
    }
  std::sort(xs.begin(), xs.end());
  std::vector<double> us = u_field(data, xs, t, opt);
  for (std::size_t i = 0; i < xs.size(); ++i) values[key(xs[i])] = us[i];

  pr.deriv.assign(max_order, std::vector<double>(3, 0.0));
  for (int m = 1; m <= max_order; ++m)
    for (int lvl = 0; lvl < 3; ++lvl) {
      double h = pr.h_levels[lvl];
      double acc = 0.0;
      for (int j = -3; j <= 3; ++j) {
        double c = st[m - 1][j + 3];
        if (c != 0.0) acc += c * values.at(key(x + j * h));
      }
      pr.deriv[m - 1][lvl] = acc / std::pow(h, m);
    }

  pr.convergent = true;
  for (int m = 1; m <= max_order; ++m) {
    double d0 = pr.deriv[m - 1][0], d1 = pr.deriv[m - 1][1], d2 = pr.deriv[m - 1][2];
    pr.final_value.push_back(d2);
    double num = std::abs(d1 - d2), den = std::abs(d0 - d1);
    double scale = std::max({1.0, std::abs(d0), std::abs(d1), std::abs(d2)});
    if (den < 1e-9 * scale) {
      pr.ratio.push_back(0.0);  // already at the noise floor
      continue;
    }
    double r = num / den;
    pr.ratio.push_back(r);
    if (r > 0.6) pr.convergent = false;
  }
  return pr;
}

}  // namespace kdv
