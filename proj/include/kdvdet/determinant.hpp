#pragma once
// The determinant route: u(x,t) = -2 d^2/dx^2 log det(I + M(x,t)), evaluated
// through the resolvent trace identities
//
//   d/dx  log det(I+M) = tr[(I+M)^{-1} M_x],
//   d^2/dx^2 log det(I+M) = tr[(I+M)^{-1} M_xx] - tr[((I+M)^{-1} M_x)^2],
//
// with an optional finite-difference cross check on log det itself. Side
// studies used by the validation suite live here too: block determinant
// embeddings, left-truncation convergence, and the smoothing probe.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kdvdet/hankel.hpp"
#include "kdvdet/scattering.hpp"

namespace kdv {

// log det(I + M) by LU; throws if the determinant is not positive.
double fredholm_logdet(const Eigen::MatrixXd& m);

struct SolveOptions {
  DiscretizationParams disc;
  ScatteringOptions scat;
  bool cross_check = false;  // 5-point second difference of log det + Richardson
  double fd_step = 1e-3;
};

struct UPoint {
  double u = 0.0;
  double logdet = 0.0;
  double fd_value = 0.0;  // cross-check estimate of u (when run)
  double fd_delta = 0.0;  // |u - fd_value|
  bool cross_checked = false;
};

UPoint u_point(const ScatteringData& data, double x, double t, const SolveOptions& opt = {});

// Field sweep, OpenMP over x. The serial variant runs the same per-point
// code without the parallel loop and must produce bitwise-equal output.
std::vector<double> u_field(const ScatteringData& data, const std::vector<double>& xs, double t,
                            const SolveOptions& opt = {});
std::vector<double> u_field_serial(const ScatteringData& data, const std::vector<double>& xs,
                                   double t, const SolveOptions& opt = {});

// Finite-difference KdV residual u_t - 6 u u_x + u_xxx on the interior of a
// uniform grid of n_x + 1 points, with fields at t - dt, t, t + dt.
struct ResidualReport {
  std::vector<double> x;
  std::vector<double> residual;
  double max_abs = 0.0;
};
ResidualReport kdv_residual(const ScatteringData& data, double x_lo, double x_hi, int n_x,
                            double t, double dt, const SolveOptions& opt = {});

// Block embeddings of det(I + P + Q): four real 2n x 2n forms
//   v1 = [[I+P, Q], [-I, I]]     v2 = [[I+Q, P], [-I, I]]
//   v4 = [[I+P, -Q], [I, I]]     v5 = [[I, Q], [-I, I+P]]
// plus the symmetric complex form v3 = [[I+P, iS], [iS, I]] with S = Q^{1/2}
// when Q is PSD. All must reproduce log det(I + P + Q).
struct BlockDeterminants {
  double direct = 0.0;
  std::vector<std::string> names;
  std::vector<double> logdets;
  bool v3_used = false;
  double max_defect = 0.0;
};
BlockDeterminants block_det_variants(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                                     double psd_tol = 1e-10);

// u at a fixed probe from left-truncations q * 1_{x > b}: bs must be strictly
// decreasing. Convergence is reported through successive deltas, the Cauchy
// increments of the truncation sequence.
struct TruncationStudy {
  std::vector<double> b;
  std::vector<double> u_b;
  double u_ref = 0.0;         // deepest truncation
  std::vector<double> delta;  // |u_b[j+1] - u_b[j]|, j < b.size() - 1
  bool monotone = true;       // deltas nonincreasing (small slack)
};
TruncationStudy truncation_study(const Potential& q, const std::vector<double>& bs, double x,
                                 double t, const KGridParams& grid = {},
                                 const SolveOptions& opt = {});

// Central-difference x-derivatives of u up to max_order at three step levels
// (h0, h0/2, h0/4); for each order the successive-difference ratio should
// approach 1/4 when the underlying field is smooth.
struct SmoothingProbe {
  std::vector<double> h_levels;
  std::vector<std::vector<double>> deriv;  // [order-1][level]
  std::vector<double> final_value;         // finest-level estimate per order
  std::vector<double> ratio;               // |d1-d2| / |d0-d1| per order
  bool convergent = false;
};
SmoothingProbe smoothing_probe(const ScatteringData& data, double x, double t,
                               int max_order = 5, double h0 = 0.25,
                               const SolveOptions& opt = {});

}  // namespace kdv
