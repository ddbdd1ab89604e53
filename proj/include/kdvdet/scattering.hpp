#pragma once
// Direct scattering for -psi'' + q psi = k^2 psi with decaying q.
//
// Everything is computed in the "stripped" variables y_+ = e^{-ikx} psi_+ and
// y_- = e^{+ikx} psi_-, whose ODEs are integrated in the direction that keeps
// the parasitic mode decaying for Im k >= 0 (right-to-left for y_+,
// left-to-right for y_-). Wronskian combinations of the stripped variables
// are free of the exponential prefactors, so transmission, both reflections
// and the bound-state search never touch overflowing quantities.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdvdet/common.hpp"
#include "kdvdet/potential.hpp"

namespace kdv {

struct KGridParams {
  double k_min = 1e-3;
  double k_max = 40.0;
  int n_half = 1024;  // nodes per sign; sinh-spaced, k = 0 excluded
};

std::vector<double> sinh_k_grid(const KGridParams& p);  // positive half, ascending

struct ScatteringOptions {
  double tail_tol = 1e-12;      // weighted-tail mass allowed beyond the window
  double ode_rel_tol = 1e-11;
  double ode_abs_tol = 1e-13;
  double wronskian_floor = 1e-12;
  double denominator_floor = 1e-8;  // for 1 - L_+ R_- in the analytic part
  double kappa_floor = 1e-4;        // bound states weaker than this are rejected
  double kappa_tol = 1e-12;
  double retry_shift = 0.014142135623730951;  // applied on wronskian-floor failure
};

struct BoundState {
  double kappa;  // decay rate, k = i kappa
  double c;      // symbol pole coefficient: inverse squared L2 norm of psi_+
};

struct ScatteringTriple {
  Complex T, R, L;
  Complex wronskian;  // stripped-variable Wronskian, diagnostics
};

// Integration window [lo, hi] outside which the weighted tail of q is below
// tol. Throws for profiles that are not integrable on the left.
Interval scattering_window(const Potential& q, double tail_tol);

// Stripped Jost solution y and y' at x_eval (y_+ integrated from the right,
// y_- from the left). Valid for Im k >= 0.
struct JostValue {
  Complex y, yp;
};
JostValue jost_right_stripped(const Potential& q, Complex k, double x_eval, double x_start,
                              const ScatteringOptions& opt = {});
JostValue jost_left_stripped(const Potential& q, Complex k, double x_eval, double x_start,
                             const ScatteringOptions& opt = {});

// Jost solutions psi_+ (resp. psi_-) evaluated on an ascending grid.
// Overflow-safe only while |Im k| * |x| stays moderate; intended for plots
// and tests at real k or small kappa.
std::vector<Complex> jost_right(const Potential& q, Complex k, const std::vector<double>& xs,
                                const ScatteringOptions& opt = {});
std::vector<Complex> jost_left(const Potential& q, Complex k, const std::vector<double>& xs,
                               const ScatteringOptions& opt = {});

// T, R, L at one real k > 0 from two-sided Wronskians.
ScatteringTriple scattering_triple(const Potential& q, double k, const Interval& window,
                                   const ScatteringOptions& opt = {});

class CoefficientGrid {
public:
  std::vector<double> k;  // full symmetric grid, ascending, zero excluded
  std::vector<Complex> R, T, L;
  double unitarity_defect = 0.0;  // max | |R|^2 + |T|^2 - 1 | over the grid
};

// Coefficients over the symmetric sinh grid; negative-k values are the
// conjugates of their mirrors by construction. OpenMP over nodes; the
// _serial variant is the reference implementation and returns bit-identical
// values.
CoefficientGrid scattering_coefficients(const Potential& q, const KGridParams& grid,
                                        const ScatteringOptions& opt = {});
CoefficientGrid scattering_coefficients_serial(const Potential& q, const KGridParams& grid,
                                               const ScatteringOptions& opt = {});

// All bound states kappa_1 > kappa_2 > ... with pole coefficients. The root
// count of the Wronskian is validated against a Sturm-sequence count on a
// box discretization; disagreement after refinement throws.
std::vector<BoundState> bound_states(const Potential& q, const ScatteringOptions& opt = {});

struct ScatteringData {
  CoefficientGrid grid;
  std::vector<BoundState> states;
  double applied_shift = 0.0;  // nonzero when the wronskian-floor retry fired
  std::string source;          // canonical profile description
  KGridParams kgrid;
  // Data of the mirrored profile q(-x), attached when q has bound states and
  // decays on the left. The pole amplitudes grow like e^{-2 kappa x}, so deep
  // on the left the direct determinant loses ~e^{-2 kappa x} eps absolute;
  // there the solver evaluates the mirrored representation at (-x, -t),
  // which is exact by the x -> -x, t -> -t invariance of the flow.
  std::shared_ptr<const ScatteringData> mirror;
};

ScatteringData compute_scattering(const Potential& q, const KGridParams& grid = {},
                                  const ScatteringOptions& opt = {});

// Scattering data of the one-sided pieces entering the analytic symbol part:
// T_+, L_+ of the right half q_+ = q 1_{x>0} and R_- of the left half, all at
// one (possibly complex, Im k >= 0) wavenumber. The left piece is evaluated
// by the Weyl route (left-to-right integration), which stays stable at
// complex k for arbitrarily deep truncations.
struct PieceAmplitudes {
  Complex T_plus, L_plus, R_minus;
  Complex G;  // T_+^2 R_- / (1 - L_+ R_-)
};
PieceAmplitudes scattering_pieces(const Potential& q, Complex k, const ScatteringOptions& opt = {});

struct ReflectionSplit {
  std::vector<double> k;  // positive half grid
  std::vector<Complex> R_full, R_plus, G, T_plus, L_plus, R_minus;
  double max_defect = 0.0;  // max |R - R_+ - G|
};

// Additive split of the full reflection into the right-piece reflection and
// the analytic remainder G, with the defect reported.
ReflectionSplit split_reflection(const Potential& q, const std::vector<double>& k_nodes,
                                 const ScatteringOptions& opt = {});

// Weyl m-function of the left half line at spectral points lambda (Im >= 0),
// by Riccati integration from x_left with the outgoing free initial value;
// falls back to normalized linear integration past Riccati poles. Also
// returns the induced reflection R = (i lam - m) / (i lam + m) and a
// convergence indicator: max |m(x_left) - m(2 x_left)|.
struct MFunctionResult {
  std::vector<Complex> m, R;
  double convergence_delta = 0.0;
};
MFunctionResult m_function_left(const Potential& q, const std::vector<Complex>& lambdas,
                                double x_left, const ScatteringOptions& opt = {});

// Triangular-kernel representation of the right-piece reflection:
// R_+ = T_+ (G0 / 2ik + G1 / (2ik)^2) with G0 the half-line Fourier transform
// of q_+ and G1 that of Q', Q built from the transformation kernel B.
struct RPlusRepresentation {
  std::vector<double> k;            // evaluation grid (positive)
  std::vector<Complex> R_direct;    // one-sided Wronskian route
  std::vector<Complex> R_recon;     // representation route
  std::vector<Complex> G0, G1;
  double max_defect = 0.0;          // max |R_direct - R_recon|
  // Triangular grid data for inspection/tests.
  double a = 0.0;                   // effective support radius of q_+
  int n = 0;                        // grid subdivisions
  std::vector<double> y;            // grid points 0..a
  std::vector<double> Q, Qp;        // Q and Q' on the grid
  std::vector<double> B0;           // B(x, 0) on the grid
  double max_B = 0.0;
  // Pointwise bound checks (Deift-Trubowitz style): worst ratios, <= 1 + eps
  // when the computation is healthy.
  double bound_ratio_B = 0.0, bound_ratio_Qp = 0.0;
};
RPlusRepresentation r_plus_representation(const Potential& q, const std::vector<double>& k_nodes,
                                          int n_grid = 512, const ScatteringOptions& opt = {});

// B(x,y) on the triangular grid (exposed for tests).
struct TriangularKernel {
  double a = 0.0;
  int n = 0;
  // row-major (n+1)x(n+1), entry (i,j) = B(x_i, y_j), zero for i + j > n
  std::vector<double> B;
  std::vector<double> dyB;  // same layout, d/dy B
  double h() const { return a / n; }
  double at(int i, int j) const { return B[static_cast<std::size_t>(i) * (n + 1) + j]; }
};
TriangularKernel transformation_kernel(const Potential& q_plus, double a, int n);

// G(u + i h) on the shifted contour, for the analytic symbol part.
std::vector<Complex> contour_G(const Potential& q, double h, const std::vector<double>& us,
                               const ScatteringOptions& opt = {});

}  // namespace kdv
