#pragma once
// Time-evolved Hankel symbol and its Nystrom discretization.
//
// The kernel evaluated here is
//
//   F(s; x, t) = sum_n c_n exp(8 kn^3 t - 2 kn x - kn s)
//              + (1/2pi) int R(k) exp(i (8 k^3 t + 2 k x + k s)) dk,
//
// together with its x- and t-derivatives, which carry extra factors
// (-2 kn)^m (8 kn^3)^n on the discrete part and (2ik)^m (8ik^3)^n under the
// integral. The analytic remainder G = R - R_+ can instead be integrated over
// the line Im k = h above all poles, where the Gaussian factor
// exp(-24 t h u^2) makes the integrand tame for t > 0. Moving the contour
// across the poles of G picks up the full-problem residues i c_n at i kn and
// the right-piece residues -i c_n^+ at i kn^+, so the three symbols obey
//
//   F(full) = F(right-piece poles + R_+ on the real line) + F(contour),
//
// which is the operator identity checked by symbol_split_check.

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "kdvdet/common.hpp"
#include "kdvdet/scattering.hpp"
#include "kdvdet/spline.hpp"

namespace kdv {

// Reflection coefficient interpolated on [0, k_max]: spline through the
// positive-k samples plus an extrapolated value at k = 0 (quadratic through
// the first three nodes, forced real, clamped to [-1, 1]); conjugate
// symmetric for k < 0, zero beyond k_max.
class ReflectionChannel {
public:
  ReflectionChannel() = default;
  explicit ReflectionChannel(const CoefficientGrid& grid);
  ReflectionChannel(std::vector<double> k_pos, std::vector<Complex> r_pos);

  Complex operator()(double k) const;
  bool empty() const { return knots_.empty(); }
  double k_max() const { return knots_.empty() ? 0.0 : knots_.back(); }
  double r_at_zero() const { return r0_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Complex>& values() const { return vals_; }

private:
  void build();
  std::vector<double> knots_;  // 0 = extrapolated node, then the samples
  std::vector<Complex> vals_;
  ComplexSpline spl_;
  double r0_ = 0.0;
};

// G(u + i h) sampled across [-u_max, u_max] on the shifted contour.
struct ContourData {
  double h = 0.0;
  double u_max = 0.0;
  std::vector<double> us;
  std::vector<Complex> gs;
  ComplexSpline spline;
  // max |G(-u + ih) - conj G(u + ih)|: a genuine accuracy diagnostic, since
  // the two sides come from independent integrations.
  double symmetry_defect = 0.0;
};

// Samples G on the line Im k = h with h = max kappa + 1, out to where the
// Gaussian damping at the smallest intended time pushes the integrand below
// tol. n_samples = 0 picks a density matched to the spline order.
ContourData build_contour(const Potential& q, const std::vector<BoundState>& states,
                          double t_min, double tol = 1e-13, int n_samples = 0,
                          const ScatteringOptions& opt = {});

struct HankelSymbol {
  double x = 0.0, t = 0.0;
  std::vector<BoundState> poles;
  ReflectionChannel reflection;  // full R, or R_+ of the right piece
  std::shared_ptr<const ContourData> contour;  // analytic part, non-null on Phi
};

HankelSymbol assemble_symbol(const ScatteringData& data, double x, double t);
// The analytic-part symbol Phi alone: no poles, no real-line reflection.
HankelSymbol phi_symbol(std::shared_ptr<const ContourData> contour, double x, double t);

struct KernelOrder {
  int m = 0, n = 0;  // d^m/dx^m d^n/dt^n
};

struct DiscretizationParams {
  double L_s = 0.0;     // 0: auto from the pole decay rates and t
  int n_quad = 96;
  double tail_cut = 1e-12;      // amplitude threshold for the k cutoff
  double r_floor = 1e-11;       // |R| samples below this are solver noise
  double s_interp_factor = 1.3; // Chebyshev s-interpolation above this ratio
  bool force_direct_s = false;  // disable s-interpolation (for tests)
  double rad_budget = 1.0;      // oscillatory panel budget
  int n_cheb = 14;
  int gap_nodes = 16;           // Gauss rule on the [0, k_min] stub
};

struct KernelProfile {
  std::vector<KernelOrder> orders;
  std::vector<std::vector<double>> values;  // [order][s index]
  double k_hi_eff = 0.0;    // reflection integral truncated here
  double u_eff = 0.0;       // contour integral truncated here
  double max_imag = 0.0;    // contour route: largest imaginary residue seen
  double tail_estimate = 0.0;
};

KernelProfile kernel_profile(const HankelSymbol& sym, const std::vector<KernelOrder>& orders,
                             const std::vector<double>& s, const DiscretizationParams& par = {});

struct HankelDiscretization {
  std::vector<double> s, w;  // Gauss-Legendre rule on [0, L_s]
  std::vector<KernelOrder> orders;
  std::vector<Eigen::MatrixXd> mats;  // M_ij = sqrt(w_i w_j) F(s_i + s_j), per order
  double L_s = 0.0;
  double k_hi_eff = 0.0;
  double max_imag = 0.0;
  double tail_value = 0.0;  // |F(2 L_s)|, truncation indicator
};

// The automatic s-window used by nystrom_matrix when L_s = 0: wide enough
// for the slowest pole decay and for the pole amplitudes at this (x, t).
double auto_s_window(const HankelSymbol& sym);

HankelDiscretization nystrom_matrix(const HankelSymbol& sym,
                                    const std::vector<KernelOrder>& orders,
                                    const DiscretizationParams& par = {});

// Discretizes the full symbol, the right-piece symbol, and the analytic part
// on one Gauss grid and measures how far M(full) - M(plus) - M(Phi) is from
// zero, both in spectral norm and pointwise in the kernel at the grid nodes.
struct SplitCheckResult {
  std::vector<double> s;
  std::vector<double> f_full, f_plus, f_phi;
  double max_kernel_diff = 0.0;
  double op_defect = 0.0;
  double L_s = 0.0;
};
SplitCheckResult symbol_split_check(const ScatteringData& sd, const ScatteringData& sd_plus,
                                    std::shared_ptr<const ContourData> contour, double x,
                                    double t, const DiscretizationParams& par = {});

// Spectrum of the symmetrized Nystrom matrix with trace-class diagnostics:
// eigenvalues by decreasing magnitude, cumulative log det partial sums, and
// the geometric decay ratio fitted to the tail.
struct SingularValueReport {
  std::vector<double> lambda;
  std::vector<double> partial_logdet;
  double logdet = 0.0;
  double trace_norm = 0.0;
  double tail_ratio = 0.0;
};
SingularValueReport singular_value_report(const Eigen::MatrixXd& M);

// The analytic-part symbol off the contour: for Im k < h,
//   Phi(k) = -(1/2pi i) int G(u+ih) exp(i(8t(u+ih)^3 + 2x(u+ih))) / (u+ih-k) du.
Complex phi_analytic(const ContourData& c, double x, double t, Complex k);

// Row-major binary matrix I/O (two little-endian uint64 dims, then doubles).
void write_matrix_bin(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_bin(const std::string& path);

}  // namespace kdv
