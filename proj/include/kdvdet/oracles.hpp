#pragma once
// Independent reference implementations used to validate the pipeline. These
// deliberately share no numerical machinery with the production modules: the
// scattering reference uses algebraic transfer matrices, the spectral
// reference a tridiagonal Sturm-sequence eigensolver, and the time-evolution
// reference a pseudo-spectral split-step integrator.

#include <vector>

#include "kdvdet/common.hpp"
#include "kdvdet/potential.hpp"

namespace kdv::oracle {

// Single right-moving soliton of u_t - 6 u u_x + u_xxx = 0:
// u(x,t) = -2 kappa^2 sech^2(kappa (x - 4 kappa^2 t) - x0).
double soliton_exact(double kappa, double x0, double x, double t);

struct PiecewiseConstant {
  std::vector<double> edges;   // n+1 breakpoints, increasing
  std::vector<double> values;  // n slab values
};

struct ScatteringTriple {
  Complex T, R, L;  // transmission, right and left reflection
};

// Exact (up to roundoff) scattering coefficients of a piecewise-constant
// profile via 2x2 slab transfer matrices. Valid for real k != 0.
ScatteringTriple transfer_matrix_scattering(const PiecewiseConstant& q, double k);

// Piecewise-constant sampling of an arbitrary profile (midpoint values on a
// uniform slab grid), for use with the transfer-matrix reference.
PiecewiseConstant sample_piecewise(const Potential& q, double lo, double hi, int n_slabs);

// All negative Dirichlet eigenvalues of -psi'' + q psi on [a, b], ascending.
// Tridiagonal central differences, Sturm-sequence bisection; eigenvalues are
// Richardson-extrapolated from grids n and 2n when richardson is set.
std::vector<double> schrodinger_eigs(const Potential& q, double a, double b, int n,
                                     bool richardson = true);

// Decay rates kappa_j = sqrt(-E_j), descending (ground state first).
std::vector<double> schrodinger_bound_kappas(const Potential& q, double a, double b, int n);

struct SplitStepResult {
  std::vector<double> u;      // final profile on the input grid
  double mass_drift;          // |int u dx (final) - int u dx (initial)|
  double max_abs;             // max |u| over the run (blow-up diagnostic)
};

// Pseudo-spectral Strang split-step for u_t = 6 u u_x - u_xxx on a periodic
// box of length L sampled at n points (u0[j] at x_j = -L/2 + j L/n). The
// linear flow is exact in Fourier space; the nonlinear half-steps use a
// midpoint rule with 2/3 dealiasing. Throws on blow-up.
SplitStepResult split_step_kdv(const std::vector<double>& u0, double box_length, double dt,
                               long n_steps);

}  // namespace kdv::oracle
