#pragma once
// Filon-type quadrature for Fourier integrals with a cubic phase,
//
//   I_ch(s) = int_a^b A_ch(k) exp(i (c3 k^3 + c1 k + s k)) dk,
//
// evaluated for many shifts s and several amplitude channels at once.
//
// The cubic phase is linearized about each panel center; the residual
// (curvature) factor is folded into the amplitude, which is represented by a
// Chebyshev interpolant per panel. Panel widths are chosen so the residual
// phase stays below a fixed budget, then halved until the interpolant's
// coefficient tail is negligible, so the representation converges no matter
// how large c3, s, the panel-center slope, or the amplitude's own variation
// get. What remains per
// (panel, s) is a pure linear oscillator integral: for small |omega| an
// embedded Gauss-Legendre rule is exact enough; for large |omega| the
// Chebyshev moments int T_n(xi) e^(i omega xi) dxi follow a forward
// recurrence that is stable precisely when |omega| exceeds the degree.
//
// All t >= 0 cases of the time-evolved reflection kernel reduce to this one
// code path (t = 0 is the degenerate c3 = 0 case), as do the shifted-contour
// integrals for the analytic symbol part.

#include <functional>
#include <vector>

#include "kdvdet/common.hpp"

namespace kdv {

using AmpFn = std::function<Complex(double)>;

struct OscOptions {
  double rad_budget = 1.0;   // max residual cubic phase per panel, radians
  int n_cheb = 14;           // Chebyshev-Lobatto points per panel
  double panel_max = 2.0;    // hard cap on panel width
  // Panels are halved until the last two Chebyshev coefficients fall below
  // this fraction of the panel's largest one, so the amplitude is resolved
  // regardless of which downstream branch (GL or moments) consumes it.
  double cheb_tail_tol = 1e-10;
  int max_split_depth = 8;
  // Optional position-dependent cap on panel width (amplitude variation
  // scale). Return +inf to defer to panel_max.
  std::function<double(double)> local_cap;
  long max_panels = 400000;
};

class OscillatorEngine {
public:
  OscillatorEngine(std::vector<AmpFn> channels, double c3, double c1, double a, double b,
                   OscOptions opt = {});

  int num_channels() const { return n_ch_; }
  std::size_t num_panels() const { return panels_.size(); }

  // Fills out[ch] with I_ch(s). out must have num_channels() entries.
  void eval(double s, Complex* out) const;

  // Convenience: result[ch][j] = I_ch(s[j]). Parallelized over s when the
  // caller is not already inside an OpenMP region.
  std::vector<std::vector<Complex>> eval_many(const std::vector<double>& s) const;

  // Crude boundary estimate |A(b)| / |phase'(b) + s| + same at a; useful as a
  // truncation-tail indicator for integrands cut at finite b.
  double boundary_estimate(double s) const;

private:
  struct Panel {
    double kc, half, theta_c, slope0;
    std::vector<Complex> cheb;  // n_ch * n_cheb Chebyshev coefficients
    std::vector<Complex> glw;   // n_ch * n_gl amplitude values times GL weights
  };

  void add_panel(double k0, double k1, const std::vector<AmpFn>& channels,
                 const OscOptions& opt, int depth);
  double build_panel(double k0, double k1, const std::vector<AmpFn>& channels);

  int n_ch_;
  int n_cheb_;
  double c3_, c1_, a_, b_;
  std::vector<Panel> panels_;
  std::vector<double> gl_nodes_, gl_weights_;  // embedded rule on [-1,1]
  std::vector<double> cheb_nodes_;             // Lobatto points on [-1,1]
  std::vector<double> dct_;                    // n_cheb x n_cheb value->coefficient map
  double amp_at_a_ = 0.0, amp_at_b_ = 0.0;     // channel-0 magnitudes at the ends
};

}  // namespace kdv
