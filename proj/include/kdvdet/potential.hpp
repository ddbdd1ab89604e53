#pragma once
// Initial-profile families for the half-bound-energy Schroedinger problem and
// the admissibility checks they must pass before entering the pipeline:
// a uniform local bound on the negative part, and a weighted L1 tail on the
// right. Profiles can be windowed (left truncation, restriction) without
// losing their closed-form description; windows compose.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdvdet/common.hpp"

namespace kdv {

// Closed interval with infinite endpoints allowed.
struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded() const { return lo > -kInf && hi < kInf; }
};

struct SechWell {
  double depth = -2.0;  // value at the center
  double width = 1.0;
  double center = 0.0;
};
struct SquareWell {
  double depth = -1.0;
  double lo = -1.0, hi = 1.0;
};
struct GaussianWell {
  double depth = -1.0;
  double center = 0.0;
  double sigma = 1.0;
};
// c * (1 + x)^(-p) for x > 0, zero to the left; p controls the decay rate and
// thereby how many weighted moments are finite.
struct SlowDecayTail {
  double c = -0.5;
  double p = 4.0;
};
// Bounded, non-decaying oscillation A sin(nu x) on the left half line, taken
// smoothly to zero on [-2, -1] (quintic smoothstep). Not integrable at -inf:
// usable only through truncate_left.
struct LeftOscillation {
  double amplitude = 0.3;
  double wavenumber = 2.0;
};
struct SampledProfile {
  std::vector<double> x;  // strictly increasing; zero outside the range
  std::vector<double> q;
};

class Potential;
Potential sum_of(std::vector<Potential> parts);

class Potential {
public:
  Potential() : Potential(Zero{}) {}

  struct Zero {};

  explicit Potential(Zero);
  explicit Potential(SechWell w);
  explicit Potential(SquareWell w);
  explicit Potential(GaussianWell w);
  explicit Potential(SlowDecayTail w);
  explicit Potential(LeftOscillation w);
  explicit Potential(SampledProfile w);

  // q(x) with the window applied; exact zero outside support. Safe to call
  // from concurrent workers.
  double operator()(double x) const;

  // Smallest interval outside which the profile vanishes identically.
  Interval support() const { return support_; }

  // Replaces q by q * 1_{x > b} (sharp cut, as used by the truncation flow).
  Potential truncate_left(double b) const;
  // Restriction to the window [lo, hi].
  Potential restrict(Interval w) const;
  // q shifted right by x0: returns q(. - x0).
  Potential shift(double x0) const;
  // Spatial reflection q(-x). Scattering data of the mirror is the
  // left/right-swapped data of q; the solver evaluates through it where the
  // direct representation is ill-conditioned.
  Potential mirror() const;

  // Right and left "halves" q * 1_{x>0}, q * 1_{x<=0}.
  Potential right_part() const { Interval w{0.0, kInf}; return restrict_open_lo(w); }
  Potential left_part() const { return restrict(Interval{-kInf, 0.0}); }

  // True if the profile decays fast enough on the given side for full-line
  // scattering (weighted L1); left-oscillation style profiles fail on the
  // left.
  bool integrable_left() const;

  // Locations where q or its low-order derivatives jump (well edges,
  // truncation cuts, sampling knots). ODE integrations split here.
  std::vector<double> breakpoints() const;

  // Human-readable family tag, also used in serialization and cache keys.
  std::string describe() const;
  // Canonical serialization of family + parameters + window (cache keys).
  std::string canonical() const;

  bool is_zero() const;

private:
  friend Potential sum_of(std::vector<Potential> parts);
  Potential restrict_open_lo(Interval w) const;  // q * 1_{x > w.lo, x <= w.hi}

  std::function<double(double)> eval_;   // bare family evaluator, no window
  Interval base_support_;                // support of the bare family
  std::vector<double> base_breaks_;      // non-smooth points in family coordinates
  Interval window_{-kInf, kInf};
  bool open_lo_ = false;                 // window excludes its lower endpoint
  double shift_ = 0.0;                   // evaluates family at x - shift_
  bool left_integrable_ = true;
  std::string tag_;
  std::string params_;                   // canonical parameter string
  std::vector<std::shared_ptr<const Potential>> parts_;  // non-empty for sums

  Interval support_;
  void refresh_support();
};

// sup over unit windows of the integral of the negative part; the admissible
// class demands this be finite, and for controlled profiles small. Scans
// window left endpoints on a uniform grid of the essential support.
double local_negative_bound(const Potential& q, double scan_step = 0.01);

// Weighted right-tail integral int_a^inf (1 + |x|)^N |q| dx.
double weighted_right_tail(const Potential& q, double a, double N);

struct AdmissibilityReport {
  double local_negative = 0.0;   // sup over unit windows
  double right_tail = 0.0;       // weighted tail from `a`
  double a = 0.0;
  double N = 2.5;
  bool left_ok = false;          // left side integrable (full-line ops legal)
  bool admissible = false;
};

AdmissibilityReport check_admissibility(const Potential& q, double N = 2.5, double a = 0.0);

}  // namespace kdv
