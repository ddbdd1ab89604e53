#include <doctest.h>

#include <cmath>

#include <kdvdet/potential.hpp>
#include <kdvdet/quadrature.hpp>

using namespace kdv;

TEST_CASE("sech well evaluates and reports support") {
  SechWell w;  // depth -2, width 1
  Potential q(w);
  CHECK(q(0.0) == doctest::Approx(-2.0));
  CHECK(q(1.3) == doctest::Approx(-2.0 * sqr(sech(1.3))));
  CHECK(q.support().lo == -kInf);
  CHECK(!q.is_zero());
  CHECK(Potential{}.is_zero());
}

TEST_CASE("local negative bound of the sech well is 4 tanh(1/2)") {
  // sup over unit windows of int 2 sech^2 = [2 tanh]_{c-1/2}^{c+1/2}, maximal
  // at c = 0.
  SechWell w;
  Potential q(w);
  CHECK(local_negative_bound(q) == doctest::Approx(4.0 * std::tanh(0.5)).epsilon(1e-4));
}

TEST_CASE("truncation cuts sharply and composes with windows") {
  SquareWell w;
  w.depth = -1.0;
  w.lo = -2.0;
  w.hi = 2.0;
  Potential q(w);
  Potential qb = q.truncate_left(-0.5);
  CHECK(qb(-0.6) == 0.0);
  CHECK(qb(-0.5) == 0.0);  // cut keeps x > b only
  CHECK(qb(-0.4) == doctest::Approx(-1.0));
  CHECK(qb.truncate_left(1.0)(0.0) == 0.0);
  CHECK(qb.support().lo == doctest::Approx(-0.5));

  Potential rp = q.right_part(), lp = q.left_part();
  CHECK(rp(-0.1) == 0.0);
  CHECK(rp(0.1) == doctest::Approx(-1.0));
  CHECK(lp(-0.1) == doctest::Approx(-1.0));
  CHECK(lp(0.1) == 0.0);
  // the two parts tile the line: q = q_+ + q_-
  for (double x : {-1.7, -0.3, 0.0, 0.4, 1.9}) CHECK(rp(x) + lp(x) == doctest::Approx(q(x)));
}

TEST_CASE("shift and mirror transform the argument") {
  GaussianWell g{-1.1, 0.7, 0.4};
  Potential q(g);
  Potential qs = q.shift(2.0);
  CHECK(qs(2.7 + 0.3) == doctest::Approx(q(0.7 + 0.3)));
  Potential qm = q.mirror();
  for (double x : {-1.5, -0.2, 0.9}) CHECK(qm(x) == doctest::Approx(q(-x)));
  // mirror of mirror is the original
  Potential qmm = qm.mirror();
  for (double x : {-1.5, 0.9}) CHECK(qmm(x) == doctest::Approx(q(x)));
}

TEST_CASE("sums evaluate part-wise and support unions") {
  Potential q = sum_of({Potential(GaussianWell{-0.9, -2.5, 0.8}),
                        Potential(GaussianWell{-0.7, 2.0, 0.6})});
  CHECK(q(-2.5) == doctest::Approx(-0.9 - 0.7 * std::exp(-sqr(-4.5) / (2 * sqr(0.6)))));
  CHECK(q(2.0) == doctest::Approx(-0.7 - 0.9 * std::exp(-sqr(4.5) / (2 * sqr(0.8)))));
  CHECK(q.support().lo < -5.0);
  CHECK(q.support().hi > 4.0);
}

TEST_CASE("left oscillation is flagged non-integrable on the left") {
  LeftOscillation osc;
  Potential q(osc);
  CHECK(!q.integrable_left());
  CHECK(q.truncate_left(-9.0).integrable_left());
  // smoothstep window: zero right of -1, full amplitude left of -2
  CHECK(q(-0.5) == 0.0);
  CHECK(std::abs(q(-20.0)) == doctest::Approx(0.3 * std::abs(std::sin(2.0 * -20.0))));
}

TEST_CASE("admissibility report splits the two obstructions") {
  AdmissibilityReport ok = check_admissibility(Potential(SechWell{}));
  CHECK(ok.admissible);
  CHECK(ok.left_ok);
  CHECK(ok.right_tail < 60.0);  // (1+x)^{2.5}-weighted sech^2 tail is finite

  AdmissibilityReport osc = check_admissibility(Potential(LeftOscillation{}));
  CHECK(!osc.left_ok);                    // bounded oscillation: no left decay
  CHECK(osc.local_negative < 0.62);       // ... but locally uniformly small
  CHECK(osc.local_negative > 0.1);

  AdmissibilityReport fat = check_admissibility(Potential(SlowDecayTail{-0.5, 1.2}), 2.5);
  CHECK(!fat.admissible);  // (1+x)^{-1.2} tail: weighted moment diverges
}

TEST_CASE("sampled profiles interpolate and vanish outside the knots") {
  SampledProfile sp;
  for (int i = 0; i <= 40; ++i) {
    double x = -2.0 + 0.1 * i;
    sp.x.push_back(x);
    sp.q.push_back(-std::exp(-x * x));
  }
  Potential q(sp);
  CHECK(q(-2.5) == 0.0);
  CHECK(q(2.5) == 0.0);
  // piecewise-linear on a 0.1 grid: h^2/8 interpolation error
  CHECK(q(0.55) == doctest::Approx(-std::exp(-0.55 * 0.55)).epsilon(2e-3));
  CHECK(q(-2.0) == doctest::Approx(-std::exp(-4.0)));
}

TEST_CASE("breakpoints track edges, cuts, and shifts") {
  SquareWell w;
  w.depth = -1.0;
  w.lo = -2.0;
  w.hi = 2.0;
  Potential q(w);
  auto br = q.breakpoints();
  REQUIRE(br.size() == 2);
  CHECK(br[0] == doctest::Approx(-2.0));
  CHECK(br[1] == doctest::Approx(2.0));

  auto brc = q.truncate_left(-0.5).breakpoints();
  REQUIRE(brc.size() == 2);  // the lo edge is gone, the cut replaces it
  CHECK(brc[0] == doctest::Approx(-0.5));
  CHECK(brc[1] == doctest::Approx(2.0));

  auto brs = q.shift(10.0).breakpoints();
  REQUIRE(brs.size() == 2);
  CHECK(brs[0] == doctest::Approx(8.0));
  CHECK(brs[1] == doctest::Approx(12.0));
}

TEST_CASE("canonical keys separate windows, describe names the family") {
  Potential a(SechWell{});
  Potential b = a.truncate_left(-3.0);
  CHECK(a.describe() == b.describe());  // same family either way
  CHECK(a.canonical() == Potential(SechWell{}).canonical());
  CHECK(a.canonical() != b.canonical());
  CHECK(b.canonical() == a.truncate_left(-3.0).canonical());
  Potential s = sum_of({a, Potential(GaussianWell{})});
  CHECK(s.describe().find("sum") == 0);
}
