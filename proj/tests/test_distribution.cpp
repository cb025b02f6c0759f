#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pvd/distribution.hpp"

using namespace pvd;
using doctest::Approx;

namespace {

OutcomeDistribution three_point(double a, double b, double c) {
  OutcomeDistribution d = OutcomeDistribution::exact("t");
  d.add("a", a);
  d.add("b", b);
  d.add("c", c);
  d.set_total(1.0);
  return d;
}

}  // namespace

TEST_SUITE("distribution") {

TEST_CASE("raw masses, totals and probabilities") {
  OutcomeDistribution d = OutcomeDistribution::exact("t");
  d.add("x", 1.0);
  d.add("x", 2.0);
  d.add(kBottom, 1.0);
  d.set_total(4.0);
  CHECK(d.prob("x") == Approx(0.75));
  CHECK(d.bottom_prob() == Approx(0.25));
  CHECK(d.prob("missing") == 0.0);
  CHECK(d.valid_raw_mass() == Approx(3.0));
  CHECK_NOTHROW(d.check());

  CHECK_THROWS_AS(d.add("x", -0.5), std::invalid_argument);
  CHECK_THROWS_AS(d.set_total(0.0), std::invalid_argument);
  CHECK_THROWS_AS(d.samples(), std::logic_error);

  OutcomeDistribution e = OutcomeDistribution::empirical("t");
  e.add("x", 7.0);
  e.set_total(7.0);
  CHECK(e.samples() == 7);
}

TEST_CASE("check rejects inconsistent masses") {
  OutcomeDistribution d = OutcomeDistribution::exact("t");
  d.add("x", 0.5);
  d.set_total(1.0);
  CHECK_THROWS_AS(d.check(), std::logic_error);  // sums to 0.5, total 1

  OutcomeDistribution b = OutcomeDistribution::exact("t");
  b.add_block("x", 0.5, Mat::Identity(2, 2) * 0.1);  // trace 0.2 != 0.5
  b.add(kBottom, 0.5);
  b.set_total(1.0);
  CHECK_THROWS_AS(b.check(), std::logic_error);
}

TEST_CASE("tv distance hand values") {
  const OutcomeDistribution p = three_point(0.5, 0.3, 0.2);
  const OutcomeDistribution q = three_point(0.2, 0.3, 0.5);
  CHECK(tv_distance(p, q) == Approx(0.3));
  CHECK(tv_distance(p, p) == Approx(0.0));

  // Point masses on different keys are at distance 1.
  OutcomeDistribution pa = OutcomeDistribution::exact("t");
  pa.add("a", 1.0);
  pa.set_total(1.0);
  OutcomeDistribution pb = OutcomeDistribution::exact("t");
  pb.add("b", 1.0);
  pb.set_total(1.0);
  CHECK(tv_distance(pa, pb) == Approx(1.0));

  OutcomeDistribution other = OutcomeDistribution::exact("u");
  other.add("a", 1.0);
  other.set_total(1.0);
  CHECK_THROWS_AS(tv_distance(pa, other), std::invalid_argument);
}

TEST_CASE("exact equality is raw-mass equality, not probability equality") {
  OutcomeDistribution p = OutcomeDistribution::exact("t");
  p.add("x", 1.0);
  p.add(kBottom, 1.0);
  p.set_total(2.0);

  OutcomeDistribution q = OutcomeDistribution::exact("t");
  q.add("x", 1.0);
  q.add(kBottom, 1.0);
  q.set_total(2.0);
  CHECK(exactly_equal(p, q));

  // Same probabilities at twice the scale: equal in TV, not raw-equal.
  OutcomeDistribution r = OutcomeDistribution::exact("t");
  r.add("x", 2.0);
  r.add(kBottom, 2.0);
  r.set_total(4.0);
  CHECK(tv_distance(p, r) == 0.0);
  CHECK_FALSE(exactly_equal(p, r));

  q.add("y", 1e-300);
  CHECK_FALSE(exactly_equal(p, q));
}

TEST_CASE("residual blocks enter through the trace norm") {
  Mat b0 = Mat::Zero(2, 2);
  b0(0, 0) = 0.5;
  Mat b1 = Mat::Zero(2, 2);
  b1(1, 1) = 0.5;

  OutcomeDistribution p = OutcomeDistribution::exact("t");
  p.add_block("k", 0.5, b0);
  p.add(kBottom, 0.5);
  p.set_total(1.0);
  CHECK_NOTHROW(p.check());

  OutcomeDistribution q = OutcomeDistribution::exact("t");
  q.add_block("k", 0.5, b1);
  q.add(kBottom, 0.5);
  q.set_total(1.0);

  // Same weight on "k" but orthogonal residuals: the whole 0.5 separates.
  CHECK(tv_distance(p, q) == Approx(0.5));
  CHECK_FALSE(exactly_equal(p, q));

  OutcomeDistribution p2 = OutcomeDistribution::exact("t");
  p2.add_block("k", 0.5, b0);
  p2.add(kBottom, 0.5);
  p2.set_total(1.0);
  CHECK(exactly_equal(p, p2));
  CHECK(tv_distance(p, p2) == 0.0);
}

TEST_CASE("conditional tv renormalizes away the bottom outcome") {
  OutcomeDistribution p = OutcomeDistribution::exact("t");
  p.add("x", 0.5);
  p.add(kBottom, 0.5);
  p.set_total(1.0);

  OutcomeDistribution q = OutcomeDistribution::exact("t");
  q.add("x", 0.25);
  q.add("y", 0.25);
  q.add(kBottom, 0.5);
  q.set_total(1.0);

  CHECK(conditional_valid_tv(p, q) == Approx(0.5));
  CHECK(conditional_valid_tv(p, p) == Approx(0.0));

  OutcomeDistribution allbot = OutcomeDistribution::exact("t");
  allbot.add(kBottom, 1.0);
  allbot.set_total(1.0);
  CHECK(conditional_valid_tv(p, allbot) == 0.0);
}

TEST_CASE("bottom mixture arithmetic") {
  OutcomeDistribution base = OutcomeDistribution::exact("t");
  base.add("x", 0.75);
  base.add(kBottom, 0.25);
  base.set_total(1.0);

  const OutcomeDistribution mix = bottom_mixture(0.5, base);
  CHECK(mix.prob("x") == Approx(0.375));
  CHECK(mix.bottom_prob() == Approx(0.625));

  OutcomeDistribution hand = OutcomeDistribution::exact("t");
  hand.add(kBottom, 0.5 * 1.0);
  hand.add("x", 0.5 * 0.75);
  hand.add(kBottom, 0.5 * 0.25);
  hand.set_total(1.0);
  CHECK(exactly_equal(mix, hand));

  CHECK(exactly_equal(bottom_mixture(0.0, base), base));
  CHECK_THROWS_AS(bottom_mixture(1.5, base), std::invalid_argument);

  OutcomeDistribution emp = OutcomeDistribution::empirical("t");
  emp.add("x", 3.0);
  emp.set_total(3.0);
  CHECK_THROWS_AS(bottom_mixture(0.5, emp), std::invalid_argument);
}

TEST_CASE("tv deviation bound") {
  OutcomeDistribution ex = OutcomeDistribution::exact("t");
  ex.add("x", 1.0);
  ex.set_total(1.0);
  OutcomeDistribution em = OutcomeDistribution::empirical("t");
  em.add("x", 2000.0);
  em.set_total(2000.0);

  CHECK(tv_ci_bound(ex, ex, 0.001) == 0.0);
  const double one = std::sqrt(std::log(2.0 / 0.001) / (2.0 * 2000.0));
  CHECK(tv_ci_bound(ex, em, 0.001) == Approx(one));
  CHECK(tv_ci_bound(em, em, 0.001) == Approx(2.0 * one));
  CHECK(tv_ci_bound(ex, em, 0.001) == Approx(0.0435916).epsilon(1e-4));
  CHECK_THROWS_AS(tv_ci_bound(ex, em, 0.0), std::invalid_argument);
}

TEST_CASE("wilson interval frozen values") {
  // Frozen against an independent normal-quantile implementation.
  const BinomialCi mid = wilson_interval(50, 100, 0.05);
  CHECK(mid.lo == Approx(0.4038315302913319).epsilon(1e-6));
  CHECK(mid.hi == Approx(0.5961684697086681).epsilon(1e-6));

  const BinomialCi none = wilson_interval(0, 10, 0.05);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == Approx(0.27753280018619253).epsilon(1e-6));

  const BinomialCi all = wilson_interval(10, 10, 0.05);
  CHECK(all.lo == Approx(0.7224671998138075).epsilon(1e-6));
  CHECK(all.hi == Approx(1.0).epsilon(1e-12));
  CHECK(all.hi <= 1.0);

  const BinomialCi tight = wilson_interval(999, 1000, 0.001);
  CHECK(tight.lo == Approx(0.9873882794116892).epsilon(1e-6));
  CHECK(tight.hi == Approx(0.9999215580136488).epsilon(1e-6));

  CHECK_THROWS_AS(wilson_interval(1, 0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(wilson_interval(2, 1, 0.05), std::invalid_argument);
}

TEST_CASE("chi-square tail frozen values") {
  CHECK(chi_square_pvalue(1.0, 1) == Approx(0.31731050786291437).epsilon(1e-9));
  CHECK(chi_square_pvalue(2.0, 2) == Approx(0.3678794411714422).epsilon(1e-9));
  CHECK(chi_square_pvalue(7.0, 3) == Approx(0.07189777249646505).epsilon(1e-9));
  CHECK(chi_square_pvalue(10.0, 4) == Approx(0.04042768199451279).epsilon(1e-9));
  CHECK(chi_square_pvalue(0.0, 5) == 1.0);
  CHECK(chi_square_pvalue(3.841458820694124, 1) == Approx(0.05).epsilon(1e-6));
  CHECK_THROWS_AS(chi_square_pvalue(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(chi_square_pvalue(-1.0, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
