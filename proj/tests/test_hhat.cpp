#include <catch2/catch_amalgamated.hpp>

#include "circleabc/hhat.hpp"
#include "circleabc/real.hpp"

using abc::HHat;
using abc::Int;
using abc::Jet;
using abc::PrecisionGuard;
using abc::Rational;
using abc::Real;

namespace {

Real tol(int digits) { return pow(Real(10), -digits); }

const Rational kTs[] = {Rational(1, 32), Rational(1, 64), Rational(1, 128)};

}  // namespace

TEST_CASE("bump function basics") {
  PrecisionGuard prec(128);
  REQUIRE(abc::bump_psi(Real(-1)) == 0);
  REQUIRE(abc::bump_psi(Real(0)) == 0);
  REQUIRE(abc::bump_psi(Real(1)) == 1);
  REQUIRE(abc::bump_psi(Real(2)) == 1);
  REQUIRE(abs(abc::bump_psi(Real(1) / 2) - Real(1) / 2) < tol(30));
  // psi(x) + psi(1-x) = 1
  for (int k = 1; k < 10; ++k) {
    Real x = Real(k) / 10;
    REQUIRE(abs(abc::bump_psi(x) + abc::bump_psi(1 - x) - 1) < tol(30));
  }
  // monotone on a coarse grid
  Real prev = abc::bump_psi(Real(1) / 100);
  for (int k = 2; k < 100; ++k) {
    Real cur = abc::bump_psi(Real(k) / 100);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("fixed values of the nine-piece map") {
  PrecisionGuard prec(128);
  HHat h(Rational(1, 32));
  // identity piece
  REQUIRE(*h.exact_eval(Rational(1, 64)) == Rational(1, 64));
  // central piece at the fixed point 1/2
  REQUIRE(*h.exact_eval(Rational(1, 2)) == Rational(1, 2));
  // x = 3t in the left slope-t stretch: t(3t - 1/4) + 3t = 91/1024
  REQUIRE(*h.exact_eval(Rational(3, 32)) == Rational(91, 1024));
  REQUIRE(abs(h.eval(Real(3) / 32) - Real(91) / 1024) < tol(30));
  // endpoints fixed
  REQUIRE(*h.exact_eval(Rational(0)) == 0);
  REQUIRE(*h.exact_eval(Rational(1)) == 1);
}

TEST_CASE("continuity at all eight interior breakpoints") {
  PrecisionGuard prec(128);
  for (const Rational& t : kTs) {
    HHat h(t);
    const auto& b = h.breakpoints();
    Real eps = tol(25);
    for (int i = 1; i <= 8; ++i) {
      Real x = abc::to_real(b[i]);
      Real left = h.eval(x - eps);
      Real right = h.eval(x + eps);
      REQUIRE(abs(left - right) < tol(20));
      REQUIRE(abs(h.eval(x) - left) < tol(20));
    }
  }
}

TEST_CASE("strict monotonicity on a dense grid") {
  PrecisionGuard prec(128);
  HHat h(Rational(1, 32));
  Real prev = h.eval(Real(0));
  for (int k = 1; k <= 2000; ++k) {
    Real cur = h.eval(Real(k) / 2000);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("inverse round-trip and closed forms") {
  PrecisionGuard prec(128);
  for (const Rational& t : kTs) {
    HHat h(t);
    // closed-form zones
    REQUIRE(*h.exact_eval_inv(Rational(1, 2)) ==
            t * (Rational(1, 2) - Rational(1, 2)) + Rational(1, 2));
    REQUIRE(*h.exact_eval_inv(t / 2) == t / 2);
    // exact round-trips through the pure zones
    for (const Rational& x : {Rational(t / 3), Rational(3 * t),
                              Rational(1, 2), Rational(1 - 3 * t),
                              Rational(1 - t / 3)}) {
      auto y = h.exact_eval(x);
      REQUIRE(y.has_value());
      auto back = h.exact_eval_inv(*y);
      REQUIRE(back.has_value());
      REQUIRE(*back == x);
    }
    // numeric round-trips everywhere, including transition zones
    for (int k = 0; k <= 500; ++k) {
      Real x = Real(k) / 500;
      Real y = h.eval(x);
      REQUIRE(abs(h.eval_inv(y) - x) < tol(20));
    }
  }
}

TEST_CASE("symmetry h(1-x) = 1 - h(x)") {
  PrecisionGuard prec(128);
  HHat h(Rational(1, 64));
  for (int k = 1; k < 200; ++k) {
    Real x = Real(k) / 200;
    REQUIRE(abs(h.eval(1 - x) - (1 - h.eval(x))) < tol(25));
  }
}

TEST_CASE("composed slope identity on I_t") {
  PrecisionGuard prec(192);
  for (const Rational& t : kTs) {
    HHat h(t);
    auto I = h.I_hat();
    Real tinv2 = abc::to_real(Rational(1) / (t * t));
    for (int k = 0; k <= 16; ++k) {
      Rational x = I.first + (I.second - I.first) * Rational(k, 16);
      Real xr = abc::to_real(x);
      // D(h∘h)(x) = h'(h(x)) · h'(x)
      Real d1 = h.jet(1, xr).derivative(1);
      Real d2 = h.jet(1, h.eval(xr)).derivative(1);
      REQUIRE(abs(d1 * d2 / tinv2 - 1) < tol(8));
      // exact version where available
      auto y = h.exact_eval(x);
      REQUIRE(y.has_value());
      auto z = h.exact_eval(*y);
      REQUIRE(z.has_value());
    }
  }
}

TEST_CASE("composed inverse slope identity on J_t") {
  PrecisionGuard prec(192);
  for (const Rational& t : kTs) {
    HHat h(t);
    Real tinv2 = abc::to_real(Rational(1) / (t * t));
    for (const auto& comp : h.J_hat()) {
      for (int k = 0; k <= 16; ++k) {
        Rational y = comp.first + (comp.second - comp.first) * Rational(k, 16);
        Real yr = abc::to_real(y);
        Real x1 = h.eval_inv(yr);
        Real d1 = h.jet_inv(1, yr).derivative(1);
        Real d2 = h.jet_inv(1, x1).derivative(1);
        REQUIRE(abs(d1 * d2 / tinv2 - 1) < tol(8));
        // the zone is covered by the exact inverse formulas twice over
        auto e1 = h.exact_eval_inv(y);
        REQUIRE(e1.has_value());
        auto e2 = h.exact_eval_inv(*e1);
        REQUIRE(e2.has_value());
      }
    }
  }
}

TEST_CASE("jets agree with finite differences to order 3") {
  PrecisionGuard prec(512);
  HHat h(Rational(1, 32));
  // points inside transition zones (the only non-polynomial pieces)
  const auto& b = h.breakpoints();
  const Rational pts[] = {Rational(1, 24),  // inside [t, 2t]
                          Rational(b[3] + (b[4] - b[3]) / 3),
                          Rational(31, 32) - Rational(1, 100)};
  Real hstep = tol(20);
  for (const Rational& p : pts) {
    Real x = abc::to_real(p);
    Jet j = h.jet(3, x);
    Real f0 = h.eval(x);
    Real fp = h.eval(x + hstep), fm = h.eval(x - hstep);
    Real fp2 = h.eval(x + 2 * hstep), fm2 = h.eval(x - 2 * hstep);
    Real d1 = (fp - fm) / (2 * hstep);
    Real d2 = (fp - 2 * f0 + fm) / (hstep * hstep);
    Real d3 = (fp2 - 2 * fp + 2 * fm - fm2) / (2 * hstep * hstep * hstep);
    REQUIRE(abs(j.derivative(0) - f0) == 0);
    REQUIRE(abs(j.derivative(1) / d1 - 1) < tol(6));
    REQUIRE(abs(j.derivative(2) / d2 - 1) < tol(6));
    REQUIRE(abs(j.derivative(3) / d3 - 1) < tol(6));
  }
}

TEST_CASE("jet at a breakpoint returns the agreeing one-sided value") {
  PrecisionGuard prec(128);
  HHat h(Rational(1, 32));
  // b2 = 2t borders the identity-to-affine transition and the pure piece;
  // smooth gluing means both sides give slope t there.
  Jet j = h.jet(2, abc::to_real(Rational(2, 32)));
  REQUIRE(abs(j.derivative(1) - Real(1) / 32) < tol(20));
}

TEST_CASE("rational-argument jets agree with the generic paths") {
  PrecisionGuard prec(256);
  HHat h(Rational(1, 32));
  const auto& b = h.breakpoints();
  // one point in each piece flavor: identity, both transitions, pure affines
  const Rational pts[] = {Rational(1, 64), Rational(1, 24), Rational(3, 32),
                          Rational(b[3] + (b[4] - b[3]) / 3), Rational(1, 2),
                          Rational(b[5] + (b[6] - b[5]) / 2),
                          Rational(1, 1) - Rational(1, 24)};
  for (const Rational& p : pts) {
    Jet jr = h.jet_rat(3, p);
    Jet jx = h.jet(3, abc::to_real(p));
    for (unsigned i = 0; i <= 3; ++i)
      REQUIRE(abs(jr[i] - jx[i]) < tol(40) * (1 + abs(jx[i])));
    // inverse jet at the image point round-trips
    Rational y = abc::real_to_rational(jr.value());
    Jet ji = h.jet_inv_rat(3, y);
    REQUIRE(abs(ji.value() - abc::to_real(p)) < tol(40));
    REQUIRE(abs(ji.derivative(1) * jr.derivative(1) - 1) < tol(35));
  }
}

TEST_CASE("rational paths stay accurate at tiny t") {
  // Features of width t^2 ~ 2^-40 would destroy a naive float path at this
  // precision; the rational-argument entry keeps full accuracy.
  PrecisionGuard prec(320);
  Rational t(1, Int(1) << 20);
  HHat h(t);
  const auto& b = h.breakpoints();
  // deep inside the central transition zone (width t^2)
  Rational x = b[3] + (b[4] - b[3]) * Rational(1, 3);
  Jet j = h.jet_rat(2, x);
  REQUIRE(j.derivative(1) > 0);
  Rational y = abc::real_to_rational(j.value());
  Jet ji = h.jet_inv_rat(2, y);
  REQUIRE(abs(ji.value() - abc::to_real(x)) < tol(60));
  REQUIRE(abs(ji.derivative(1) * j.derivative(1) - 1) < tol(50));
  // slope-1/t central zone image
  Jet jc = h.jet_inv_rat(1, Rational(1, 2) + t / 7);
  REQUIRE(abs(jc.derivative(1) - abc::to_real(t)) < tol(60));
}

TEST_CASE("t out of range is rejected") {
  REQUIRE_THROWS_AS(HHat(Rational(1, 8)), std::invalid_argument);
  REQUIRE_THROWS_AS(HHat(Rational(1, 20)), std::invalid_argument);
  REQUIRE_THROWS_AS(HHat(Rational(0)), std::invalid_argument);
}
