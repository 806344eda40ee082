#include <catch2/catch_amalgamated.hpp>

#include "circleabc/jet.hpp"
#include "circleabc/real.hpp"

using abc::Jet;
using abc::PrecisionGuard;
using abc::Real;

namespace {

Real tol(int digits) { return pow(Real(10), -digits); }

}  // namespace

TEST_CASE("jet of a polynomial matches hand derivatives") {
  PrecisionGuard prec(128);
  // f(x) = x^3 - 2x + 5 at x0 = 2: f=9, f'=10, f''=12, f'''=6
  Jet x = Jet::variable(3, Real(2));
  Jet f = x * x * x - (x * Real(2)) + Jet::constant(3, Real(5));
  REQUIRE(abs(f.derivative(0) - 9) < tol(30));
  REQUIRE(abs(f.derivative(1) - 10) < tol(30));
  REQUIRE(abs(f.derivative(2) - 12) < tol(30));
  REQUIRE(abs(f.derivative(3) - 6) < tol(30));
}

TEST_CASE("reciprocal jet matches derivatives of 1/x") {
  PrecisionGuard prec(128);
  Jet x = Jet::variable(4, Real(3));
  Jet r = x.reciprocal();
  // d^k/dx^k x^{-1} = (-1)^k k! x^{-(k+1)}
  for (unsigned k = 0; k <= 4; ++k) {
    Real expect = pow(Real(3), -(static_cast<int>(k) + 1));
    for (unsigned m = 1; m <= k; ++m) expect *= m;
    if (k % 2 == 1) expect = -expect;
    REQUIRE(abs(r.derivative(k) - expect) < tol(25));
  }
}

TEST_CASE("exp jet matches derivatives of exp") {
  PrecisionGuard prec(128);
  Jet x = Jet::variable(4, Real(1) / 2);
  Jet e = x.exp_jet();
  Real ex = exp(Real(1) / 2);
  for (unsigned k = 0; k <= 4; ++k)
    REQUIRE(abs(e.derivative(k) - ex) < tol(25));
}

TEST_CASE("composition chain rule") {
  PrecisionGuard prec(128);
  // g(f(x)) with f(x)=x^2 at x0=2 (f0=4), g(u)=exp(u) at u0=4.
  Jet x = Jet::variable(3, Real(2));
  Jet f = x * x;
  Jet g = Jet::variable(3, f.value()).exp_jet();
  Jet h = f.compose_outer(g);
  // h(x) = exp(x^2): h'=2x e^{x^2}, h''=(2+4x^2)e^{x^2}, h'''=(12x+8x^3)e^{x^2}
  Real e4 = exp(Real(4));
  REQUIRE(abs(h.derivative(0) - e4) < tol(20));
  REQUIRE(abs(h.derivative(1) - 4 * e4) < tol(20));
  REQUIRE(abs(h.derivative(2) - 18 * e4) < tol(20));
  REQUIRE(abs(h.derivative(3) - 88 * e4) < tol(20));
}

TEST_CASE("division jet") {
  PrecisionGuard prec(128);
  // f(x) = x / (1 + x^2) at x0 = 1: f=1/2, f'=0, f''=-1/2, f'''=3/2
  Jet x = Jet::variable(3, Real(1));
  Jet f = x / (x * x + Real(1));
  REQUIRE(abs(f.derivative(0) - Real(1) / 2) < tol(25));
  REQUIRE(abs(f.derivative(1)) < tol(25));
  REQUIRE(abs(f.derivative(2) + Real(1) / 2) < tol(25));
  REQUIRE(abs(f.derivative(3) - Real(3) / 2) < tol(25));
}

TEST_CASE("series reversion inverts the jet") {
  PrecisionGuard prec(128);
  // f(x) = exp(x) at x0 = 1; inverse is log(y) at y0 = e.
  Jet x = Jet::variable(4, Real(1));
  Jet f = x.exp_jet();
  Jet g = f.invert(Real(1));
  Real e1 = exp(Real(1));
  // log derivatives at e: 1/e, -1/e^2, 2/e^3, -6/e^4
  REQUIRE(abs(g.derivative(0) - 1) < tol(20));
  REQUIRE(abs(g.derivative(1) - 1 / e1) < tol(20));
  REQUIRE(abs(g.derivative(2) + 1 / (e1 * e1)) < tol(20));
  REQUIRE(abs(g.derivative(3) - 2 / (e1 * e1 * e1)) < tol(20));
  REQUIRE(abs(g.derivative(4) + 6 / (e1 * e1 * e1 * e1)) < tol(20));
}

TEST_CASE("reversion round-trips composition to identity") {
  PrecisionGuard prec(192);
  Jet x = Jet::variable(5, Real(3) / 7);
  Jet f = (x * x + Real(1)) * x.exp_jet();  // smooth, f' != 0 nearby
  Jet g = f.invert(Real(3) / 7);
  // g(f(x)) should be the identity jet at x0.
  Jet gf = f.compose_outer(g);
  REQUIRE(abs(gf.derivative(0) - Real(3) / 7) < tol(30));
  REQUIRE(abs(gf.derivative(1) - 1) < tol(30));
  for (unsigned k = 2; k <= 5; ++k) REQUIRE(abs(gf.derivative(k)) < tol(25));
}
