#include <catch2/catch_amalgamated.hpp>

#include "circleabc/circle_map.hpp"
#include "circleabc/norms.hpp"
#include "circleabc/real.hpp"

using abc::CircleMap;
using abc::Int;
using abc::MapPtr;
using abc::PrecisionGuard;
using abc::Rational;
using abc::Real;

namespace {

Real tol(int digits) { return pow(Real(10), -digits); }

abc::SampleOptions fast_opts() {
  abc::SampleOptions o;
  o.base_grid = 512;
  o.grid_cap = 2048;
  o.refine_iters = 20;
  return o;
}

}  // namespace

TEST_CASE("rotation and composition basics") {
  PrecisionGuard prec(128);
  auto r = CircleMap::rotation(Rational(1, 3));
  REQUIRE(abs(r->eval(Real(1) / 4) - (Real(1) / 4 + Real(1) / 3)) < tol(30));
  REQUIRE(*r->exact_eval(Rational(1, 4)) == Rational(7, 12));

  auto id = CircleMap::compose(r, CircleMap::inverse(r));
  REQUIRE(CircleMap::structurally_equal(id, CircleMap::identity()) == false);
  for (int k = 0; k < 20; ++k) {
    Real x = Real(k) / 20;
    REQUIRE(abs(id->eval(x) - x) < tol(30));
  }
}

TEST_CASE("one-fold lift equals the kernel") {
  PrecisionGuard prec(128);
  auto m = CircleMap::lifted_hhat(Rational(1, 32), Int(1));
  abc::HHat h(Rational(1, 32));
  for (int k = 0; k <= 100; ++k) {
    Real x = Real(k) / 100;
    REQUIRE(abs(m->eval(x) - h.eval(x)) < tol(30));
  }
  REQUIRE(*m->exact_eval(Rational(3, 32)) == Rational(91, 1024));
}

TEST_CASE("lift is a degree-one lift and fixes the grid") {
  PrecisionGuard prec(128);
  auto m = CircleMap::lifted_hhat(Rational(1, 32), Int(32));
  // fixes every k/q
  for (int k = 0; k <= 32; ++k)
    REQUIRE(*m->exact_eval(Rational(k, 32)) == Rational(k, 32));
  // F(x+1) = F(x)+1
  for (int k = 1; k < 10; ++k) {
    Real x = Real(k) / 10;
    REQUIRE(abs(m->eval(x + 1) - (m->eval(x) + 1)) < tol(28));
  }
}

TEST_CASE("equivariance: lift commutes with rotation by 1/q") {
  PrecisionGuard prec(192);
  struct Case {
    Rational t;
    Int q;
  } cases[] = {{Rational(1, 32), Int(32)}, {Rational(1, 64), Int(2048)}};
  for (const auto& c : cases) {
    auto m = CircleMap::lifted_hhat(c.t, c.q);
    Real step = 1 / abc::to_real(c.q);
    for (int k = 0; k < 1000; ++k) {
      Real x = Real(k) / 1000;
      REQUIRE(abs(m->eval(x + step) - (m->eval(x) + step)) < tol(30));
    }
  }
}

TEST_CASE("uniform closeness of the lift to the identity") {
  PrecisionGuard prec(128);
  struct Case {
    Rational t;
    Int q;
  } cases[] = {{Rational(1, 32), Int(32)},
               {Rational(1, 32), Int(64)},
               {Rational(1, 64), Int(128)}};
  for (const auto& c : cases) {
    auto m = CircleMap::lifted_hhat(c.t, c.q);
    Real bound = 1 / abc::to_real(c.q);
    for (int k = 0; k <= 2000; ++k) {
      Real x = Real(k) / 2000;
      REQUIRE(abs(m->eval(x) - x) <= bound + tol(30));
    }
  }
}

TEST_CASE("conjugation identity at the fixed point") {
  PrecisionGuard prec(192);
  auto H = CircleMap::lifted_hhat(Rational(1, 32), Int(32));
  Rational alpha(5, 1024);
  auto T = CircleMap::compose(
      H, CircleMap::compose(CircleMap::rotation(alpha), CircleMap::inverse(H)));
  // H(0) = 0, so T(H(0)) = H(alpha)
  Real lhs = T->eval(H->eval(Real(0)));
  Real rhs = H->eval(abc::to_real(alpha));
  REQUIRE(abs(lhs - rhs) < tol(30));
}

TEST_CASE("lift jet rescaling: slope of central zone survives") {
  PrecisionGuard prec(128);
  Rational t(1, 32);
  Int q(32);
  auto m = CircleMap::lifted_hhat(t, q);
  // at (k + 1/2)/q the kernel derivative is 1/t; the q-rescaling cancels
  for (int k : {0, 5, 31}) {
    Real x = (Real(k) + Real(1) / 2) / abc::to_real(q);
    REQUIRE(abs(m->jet(1, x).derivative(1) - 32) < tol(25));
  }
  // second derivative of an affine zone is 0
  Real xa = (Real(3) + Real(3) / 32) / 32;  // 3t inside slope-t stretch
  REQUIRE(abs(m->jet(2, xa).derivative(2)) < tol(25));
  REQUIRE(abs(m->jet(1, xa).derivative(1) - abc::to_real(t)) < tol(25));
}

TEST_CASE("inverse evaluation round-trips through arbitrary trees") {
  PrecisionGuard prec(192);
  auto H = CircleMap::compose(CircleMap::lifted_hhat(Rational(1, 32), Int(32)),
                              CircleMap::lifted_hhat(Rational(1, 64), Int(64), true));
  auto T = CircleMap::compose(
      H, CircleMap::compose(CircleMap::rotation(Rational(3, 128)),
                            CircleMap::inverse(H)));
  for (int k = 0; k < 50; ++k) {
    Real x = Real(k) / 50;
    REQUIRE(abs(T->eval_inverse(T->eval(x)) - x) < tol(25));
    REQUIRE(abs(T->eval(T->eval_inverse(x)) - x) < tol(25));
  }
}

TEST_CASE("structural inverse and equality") {
  auto H = CircleMap::compose(CircleMap::lifted_hhat(Rational(1, 32), Int(32)),
                              CircleMap::lifted_hhat(Rational(1, 64), Int(64), true));
  auto Hinv = H->inverse_of();
  REQUIRE(CircleMap::is_inverse_pair(H, Hinv));
  REQUIRE(CircleMap::structurally_equal(H, Hinv->inverse_of()));
  REQUIRE_FALSE(CircleMap::structurally_equal(H, Hinv));
}

TEST_CASE("json round-trip") {
  auto H = CircleMap::compose(
      CircleMap::lifted_hhat(Rational(1, 32), Int(32)),
      CircleMap::compose(CircleMap::rotation(Rational(3, 128)),
                         CircleMap::inverse(CircleMap::compose(
                             CircleMap::lifted_hhat(Rational(1, 64), Int(64), true),
                             CircleMap::rotation(Rational(1, 7))))));
  auto j = H->to_json();
  auto back = CircleMap::from_json(j);
  REQUIRE(CircleMap::structurally_equal(H, back));
  REQUIRE(back->to_json() == j);
}

TEST_CASE("metrics on rotations") {
  PrecisionGuard prec(128);
  auto a = CircleMap::rotation(Rational(1, 5));
  auto b = CircleMap::rotation(Rational(3, 10));
  Real d0 = abc::metric_dk(a, b, 0, fast_opts());
  REQUIRE(abs(d0 - Real(1) / 10) < tol(20));
  REQUIRE(abc::metric_dk(a, a, 0, fast_opts()) == 0);
  REQUIRE(abc::metric_dinf(a, a, fast_opts()) == 0);
}

TEST_CASE("norm of identity and of a lift") {
  PrecisionGuard prec(128);
  auto id = CircleMap::identity();
  Real n1 = abc::norm_Ck(id, 1, fast_opts());
  REQUIRE(abs(n1 - 1) < tol(20));

  Rational t(1, 32);
  auto m = CircleMap::lifted_hhat(t, Int(8));
  Real tn = abc::triple_norm(m, 1, fast_opts());
  REQUIRE(tn >= abc::to_real(Rational(1) / t) - tol(10));
}

TEST_CASE("rescaled kernel variant is identity outside its window") {
  PrecisionGuard prec(128);
  // shrink stage 2: active only on [0, 1/8) of each 1/q cell
  auto m = CircleMap::lifted_hhat(Rational(1, 32), Int(4), false, 2);
  REQUIRE(*m->exact_eval(Rational(1, 8)) == Rational(1, 8));   // v = 1/2 > 1/8
  REQUIRE(*m->exact_eval(Rational(3, 16)) == Rational(3, 16)); // v = 3/4
  // inside the window it acts as the compressed kernel
  Rational x(3, 32 * 8 * 4);  // v = 3/256 < 1/8, c*v = 3/32 in slope-t zone
  Rational expect = Rational(91, 1024) / 8 / 4;
  REQUIRE(*m->exact_eval(x) == expect);
  // still a continuous increasing map
  Real prev = m->eval(Real(0));
  for (int k = 1; k <= 400; ++k) {
    Real cur = m->eval(Real(k) / 400);
    REQUIRE(cur > prev);
    prev = cur;
  }
}
