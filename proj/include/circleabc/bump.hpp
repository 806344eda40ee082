#ifndef CIRCLEABC_BUMP_HPP
#define CIRCLEABC_BUMP_HPP

#include "circleabc/jet.hpp"
#include "circleabc/real.hpp"

namespace abc {

// Canonical smooth step psi: 0 on (-inf,0], 1 on [1,inf), strictly
// increasing in between, with psi(x) + psi(1-x) = 1.
// psi(x) = e(x) / (e(x) + e(1-x)), e(x) = exp(-1/x).
inline Real bump_e(const Real& x) {
  if (x <= 0) return Real(0);
  return exp(-1 / x);
}

// psi and 1 - psi together, each with full relative accuracy. Both are
// derived from the single ratio rho = e(min)/e(max) = exp(-|1/x - 1/(1-x)|)
// in [0,1]: psi = rho/(1+rho) on the small side and 1/(1+rho) on the large
// side. Forming 1 - psi by subtraction would lose all accuracy once psi
// rounds to 1; the ratio form never subtracts nearby quantities and a rho
// exponent underflow is benign (the exact limit).
inline void bump_psi_pair(const Real& x, Real& psi, Real& psibar) {
  if (x <= 0) {
    psi = 0;
    psibar = 1;
    return;
  }
  if (x >= 1) {
    psi = 1;
    psibar = 0;
    return;
  }
  if (x <= Real(1) / 2) {
    Real rho = exp(1 / (1 - x) - 1 / x);  // e(x)/e(1-x) <= 1
    psi = rho / (1 + rho);
    psibar = 1 / (1 + rho);
  } else {
    Real rho = exp(1 / x - 1 / (1 - x));  // e(1-x)/e(x) <= 1
    psi = 1 / (1 + rho);
    psibar = rho / (1 + rho);
  }
}

inline Real bump_psi(const Real& x) {
  Real p, pb;
  bump_psi_pair(x, p, pb);
  return p;
}

// Jets of psi and 1 - psi at x0, via the same ratio form: the exponent of
// rho may be astronomically negative, but every coefficient is a product /
// quotient of relatively-accurate quantities, so no coefficient collapses
// to rounding noise. Outside (0,1) psi is locally constant (all derivatives
// vanish at the endpoints).
inline void bump_psi_pair_jet(unsigned order, const Real& x0, Jet& psi,
                              Jet& psibar) {
  if (x0 <= 0) {
    psi = Jet::constant(order, Real(0));
    psibar = Jet::constant(order, Real(1));
    return;
  }
  if (x0 >= 1) {
    psi = Jet::constant(order, Real(1));
    psibar = Jet::constant(order, Real(0));
    return;
  }
  Jet x = Jet::variable(order, x0);
  Jet one = Jet::constant(order, Real(1));
  if (x0 <= Real(1) / 2) {
    Jet u = (one - x).reciprocal() - x.reciprocal();
    Jet rho = u.exp_jet();  // e(x)/e(1-x) <= 1
    Jet denrec = (one + rho).reciprocal();
    psi = rho * denrec;
    psibar = denrec;
  } else {
    Jet u = x.reciprocal() - (one - x).reciprocal();
    Jet rho = u.exp_jet();  // e(1-x)/e(x) <= 1
    Jet denrec = (one + rho).reciprocal();
    psi = denrec;
    psibar = rho * denrec;
  }
}

inline Jet bump_psi_jet(unsigned order, const Real& x0) {
  Jet p, pb;
  bump_psi_pair_jet(order, x0, p, pb);
  return p;
}

}  // namespace abc

#endif  // CIRCLEABC_BUMP_HPP
