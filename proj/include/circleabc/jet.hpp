#ifndef CIRCLEABC_JET_HPP
#define CIRCLEABC_JET_HPP

#include <stdexcept>
#include <vector>

#include "circleabc/real.hpp"

namespace abc {

// Truncated Taylor expansion of a function at a point. Coefficients are
// Taylor coefficients c_i = f^(i)(x0)/i!; derivatives() rescales.
class Jet {
 public:
  Jet() = default;
  Jet(unsigned order, const Real& constant) : c_(order + 1, Real(0)) {
    c_[0] = constant;
  }

  static Jet variable(unsigned order, const Real& x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1;
    return j;
  }
  static Jet constant(unsigned order, const Real& v) { return Jet(order, v); }

  unsigned order() const { return static_cast<unsigned>(c_.size()) - 1; }
  const Real& operator[](unsigned i) const { return c_[i]; }
  Real& operator[](unsigned i) { return c_[i]; }
  const Real& value() const { return c_[0]; }

  Real derivative(unsigned i) const {
    Real f = c_[i];
    for (unsigned m = 2; m <= i; ++m) f *= m;
    return f;
  }
  std::vector<Real> derivatives() const {
    std::vector<Real> d(c_.size());
    Real fact(1);
    for (unsigned i = 0; i < c_.size(); ++i) {
      if (i >= 2) fact *= i;
      d[i] = c_[i] * fact;
    }
    return d;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r = a;
    for (unsigned i = 0; i <= r.order(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r = a;
    for (unsigned i = 0; i <= r.order(); ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  friend Jet operator-(const Jet& a) {
    Jet r = a;
    for (auto& c : r.c_) c = -c;
    return r;
  }
  friend Jet operator+(const Jet& a, const Real& s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator-(const Jet& a, const Real& s) { return a + (-s); }
  friend Jet operator*(const Jet& a, const Real& s) {
    Jet r = a;
    for (auto& c : r.c_) c *= s;
    return r;
  }
  friend Jet operator*(const Real& s, const Jet& a) { return a * s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    unsigned k = a.order();
    Jet r(k, Real(0));
    for (unsigned i = 0; i <= k; ++i) {
      if (a.c_[i] == 0) continue;
      for (unsigned j = 0; i + j <= k; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }

  Jet reciprocal() const {
    unsigned k = order();
    if (c_[0] == 0) throw std::domain_error("jet reciprocal at zero");
    Jet r(k, 1 / c_[0]);
    for (unsigned m = 1; m <= k; ++m) {
      Real s(0);
      for (unsigned i = 1; i <= m; ++i) s += c_[i] * r.c_[m - i];
      r.c_[m] = -s / c_[0];
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    return a * b.reciprocal();
  }

  Jet exp_jet() const {
    unsigned k = order();
    Jet r(k, exp(c_[0]));
    for (unsigned m = 1; m <= k; ++m) {
      Real s(0);
      for (unsigned i = 1; i <= m; ++i) s += Real(i) * c_[i] * r.c_[m - i];
      r.c_[m] = s / m;
    }
    return r;
  }

  // g composed after this jet: result(x) = g(f(x)). g is a jet at f(x0).
  Jet compose_outer(const Jet& g) const {
    unsigned k = order();
    Jet f0 = *this;
    f0.c_[0] = 0;  // shift so powers of (f - f(x0)) truncate correctly
    Jet r(k, g.c_[k]);
    for (int i = static_cast<int>(k) - 1; i >= 0; --i) {
      r = r * f0;
      r.c_[0] += g.c_[static_cast<unsigned>(i)];
    }
    return r;
  }

  // Series reversion: jet of the inverse function at y0 = value().
  // Requires c_[1] != 0. x0 is the preimage.
  Jet invert(const Real& x0) const {
    unsigned k = order();
    if (k == 0) return Jet(0, x0);
    if (c_[1] == 0) throw std::domain_error("jet invert: zero derivative");
    Jet g(k, x0);
    if (k >= 1) g.c_[1] = 1 / c_[1];
    // Fixed point: g <- g + (u - f(g)) / f'(0-shifted); one order gained
    // per pass, so k passes suffice.
    Jet f_shift = *this;
    f_shift.c_[0] = 0;
    Jet g_shift = g;
    g_shift.c_[0] = 0;
    Jet u = Jet::variable(k, Real(0));
    for (unsigned pass = 2; pass <= k; ++pass) {
      Jet fg = g_shift.compose_outer(f_shift);  // f(g(y)) - y0 as series in u
      Jet err = u - fg;
      for (unsigned i = 0; i <= k; ++i) g_shift.c_[i] += err.c_[i] * g.c_[1];
      // note: leading error term is at order >= pass, correction by 1/f'
    }
    // One final Newton-style correction for accuracy of mid coefficients.
    {
      Jet fg = g_shift.compose_outer(f_shift);
      Jet err = u - fg;
      Jet fprime(k, Real(0));
      for (unsigned i = 1; i <= k; ++i)
        fprime.c_[i - 1] = Real(i) * f_shift.c_[i];
      Jet fpg = g_shift.compose_outer(fprime);
      Jet corr = err * fpg.reciprocal();
      for (unsigned i = 0; i <= k; ++i) g_shift.c_[i] += corr.c_[i];
    }
    g_shift.c_[0] = x0;
    return g_shift;
  }

 private:
  std::vector<Real> c_;
};

}  // namespace abc

#endif  // CIRCLEABC_JET_HPP
