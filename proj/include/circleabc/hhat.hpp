#ifndef CIRCLEABC_HHAT_HPP
#define CIRCLEABC_HHAT_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "circleabc/bump.hpp"
#include "circleabc/jet.hpp"
#include "circleabc/real.hpp"

namespace abc {

// The nine-piece unit-interval diffeomorphism h^(t): identity near the
// boundary, slope t on two long affine stretches, slope 1/t through the
// middle, smooth-step transitions in between. Requires t < 1/20 so that
// h(I) stays inside the central slope-1/t zone (making the slope-1/t^2
// claim for h∘h exact) -- stronger than the 1/4 the formulas need.
class HHat {
 public:
  explicit HHat(const Rational& t) : t_(t) {
    if (!(t > 0 && t < Rational(1, 20)))
      throw std::invalid_argument("HHat: t must lie in (0, 1/20)");
    Rational t2 = t * t;
    b_ = {Rational(0),
          t,
          2 * t,
          (1 - t + 8 * t2) / 2,
          (1 - t + 10 * t2) / 2,
          (1 + t - 10 * t2) / 2,
          (1 + t - 8 * t2) / 2,
          1 - 2 * t,
          1 - t,
          Rational(1)};
  }

  const Rational& t() const { return t_; }
  const std::array<Rational, 10>& breakpoints() const { return b_; }

  // --- exact formulas of the pure pieces -----------------------------
  Rational affine_lo(const Rational& x) const {  // slope t, left stretch
    return t_ * (x - Rational(1, 4)) + 3 * t_;
  }
  Rational central(const Rational& x) const {  // slope 1/t
    return (x - Rational(1, 2)) / t_ + Rational(1, 2);
  }
  Rational affine_hi(const Rational& x) const {  // slope t, right stretch
    return t_ * (x - Rational(3, 4)) + 1 - 3 * t_;
  }

  std::optional<Rational> exact_eval(const Rational& x) const {
    if (x < 0 || x > 1) return std::nullopt;
    if (x <= b_[1] || x >= b_[8]) return x;
    if (x >= b_[2] && x <= b_[3]) return affine_lo(x);
    if (x >= b_[4] && x <= b_[5]) return central(x);
    if (x >= b_[6] && x <= b_[7]) return affine_hi(x);
    return std::nullopt;  // smooth-step transition zone
  }

  std::optional<Rational> exact_eval_inv(const Rational& y) const {
    if (y < 0 || y > 1) return std::nullopt;
    if (y <= b_[1] || y >= b_[8]) return y;
    if (y >= affine_lo(b_[2]) && y <= affine_lo(b_[3]))
      return (y - 3 * t_) / t_ + Rational(1, 4);
    if (y >= 5 * t_ && y <= 1 - 5 * t_)
      return t_ * (y - Rational(1, 2)) + Rational(1, 2);
    if (y >= affine_hi(b_[6]) && y <= affine_hi(b_[7]))
      return (y - 1 + 3 * t_) / t_ + Rational(3, 4);
    return std::nullopt;
  }

  // --- numeric evaluation ---------------------------------------------
  Real eval(const Real& x) const {
    unsigned i = piece_index(x);
    return piece_eval(i, x);
  }

  Real eval_inv(const Real& y) const {
    if (y <= to_real(b_[1]) || y >= to_real(b_[8])) return y;
    // Closed-form inverse zones (exact images of the pure pieces).
    Real lo2 = to_real(affine_lo(b_[2])), hi2 = to_real(affine_lo(b_[3]));
    if (y >= lo2 && y <= hi2) return (y - to_real(3 * t_)) / to_real(t_) + Real(1) / 4;
    Real lo4 = to_real(5 * t_), hi4 = to_real(1 - 5 * t_);
    if (y >= lo4 && y <= hi4)
      return to_real(t_) * (y - Real(1) / 2) + Real(1) / 2;
    Real lo6 = to_real(affine_hi(b_[6])), hi6 = to_real(affine_hi(b_[7]));
    if (y >= lo6 && y <= hi6)
      return (y - 1 + to_real(3 * t_)) / to_real(t_) + Real(3) / 4;
    return invert_numeric(y);
  }

  // Jet of h at x (order-k truncated Taylor data). At an exact breakpoint
  // the one-sided jets must agree (the smooth-step glue makes them equal
  // in exact arithmetic); disagreement signals a formula bug.
  Jet jet(unsigned order, const Real& x) const {
    for (unsigned i = 1; i <= 8; ++i) {
      if (x == to_real(b_[i])) {
        Jet left = piece_jet(i - 1, order, x);
        Jet right = piece_jet(i, order, x);
        Real tol = jet_tolerance();
        for (unsigned j = 0; j <= order; ++j)
          if (abs(left[j] - right[j]) > tol * (1 + abs(left[j])))
            throw std::domain_error("HHat::jet: one-sided jets disagree");
        return left;
      }
    }
    return piece_jet(piece_index(x), order, x);
  }

  Jet jet_inv(unsigned order, const Real& y) const {
    Real x = eval_inv(y);
    return jet(order, x).invert(x);
  }

  // Exact piece lookup (left convention, matching piece_index).
  unsigned piece_of(const Rational& x) const {
    for (unsigned i = 1; i <= 9; ++i)
      if (x <= b_[i]) return i - 1;
    return 8;
  }

  // Exact slope/intercept of pure piece i in {0,2,4,6,8}.
  void pure_affine(unsigned i, Rational& sl, Rational& c) const {
    switch (i) {
      case 0: case 8: sl = 1; c = 0; return;
      case 2: sl = t_; c = 3 * t_ - t_ / 4; return;
      case 4: sl = 1 / t_; c = Rational(1, 2) - 1 / (2 * t_); return;
      case 6: sl = t_; c = 1 - 3 * t_ - 3 * t_ / 4; return;
      default: throw std::logic_error("pure_affine: transition piece");
    }
  }

  // Forward jet at an exact rational point. The smooth-step argument
  // s = (x - b_i)/w is computed as an exact rational first, so the working
  // precision only has to carry the output, not the cancellation.
  Jet jet_rat(unsigned order, const Rational& x) const {
    unsigned i = piece_of(x);
    if (i % 2 == 0) {
      Rational sl, c;
      pure_affine(i, sl, c);
      Jet j(order, to_real(sl * x + c));
      if (order >= 1) j[1] = to_real(sl);
      return j;
    }
    Rational w = trans_width_rat(i);
    Rational s0 = (x - b_[i]) / w;
    return transition_jet(i, order, to_real(s0), to_real(x));
  }

  // Inverse-function jet at an exact rational point of the image. In the
  // transition image zones the preimage is found by a well-conditioned
  // solve in the step argument s in [0,1].
  Jet jet_inv_rat(unsigned order, const Rational& y) const {
    if (y <= b_[1] || y >= b_[8]) {
      Jet j(order, to_real(y));
      if (order >= 1) j[1] = 1;
      return j;
    }
    for (unsigned i = 2; i <= 6; i += 2) {
      Rational sl, c;
      pure_affine(i, sl, c);
      if (y >= sl * b_[i] + c && y <= sl * b_[i + 1] + c) {
        Jet j(order, to_real((y - c) / sl));
        if (order >= 1) j[1] = to_real(1 / sl);
        return j;
      }
    }
    for (unsigned i = 1; i <= 7; i += 2) {
      Rational lo = *exact_eval(b_[i]);
      Rational hi = *exact_eval(b_[i + 1]);
      if (y > lo && y < hi) {
        Real s = solve_transition(i, to_real((lo - y) / trans_width_rat(i)));
        Real xp = to_real(b_[i]) + to_real(trans_width_rat(i)) * s;
        Jet fwd = transition_jet(i, order, s, xp);
        return fwd.invert(xp);
      }
    }
    // boundary of a zone: fall back to the generic path
    return jet(order, to_real(y)).invert(eval_inv(to_real(y)));
  }

  // Exact local affine germ (value, slope) at a rational point together
  // with the distance to the nearest boundary of the piece it certifies.
  // Transition zones carry no exact germ. On a shared piece boundary the
  // glue matches value and slope (and kills all higher derivatives), so
  // the one-sided germ is the true jet there with margin zero.
  struct AffineGerm {
    Rational value;
    Rational slope;
    Rational margin;
  };

  std::optional<AffineGerm> affine_germ(const Rational& x) const {
    if (x < 0 || x > 1) return std::nullopt;
    unsigned i = piece_of(x);
    if (i % 2 == 1) return std::nullopt;
    Rational sl, c;
    pure_affine(i, sl, c);
    Rational lo = b_[i], hi = b_[i + 1];
    Rational m = x - lo, m2 = hi - x;
    if (m2 < m) m = m2;
    return AffineGerm{sl * x + c, sl, m};
  }

  std::optional<AffineGerm> affine_germ_inv(const Rational& y) const {
    if (y < 0 || y > 1) return std::nullopt;
    if (y <= b_[1]) {
      Rational m = b_[1] - y;
      if (y < m) m = y;
      return AffineGerm{y, 1, m};
    }
    if (y >= b_[8]) {
      Rational m = y - b_[8], m2 = 1 - y;
      if (m2 < m) m = m2;
      return AffineGerm{y, 1, m};
    }
    for (unsigned i = 2; i <= 6; i += 2) {
      Rational sl, c;
      pure_affine(i, sl, c);
      Rational lo = sl * b_[i] + c, hi = sl * b_[i + 1] + c;
      if (y >= lo && y <= hi) {
        Rational m = y - lo, m2 = hi - y;
        if (m2 < m) m = m2;
        return AffineGerm{(y - c) / sl, 1 / sl, m};
      }
    }
    return std::nullopt;
  }

  // Candidate locations of derivative extrema: breakpoints plus a fixed
  // subdivision of each transition zone (where high derivatives of psi
  // live) plus the center.
  std::vector<Rational> critical_points() const {
    std::vector<Rational> pts(b_.begin(), b_.end());
    const unsigned zones[4] = {1, 3, 5, 7};
    for (unsigned z : zones) {
      Rational lo = b_[z], w = b_[z + 1] - b_[z];
      for (int k = 1; k <= 7; ++k) pts.push_back(lo + w * Rational(k, 8));
    }
    pts.push_back(Rational(1, 2));
    return pts;
  }

  // Window where h∘h has slope 1/t^2.
  std::pair<Rational, Rational> I_hat() const {
    Rational t2 = t_ * t_;
    return {Rational(1, 2) - t2 / 4, Rational(1, 2) + t2 / 4};
  }
  // Two windows where h^{-1}∘h^{-1} has slope 1/t^2.
  std::array<std::pair<Rational, Rational>, 2> J_hat() const {
    Rational t2 = t_ * t_;
    Rational c1 = 3 * t_ - t_ / 4 + 3 * t2;
    Rational c2 = 1 - 3 * t_ + t_ / 4 - 3 * t2;
    return {{{c1 - t2 / 8, c1 + t2 / 8}, {c2 - t2 / 8, c2 + t2 / 8}}};
  }

 private:
  // Piece i covers (b_i, b_{i+1}]; boundary points resolve to the left
  // piece (deterministic, catches transcription errors in tests).
  unsigned piece_index(const Real& x) const {
    for (unsigned i = 1; i <= 8; ++i)
      if (x <= to_real(b_[i])) return i - 1;
    return 8;
  }

  // (value, slope) of the pure formula adjoining transition zone i.
  void pure_sides(unsigned i, Real& sl_l, Real& c_l, Real& sl_r,
                  Real& c_r) const {
    // Represent each pure piece as value(x) = sl*x + c.
    Real t = to_real(t_);
    auto ident = [&](Real& sl, Real& c) { sl = 1; c = 0; };
    auto alo = [&](Real& sl, Real& c) { sl = t; c = 3 * t - t / 4; };
    auto cen = [&](Real& sl, Real& c) {
      sl = 1 / t;
      c = Real(1) / 2 - 1 / (2 * t);
    };
    auto ahi = [&](Real& sl, Real& c) {
      sl = t;
      c = 1 - 3 * t - 3 * t / 4;
    };
    switch (i) {
      case 1: ident(sl_l, c_l); alo(sl_r, c_r); break;
      case 3: alo(sl_l, c_l); cen(sl_r, c_r); break;
      case 5: cen(sl_l, c_l); ahi(sl_r, c_r); break;
      case 7: ahi(sl_l, c_l); ident(sl_r, c_r); break;
      default: throw std::logic_error("pure_sides: not a transition piece");
    }
  }

  Real transition_width(unsigned i) const {
    return to_real(trans_width_rat(i));
  }
  // Step argument scale: t on the outer transitions, t^2 inside.
  Rational trans_width_rat(unsigned i) const {
    return (i == 1 || i == 7) ? t_ : t_ * t_;
  }

  // Jet of transition piece i given the step argument s (and the abscissa
  // x = b_i + w s, used only as the jet center bookkeeping).
  //
  // Written as L + psi*(G - L) with the gap G - L carried by its exact
  // rational coefficients: its size is w-scale, so forming it by
  // subtracting the two near-equal floats L and G would collapse it to
  // rounding noise (and the derivative to exactly zero) once w drops
  // below the mantissa. The first derivative additionally needs the
  // positive-sum form psibar*sl_l + psi*sl_r + psi'*(G-L), because
  // sl_l + psi*(sl_r - sl_l) cancels to the rounding floor near s = 1.
  Jet transition_jet(unsigned i, unsigned order, const Real& s,
                     const Real& x) const {
    (void)x;
    Rational sl_l, c_l, sl_r, c_r;
    pure_affine(i - 1, sl_l, c_l);
    pure_affine(i + 1, sl_r, c_r);
    Rational w = trans_width_rat(i);
    Rational F0 = sl_l * b_[i] + c_l, G0 = sl_r * b_[i] + c_r;
    Rational dsl = sl_r - sl_l;
    Jet L(order, to_real(F0) + to_real(sl_l * w) * s);
    if (order >= 1) L[1] = to_real(sl_l);
    Jet D(order, to_real(G0 - F0) + to_real(dsl * w) * s);
    if (order >= 1) D[1] = to_real(dsl);
    Jet arg(order, s);
    if (order >= 1) arg[1] = to_real(1 / w);
    Jet psi, psibar;
    bump_psi_pair_jet(order, s, psi, psibar);
    Jet p = arg.compose_outer(psi);
    Jet out = L + p * D;
    if (order >= 1)
      out[1] = psibar.value() * to_real(sl_l) + psi.value() * to_real(sl_r) +
               p[1] * D.value();
    return out;
  }

  // Solve (hhat(b_i + w s) - y)/w = 0 for s in [0,1], where
  // r0 = (hhat(b_i) - y)/w is handed in already free of cancellation.
  Real solve_transition(unsigned i, const Real& r0) const {
    Rational sl_l, c_l, sl_r, c_r;
    pure_affine(i - 1, sl_l, c_l);
    pure_affine(i + 1, sl_r, c_r);
    Rational w = trans_width_rat(i);
    Rational F0 = sl_l * b_[i] + c_l, G0 = sl_r * b_[i] + c_r;
    Real d0 = to_real((G0 - F0) / w);
    Real dsl = to_real(sl_r - sl_l);
    Real a = to_real(sl_l);
    auto R = [&](const Real& s) {
      return r0 + a * s + bump_psi(s) * (d0 + dsl * s);
    };
    Real lo(0), hi(1);
    for (int it = 0; it < 96; ++it) {
      Real mid = (lo + hi) / 2;
      if (R(mid) < 0)
        lo = mid;
      else
        hi = mid;
    }
    // stop a little above the rounding floor of R, or the step test can
    // never fire and the loop degrades to slow bisection
    long bits = static_cast<long>(Real::default_precision() * 3.32) - 16;
    if (bits < 64) bits = 64;
    Real eps = pow(Real(2), -bits);
    Real s = (lo + hi) / 2;
    for (int it = 0; it < 64; ++it) {
      Real val = R(s);
      if (val < 0)
        lo = s;
      else
        hi = s;
      Jet ps, psb;
      bump_psi_pair_jet(1, s, ps, psb);
      // positive-sum form of the slope (see transition_jet)
      Real deriv = psb.value() * a + ps.value() * to_real(sl_r) +
                   ps.derivative(1) * (d0 + dsl * s);
      Real step = val / deriv;
      Real next = s - step;
      if (abs(step) < eps * (1 + abs(s)))
        return next;  // before the bracket safeguard
      s = (next <= lo || next >= hi) ? (lo + hi) / 2 : next;
    }
    return s;
  }

  Real piece_eval(unsigned i, const Real& x) const {
    switch (i) {
      case 0: case 8: return x;
      case 2: return to_real(t_) * (x - Real(1) / 4) + to_real(3 * t_);
      case 4: return (x - Real(1) / 2) / to_real(t_) + Real(1) / 2;
      case 6: return to_real(t_) * (x - Real(3) / 4) + 1 - to_real(3 * t_);
      default: {
        // shared with the jet path so values agree bit-for-bit
        Real s = (x - to_real(b_[i])) / transition_width(i);
        return transition_jet(i, 0, s, x).value();
      }
    }
  }

  Jet piece_jet(unsigned i, unsigned order, const Real& x) const {
    Jet xj = Jet::variable(order, x);
    switch (i) {
      case 0: case 8: return xj;
      case 2: return xj * to_real(t_) + (to_real(3 * t_) - to_real(t_) / 4);
      case 4:
        return xj * (1 / to_real(t_)) +
               (Real(1) / 2 - 1 / (2 * to_real(t_)));
      case 6:
        return xj * to_real(t_) + (1 - to_real(3 * t_) - 3 * to_real(t_) / 4);
      default: {
        // share the cancellation-safe transition form
        Real s0 = (x - to_real(b_[i])) / transition_width(i);
        return transition_jet(i, order, s0, x);
      }
    }
  }

  static Real jet_tolerance() {
    long digits = static_cast<long>(Real::default_precision());
    return pow(Real(10), -digits / 2);
  }

  Real invert_numeric(const Real& y) const {
    // y must sit in a transition image zone (the closed-form zones were
    // handled by the caller); solve in the step argument, which is
    // well-conditioned regardless of how small the zone is.
    for (unsigned i = 1; i <= 7; i += 2) {
      Rational lo = *exact_eval(b_[i]);
      Rational hi = *exact_eval(b_[i + 1]);
      if (y >= to_real(lo) && y <= to_real(hi)) {
        Real r0 = (to_real(lo) - y) / transition_width(i);
        Real s = solve_transition(i, r0);
        return to_real(b_[i]) + transition_width(i) * s;
      }
    }
    throw std::logic_error("invert_numeric: value not in any zone");
  }

  Rational t_;
  std::array<Rational, 10> b_;
};

}  // namespace abc

#endif  // CIRCLEABC_HHAT_HPP
