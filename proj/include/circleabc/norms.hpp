#ifndef CIRCLEABC_NORMS_HPP
#define CIRCLEABC_NORMS_HPP

#include <algorithm>
#include <random>
#include <vector>

#include "circleabc/circle_map.hpp"
#include "circleabc/jet.hpp"
#include "circleabc/real.hpp"

namespace abc {

// Sampling policy for sup-norm estimation. Estimates are lower bounds of
// the true sups; the reported density documents how hard we looked.
struct SampleOptions {
  unsigned long base_grid = 1UL << 14;
  unsigned long grid_cap = 1UL << 16;  // caps the 16*q_max request
  unsigned refine_top = 8;             // argmax neighborhoods refined
  unsigned refine_iters = 30;          // golden-section steps each
  unsigned long seed = 0;              // grid jitter
  unsigned dinf_terms = 8;             // truncation K of the d_inf series
};

namespace detail {

// Reduce a real to the circle representative in [-1/2, 1/2).
inline Real circle_reduce(const Real& d) {
  Real r = d - floor(d);
  if (r >= Real(1) / 2) r -= 1;
  return r;
}

inline Real deriv_gap(const MapPtr& f, const MapPtr& g, unsigned i,
                      const Real& x) {
  if (!g) {
    Jet jf = f->jet(i, x);
    if (i == 0) return abs(circle_reduce(jf.value()));
    return abs(jf.derivative(i));
  }
  Jet jf = f->jet(i, x);
  Jet jg = g->jet(i, x);
  if (i == 0) return abs(circle_reduce(jf.value() - jg.value()));
  return abs(jf.derivative(i) - jg.derivative(i));
}

// Golden-section maximization of x -> deriv_gap(...) on [a, b]. The target
// need not be unimodal; any value found only sharpens a lower bound.
inline Real golden_max(const MapPtr& f, const MapPtr& g, unsigned i, Real a,
                       Real b, unsigned iters) {
  const Real phi = (sqrt(Real(5)) - 1) / 2;
  Real x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  Real f1 = deriv_gap(f, g, i, x1), f2 = deriv_gap(f, g, i, x2);
  Real best = f1 > f2 ? f1 : f2;
  for (unsigned it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = deriv_gap(f, g, i, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = deriv_gap(f, g, i, x1);
    }
    if (f1 > best) best = f1;
    if (f2 > best) best = f2;
  }
  return best;
}

inline unsigned long resolve_grid(const Int& qmax, const SampleOptions& o) {
  Int want = 16 * qmax;
  if (want <= Int(o.base_grid)) return o.base_grid;
  if (want >= Int(o.grid_cap)) return o.grid_cap;
  return want.convert_to<unsigned long>();
}

// Per-order sup estimates of |D^i f - D^i g| (or |D^i f| when g is null),
// i = 0..k, by jittered grid + tree critical points + local refinement.
inline std::vector<Real> sup_derivatives(const MapPtr& f, const MapPtr& g,
                                         unsigned k,
                                         const SampleOptions& opts) {
  Int qmax = f->max_q();
  if (g) qmax = std::max(qmax, g->max_q());
  unsigned long N = resolve_grid(qmax, opts);
  std::mt19937_64 rng(opts.seed);

  std::vector<Real> best(k + 1, Real(0));
  std::vector<Real> best_at(k + 1, Real(0));

  auto visit = [&](const Real& x) {
    Jet jf = f->jet(k, x);
    Jet jg = g ? g->jet(k, x) : Jet();
    for (unsigned i = 0; i <= k; ++i) {
      Real v;
      if (i == 0)
        v = abs(circle_reduce(jf.value() - (g ? jg.value() : Real(0))));
      else
        v = abs(jf.derivative(i) - (g ? jg.derivative(i) : Real(0)));
      if (v > best[i]) {
        best[i] = v;
        best_at[i] = x;
      }
    }
  };

  for (unsigned long j = 0; j < N; ++j) {
    Real u = Real(rng()) / Real(std::mt19937_64::max());
    visit((Real(j) + u) / Real(N));
  }
  std::vector<Rational> crit = f->critical_points();
  if (g) {
    auto cg = g->critical_points();
    crit.insert(crit.end(), cg.begin(), cg.end());
  }
  for (const Rational& c : crit) {
    Rational cc = c - floor_rat(c);
    visit(to_real(cc));
    // a nudge to each side: boundary convention may hide one-sided sups
    Real eps = Real(1) / (Real(N) * 64);
    visit(to_real(cc) + eps);
    if (cc > 0) visit(to_real(cc) - eps);
  }
  Real w = Real(1) / Real(N);
  for (unsigned i = 0; i <= k; ++i) {
    Real refined = golden_max(f, g, i, best_at[i] - w, best_at[i] + w,
                              opts.refine_iters);
    if (refined > best[i]) best[i] = refined;
  }
  return best;
}

inline Rational reduce_rat(const Rational& x) { return x - floor_rat(x); }

// Jittered rational grid over [0,1); rational abscissas keep the map's
// exact-argument jet path available.
inline std::vector<Rational> rational_grid(unsigned long N,
                                           unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::vector<Rational> pts;
  pts.reserve(N);
  Int den = Int(N) << 16;
  for (unsigned long j = 0; j < N; ++j)
    pts.push_back(Rational(Int(j) * 65536 + Int(rng() & 0xffff), den));
  return pts;
}

// Ternary-search sharpening of a lower bound for max eval on [a,b]; the
// target need not be unimodal, any value found is a valid improvement.
template <class F>
Real rational_refine(F&& eval, Rational a, Rational b, unsigned iters) {
  Real best = eval(a);
  best = std::max(best, eval(b));
  for (unsigned it = 0; it < iters; ++it) {
    Rational m1 = a + (b - a) / 3, m2 = a + (b - a) * Rational(2, 3);
    Real f1 = eval(m1), f2 = eval(m2);
    best = std::max({best, f1, f2});
    if (f1 < f2)
      a = m1;
    else
      b = m2;
  }
  return best;
}

}  // namespace detail

// ||f||_k = max_{0<=i<=k} sup_x |D^i f(x)| (lower-bound estimate).
inline Real norm_Ck(const MapPtr& m, unsigned k,
                    const SampleOptions& opts = {}) {
  auto sup = detail::sup_derivatives(m, nullptr, k, opts);
  Real best(0);
  for (const Real& v : sup) best = std::max(best, v);
  return best;
}

// |||f|||_k = max(||f||_k, ||f^{-1}||_k).
inline Real triple_norm(const MapPtr& m, unsigned k,
                        const SampleOptions& opts = {}) {
  return std::max(norm_Ck(m, k, opts), norm_Ck(m->inverse_of(), k, opts));
}

// d_k(f,g) = max(||f-g||_k, ||f^{-1}-g^{-1}||_k).
inline Real metric_dk(const MapPtr& f, const MapPtr& g, unsigned k,
                      const SampleOptions& opts = {}) {
  if (CircleMap::structurally_equal(f, g)) return Real(0);
  auto fwd = detail::sup_derivatives(f, g, k, opts);
  auto bwd =
      detail::sup_derivatives(f->inverse_of(), g->inverse_of(), k, opts);
  Real best(0);
  for (const Real& v : fwd) best = std::max(best, v);
  for (const Real& v : bwd) best = std::max(best, v);
  return best;
}

// |||f|||_k through forward jets only: the inverse-map derivatives come from
// series reversion of the forward jet at each sample, so deep compositions
// are never evaluated through their ill-conditioned inverse branches.
// Samples are rational so every kernel takes its exact-argument path.
inline Real triple_norm_forward(const MapPtr& m, unsigned k,
                                const SampleOptions& opts = {}) {
  unsigned long N = detail::resolve_grid(m->max_q(), opts);

  // channel c = 2*i + dir: order i, dir 0 forward / 1 inverse
  auto channel = [&](const Rational& x0, unsigned c) -> Real {
    Rational x = detail::reduce_rat(x0);
    unsigned i = c / 2;
    Jet jf = m->jet_rat(i, x);
    Jet j = (c % 2 == 0) ? jf : jf.invert(to_real(x));
    if (i == 0) return abs(detail::circle_reduce(j.value()));
    return abs(j.derivative(i));
  };

  std::vector<Real> best(2 * (k + 1), Real(0));
  std::vector<Rational> best_at(2 * (k + 1), Rational(0));
  auto visit = [&](const Rational& x0) {
    Rational x = detail::reduce_rat(x0);
    Jet jf = m->jet_rat(k, x);
    Jet jb = jf.invert(to_real(x));
    for (unsigned i = 0; i <= k; ++i) {
      Real vf = i == 0 ? abs(detail::circle_reduce(jf.value()))
                       : abs(jf.derivative(i));
      Real vb = i == 0 ? abs(detail::circle_reduce(jb.value()))
                       : abs(jb.derivative(i));
      if (vf > best[2 * i]) {
        best[2 * i] = vf;
        best_at[2 * i] = x;
      }
      if (vb > best[2 * i + 1]) {
        best[2 * i + 1] = vb;
        best_at[2 * i + 1] = x;
      }
    }
  };

  for (const Rational& x : detail::rational_grid(N, opts.seed)) visit(x);
  Rational nudge(1, Int(N) * 64);
  for (const Rational& c : m->critical_points()) {
    visit(c);
    visit(c + nudge);
    visit(c - nudge);
  }
  Rational w(1, N);
  Real overall(0);
  for (unsigned c = 0; c < 2 * (k + 1); ++c) {
    Real refined = detail::rational_refine(
        [&](const Rational& x) { return channel(x, c); }, best_at[c] - w,
        best_at[c] + w, opts.refine_iters);
    overall = std::max({overall, best[c], refined});
  }
  return overall;
}

// d_k between the two conjugates H∘R_a∘H^{-1} and H∘R_b∘H^{-1}. Writing
// both maps over the shared conjugator turns every derivative into an
// expression in forward jets of H at y, y±a, y±b (with y = H^{-1}(x)
// sampled directly), so the metric is computable at depths where the
// inverse tree cannot be evaluated pointwise to full accuracy.
//
// At a rational sample where H carries an exact affine germ along the
// argument chains, every order of the gap is exact: when |a - b| is below
// the germ margin the two chains share all kernel pieces, the derivative
// gaps vanish identically and the value gap is slope·(a - b). Where a
// smooth-step zone blocks the germ, the floating-point jets are used only
// if the working mantissa can resolve the F - G cancellation (which grows
// with the kernel slope ranges); otherwise the sample is skipped and the
// estimate remains an honest sampled lower bound on the sup.
inline Real conjugated_pair_dk(const MapPtr& H, const Rational& a,
                               const Rational& b, unsigned k,
                               const SampleOptions& opts = {}) {
  if (a == b) return Real(0);
  unsigned long N = detail::resolve_grid(H->max_q(), opts);
  bool float_ok = static_cast<double>(Real::default_precision()) * 3.32 >=
                  static_cast<double>((k + 1) * H->cancellation_base_bits()) +
                      128.0;
  // germs are taken at the rotation with the cheaper denominator and
  // shifted to the other one
  bool base_is_a = bit_length(denominator(a)) <= bit_length(denominator(b));
  Real dmag = abs(to_real(b - a));

  // dir 0: the maps themselves; dir 1: their inverses (rotate by -a, -b)
  auto gaps = [&](const Rational& y0, unsigned dir, unsigned ord,
                  bool& usable) -> std::vector<Real> {
    std::vector<Real> out(ord + 1, Real(0));
    usable = true;
    Rational y = detail::reduce_rat(y0);
    Rational sa = dir == 0 ? a : -a;
    Rational sb = dir == 0 ? b : -b;
    auto gy = H->affine_germ(y);
    if (gy && gy->slope != 0) {
      Rational base = base_is_a ? sa : sb;
      auto g1 = H->affine_germ(y + base);
      if (g1) {
        Rational delta = base_is_a ? sb - sa : sa - sb;
        if (abs(delta) < g1->margin) {
          Real v0 = abs(to_real(g1->slope)) * dmag;
          if (v0 < Real(1) / 4) {
            out[0] = v0;  // derivative gaps vanish: shared pieces
            return out;
          }
          Rational dv = g1->slope * delta;
          dv -= Rational(floor_rat(dv + Rational(1, 2)));
          out[0] = abs(to_real(dv));
          return out;
        }
        auto g2 = H->affine_germ(y + (base_is_a ? sb : sa));
        if (g2) {
          Rational dv = g1->value - g2->value;
          dv -= Rational(floor_rat(dv + Rational(1, 2)));
          out[0] = abs(to_real(dv));
          if (ord >= 1)
            out[1] = abs(to_real((g1->slope - g2->slope) / gy->slope));
          return out;  // orders >= 2 vanish on affine germs
        }
      }
    }
    if (!float_ok) {
      usable = false;
      return out;
    }
    Jet jinv = H->jet_rat(ord, y).invert(to_real(y));
    Jet F = jinv.compose_outer(H->jet_rat(ord, y + sa));
    Jet G = jinv.compose_outer(H->jet_rat(ord, y + sb));
    out[0] = abs(detail::circle_reduce(F.value() - G.value()));
    for (unsigned i = 1; i <= ord; ++i)
      out[i] = abs(F.derivative(i) - G.derivative(i));
    return out;
  };

  std::vector<Real> best(2 * (k + 1), Real(0));
  std::vector<Rational> best_at(2 * (k + 1), Rational(0));
  auto visit = [&](const Rational& y) {
    for (unsigned dir = 0; dir < 2; ++dir) {
      bool usable = true;
      auto v = gaps(y, dir, k, usable);
      if (!usable) continue;
      for (unsigned i = 0; i <= k; ++i) {
        unsigned c = 2 * i + dir;
        if (v[i] > best[c]) {
          best[c] = v[i];
          best_at[c] = detail::reduce_rat(y);
        }
      }
    }
  };

  for (const Rational& y : detail::rational_grid(N, opts.seed)) visit(y);
  // kernel features matter when y or any rotated copy hits them; shifts
  // whose denominators dwarf every feature scale of H cannot move a sample
  // between pieces and are skipped to keep the rational arithmetic sane
  unsigned long shift_cap = 2 * bit_length(H->max_q()) + 64;
  Rational nudge(1, Int(N) * 64);
  for (const Rational& c : H->critical_points())
    for (const Rational& shift :
         {Rational(0), Rational(-a), Rational(-b), a, b}) {
      if (bit_length(denominator(shift)) > shift_cap) continue;
      visit(c + shift);
      visit(c + shift + nudge);
      visit(c + shift - nudge);
    }
  Rational w(1, N);
  Real overall(0);
  for (unsigned c = 0; c < 2 * (k + 1); ++c) {
    unsigned i = c / 2, dir = c % 2;
    Real refined = detail::rational_refine(
        [&](const Rational& y) {
          bool usable = true;
          auto v = gaps(y, dir, i, usable);
          return usable ? v[i] : Real(0);
        },
        best_at[c] - w, best_at[c] + w, opts.refine_iters);
    overall = std::max({overall, best[c], refined});
  }
  return overall;
}

// d_inf(f,g) = sum_{k>=1} d_k/(2^k (1+d_k)), truncated at K terms with the
// exact tail bound 2^{-K} added (every summand is < 2^{-k}).
inline Real metric_dinf(const MapPtr& f, const MapPtr& g,
                        const SampleOptions& opts = {}) {
  if (CircleMap::structurally_equal(f, g)) return Real(0);
  Real total(0);
  for (unsigned k = 1; k <= opts.dinf_terms; ++k) {
    Real dk = metric_dk(f, g, k, opts);
    total += dk / (pow(Real(2), static_cast<int>(k)) * (1 + dk));
  }
  total += pow(Real(2), -static_cast<int>(opts.dinf_terms));
  return total;
}

}  // namespace abc

#endif  // CIRCLEABC_NORMS_HPP
