#ifndef CIRCLEABC_CHAIN_HPP
#define CIRCLEABC_CHAIN_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "circleabc/circle_map.hpp"
#include "circleabc/norms.hpp"
#include "circleabc/schedule.hpp"

namespace abc {

// Finite truncation of a 0/1 sequence.
using BitSeq = std::vector<int>;

inline BitSeq parse_bits(const std::string& s) {
  BitSeq b;
  for (char c : s) {
    if (c == '0')
      b.push_back(0);
    else if (c == '1')
      b.push_back(1);
    else
      throw std::invalid_argument("bit string must be over {0,1}");
  }
  if (b.empty()) throw std::invalid_argument("bit string must be non-empty");
  return b;
}

// The composed conjugator H_n = h_1 ∘ ... ∘ h_n keyed to a bit sequence:
// stage i contributes the q_i-fold lift of the t_i kernel, inverted when
// the bit is 1. The AC variant swaps in the rescaled kernel at each stage.
struct ConjugacyChain {
  Schedule schedule;
  BitSeq bits;
  bool ac_variant = false;
  std::vector<MapPtr> stage_maps;  // h_i, 1-based as [i-1]
  std::vector<MapPtr> H;           // H_i prefix compositions, [i-1]

  unsigned stages() const { return static_cast<unsigned>(bits.size()); }
  const MapPtr& stage(unsigned i) const { return stage_maps.at(i - 1); }
  const MapPtr& prefix(unsigned i) const { return H.at(i - 1); }
  const MapPtr& deepest() const { return H.back(); }
};

inline ConjugacyChain build_chain(const BitSeq& a, const Schedule& s,
                                  bool ac_variant = false) {
  if (a.empty()) throw std::invalid_argument("build_chain: empty sequence");
  if (s.depth() < a.size())
    throw std::invalid_argument("build_chain: schedule too shallow");
  ConjugacyChain c;
  c.schedule = s;
  c.bits = a;
  c.ac_variant = ac_variant;
  MapPtr acc = CircleMap::identity();
  for (unsigned i = 1; i <= a.size(); ++i) {
    MapPtr h = CircleMap::lifted_hhat(s.t[i - 1], s.q[i - 1], a[i - 1] == 1,
                                      ac_variant ? static_cast<int>(i) : 0);
    c.stage_maps.push_back(h);
    acc = CircleMap::compose(acc, h);
    c.H.push_back(acc);
  }
  return c;
}

// T_n = H_n ∘ R_{alpha_{n+1}} ∘ H_n^{-1}; n = 0 gives the bare rotation.
inline MapPtr build_T(const ConjugacyChain& c, unsigned n) {
  if (n > c.stages()) throw std::invalid_argument("build_T: stage too deep");
  if (n + 1 > c.schedule.depth())
    throw std::invalid_argument("build_T: schedule lacks alpha_{n+1}");
  MapPtr rot = CircleMap::rotation(c.schedule.alpha[n]);
  if (n == 0) return rot;
  const MapPtr& Hn = c.prefix(n);
  return CircleMap::compose(
      Hn, CircleMap::compose(rot, CircleMap::inverse(Hn)));
}

// Same conjugation shape with a caller-supplied surrogate for the limit
// rotation number (the deepest available alpha by default).
inline MapPtr build_That(const ConjugacyChain& c, unsigned n,
                         const Rational& alpha_tail) {
  if (n > c.stages() || n == 0)
    throw std::invalid_argument("build_That: bad stage");
  const MapPtr& Hn = c.prefix(n);
  return CircleMap::compose(
      Hn, CircleMap::compose(CircleMap::rotation(alpha_tail),
                             CircleMap::inverse(Hn)));
}

// Working precision sufficient to resolve every feature (width ~ t_i^2/q_i)
// of maps built from the first `stages` schedule stages.
inline unsigned suggest_precision_bits(const Schedule& s, unsigned stages) {
  unsigned long bits = 256;
  for (unsigned i = 0; i < stages && i < s.depth(); ++i)
    bits += 2 * bit_length(denominator(s.t[i])) + 2 * bit_length(s.q[i]);
  return static_cast<unsigned>(bits);
}

// ---- norm reports ---------------------------------------------------------

struct NormReport {
  unsigned stage = 0;
  unsigned k = 0;
  Real h_norm;       // |||h_n|||_k
  Real H_norm;       // |||H_n|||_k
  Real H_prev_norm;  // |||H_{n-1}|||_k
  Real bound;        // C(k) |||H_{n-1}|||_k^k |||h_n|||_k^k
  bool within_bound = false;
};

inline NormReport measure_norms(const ConjugacyChain& c, unsigned n,
                                unsigned k, const SampleOptions& opts = {}) {
  if (n == 0 || n > c.stages())
    throw std::invalid_argument("measure_norms: bad stage");
  NormReport r;
  r.stage = n;
  r.k = k;
  r.h_norm = triple_norm_forward(c.stage(n), k, opts);
  r.H_norm = triple_norm_forward(c.prefix(n), k, opts);
  r.H_prev_norm =
      n == 1 ? Real(1) : triple_norm_forward(c.prefix(n - 1), k, opts);
  Real Ck = to_real(Rational(constant_Ck(k)));
  Real hp = r.h_norm < 1 ? Real(1) : r.h_norm;
  Real Hp = r.H_prev_norm < 1 ? Real(1) : r.H_prev_norm;
  r.bound = Ck;
  for (unsigned i = 0; i < k; ++i) r.bound *= Hp * hp;
  r.within_bound = r.H_norm <= r.bound;
  return r;
}

// Norm-estimate feedback for schedule extension: the exact max of the
// measured |||H_{a,n}|||_{n+1} over all length-n prefixes (the finite-depth
// stand-in for the paper's sup over sequences). 2^n chains at desk depth.
inline Real max_norm_over_prefixes(const Schedule& s, unsigned n,
                                   const SampleOptions& opts = {},
                                   bool ac_variant = false) {
  Real best(0);
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    BitSeq bits(n);
    for (unsigned i = 0; i < n; ++i) bits[i] = (mask >> i) & 1;
    ConjugacyChain c = build_chain(bits, s, ac_variant);
    Real v = triple_norm_forward(c.prefix(n), n + 1, opts);
    if (v > best) best = v;
  }
  return best;
}

// Mantissa for norm sampling. Derivative magnitudes are astronomical at
// deep stages but ride in the floating-point exponent; the exact-rational
// argument paths (jet_rat and series reversion) keep every cancellation-
// prone subtraction in Q, so a modest mantissa already yields full
// relative accuracy. suggest_precision_bits would demand ~|den t_n^2|
// bits here and make deep feedback runs intractable for no gain.
inline unsigned norm_precision_bits(unsigned stages) {
  return 320 + 96 * stages;
}

// Grows a schedule to the requested depth, feeding measured norms back in.
// Returns a schedule with depth+1 recorded stages (stage n analysis needs
// alpha_{n+1}).
inline Schedule build_schedule_with_feedback(unsigned depth, const Int& q1,
                                             const Int& p1 = 1,
                                             unsigned zd_rank = 0,
                                             const SampleOptions& opts = {}) {
  Schedule s = init_schedule(q1, Schedule::Mode::SynthesizedLiouville, p1,
                             zd_rank);
  for (unsigned n = 1; n <= depth; ++n) {
    PrecisionGuard prec(norm_precision_bits(n));
    Real est = max_norm_over_prefixes(s, n, opts);
    s = zd_rank >= 2 ? zd_extend_schedule(s, zd_rank, est)
                     : extend_schedule(s, est);
  }
  return s;
}

// ---- convergence certificates ---------------------------------------------

struct ConvergenceEntry {
  unsigned n = 0;
  unsigned k = 0;
  Real d_prev;        // d_k(T_n, T_{n-1})
  Real d_hat;         // d_k(T_n, That_n)
  Rational threshold; // 1/n^2
  bool ok_prev = false;
  bool ok_hat = false;
  Real predicted;     // konj-lemma bound C_k |||H_n|||_{k+1}^{k+1} dalpha
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  bool all_ok = true;
};

inline ConvergenceReport convergence_report(const ConjugacyChain& c,
                                            const SampleOptions& opts = {}) {
  if (c.stages() < 2)
    throw std::invalid_argument("convergence_report: need depth >= 2");
  unsigned maxn = std::min<unsigned>(c.stages(), c.schedule.depth() - 1);
  Rational alpha_tail = c.schedule.alpha.back();
  ConvergenceReport rep;
  for (unsigned n = 1; n <= maxn; ++n) {
    // T_{n-1} re-expressed over the stage-n conjugator: h_n commutes with
    // R_{alpha_n} (it is a 1/q_n-periodic lift and alpha_n = p_n/q_n), so
    // H_{n-1} R_{alpha_n} H_{n-1}^{-1} = H_n R_{alpha_n} H_n^{-1} and both
    // metrics reduce to rotation pairs under the shared conjugator H_n.
    const MapPtr& Hn = c.prefix(n);
    Real Hnorm = triple_norm_forward(Hn, n + 1, opts);
    for (unsigned k = 0; k <= n; ++k) {
      ConvergenceEntry e;
      e.n = n;
      e.k = k;
      e.d_prev = conjugated_pair_dk(Hn, c.schedule.alpha[n],
                                    c.schedule.alpha[n - 1], k, opts);
      e.d_hat =
          conjugated_pair_dk(Hn, c.schedule.alpha[n], alpha_tail, k, opts);
      e.threshold = Rational(1, n * n);
      e.ok_prev = e.d_prev <= to_real(e.threshold);
      e.ok_hat = e.d_hat <= to_real(e.threshold);
      Real Ck = to_real(Rational(constant_Ck(k)));
      Real pw = 1;
      for (unsigned i = 0; i <= k; ++i) pw *= Hnorm;
      e.predicted =
          Ck * pw *
          to_real(c.schedule.alpha[n] - c.schedule.alpha[n - 1]);
      rep.entries.push_back(e);
      if (!(e.ok_prev && e.ok_hat)) rep.all_ok = false;
    }
  }
  return rep;
}

// d_inf estimate between the deepest truncations of two sequences on a
// shared schedule; structurally zero when the truncations agree.
inline Real continuity_probe(const BitSeq& a, const BitSeq& b,
                             const Schedule& s,
                             const SampleOptions& opts = {}) {
  ConjugacyChain ca = build_chain(a, s);
  ConjugacyChain cb = build_chain(b, s);
  unsigned n = std::min<unsigned>(
      {static_cast<unsigned>(a.size()), static_cast<unsigned>(b.size()),
       s.depth() - 1});
  MapPtr Ta = build_T(ca, n);
  MapPtr Tb = build_T(cb, n);
  return metric_dinf(Ta, Tb, opts);
}

}  // namespace abc

#endif  // CIRCLEABC_CHAIN_HPP
