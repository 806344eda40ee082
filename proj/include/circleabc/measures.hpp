#ifndef CIRCLEABC_MEASURES_HPP
#define CIRCLEABC_MEASURES_HPP

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "circleabc/chain.hpp"
#include "circleabc/interval_set.hpp"

namespace abc {

// ---- the singular construction ------------------------------------------

// Per-cell patterns of L_n and M_n in kernel coordinates (the [0,1] block
// that the q_n-fold lift repeats). L_n grid-snaps the slope-t_n zones of
// the stage kernel to the 1/q_{n+1} grid; M_n is the exact image of those
// zones, so h_n(L_n) ⊆ M_n holds with no slack.
struct LnMnPattern {
  IntervalSet L;        // kernel coordinates
  IntervalSet M;        // kernel coordinates
  Rational l_bound;     // certified lower bound for m(L_n)
};

inline LnMnPattern ln_mn_pattern(const Int& q, const Rational& t, int a_flag,
                                 const Int& q_next) {
  // grid spacing in kernel coordinates
  Rational g = Rational(q) / Rational(q_next);
  auto snap = [&](const Rational& lo, const Rational& hi) {
    Int l1 = ceil_rat(lo / g);
    if (l1 < 1) l1 = 1;
    Int l2 = floor_rat(hi / g);
    if (l1 >= l2)
      throw std::runtime_error("L_n window too narrow for the grid");
    return std::make_pair(Rational(l1) * g, Rational(l2) * g);
  };
  LnMnPattern p;
  if (a_flag == 0) {
    // slope-t zones of the kernel: [2t, (1-t+8t^2)/2] and the mirror
    Rational b3 = (1 - t + 8 * t * t) / 2;
    Rational b6 = (1 + t - 8 * t * t) / 2;
    auto [a1, a2] = snap(2 * t, b3);
    auto [a3, a4] = snap(b6, 1 - 2 * t);
    p.L = IntervalSet({{a1, a2}, {a3, a4}});
    // exact images of the two zones under x -> t(x - 1/4) + 3t and its
    // mirror (the grid-snap only shrinks them)
    Rational r_lo = (t - 8 * t * t) / 4;
    Rational r_hi = (t - 2 * t * t + 16 * t * t * t) / 4;
    p.M = IntervalSet({{3 * t - r_lo, 3 * t + r_hi},
                       {1 - 3 * t - r_hi, 1 - 3 * t + r_lo}});
    p.l_bound = 1 - 6 * t;
  } else {
    // inverted kernel: single slope-t zone [5t, 1-5t]
    auto [a1, a2] = snap(5 * t, 1 - 5 * t);
    p.L = IntervalSet({{a1, a2}});
    // exact image under x -> t(x - 1/2) + 1/2
    Rational half(1, 2);
    p.M = IntervalSet({{half - t * half + 5 * t * t,
                        half + t * half - 5 * t * t}});
    // the single zone misses 10t plus one grid cell on each side; 11t is
    // an honest certified bound (the two-zone 1-6t of the other case is
    // not attainable here)
    p.l_bound = 1 - 11 * t;
  }
  return p;
}

// Full circle sets: q_n tiled copies of the patterns. Arc count is 2 q_n;
// intended for shallow stages — deep stages go through singular_bounds,
// which never materializes the tiling.
inline std::pair<IntervalSet, IntervalSet> build_Ln_Mn(const Int& q,
                                                       const Rational& t,
                                                       int a_flag,
                                                       const Int& q_next) {
  LnMnPattern p = ln_mn_pattern(q, t, a_flag, q_next);
  return {p.L.tile(q), p.M.tile(q)};
}

struct SingularStage {
  unsigned i = 0;
  int flag = 0;
  Rational mL, mM, l_bound;
  bool l_ok = false;        // m(L_i) >= l_bound
  bool m_ok = false;        // m(M_i) <= t_i
  bool m_subset_l = false;  // M_i ⊂ L_i
  bool image_in_m = false;  // h_i(L_i) ⊆ M_i, exact endpoint images
};

struct SingularReport {
  unsigned n = 0;
  std::vector<SingularStage> stages;
  Rational m_Cn;          // exact, via the periodic-refinement product
  Rational c_lower;       // Π certified stage bounds
  bool c_ok = false;
  Rational image_measure; // m(H_n(C_n)) = Π t_i · m(C_n), exact
  Rational image_upper;   // Π_{i<n} t_i
  bool image_ok = false;
  bool all_ok = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n"] = n;
    nlohmann::json st = nlohmann::json::array();
    for (const auto& s : stages)
      st.push_back({{"i", s.i},
                    {"flag", s.flag},
                    {"m_L", CircleMap::rat_json(s.mL)},
                    {"m_M", CircleMap::rat_json(s.mM)},
                    {"l_bound", CircleMap::rat_json(s.l_bound)},
                    {"l_ok", s.l_ok},
                    {"m_ok", s.m_ok},
                    {"m_subset_l", s.m_subset_l},
                    {"image_in_m", s.image_in_m}});
    j["stages"] = st;
    j["m_Cn"] = CircleMap::rat_json(m_Cn);
    j["c_lower"] = CircleMap::rat_json(c_lower);
    j["c_ok"] = c_ok;
    j["image_measure"] = CircleMap::rat_json(image_measure);
    j["image_upper"] = CircleMap::rat_json(image_upper);
    j["image_ok"] = image_ok;
    j["all_ok"] = all_ok;
    return j;
  }
};

// Exact singular-measure certificate. Each L_i is 1/q_i-periodic with
// endpoints on the 1/q_{i+1} grid, and q_{i+1} | q_{i+2} | ..., so every
// component of ∩_{j<i} L_j is a union of full 1/q_i cells; intersecting
// with L_i therefore multiplies the measure by m(L_i) exactly, and the
// conjugator image scales by Π t_i because each stage is affine of slope
// t_i on its pattern. No tiling is ever materialized.
inline SingularReport singular_bounds(const ConjugacyChain& c, unsigned n) {
  if (n < 1 || n > c.stages() || n >= c.schedule.depth())
    throw std::invalid_argument("singular_bounds: bad stage");
  if (c.ac_variant)
    throw std::invalid_argument("singular_bounds: chain is the AC variant");
  const Schedule& s = c.schedule;
  for (unsigned i = 1; i < n; ++i)
    if (s.q[i] % s.q[i - 1] != 0)
      throw std::logic_error("singular_bounds: q divisibility broken");

  SingularReport rep;
  rep.n = n;
  rep.m_Cn = 1;
  rep.c_lower = 1;
  rep.image_measure = 1;
  rep.image_upper = 1;
  bool ok = true;
  for (unsigned i = 1; i <= n; ++i) {
    const Rational& t = s.t[i - 1];
    LnMnPattern p = ln_mn_pattern(s.q[i - 1], t, c.bits[i - 1], s.q[i]);
    SingularStage st;
    st.i = i;
    st.flag = c.bits[i - 1];
    st.mL = p.L.measure();
    st.mM = p.M.measure();
    st.l_bound = p.l_bound;
    st.l_ok = st.mL >= st.l_bound;
    st.m_ok = st.mM <= t;
    st.m_subset_l = p.L.contains(p.M);
    // exact endpoint images through the kernel (one cell suffices: the
    // lift repeats it 1/q_i-periodically)
    const HHat& k = c.stage(i)->kernel();
    bool img_ok = true;
    std::vector<IntervalSet::Arc> img;
    for (const auto& arc : p.L.arcs()) {
      auto lo = c.bits[i - 1] == 0 ? k.exact_eval(arc.first)
                                   : k.exact_eval_inv(arc.first);
      auto hi = c.bits[i - 1] == 0 ? k.exact_eval(arc.second)
                                   : k.exact_eval_inv(arc.second);
      if (!lo || !hi) {
        img_ok = false;
        break;
      }
      // affine with slope exactly t on the zone
      if (*hi - *lo != t * (arc.second - arc.first)) {
        img_ok = false;
        break;
      }
      img.emplace_back(*lo, *hi);
    }
    st.image_in_m = img_ok && p.M.contains(IntervalSet(img));
    ok = ok && st.l_ok && st.m_ok && st.m_subset_l && st.image_in_m;
    rep.stages.push_back(st);
    rep.m_Cn *= st.mL;
    rep.c_lower *= st.l_bound;
    rep.image_measure *= t;
    if (i < n) rep.image_upper *= t;
  }
  rep.image_measure *= rep.m_Cn;
  rep.c_ok = rep.m_Cn >= rep.c_lower;
  rep.image_ok = rep.image_measure <= rep.image_upper;
  rep.all_ok = ok && rep.c_ok && rep.image_ok;
  return rep;
}

// ---- the absolutely continuous variant -----------------------------------

inline ConjugacyChain build_ac_chain(const BitSeq& a, const Schedule& s) {
  return build_chain(a, s, /*ac_variant=*/true);
}

struct ACReport {
  unsigned n = 0;
  Rational m_Xn;             // Π (1 - 2^{-(i+1)}), exact
  bool xn_ok = false;        // m(X_n) >= 1/2
  unsigned points_checked = 0;
  bool identity_on_Xn = false;  // exact fixed points at all checked samples

  nlohmann::json to_json() const {
    return {{"n", n},
            {"m_Xn", CircleMap::rat_json(m_Xn)},
            {"xn_ok", xn_ok},
            {"points_checked", points_checked},
            {"identity_on_Xn", identity_on_Xn}};
  }
};

// x ∈ X_n iff no stage's rescaled kernel touches it: the fractional part
// of q_i x must avoid (0, 2^{-(i+1)}) for every i <= n.
inline bool in_Xn(const ConjugacyChain& c, unsigned n, const Rational& x) {
  for (unsigned i = 1; i <= n; ++i) {
    Rational v = Rational(c.schedule.q[i - 1]) * x;
    v -= floor_rat(v);
    if (v != 0 && v < pow_rat(Rational(1, 2), i + 1)) return false;
  }
  return true;
}

inline ACReport ac_report(const ConjugacyChain& c, unsigned n,
                          unsigned samples = 64) {
  if (!c.ac_variant)
    throw std::invalid_argument("ac_report: chain is not the AC variant");
  if (n < 1 || n > c.stages())
    throw std::invalid_argument("ac_report: bad stage");
  ACReport rep;
  rep.n = n;
  rep.m_Xn = 1;
  for (unsigned i = 1; i <= n; ++i)
    rep.m_Xn *= 1 - pow_rat(Rational(1, 2), i + 1);
  rep.xn_ok = rep.m_Xn >= Rational(1, 2);
  rep.identity_on_Xn = true;
  // deterministic rational probes, kept only when they lie in X_n
  for (unsigned j = 0; j < samples; ++j) {
    Rational x(2 * j + 1, 2 * samples);
    if (!in_Xn(c, n, x)) continue;
    auto v = c.prefix(n)->exact_eval(x);
    ++rep.points_checked;
    if (!v || *v != x) rep.identity_on_Xn = false;
  }
  return rep;
}

// ---- empirical pushforward density ----------------------------------------

struct Histogram {
  unsigned bins = 0;
  std::vector<Real> density;  // mass(bin) * bins, so 1 means Lebesgue-flat
  Real max_density, min_density;

  std::string to_csv() const {
    std::ostringstream os;
    os << "bin_lo,bin_hi,density\n";
    for (unsigned j = 0; j < bins; ++j)
      os << static_cast<double>(j) / bins << ','
         << static_cast<double>(j + 1) / bins << ','
         << real_to_string(density[j]) << '\n';
    return os.str();
  }
};

// Density table of H_* m over uniform bins: bin mass = m(H^{-1}(bin)),
// computed from the monotone inverse at the bin edges (exact where the
// edge has an exact preimage, high-precision otherwise).
inline Histogram pushforward_histogram(const ConjugacyChain& c, unsigned n,
                                       unsigned bins) {
  if (bins < 16)
    throw std::invalid_argument("pushforward_histogram: bins < 16");
  if (n < 1 || n > c.stages())
    throw std::invalid_argument("pushforward_histogram: bad stage");
  const MapPtr& H = c.prefix(n);
  Histogram h;
  h.bins = bins;
  std::vector<Real> edge(bins + 1);
  for (unsigned j = 0; j <= bins; ++j) {
    Rational y(j, bins);
    if (auto e = H->exact_eval_inverse(y))
      edge[j] = to_real(*e);
    else
      edge[j] = H->eval_inverse(to_real(y));
  }
  h.density.resize(bins);
  for (unsigned j = 0; j < bins; ++j) {
    h.density[j] = (edge[j + 1] - edge[j]) * Real(bins);
    if (j == 0) {
      h.max_density = h.density[j];
      h.min_density = h.density[j];
    } else {
      h.max_density = std::max(h.max_density, h.density[j]);
      h.min_density = std::min(h.min_density, h.density[j]);
    }
  }
  return h;
}

}  // namespace abc

#endif  // CIRCLEABC_MEASURES_HPP
