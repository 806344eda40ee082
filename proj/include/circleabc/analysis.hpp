#ifndef CIRCLEABC_ANALYSIS_HPP
#define CIRCLEABC_ANALYSIS_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "circleabc/chain.hpp"
#include "circleabc/circle_map.hpp"
#include "circleabc/real.hpp"

namespace abc {

// ---- rotation number -------------------------------------------------------

struct RotationEstimate {
  Real value;
  unsigned long iterations = 0;
  Real residual;  // (1 + displacement oscillation) / m

  nlohmann::json to_json() const {
    return {{"value", real_to_string(value)},
            {"iterations", iterations},
            {"residual", real_to_string(residual)}};
  }
};

// Birkhoff average of the lift displacement: (F^m(x0) - x0)/m. For any
// circle homeomorphism |F^m(x) - x - m tau| <= 1, so 1/m alone already
// bounds the error; the displacement oscillation sharpens the report.
inline RotationEstimate rotation_number(const MapPtr& m, const Real& x0,
                                        unsigned long iterations) {
  if (iterations < 1)
    throw std::invalid_argument("rotation_number: iterations must be >= 1");
  Real x = x0;
  Real disp_min, disp_max;
  for (unsigned long j = 0; j < iterations; ++j) {
    Real next = m->eval(x);
    Real d = next - x;
    if (j == 0) {
      disp_min = d;
      disp_max = d;
    } else {
      disp_min = std::min(disp_min, d);
      disp_max = std::max(disp_max, d);
    }
    x = next;
  }
  RotationEstimate r;
  r.iterations = iterations;
  r.value = (x - x0) / Real(iterations);
  r.residual = (1 + (disp_max - disp_min)) / Real(iterations);
  return r;
}

// ---- conjugacy between two chains ------------------------------------------

inline void require_same_schedule(const ConjugacyChain& a,
                                  const ConjugacyChain& b) {
  if (a.schedule.q != b.schedule.q || a.schedule.alpha != b.schedule.alpha)
    throw std::invalid_argument("chains are not on the same schedule");
}

// G_n = H_{b,n} ∘ H_{a,n}^{-1}, the truncation-level conjugator; G_n(0) = 0.
inline MapPtr conjugacy_between(const ConjugacyChain& a,
                                const ConjugacyChain& b, unsigned n) {
  require_same_schedule(a, b);
  if (n < 1 || n > a.stages() || n > b.stages())
    throw std::invalid_argument("conjugacy_between: bad stage");
  return CircleMap::compose(b.prefix(n), a.prefix(n)->inverse_of());
}

// The same conjugator with matching stages cancelled from the middle:
// h_{b,i} ∘ h_{a,i}^{-1} = id whenever the flags agree, so only the prefix
// up to the deepest mismatch survives.
inline MapPtr cancelled_conjugacy(const ConjugacyChain& a,
                                  const ConjugacyChain& b, unsigned n) {
  require_same_schedule(a, b);
  if (n > a.stages() || n > b.stages())
    throw std::invalid_argument("cancelled_conjugacy: bad stage");
  unsigned m = 0;
  for (unsigned i = 1; i <= n; ++i)
    if (a.bits[i - 1] != b.bits[i - 1]) m = i;
  if (m == 0) return CircleMap::identity();
  return CircleMap::compose(b.prefix(m), a.prefix(m)->inverse_of());
}

// ---- (R1) stabilization ------------------------------------------------

struct R1Certificate {
  unsigned N = 0;
  unsigned depth = 0;
  MapPtr stable;                // the common cancelled tree G_N
  std::vector<bool> tree_equal;  // G_n == G_N node-for-node, n = N..depth
  std::vector<Real> spot_d0;     // pointwise |G_n - G_N| spot checks
  bool holds = true;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["N"] = N;
    j["depth"] = depth;
    j["stable_map"] = stable->to_json();
    j["tree_equal"] = tree_equal;
    nlohmann::json d0 = nlohmann::json::array();
    for (const Real& v : spot_d0) d0.push_back(real_to_string(v));
    j["spot_d0"] = d0;
    j["holds"] = holds;
    return j;
  }
};

inline R1Certificate r1_stabilization(const ConjugacyChain& a,
                                      const ConjugacyChain& b, unsigned N) {
  require_same_schedule(a, b);
  unsigned depth = std::min(a.stages(), b.stages());
  if (N < 1 || N > depth)
    throw std::invalid_argument("r1_stabilization: bad N");
  for (unsigned i = N + 1; i <= depth; ++i)
    if (a.bits[i - 1] != b.bits[i - 1])
      throw std::invalid_argument(
          "r1_stabilization: sequences disagree beyond N");
  R1Certificate cert;
  cert.N = N;
  cert.depth = depth;
  cert.stable = cancelled_conjugacy(a, b, N);
  for (unsigned n = N; n <= depth; ++n) {
    MapPtr Gn = cancelled_conjugacy(a, b, n);
    bool eq = CircleMap::structurally_equal(Gn, cert.stable);
    cert.tree_equal.push_back(eq);
    // identical trees evaluate identically; record the exact zero
    Real d0 = eq ? Real(0)
                 : abs(Gn->eval(Real(1) / 3) - cert.stable->eval(Real(1) / 3));
    cert.spot_d0.push_back(d0);
    if (!eq || d0 != 0) cert.holds = false;
  }
  return cert;
}

// ---- (R2) Hölder witness ----------------------------------------------

struct WitnessStage {
  unsigned i = 0;
  int flag = 0;     // a_i
  bool mismatch = false;
  Int k1, k2;       // grid-snap indices over q_{i+1}
  Int ell;          // chosen translate over q_i
  Rational left, right;  // the chosen component of K_i
};

struct WitnessReport {
  unsigned stage = 0;
  std::vector<unsigned> mismatch_set;  // 𝒩 ∩ [1, n]
  std::vector<WitnessStage> stages;
  Rational x_prime, y_prime;  // K̃_n endpoints, denominator q_{n+1}
  Rational x, y;              // images under H_{a,n} (exact here)
  Rational slope_product;     // Π_{i∈𝒩, i≤n} t_i^{-2}
  Rational gap_bound;         // t_n / (8 q_n)
  bool gap_ok = false;        // |y'-x'| >= t_n/(8 q_n)
  Real quotient;              // |G(x)-G(y)| / |x-y|^{1/n}
  Int lower_bound;            // q_n
  bool verdict = false;       // quotient >= q_n, decided in exact arithmetic
  unsigned precision_bits = 0;
  std::vector<std::pair<Real, Real>> exponent_sweep;  // (d, quotient_d)

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["stage"] = stage;
    j["mismatch_set"] = mismatch_set;
    nlohmann::json st = nlohmann::json::array();
    for (const auto& s : stages)
      st.push_back({{"i", s.i},
                    {"flag", s.flag},
                    {"mismatch", s.mismatch},
                    {"k1", int_to_string(s.k1)},
                    {"k2", int_to_string(s.k2)},
                    {"ell", int_to_string(s.ell)},
                    {"left", CircleMap::rat_json(s.left)},
                    {"right", CircleMap::rat_json(s.right)}});
    j["stages"] = st;
    j["x_prime"] = CircleMap::rat_json(x_prime);
    j["y_prime"] = CircleMap::rat_json(y_prime);
    j["x"] = CircleMap::rat_json(x);
    j["y"] = CircleMap::rat_json(y);
    j["slope_product"] = CircleMap::rat_json(slope_product);
    j["gap_bound"] = CircleMap::rat_json(gap_bound);
    j["gap_ok"] = gap_ok;
    j["quotient"] = real_to_string(quotient);
    j["lower_bound"] = int_to_string(lower_bound);
    j["verdict"] = verdict;
    j["precision_bits"] = precision_bits;
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& [d, qd] : exponent_sweep)
      sweep.push_back({{"d", real_to_string(d)},
                       {"quotient", real_to_string(qd)}});
    j["exponent_sweep"] = sweep;
    return j;
  }
};

namespace detail {

// Grid-snap window [lo, hi] to the largest [k1/q, k2/q] it contains.
inline void snap_window(const Rational& lo, const Rational& hi, const Int& q,
                        Int& k1, Int& k2) {
  k1 = ceil_rat(lo * q);
  k2 = floor_rat(hi * q);
  if (k1 >= k2)
    throw std::runtime_error(
        "witness window too narrow for the grid (schedule constraint "
        "violated)");
}

inline Rational exact_or_throw(const MapPtr& m, const Rational& x,
                               const char* what) {
  auto v = m->exact_eval(x);
  if (!v) throw std::logic_error(std::string("exact path failed in ") + what);
  return *v;
}

}  // namespace detail

// Builds the stage-n Hölder-violation witness for two chains differing at
// stage n. Windows around the slope-t^{-2} zones of h_b∘h_a^{-1} are snapped
// to the 1/q_{i+1} grid, translated components are nested through the
// chain (smallest admissible left endpoint each time), and the resulting
// pair is pushed through both conjugators entirely in exact arithmetic.
inline WitnessReport holder_witness(const ConjugacyChain& a,
                                    const ConjugacyChain& b, unsigned n,
                                    const std::vector<Real>& sweep = {}) {
  require_same_schedule(a, b);
  if (n < 1 || n >= a.schedule.depth() || n > a.stages() || n > b.stages())
    throw std::invalid_argument("holder_witness: bad stage");
  if (a.bits[n - 1] == b.bits[n - 1])
    throw std::invalid_argument("holder_witness: flags agree at stage n");
  const Schedule& s = a.schedule;

  WitnessReport rep;
  rep.stage = n;
  for (unsigned i = 1; i <= n; ++i)
    if (a.bits[i - 1] != b.bits[i - 1]) rep.mismatch_set.push_back(i);

  // Per-stage snapped windows. For a_i = 1 the component must land (via the
  // inverted kernel) in the slope-1/t^2 window of h∘h, centered at 1/(2q_i);
  // for a_i = 0 in the corresponding window of h^{-1}∘h^{-1} near 3t_i/q_i.
  std::vector<WitnessStage> ws(n);
  for (unsigned i = 1; i <= n; ++i) {
    const Rational& t = s.t[i - 1];
    Rational qi(s.q[i - 1]);
    Rational center, radius;
    if (a.bits[i - 1] == 1) {
      center = 1 / (2 * qi);
      radius = t / (4 * qi);
    } else {
      center = 3 * t / qi;
      radius = t / (8 * qi);
    }
    WitnessStage& w = ws[i - 1];
    w.i = i;
    w.flag = a.bits[i - 1];
    w.mismatch = a.bits[i - 1] != b.bits[i - 1];
    detail::snap_window(center - radius, center + radius, s.q[i], w.k1, w.k2);
  }

  // Nested component selection. A component of K_i spans whole cells of
  // width 1/q_{i+1}, and each stage map fixes every multiple of 1/q_{i+1},
  // so a stage-(i+1) component nests iff its cell lies inside K̃_i.
  ws[0].ell = 0;
  ws[0].left = Rational(ws[0].k1, s.q[1]);
  ws[0].right = Rational(ws[0].k2, s.q[1]);
  for (unsigned i = 2; i <= n; ++i) {
    WitnessStage& w = ws[i - 1];
    const WitnessStage& prev = ws[i - 2];
    Int cells = s.q[i - 1] / s.q[i - 2];  // q_i / q_{i-1}, exact
    w.ell = prev.ell * cells + prev.k1;   // smallest admissible translate
    w.left = Rational(w.ell, s.q[i - 1]) + Rational(w.k1, s.q[i]);
    w.right = Rational(w.ell, s.q[i - 1]) + Rational(w.k2, s.q[i]);
    // verify nesting exactly: h_{a,i}(K̃_i) ⊆ K̃_{i-1}
    Rational img_l = detail::exact_or_throw(a.stage(i), w.left, "nesting");
    Rational img_r = detail::exact_or_throw(a.stage(i), w.right, "nesting");
    if (!(prev.left <= img_l && img_l <= img_r && img_r <= prev.right))
      throw std::logic_error("witness nesting containment failed");
  }
  rep.stages = ws;
  rep.x_prime = ws[n - 1].left;
  rep.y_prime = ws[n - 1].right;

  rep.gap_bound = s.t[n - 1] / (8 * Rational(s.q[n - 1]));
  rep.gap_ok = rep.y_prime - rep.x_prime >= rep.gap_bound;

  // Exact images and exact affinity checks.
  rep.x = detail::exact_or_throw(a.prefix(n), rep.x_prime, "H_a");
  rep.y = detail::exact_or_throw(a.prefix(n), rep.y_prime, "H_a");
  Rational gx = detail::exact_or_throw(b.prefix(n), rep.x_prime, "H_b");
  Rational gy = detail::exact_or_throw(b.prefix(n), rep.y_prime, "H_b");
  Rational t_prod = 1;
  for (unsigned i = 1; i <= n; ++i) t_prod *= s.t[i - 1];
  if (rep.y - rep.x != t_prod * (rep.y_prime - rep.x_prime))
    throw std::logic_error("witness: H_a is not affine of slope Π t_i");
  rep.slope_product = 1;
  for (unsigned i : rep.mismatch_set)
    rep.slope_product /= s.t[i - 1] * s.t[i - 1];
  Rational dg = gy - gx;
  if (dg < 0) dg = -dg;
  Rational dx = rep.y - rep.x;
  if (dx < 0) dx = -dx;
  if (dg != rep.slope_product * dx)
    throw std::logic_error("witness: conjugator slope product mismatch");

  // Quotient at the paper exponent 1/n, with the verdict decided exactly:
  // |ΔG|/|Δx|^{1/n} >= q_n  <=>  |ΔG|^n >= q_n^n · |Δx|.
  rep.lower_bound = s.q[n - 1];
  rep.verdict =
      pow_rat(dg, n) >= pow_rat(Rational(rep.lower_bound), n) * dx;
  unsigned bits = std::max<unsigned>(
      64, 8 * static_cast<unsigned>(bit_length(s.q[n])));
  rep.precision_bits = bits;
  {
    PrecisionGuard prec(bits);
    Real dgr = to_real(dg), dxr = to_real(dx);
    rep.quotient = dgr / pow(dxr, Real(1) / Real(static_cast<int>(n)));
    std::vector<Real> ds = sweep;
    if (ds.empty())
      for (int num : {1, 2, 5, 9})
        ds.push_back(Real(num) / 10);
    for (const Real& d : ds)
      rep.exponent_sweep.emplace_back(d, dgr / pow(dxr, d));
  }
  return rep;
}

// ---- uniqueness-of-conjugacy probe -------------------------------------

struct ConjugacyProbe {
  bool fixes_zero = false;
  Real conjugacy_defect;     // sup over samples of |G(S(x)) - T(G(x))|
  bool conjugacy_ok = false;
  bool rotation_breaks_normalization = false;
  bool pass = false;

  nlohmann::json to_json() const {
    return {{"fixes_zero", fixes_zero},
            {"conjugacy_defect", real_to_string(conjugacy_defect)},
            {"conjugacy_ok", conjugacy_ok},
            {"rotation_breaks_normalization", rotation_breaks_normalization},
            {"pass", pass}};
  }
};

inline ConjugacyProbe unique_conjugacy_probe(const MapPtr& S, const MapPtr& T,
                                             const MapPtr& G,
                                             unsigned samples = 1000,
                                             const Rational& beta = Rational(1,
                                                                             3)) {
  ConjugacyProbe p;
  Real tolerance = pow(Real(2), -static_cast<long>(
                                    Real::default_precision() * 3.32 / 2));
  p.fixes_zero = abs(G->eval(Real(0))) < tolerance;
  Real worst(0);
  for (unsigned j = 0; j < samples; ++j) {
    Real x = Real(j) / samples;
    Real lhs = G->eval(S->eval(x));
    Real rhs = T->eval(G->eval(x));
    Real d = abs(lhs - rhs);
    d -= floor(d + Real(1) / 2);  // compare on the circle
    worst = std::max(worst, Real(abs(d)));
  }
  p.conjugacy_defect = worst;
  p.conjugacy_ok = worst < tolerance;
  if (beta != 0) {
    MapPtr shifted = CircleMap::compose(CircleMap::rotation(beta), G);
    Real v = shifted->eval(Real(0));
    v -= floor(v + Real(1) / 2);
    p.rotation_breaks_normalization = abs(v) > tolerance;
  }
  p.pass = p.fixes_zero && p.conjugacy_ok && p.rotation_breaks_normalization;
  return p;
}

}  // namespace abc

#endif  // CIRCLEABC_ANALYSIS_HPP
