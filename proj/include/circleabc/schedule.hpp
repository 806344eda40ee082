#ifndef CIRCLEABC_SCHEDULE_HPP
#define CIRCLEABC_SCHEDULE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "circleabc/real.hpp"

namespace abc {

struct ScheduleError : std::runtime_error {
  explicit ScheduleError(const std::string& what) : std::runtime_error(what) {}
};

// Conservative upper bound for the k-th constant of the conjugation
// closeness estimate; any valid upper bound preserves the certified
// inequalities. C_0 = 1.
inline Int constant_Ck(unsigned k) {
  Int f = 1;
  for (unsigned i = 2; i <= k + 1; ++i) f *= i;
  return f << k;  // (k+1)! * 2^k
}

// Per-stage closeness certificate: the eventual |alpha - alpha_n| is below
// `gap` (a certified tail bound), which in turn is below `bound`, the
// right-hand side 1/(2 n^2 C_n |||H|||^{n+1}) needed for convergence.
struct ClosenessCertificate {
  unsigned stage = 0;
  Rational norm_estimate;  // upper estimate of |||H_{a,n}|||_{n+1} used
  Int constant_Cn;
  Rational bound;
  Rational gap;
  bool conforming = true;  // false on relaxed-growth demo stages

  nlohmann::json to_json() const {
    return {{"stage", stage},
            {"norm_estimate", rat_json(norm_estimate)},
            {"constant_Cn", int_to_string(constant_Cn)},
            {"bound", rat_json(bound)},
            {"gap", rat_json(gap)},
            {"conforming", conforming}};
  }
  static ClosenessCertificate from_json(const nlohmann::json& j) {
    ClosenessCertificate c;
    c.stage = j.at("stage").get<unsigned>();
    c.norm_estimate = rat_from_json(j.at("norm_estimate"));
    c.constant_Cn = Int(j.at("constant_Cn").get<std::string>());
    c.bound = rat_from_json(j.at("bound"));
    c.gap = rat_from_json(j.at("gap"));
    c.conforming = j.at("conforming").get<bool>();
    return c;
  }
  static nlohmann::json rat_json(const Rational& r) {
    return {{"num", int_to_string(numerator(r))},
            {"den", int_to_string(denominator(r))}};
  }
  static Rational rat_from_json(const nlohmann::json& j) {
    return Rational(Int(j.at("num").get<std::string>()),
                    Int(j.at("den").get<std::string>()));
  }
};

// Exact parameter stream (q_n, p_n, t_n, alpha_n, l_n) of the construction.
// Values are immutable once recorded; extension returns a new object.
class Schedule {
 public:
  enum class Mode { SynthesizedLiouville, TargetAlpha };

  Mode mode = Mode::SynthesizedLiouville;
  unsigned zd_rank = 0;  // 0: single-map mode; >= 2: Z^d mode
  bool relaxed = false;  // true once a non-conforming demo stage exists
  unsigned depth_cap = 3;  // chain-stage cap; holds up to cap+1 q entries

  std::vector<Int> q;
  std::vector<Int> p;          // numerators of the primary stream
  std::vector<Rational> t;     // t_n = q_n^(1-2n)
  std::vector<Rational> alpha; // primary stream p_n/q_n
  std::vector<Int> l;          // multiplier of stage n (size depth-1)
  std::vector<std::vector<Int>> p_zd;          // per-stage [i=1..d]
  std::vector<std::vector<Rational>> alpha_zd; // per-stage [i=1..d]
  std::vector<ClosenessCertificate> certificates;  // size depth-1

  unsigned depth() const { return static_cast<unsigned>(q.size()); }

  nlohmann::json to_json() const;
  static Schedule from_json(const nlohmann::json& j);
};

inline Rational t_of(const Int& qn, unsigned n) {
  // q^(1-2n) = 1 / q^(2n-1)
  return Rational(1, pow_int(qn, 2 * n - 1));
}

inline Schedule init_schedule(const Int& q1,
                              Schedule::Mode mode =
                                  Schedule::Mode::SynthesizedLiouville,
                              const Int& p1 = 1, unsigned zd_rank = 0) {
  if (q1 < 32)
    throw ScheduleError("init_schedule: q1 must be >= 32 (t_1 < 1/20)");
  if (zd_rank == 1)
    throw ScheduleError("init_schedule: Z^d rank must be >= 2");
  if (zd_rank >= 2 && !is_power_of_two(q1))
    throw ScheduleError("init_schedule: q1 must be a power of 2 in Z^d mode");
  if (p1 < 1 || p1 >= q1 || gcd(p1, q1) != 1)
    throw ScheduleError("init_schedule: p1 must be in [1, q1) and coprime");
  if (zd_rank >= 2 && p1 % 2 == 0)
    throw ScheduleError("init_schedule: p1 must be odd in Z^d mode");
  Schedule s;
  s.mode = mode;
  s.zd_rank = zd_rank;
  s.q.push_back(q1);
  s.p.push_back(p1);
  s.t.push_back(Rational(1, q1));
  s.alpha.push_back(Rational(p1, q1));
  if (zd_rank >= 2) {
    std::vector<Int> ps(zd_rank, p1);
    std::vector<Rational> as(zd_rank, Rational(p1, q1));
    s.p_zd.push_back(ps);
    s.alpha_zd.push_back(as);
  }
  return s;
}

namespace detail {

// Exact rational capture of a Real (every finite mpfr value is dyadic).
inline Rational rational_upper(const Real& x) { return real_to_rational(x); }

inline Int smallest_pow2_at_least(const Rational& x) {
  Int c = ceil_rat(x);
  if (c < 1) return 1;
  Int r = 1;
  while (r < c) r <<= 1;
  return r;
}

}  // namespace detail

// Appends stage n+1 with q_{n+1} = l_n q_n^2, l_n the smallest power of 2
// meeting (a) the base growth q_{n+1} >= q_n^{2n}, (b) the closeness bound
// with a factor-2 margin so the recorded tail gap is strictly below it,
// and (c) the witness-interval margin q_{n+1} >= 64 q_n / t_n.
inline Schedule extend_schedule(const Schedule& s, const Real& norm_estimate,
                                bool allow_relaxed = false) {
  if (s.mode != Schedule::Mode::SynthesizedLiouville)
    throw ScheduleError("extend_schedule: schedule is not in synthesized mode");
  if (s.zd_rank >= 2)
    throw ScheduleError("extend_schedule: use zd_extend_schedule in Z^d mode");
  unsigned n = s.depth();
  if (n >= s.depth_cap + 1 && !allow_relaxed)
    throw ScheduleError("extend_schedule: depth cap exceeded");
  Rational est = norm_estimate < 1 ? Rational(1)
                                   : detail::rational_upper(norm_estimate);
  Int Cn = constant_Ck(n);
  const Int& qn = s.q.back();
  // thresholds for q_{n+1}
  Int growth = 64 * pow_int(qn, 2 * n);  // covers (a) and (c)
  Rational closeness = 4 * Rational(n) * n * Cn * pow_rat(est, n + 1);
  Rational need = closeness > Rational(growth) ? closeness : Rational(growth);
  Int ln = detail::smallest_pow2_at_least(need / (qn * qn));
  Int qn1 = ln * qn * qn;

  Schedule out = s;
  out.l.push_back(ln);
  out.q.push_back(qn1);
  out.p.push_back(s.p.back() * ln * qn + 1);
  out.t.push_back(t_of(qn1, n + 1));
  out.alpha.push_back(s.alpha.back() + Rational(1, qn1));
  if (gcd(out.p.back(), qn1) != 1)
    throw ScheduleError("extend_schedule: internal coprimality failure");

  ClosenessCertificate cert;
  cert.stage = n;
  cert.norm_estimate = est;
  cert.constant_Cn = Cn;
  cert.bound = Rational(1) / (2 * Rational(n) * n * Cn * pow_rat(est, n + 1));
  cert.gap = Rational(2, qn1);
  cert.conforming = !(n >= s.depth_cap + 1);
  if (!cert.conforming) out.relaxed = true;
  if (cert.gap >= cert.bound)
    throw ScheduleError("extend_schedule: closeness certificate failed");
  out.certificates.push_back(cert);
  return out;
}

// Target-alpha mode: the caller supplies the next convergent p/q of a
// Liouville number; the same constraints are validated instead of solved.
inline Schedule extend_schedule_target(const Schedule& s, const Int& p_next,
                                       const Int& q_next,
                                       const Real& norm_estimate) {
  if (s.mode != Schedule::Mode::TargetAlpha)
    throw ScheduleError("extend_schedule_target: not in target-alpha mode");
  unsigned n = s.depth();
  if (n >= s.depth_cap + 1)
    throw ScheduleError("extend_schedule_target: depth cap exceeded");
  const Int& qn = s.q.back();
  if (q_next < 64 * pow_int(qn, 2 * n))
    throw ScheduleError("extend_schedule_target: growth constraint violated");
  if (q_next % (qn * qn) != 0)
    throw ScheduleError("extend_schedule_target: q_next must be l * q_n^2");
  if (gcd(p_next, q_next) != 1)
    throw ScheduleError("extend_schedule_target: p, q not coprime");
  Rational step = Rational(p_next, q_next) - s.alpha.back();
  if (step <= 0 || step > Rational(1, q_next))
    throw ScheduleError("extend_schedule_target: convergent step out of range");
  Rational est = norm_estimate < 1 ? Rational(1)
                                   : detail::rational_upper(norm_estimate);
  Int Cn = constant_Ck(n);
  Rational bound =
      Rational(1) / (2 * Rational(n) * n * Cn * pow_rat(est, n + 1));
  Rational gap = Rational(2, q_next);
  if (gap >= bound)
    throw ScheduleError("extend_schedule_target: closeness bound violated");

  Schedule out = s;
  out.l.push_back(q_next / (qn * qn));
  out.q.push_back(q_next);
  out.p.push_back(p_next);
  out.t.push_back(t_of(q_next, n + 1));
  out.alpha.push_back(Rational(p_next, q_next));
  ClosenessCertificate cert;
  cert.stage = n;
  cert.norm_estimate = est;
  cert.constant_Cn = Cn;
  cert.bound = bound;
  cert.gap = gap;
  out.certificates.push_back(cert);
  return out;
}

// Z^d extension: l_n is additionally forced above 4^{dn} C_n est^{n+1} and
// every stream i steps by 3^{(i-1)n} / q_{n+1}.
inline Schedule zd_extend_schedule(const Schedule& s, unsigned d,
                                   const Real& norm_estimate) {
  if (s.zd_rank < 2 || d != s.zd_rank)
    throw ScheduleError("zd_extend_schedule: schedule rank mismatch");
  unsigned n = s.depth();
  if (n >= s.depth_cap + 1)
    throw ScheduleError("zd_extend_schedule: depth cap exceeded");
  Rational est = norm_estimate < 1 ? Rational(1)
                                   : detail::rational_upper(norm_estimate);
  Int Cn = constant_Ck(n);
  const Int& qn = s.q.back();
  Rational estpow = pow_rat(est, n + 1);
  // smallest power of 2 above the Z^d threshold ...
  Rational zd_need = Rational(pow_int(Int(4), d * n)) * Cn * estpow;
  Int ln = detail::smallest_pow2_at_least(zd_need + 1);
  // ... that also meets the growth and closeness thresholds for q_{n+1}
  Int growth = 64 * pow_int(qn, 2 * n);
  Int b3 = pow_int(Int(3), (d - 1) * n);
  Rational closeness = 4 * Rational(n) * n * Cn * estpow * b3;
  Rational need = closeness > Rational(growth) ? closeness : Rational(growth);
  Int ln_floor = detail::smallest_pow2_at_least(need / (qn * qn));
  if (ln < ln_floor) ln = ln_floor;
  Int qn1 = ln * qn * qn;

  Schedule out = s;
  out.l.push_back(ln);
  out.q.push_back(qn1);
  out.t.push_back(t_of(qn1, n + 1));
  std::vector<Int> ps(d);
  std::vector<Rational> as(d);
  Int pow3 = 1;
  for (unsigned i = 0; i < d; ++i) {
    ps[i] = s.p_zd.back()[i] * ln * qn + pow3;
    as[i] = s.alpha_zd.back()[i] + Rational(pow3, qn1);
    if (ps[i] % 2 == 0 || gcd(ps[i], qn1) != 1)
      throw ScheduleError("zd_extend_schedule: coprimality failure");
    pow3 *= pow_int(Int(3), n);
  }
  out.p_zd.push_back(ps);
  out.alpha_zd.push_back(as);
  out.p.push_back(ps[0]);
  out.alpha.push_back(as[0]);

  ClosenessCertificate cert;
  cert.stage = n;
  cert.norm_estimate = est;
  cert.constant_Cn = Cn;
  cert.bound = Rational(1) / (2 * Rational(n) * n * Cn * estpow);
  cert.gap = Rational(2 * b3, qn1);  // worst stream (i = d) tail bound
  if (cert.gap >= cert.bound)
    throw ScheduleError("zd_extend_schedule: closeness certificate failed");
  out.certificates.push_back(cert);
  return out;
}

// ---- Lemma 6.2 hypothesis verification (a_{i,n} = q_{n+1}, b = 3^{(i-1)n})
struct Lemma62Stage {
  unsigned n = 0;
  bool cond1 = false;  // divisibility + ratio >= 2^{(d+1)^{n-1}}
  bool cond2 = false;  // b_{i,n} < 2^{(d+1)^{n-(sqrt2+eps)sqrt n}}
  bool cond3 = false;  // cross ratios decreasing toward 0
  bool cond4 = false;  // a_{1,n} within 2^{±(d+1)^{...}} of every a_{i,n}
};

struct Lemma62Report {
  double epsilon = 0.1;
  unsigned rank = 2;
  std::vector<Lemma62Stage> stages;  // recorded n = 1..depth-1
  // first n (by formula, may exceed the recorded range) from which
  // conditions (2) and (4) hold; (1)/(3) are structural from then on
  unsigned first_n_all_conditions = 0;
  bool all_recorded_pass = false;
};

namespace detail {

// exponent E(n) = (d+1)^(n - (sqrt(2)+eps) sqrt(n)) as a Real
inline Real lemma62_exponent(unsigned d, unsigned n, double eps) {
  Real arg = Real(n) - (sqrt(Real(2)) + Real(eps)) * sqrt(Real(n));
  return exp(arg * log(Real(d + 1)));
}

inline bool lemma62_cond2(unsigned d, unsigned n, double eps) {
  // largest b is 3^{(d-1)n}: need (d-1) n log2(3) < (d+1)^{n - ...}
  Real lhs = Real((d - 1) * n) * log(Real(3)) / log(Real(2));
  return lhs < lemma62_exponent(d, n, eps);
}

}  // namespace detail

inline Lemma62Report check_lemma62(const Schedule& s, unsigned d,
                                   double eps = 0.1) {
  if (s.zd_rank < 2 || d != s.zd_rank)
    throw ScheduleError("check_lemma62: schedule rank mismatch");
  if (s.depth() < 2)
    throw ScheduleError("check_lemma62: need depth >= 2");
  PrecisionGuard prec(256);
  Lemma62Report rep;
  rep.epsilon = eps;
  rep.rank = d;
  rep.all_recorded_pass = true;
  // stages n = 1 .. depth-1 have a_{i,n} = q_{n+1} recorded
  for (unsigned n = 1; n + 1 <= s.depth(); ++n) {
    Lemma62Stage st;
    st.n = n;
    const Int& an = s.q[n];  // q_{n+1}
    // (1): needs q_{n+2}; evaluable for n <= depth-2
    if (n + 2 <= s.depth()) {
      const Int& an1 = s.q[n + 1];
      bool divides = (an1 % an) == 0;
      // ratio >= 2^{(d+1)^{n-1}}
      Int thresh = pow_int(Int(2), pow_int(Int(d + 1), n - 1)
                                        .convert_to<unsigned long>());
      st.cond1 = divides && (an1 / an >= thresh);
    } else {
      st.cond1 = true;  // vacuous at the frontier; structural elsewhere
    }
    st.cond2 = detail::lemma62_cond2(d, n, eps);
    // (3): a_{i,n} b_{j,n} / (b_{i,n} a_{j,n}) = 3^{(j-i)n} for i > j;
    // strictly decreasing in n toward 0 -- check monotone decrease
    if (n + 2 <= s.depth()) {
      // worst pair i = d, j = 1: ratio 3^{-(d-1)n} vs 3^{-(d-1)(n+1)}
      st.cond3 = Rational(1, pow_int(Int(3), (d - 1) * (n + 1))) <
                 Rational(1, pow_int(Int(3), (d - 1) * n));
    } else {
      st.cond3 = true;
    }
    // (4): a_{i,n} = a_{1,n} for all i, so it reduces to E(n) > 0, which
    // holds for every n (the exponential is positive)
    st.cond4 = true;
    rep.stages.push_back(st);
    if (!(st.cond1 && st.cond2 && st.cond3 && st.cond4))
      rep.all_recorded_pass = false;
  }
  // formula scan for the first n with condition (2) satisfied
  for (unsigned n = 1; n <= 4096; ++n) {
    if (detail::lemma62_cond2(d, n, eps)) {
      rep.first_n_all_conditions = n;
      break;
    }
  }
  return rep;
}

// ---- serialization ------------------------------------------------------

inline nlohmann::json Schedule::to_json() const {
  nlohmann::json j;
  j["mode"] = mode == Mode::SynthesizedLiouville ? "synthesized-liouville"
                                                 : "target-alpha";
  j["zd_rank"] = zd_rank;
  j["relaxed"] = relaxed;
  j["depth_cap"] = depth_cap;
  auto ints = [](const std::vector<Int>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const Int& x : v) a.push_back(int_to_string(x));
    return a;
  };
  auto rats = [](const std::vector<Rational>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const Rational& x : v) a.push_back(ClosenessCertificate::rat_json(x));
    return a;
  };
  j["q"] = ints(q);
  j["p"] = ints(p);
  j["l"] = ints(l);
  j["t"] = rats(t);
  j["alpha"] = rats(alpha);
  if (zd_rank >= 2) {
    nlohmann::json pz = nlohmann::json::array(), az = nlohmann::json::array();
    for (const auto& row : p_zd) pz.push_back(ints(row));
    for (const auto& row : alpha_zd) az.push_back(rats(row));
    j["p_zd"] = pz;
    j["alpha_zd"] = az;
  }
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& c : certificates) certs.push_back(c.to_json());
  j["certificates"] = certs;
  return j;
}

inline Schedule Schedule::from_json(const nlohmann::json& j) {
  Schedule s;
  s.mode = j.at("mode").get<std::string>() == "target-alpha"
               ? Mode::TargetAlpha
               : Mode::SynthesizedLiouville;
  s.zd_rank = j.at("zd_rank").get<unsigned>();
  s.relaxed = j.at("relaxed").get<bool>();
  s.depth_cap = j.at("depth_cap").get<unsigned>();
  auto ints = [](const nlohmann::json& a) {
    std::vector<Int> v;
    for (const auto& x : a) v.emplace_back(x.get<std::string>());
    return v;
  };
  auto rats = [](const nlohmann::json& a) {
    std::vector<Rational> v;
    for (const auto& x : a) v.push_back(ClosenessCertificate::rat_from_json(x));
    return v;
  };
  s.q = ints(j.at("q"));
  s.p = ints(j.at("p"));
  s.l = ints(j.at("l"));
  s.t = rats(j.at("t"));
  s.alpha = rats(j.at("alpha"));
  if (s.zd_rank >= 2) {
    for (const auto& row : j.at("p_zd")) s.p_zd.push_back(ints(row));
    for (const auto& row : j.at("alpha_zd")) s.alpha_zd.push_back(rats(row));
  }
  for (const auto& c : j.at("certificates"))
    s.certificates.push_back(ClosenessCertificate::from_json(c));
  return s;
}

}  // namespace abc

#endif  // CIRCLEABC_SCHEDULE_HPP
