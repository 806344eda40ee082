#ifndef CIRCLEABC_REAL_HPP
#define CIRCLEABC_REAL_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace abc {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

inline unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(bits * 0.30103) + 4;
}

// Scoped working precision. All Real temporaries created inside the scope
// use the precision installed here.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits)
      : saved_(Real::default_precision()) {
    Real::default_precision(bits_to_digits10(bits));
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

inline Real to_real(const Rational& q) { return Real(q); }

inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int floor_rat(const Rational& q) {
  return floor_div(numerator(q), denominator(q));
}

inline Int ceil_rat(const Rational& q) {
  return -floor_rat(-q);
}

inline Int floor_real(const Real& x) {
  Real f = floor(x);
  return Int(f.convert_to<boost::multiprecision::mpz_int>());
}

// Exact conversion: every finite mpfr value is a dyadic rational.
inline Rational real_to_rational(const Real& x) {
  mpq_t q;
  mpq_init(q);
  mpfr_get_q(q, x.backend().data());
  Rational r(q);
  mpq_clear(q);
  return r;
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.backend().data(), base.backend().data(), e);
  return r;
}

inline Rational pow_rat(const Rational& base, long e) {
  if (e >= 0) {
    Rational r(pow_int(numerator(base), static_cast<unsigned long>(e)),
               pow_int(denominator(base), static_cast<unsigned long>(e)));
    return r;
  }
  if (base == 0) throw std::domain_error("pow_rat: zero to negative power");
  return Rational(pow_int(denominator(base), static_cast<unsigned long>(-e)),
                  pow_int(numerator(base), static_cast<unsigned long>(-e)));
}

inline bool is_power_of_two(const Int& n) {
  if (n <= 0) return false;
  return mpz_popcount(n.backend().data()) == 1;
}

// Number of bits of |n| (0 for n == 0).
inline unsigned long bit_length(const Int& n) {
  if (n == 0) return 0;
  return mpz_sizeinbase(n.backend().data(), 2);
}

inline std::string int_to_string(const Int& n) { return n.str(); }

// Fixed-format decimal rendering, used wherever reports must be
// byte-reproducible.
inline std::string real_to_string(const Real& x, unsigned digits = 40) {
  return x.str(digits, std::ios_base::scientific);
}

}  // namespace abc

#endif  // CIRCLEABC_REAL_HPP
