#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "angulon/errors.hpp"

namespace angulon {

using Integer = mpz_class;
using Rational = mpq_class;

/// Canonical rational n/d: reduced, positive denominator, zero as 0/1.
inline Rational rat_normalize(const Integer& n, const Integer& d) {
  if (d == 0) throw DivisionByZero("rational with zero denominator");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline Rational rat_normalize(long n, long d) {
  return rat_normalize(Integer(n), Integer(d));
}

inline std::string to_string(const Rational& r) { return r.get_str(); }
inline std::string to_string(const Integer& z) { return z.get_str(); }

inline Integer factorial(unsigned long k) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

inline Rational pow(const Rational& base, unsigned long e) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
  return r;
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline Integer parse_integer(std::string_view s) {
  std::string_view body = s;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) body.remove_prefix(1);
  if (!all_digits(body)) throw DomainError("malformed integer '" + std::string(s) + "'");
  std::string text(s.front() == '+' ? s.substr(1) : s);
  return Integer(text, 10);
}

}  // namespace detail

/// Parses "p", "p/q" or a decimal such as "-0.25" or "1.5e-3" exactly.
inline Rational parse_rational(std::string_view token) {
  const std::string tok(token);
  if (tok.empty()) throw DomainError("empty number");
  if (auto slash = tok.find('/'); slash != std::string::npos) {
    Integer n = detail::parse_integer(std::string_view(tok).substr(0, slash));
    std::string_view den = std::string_view(tok).substr(slash + 1);
    if (!detail::all_digits(den)) throw DomainError("malformed fraction '" + tok + "'");
    return rat_normalize(n, Integer(std::string(den), 10));
  }
  std::string mantissa = tok;
  long exponent = 0;
  if (auto e = tok.find_first_of("eE"); e != std::string::npos) {
    std::string_view ex = std::string_view(tok).substr(e + 1);
    Integer ez = detail::parse_integer(ex);
    if (!ez.fits_slong_p() || abs(ez) > 10000) throw DomainError("exponent out of range in '" + tok + "'");
    exponent = ez.get_si();
    mantissa = tok.substr(0, e);
  }
  bool negative = false;
  std::string_view m = mantissa;
  if (!m.empty() && (m.front() == '+' || m.front() == '-')) {
    negative = m.front() == '-';
    m.remove_prefix(1);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = m.find('.'); dot != std::string_view::npos) {
    std::string_view ip = m.substr(0, dot), fp = m.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !detail::all_digits(ip)) ||
        (!fp.empty() && !detail::all_digits(fp)))
      throw DomainError("malformed decimal '" + tok + "'");
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!detail::all_digits(m)) throw DomainError("malformed number '" + tok + "'");
    digits = std::string(m);
  }
  Rational r(Integer(digits, 10));
  long scale = exponent - frac_digits;
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  if (scale < 0)
    r /= ten;
  else
    r *= ten;
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

/// Exact rational value of a finite double.
inline Rational from_double(double v) {
  Rational r(v);
  r.canonicalize();
  return r;
}

}  // namespace angulon
