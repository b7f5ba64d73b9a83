#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/rational.hpp"

namespace angulon {

/// Quotient of two polynomials over a common variable list, kept unreduced.
class RatFunc {
 public:
  RatFunc() = default;

  explicit RatFunc(MultiPoly num) : num_(std::move(num)), den_(MultiPoly::constant(num_.vars(), 1)) {}

  RatFunc(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DivisionByZero("rational function with zero denominator");
    if (num_.vars() != den_.vars()) throw DomainError("numerator and denominator use different variables");
  }

  static RatFunc constant(std::vector<std::string> vars, const Rational& c) {
    return RatFunc(MultiPoly::constant(std::move(vars), c));
  }

  const MultiPoly& num() const noexcept { return num_; }
  const MultiPoly& den() const noexcept { return den_; }
  const std::vector<std::string>& vars() const noexcept { return num_.vars(); }
  bool is_zero() const noexcept { return num_.is_zero(); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a) { return RatFunc(-a.num_, a.den_); }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator*(const RatFunc& a, const MultiPoly& p) { return RatFunc(a.num_ * p, a.den_); }
  friend RatFunc operator*(const RatFunc& a, const Rational& s) { return RatFunc(a.num_ * s, a.den_); }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw DivisionByZero("division by the zero rational function");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }

  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

  /// Equality of the represented functions (cross-multiplication).
  bool equals(const RatFunc& o) const { return num_ * o.den_ == o.num_ * den_; }

  RatFunc derive(std::size_t var) const {
    MultiPoly dn = num_.derive(var), dd = den_.derive(var);
    if (dd.is_zero()) return RatFunc(dn, den_);
    return RatFunc(dn * den_ - num_ * dd, den_ * den_);
  }

  RatFunc derive(std::string_view name) const { return derive(num_.index_of(name)); }

  /// Exact value; throws PoleError naming the denominator when it vanishes.
  Rational evaluate(const std::vector<Rational>& point) const {
    Rational d = den_.evaluate(point);
    if (d == 0) throw PoleError("denominator " + den_.to_string() + " vanishes at evaluation point");
    return num_.evaluate(point) / d;
  }

  template <class T>
  T evaluate_as(const std::vector<T>& point) const {
    T d = den_.evaluate(point);
    if (d == T(0)) throw PoleError("denominator " + den_.to_string() + " vanishes at evaluation point");
    return num_.evaluate(point) / d;
  }

  std::string to_string() const { return "(" + num_.to_string() + ")/(" + den_.to_string() + ")"; }

 private:
  MultiPoly num_;
  MultiPoly den_;
};

inline RatFunc ratfunc_derive(const RatFunc& f, std::string_view var) { return f.derive(var); }

/// Outcome of a randomized zero test.
struct ZeroTestResult {
  bool zero = true;
  std::size_t points = 0;
  /// Upper bound on the probability that a nonzero function passes every point.
  double false_negative_bound = 0.0;
};

/// Evaluates f at random integer points in [-range, range]; points where the
/// denominator vanishes are redrawn. The bound is deg(num)/(2 range + 1) per point.
inline ZeroTestResult random_zero_test(const RatFunc& f, std::size_t points, std::uint64_t seed,
                                       long range = 1000000) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(-range, range);
  ZeroTestResult out;
  std::vector<Rational> pt(f.vars().size());
  const double per_point = static_cast<double>(f.num().total_degree()) / static_cast<double>(2 * range + 1);
  std::size_t attempts = 0;
  while (out.points < points) {
    if (++attempts > 100 * points + 100) throw ConvergenceError("could not find regular evaluation points");
    for (auto& v : pt) v = Rational(dist(rng));
    if (f.den().evaluate(pt) == 0) continue;
    ++out.points;
    if (f.num().evaluate(pt) != 0) {
      out.zero = false;
      break;
    }
  }
  double b = 1.0;
  for (std::size_t i = 0; i < out.points; ++i) b *= per_point;
  out.false_negative_bound = out.zero ? b : 0.0;
  return out;
}

}  // namespace angulon
