#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/ratfunc.hpp"

namespace angulon {

using HighFloat = boost::multiprecision::cpp_bin_float_100;

inline HighFloat to_high(const Rational& r) {
  return HighFloat(r.get_num().get_str()) / HighFloat(r.get_den().get_str());
}

/// Exact linear combination sum_q c_q e^q with rational q and c_q.
///
/// Distinct rational exponents give linearly independent exponentials, so
/// the value is zero iff every grouped coefficient is zero.
class ExpValue {
 public:
  using Map = std::map<Rational, Rational>;

  ExpValue() = default;
  static ExpValue symbol(const Rational& q, const Rational& c = 1) {
    ExpValue v;
    v.add(q, c);
    return v;
  }

  void add(const Rational& q, const Rational& c) {
    if (c == 0) return;
    Rational qc = q;
    qc.canonicalize();
    Rational cc = c;
    cc.canonicalize();
    auto [it, ins] = terms_.try_emplace(std::move(qc), std::move(cc));
    if (!ins) {
      it->second += cc;
      if (it->second == 0) terms_.erase(it);
    }
  }

  ExpValue& operator+=(const ExpValue& o) {
    for (const auto& [q, c] : o.terms_) add(q, c);
    return *this;
  }
  ExpValue& operator-=(const ExpValue& o) {
    for (const auto& [q, c] : o.terms_) add(q, -c);
    return *this;
  }
  ExpValue& operator*=(const Rational& s) {
    if (s == 0) terms_.clear();
    for (auto& [q, c] : terms_) c *= s;
    return *this;
  }
  friend ExpValue operator+(ExpValue a, const ExpValue& b) { return a += b; }
  friend ExpValue operator-(ExpValue a, const ExpValue& b) { return a -= b; }
  friend ExpValue operator*(ExpValue a, const Rational& s) { return a *= s; }
  friend ExpValue operator*(const Rational& s, ExpValue a) { return a *= s; }
  friend bool operator==(const ExpValue& a, const ExpValue& b) { return a.terms_ == b.terms_; }

  bool is_zero() const noexcept { return terms_.empty(); }
  const Map& terms() const noexcept { return terms_; }

  HighFloat to_high() const {
    HighFloat s = 0;
    for (const auto& [q, c] : terms_) s += angulon::to_high(c) * boost::multiprecision::exp(angulon::to_high(q));
    return s;
  }
  double to_double() const { return static_cast<double>(to_high()); }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [q, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.get_str() + ")*e^(" + q.get_str() + ")";
    }
    return s;
  }

 private:
  Map terms_;
};

/// One summand coeff * exp(exponent).
struct ExpTerm {
  RatFunc coeff;
  MultiPoly exponent;
};

enum class ExpMode { ExactSymbol, Float };

/// Finite sum of rational functions times exponentials of polynomials.
class ExpRatSum {
 public:
  ExpRatSum() = default;
  explicit ExpRatSum(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  const std::vector<std::string>& vars() const noexcept { return vars_; }
  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  /// Exponent sum_{(i,j)} b_ij x_i y_j over the variables x1..xn,y1..yn (1-based pairs).
  static MultiPoly bilinear(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, Rational>& b) {
    const auto vars = xy_vars(n);
    MultiPoly p(vars);
    for (const auto& [ij, c] : b) {
      const auto [i, j] = ij;
      if (i < 1 || i > n || j < 1 || j > n) throw DomainError("bilinear index out of range");
      Exponents e(2 * n, 0);
      e[i - 1] = 1;
      e[n + j - 1] = 1;
      p.add_term(e, c);
    }
    return p;
  }

  /// Adds a term, merging with an existing term of identical exponent.
  void add(const RatFunc& coeff, const MultiPoly& exponent) {
    if (coeff.vars() != vars_ || exponent.vars() != vars_) throw DomainError("term uses a different variable list");
    if (coeff.is_zero()) return;
    for (auto& t : terms_)
      if (t.exponent == exponent) {
        t.coeff = t.coeff + coeff;
        return;
      }
    terms_.push_back({coeff, exponent});
  }

  ExpRatSum& operator+=(const ExpRatSum& o) {
    for (const auto& t : o.terms_) add(t.coeff, t.exponent);
    return *this;
  }
  ExpRatSum& operator-=(const ExpRatSum& o) {
    for (const auto& t : o.terms_) add(-t.coeff, t.exponent);
    return *this;
  }
  friend ExpRatSum operator+(ExpRatSum a, const ExpRatSum& b) { return a += b; }
  friend ExpRatSum operator-(ExpRatSum a, const ExpRatSum& b) { return a -= b; }

  friend ExpRatSum operator*(const RatFunc& f, const ExpRatSum& s) {
    ExpRatSum out(s.vars_);
    for (const auto& t : s.terms_) out.add(f * t.coeff, t.exponent);
    return out;
  }
  friend ExpRatSum operator*(const Rational& c, const ExpRatSum& s) {
    ExpRatSum out(s.vars_);
    for (const auto& t : s.terms_) out.add(t.coeff * c, t.exponent);
    return out;
  }

  /// d(R e^L) = (R' + R dL) e^L, term by term.
  ExpRatSum derive(std::size_t var) const {
    ExpRatSum out(vars_);
    for (const auto& t : terms_) {
      RatFunc d = t.coeff.derive(var);
      MultiPoly dl = t.exponent.derive(var);
      if (!dl.is_zero()) d = d + t.coeff * dl;
      out.add(d, t.exponent);
    }
    return out;
  }
  ExpRatSum derive(std::string_view name) const { return derive(index_of(name)); }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i;
    throw UnknownVariable(std::string(name));
  }

  ExpValue eval_exact(const std::vector<Rational>& point) const {
    ExpValue v;
    for (const auto& t : terms_) v.add(t.exponent.evaluate(point), t.coeff.evaluate(point));
    return v;
  }

  double eval_float(const std::vector<Rational>& point) const { return eval_exact(point).to_double(); }

 private:
  std::vector<std::string> vars_;
  std::vector<ExpTerm> terms_;
};

inline ExpRatSum expsum_derive(const ExpRatSum& s, std::string_view var) { return s.derive(var); }

inline ExpValue expsum_eval(const ExpRatSum& s, const std::vector<Rational>& point) { return s.eval_exact(point); }

/// Orders a named assignment along vars; every variable must be assigned.
inline std::vector<Rational> point_from_map(const std::vector<std::string>& vars,
                                            const std::map<std::string, Rational>& assignment) {
  for (const auto& [name, v] : assignment)
    if (std::find(vars.begin(), vars.end(), name) == vars.end()) throw UnknownVariable(name);
  std::vector<Rational> pt;
  pt.reserve(vars.size());
  for (const auto& v : vars) {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw DomainError("no value given for variable '" + v + "'");
    pt.push_back(it->second);
  }
  return pt;
}

inline std::variant<ExpValue, double> expsum_eval(const ExpRatSum& s, const std::map<std::string, Rational>& point,
                                                  ExpMode mode) {
  ExpValue v = s.eval_exact(point_from_map(s.vars(), point));
  if (mode == ExpMode::ExactSymbol) return v;
  return v.to_double();
}

}  // namespace angulon
