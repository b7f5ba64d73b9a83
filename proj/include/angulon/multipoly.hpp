#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/rational.hpp"

namespace angulon {

using Exponents = std::vector<std::uint16_t>;

inline unsigned total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

/// Graded lexicographic order, largest term first.
struct GradedLexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const {
    const unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

struct ExponentsHash {
  std::size_t operator()(const Exponents& e) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto v : e) {
      h ^= v;
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

/// Conversion of an exact coefficient into the scalar type used for evaluation.
template <class T>
struct CoefficientCast {
  static T apply(const Rational& c) { return static_cast<T>(c.get_d()); }
};
template <>
struct CoefficientCast<Rational> {
  static Rational apply(const Rational& c) { return c; }
};
template <class R>
struct CoefficientCast<std::complex<R>> {
  static std::complex<R> apply(const Rational& c) { return {static_cast<R>(c.get_d()), R(0)}; }
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// The variable list is part of the value: binary operations require both
/// operands to be declared over the same ordered variable list (use embed()
/// to move a polynomial into a larger list). Terms are kept in graded-lex
/// order and zero coefficients are never stored.
class MultiPoly {
 public:
  using TermMap = std::map<Exponents, Rational, GradedLexGreater>;

  MultiPoly() = default;
  explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static MultiPoly constant(std::vector<std::string> vars, const Rational& c) {
    MultiPoly p(std::move(vars));
    p.add_term(Exponents(p.num_vars(), 0), c);
    return p;
  }

  static MultiPoly variable(std::vector<std::string> vars, std::size_t index) {
    MultiPoly p(std::move(vars));
    if (index >= p.num_vars()) throw UnknownVariable("#" + std::to_string(index));
    Exponents e(p.num_vars(), 0);
    e[index] = 1;
    p.add_term(e, 1);
    return p;
  }

  static MultiPoly variable(std::vector<std::string> vars, std::string_view name) {
    MultiPoly p(std::move(vars));
    return variable(p.vars_, p.index_of(name));
  }

  const std::vector<std::string>& vars() const noexcept { return vars_; }
  std::size_t num_vars() const noexcept { return vars_.size(); }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i;
    throw UnknownVariable(std::string(name));
  }

  bool has_var(std::string_view name) const {
    return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
  }

  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  Rational coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(Exponents(num_vars(), 0)); }

  void add_term(const Exponents& e, const Rational& c) {
    if (e.size() != vars_.size()) throw DomainError("exponent vector length does not match variable count");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  unsigned total_degree() const {
    return terms_.empty() ? 0u : angulon::total_degree(terms_.begin()->first);
  }

  unsigned degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max<unsigned>(d, e[var]);
    return d;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    require_same_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  MultiPoly& operator-=(const MultiPoly& o) {
    require_same_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  MultiPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  MultiPoly& operator*=(const MultiPoly& o) {
    *this = *this * o;
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
  friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
  friend MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.require_same_vars(b);
    MultiPoly out(a.vars_);
    if (a.is_zero() || b.is_zero()) return out;
    const MultiPoly& big = a.size() >= b.size() ? a : b;
    const MultiPoly& small = a.size() >= b.size() ? b : a;
    if (small.size() == 1) {
      const auto& [se, sc] = *small.terms_.begin();
      for (const auto& [e, c] : big.terms_) {
        Exponents s = e;
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += se[i];
        out.terms_.emplace_hint(out.terms_.end(), std::move(s), c * sc);
      }
      return out;
    }
    std::unordered_map<Exponents, Rational, ExponentsHash> acc;
    acc.reserve(big.size() * small.size());
    Exponents s(a.num_vars());
    Rational prod;
    for (const auto& [ea, ca] : small.terms_) {
      for (const auto& [eb, cb] : big.terms_) {
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = ea[i] + eb[i];
        prod = ca * cb;
        auto [it, inserted] = acc.try_emplace(s, prod);
        if (!inserted) it->second += prod;
      }
    }
    for (auto& [e, c] : acc)
      if (c != 0) out.terms_.emplace(e, std::move(c));
    return out;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  MultiPoly pow(unsigned k) const {
    MultiPoly result = constant(vars_, 1);
    MultiPoly base = *this;
    while (k) {
      if (k & 1u) result *= base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return result;
  }

  MultiPoly derive(std::size_t var) const {
    if (var >= num_vars()) throw UnknownVariable("#" + std::to_string(var));
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents d = e;
      --d[var];
      out.add_term(d, c * e[var]);
    }
    return out;
  }

  MultiPoly derive(std::string_view name) const { return derive(index_of(name)); }

  /// Evaluates at a point given as one value per variable.
  template <class T>
  T evaluate(std::span<const T> point) const {
    if (point.size() != num_vars()) throw DomainError("evaluation point has wrong dimension");
    std::vector<std::vector<T>> powers(num_vars());
    for (std::size_t v = 0; v < num_vars(); ++v) {
      const unsigned d = degree_in(v);
      powers[v].reserve(d + 1);
      powers[v].push_back(T(1));
      for (unsigned k = 1; k <= d; ++k) powers[v].push_back(powers[v].back() * point[v]);
    }
    T sum(0);
    for (const auto& [e, c] : terms_) {
      T t = CoefficientCast<T>::apply(c);
      for (std::size_t v = 0; v < e.size(); ++v)
        if (e[v]) t *= powers[v][e[v]];
      sum += t;
    }
    return sum;
  }

  template <class T>
  T evaluate(const std::vector<T>& point) const {
    return evaluate(std::span<const T>(point));
  }

  /// Composition: replaces variable i by images[i]; all images share one
  /// variable list, which becomes the variable list of the result.
  MultiPoly substitute(const std::vector<MultiPoly>& images) const {
    if (images.size() != num_vars()) throw DomainError("substitution needs one image per variable");
    std::vector<std::string> target = images.empty() ? std::vector<std::string>{} : images.front().vars();
    for (const auto& im : images)
      if (im.vars() != target) throw DomainError("substitution images must share a variable list");
    std::vector<std::vector<MultiPoly>> cache(num_vars());
    auto power_of = [&](std::size_t v, unsigned k) -> const MultiPoly& {
      auto& c = cache[v];
      if (c.empty()) c.push_back(constant(target, 1));
      while (c.size() <= k) c.push_back(c.back() * images[v]);
      return c[k];
    };
    MultiPoly out(target);
    for (const auto& [e, c] : terms_) {
      MultiPoly t = constant(target, c);
      for (std::size_t v = 0; v < e.size(); ++v)
        if (e[v]) t *= power_of(v, e[v]);
      out += t;
    }
    return out;
  }

  /// Re-expresses the polynomial over new_vars, which must contain every
  /// variable of this polynomial that actually occurs.
  MultiPoly embed(const std::vector<std::string>& new_vars) const {
    std::vector<std::ptrdiff_t> where(num_vars(), -1);
    for (std::size_t i = 0; i < num_vars(); ++i) {
      auto it = std::find(new_vars.begin(), new_vars.end(), vars_[i]);
      if (it != new_vars.end()) where[i] = it - new_vars.begin();
    }
    MultiPoly out(new_vars);
    for (const auto& [e, c] : terms_) {
      Exponents ne(new_vars.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (!e[i]) continue;
        if (where[i] < 0) throw UnknownVariable(vars_[i]);
        ne[where[i]] = e[i];
      }
      out.add_term(ne, c);
    }
    return out;
  }

  /// Renames variable i to variable perm[i] (perm is a permutation of the indices).
  MultiPoly permute_vars(const std::vector<std::size_t>& perm) const {
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_) {
      Exponents ne(e.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) ne[perm[i]] = e[i];
      out.terms_.emplace(std::move(ne), c);
    }
    return out;
  }

  /// Exact quotient by (var_v - var_w); throws if the division leaves a remainder.
  MultiPoly divide_linear(std::size_t v, std::size_t w) const {
    if (v >= num_vars() || w >= num_vars() || v == w) throw DomainError("bad linear divisor");
    // p = sum_k c_k v^k with c_k free of v; quotient q_{k-1} = c_k + w q_k.
    std::map<unsigned, std::unordered_map<Exponents, Rational, ExponentsHash>, std::greater<>> by_power;
    for (const auto& [e, c] : terms_) {
      Exponents rest = e;
      rest[v] = 0;
      by_power[e[v]].emplace(std::move(rest), c);
    }
    MultiPoly out(vars_);
    if (by_power.empty()) return out;
    std::unordered_map<Exponents, Rational, ExponentsHash> q;  // current q_k
    unsigned top = by_power.begin()->first;
    for (unsigned k = top; k >= 1; --k) {
      // q_{k-1} = c_k + w * q_k
      std::unordered_map<Exponents, Rational, ExponentsHash> next;
      next.reserve(q.size() + 8);
      for (auto& [e, c] : q) {
        Exponents s = e;
        ++s[w];
        next.emplace(std::move(s), c);
      }
      if (auto it = by_power.find(k); it != by_power.end()) {
        for (const auto& [e, c] : it->second) {
          auto [jt, ins] = next.try_emplace(e, c);
          if (!ins) {
            jt->second += c;
          }
        }
      }
      for (auto it = next.begin(); it != next.end();) {
        if (it->second == 0)
          it = next.erase(it);
        else
          ++it;
      }
      for (const auto& [e, c] : next) {
        Exponents s = e;
        s[v] = static_cast<std::uint16_t>(k - 1);
        out.terms_.emplace(std::move(s), c);
      }
      q = std::move(next);
    }
    // remainder c_0 + w q_0 must vanish
    std::unordered_map<Exponents, Rational, ExponentsHash> rem;
    for (auto& [e, c] : q) {
      Exponents s = e;
      ++s[w];
      rem.emplace(std::move(s), c);
    }
    if (auto it = by_power.find(0); it != by_power.end())
      for (const auto& [e, c] : it->second) {
        auto [jt, ins] = rem.try_emplace(e, c);
        if (!ins) jt->second += c;
      }
    for (const auto& [e, c] : rem)
      if (c != 0) throw DomainError("polynomial is not divisible by (" + vars_[v] + " - " + vars_[w] + ")");
    return out;
  }

  /// Groups terms by their total degree in the variables selected by mask.
  std::map<unsigned, MultiPoly> split_by_degree(const std::vector<bool>& mask) const {
    std::map<unsigned, MultiPoly> parts;
    for (const auto& [e, c] : terms_) {
      unsigned d = 0;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (mask[i]) d += e[i];
      auto [it, ins] = parts.try_emplace(d, vars_);
      it->second.terms_.emplace_hint(it->second.terms_.end(), e, c);
    }
    return parts;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      Rational mag = abs(c);
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      first = false;
      const bool is_const = angulon::total_degree(e) == 0;
      bool wrote = false;
      if (mag != 1 || is_const) {
        os << mag.get_str();
        wrote = true;
      }
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (!e[i]) continue;
        os << (wrote ? "*" : "") << vars_[i];
        if (e[i] > 1) os << '^' << e[i];
        wrote = true;
      }
    }
    return os.str();
  }

 private:
  void require_same_vars(const MultiPoly& o) const {
    if (vars_ != o.vars_) throw DomainError("polynomials are declared over different variable lists");
  }

  std::vector<std::string> vars_;
  TermMap terms_;
};

/// Partial derivative (free-function spelling used across the library).
inline MultiPoly poly_derive(const MultiPoly& p, std::string_view var) { return p.derive(var); }

/// Names x1..xn followed by y1..yn.
inline std::vector<std::string> xy_vars(std::size_t n) {
  std::vector<std::string> v;
  v.reserve(2 * n);
  for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) v.push_back("y" + std::to_string(i));
  return v;
}

}  // namespace angulon
