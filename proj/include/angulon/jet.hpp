#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/expsum.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/rational.hpp"

namespace angulon {

/// Monomial basis h^a, |a| <= order, for truncated Taylor expansions in a
/// fixed number of local variables h_1..h_m.
class JetSpace {
 public:
  JetSpace(std::size_t nvars, unsigned order) : nvars_(nvars), order_(order) {
    Exponents e(nvars, 0);
    enumerate(e, 0, order);
    std::sort(monos_.begin(), monos_.end(), [](const Exponents& a, const Exponents& b) {
      const unsigned da = total_degree(a), db = total_degree(b);
      return da != db ? da < db : a > b;
    });
    for (std::size_t k = 0; k < monos_.size(); ++k) index_.emplace(monos_[k], k);
    Exponents s(nvars);
    for (std::size_t a = 0; a < monos_.size(); ++a)
      for (std::size_t b = 0; b < monos_.size(); ++b) {
        if (total_degree(monos_[a]) + total_degree(monos_[b]) > order) continue;
        for (std::size_t v = 0; v < nvars; ++v) s[v] = monos_[a][v] + monos_[b][v];
        triples_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                            static_cast<std::uint32_t>(index_.at(s))});
      }
    derivs_.resize(nvars);
    for (std::size_t v = 0; v < nvars; ++v)
      for (std::size_t k = 0; k < monos_.size(); ++k) {
        if (monos_[k][v] == 0) continue;
        Exponents d = monos_[k];
        --d[v];
        derivs_[v].push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(index_.at(d)), monos_[k][v]});
      }
  }

  std::size_t nvars() const noexcept { return nvars_; }
  unsigned order() const noexcept { return order_; }
  std::size_t size() const noexcept { return monos_.size(); }
  const Exponents& monomial(std::size_t k) const { return monos_[k]; }
  std::size_t index(const Exponents& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) throw DomainError("monomial outside jet space");
    return it->second;
  }
  unsigned degree_of(std::size_t k) const { return total_degree(monos_[k]); }

  struct Triple {
    std::uint32_t a, b, c;
  };
  struct DerivEntry {
    std::uint32_t from, to, factor;
  };
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  const std::vector<DerivEntry>& derivative_table(std::size_t v) const { return derivs_[v]; }

 private:
  void enumerate(Exponents& e, std::size_t v, unsigned left) {
    if (v == nvars_) {
      monos_.push_back(e);
      return;
    }
    for (unsigned k = 0; k <= left; ++k) {
      e[v] = static_cast<std::uint16_t>(k);
      enumerate(e, v + 1, left - k);
    }
    e[v] = 0;
  }

  std::size_t nvars_;
  unsigned order_;
  std::vector<Exponents> monos_;
  std::unordered_map<Exponents, std::size_t, ExponentsHash> index_;
  std::vector<Triple> triples_;
  std::vector<std::vector<DerivEntry>> derivs_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

/// Truncated Taylor expansion sum_a c_a h^a. Coefficients of degree above
/// valid() are unreliable (derivatives lower the valid order) and are kept
/// only as scratch.
class Jet {
 public:
  Jet() = default;
  explicit Jet(JetSpacePtr space) : space_(std::move(space)), c_(space_->size()), valid_(space_->order()) {}

  static Jet constant(JetSpacePtr space, const Rational& v) {
    Jet j(std::move(space));
    j.c_[0] = v;
    return j;
  }
  /// c + h_var
  static Jet variable(JetSpacePtr space, std::size_t var, const Rational& at) {
    Jet j = constant(space, at);
    if (space->order() >= 1) {
      Exponents e(space->nvars(), 0);
      e[var] = 1;
      j.c_[space->index(e)] = 1;
    }
    return j;
  }

  const JetSpacePtr& space() const noexcept { return space_; }
  unsigned valid() const noexcept { return valid_; }
  const Rational& operator[](std::size_t k) const { return c_[k]; }
  Rational& operator[](std::size_t k) { return c_[k]; }
  const Rational& value() const { return c_[0]; }

  Rational coefficient(const Exponents& e) const {
    if (total_degree(e) > valid_) throw PreconditionError("jet coefficient requested beyond valid order");
    return c_[space_->index(e)];
  }

  /// Partial derivative of the represented function evaluated at h = 0.
  Rational derivative_at_origin(const Exponents& e) const {
    Rational r = coefficient(e);
    for (auto k : e) r *= factorial(k);
    return r;
  }

  bool is_zero() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (space_->degree_of(k) <= valid_ && c_[k] != 0) return false;
    return true;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    valid_ = std::min(valid_, o.valid_);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    valid_ = std::min(valid_, o.valid_);
    return *this;
  }
  Jet& operator*=(const Rational& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= Rational(-1); }
  friend Jet operator*(Jet a, const Rational& s) { return a *= s; }
  friend Jet operator*(const Rational& s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(a.space_);
    out.valid_ = std::min(a.valid_, b.valid_);
    mpq_t tmp;
    mpq_init(tmp);
    for (const auto& t : a.space_->triples()) {
      const Rational& x = a.c_[t.a];
      if (sgn(x) == 0) continue;
      const Rational& y = b.c_[t.b];
      if (sgn(y) == 0) continue;
      mpq_mul(tmp, x.get_mpq_t(), y.get_mpq_t());
      mpq_add(out.c_[t.c].get_mpq_t(), out.c_[t.c].get_mpq_t(), tmp);
    }
    mpq_clear(tmp);
    return out;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  Jet derive(std::size_t var) const {
    if (valid_ == 0) throw PreconditionError("derivative of an order-0 jet");
    Jet out(space_);
    for (const auto& d : space_->derivative_table(var)) out.c_[d.to] = c_[d.from] * d.factor;
    out.valid_ = valid_ - 1;
    return out;
  }

  Jet pow(unsigned k) const {
    Jet r = constant(space_, 1);
    r.valid_ = valid_;
    Jet b = *this;
    while (k) {
      if (k & 1u) r *= b;
      k >>= 1u;
      if (k) b = b * b;
    }
    return r;
  }

  /// 1/f; requires f(0) != 0.
  Jet inverse() const {
    const Rational c0 = c_[0];
    if (c0 == 0) throw PoleError("inverse of a jet vanishing at the expansion point");
    Jet u = *this;
    u.c_[0] = 0;
    u *= Rational(1) / c0;  // f = c0 (1 + u)
    Jet term = constant(space_, 1), sum = constant(space_, 1);
    term.valid_ = sum.valid_ = valid_;
    for (unsigned k = 1; k <= space_->order(); ++k) {
      term = term * u;
      term *= Rational(-1);
      sum += term;
    }
    return sum * (Rational(1) / c0);
  }

  /// exp(u) for u with zero constant term.
  Jet exp_nilpotent() const {
    if (c_[0] != 0) throw PreconditionError("exp_nilpotent needs a zero constant term");
    Jet term = constant(space_, 1), sum = constant(space_, 1);
    term.valid_ = sum.valid_ = valid_;
    for (unsigned k = 1; k <= space_->order(); ++k) {
      term = term * *this;
      term *= Rational(1, k);
      sum += term;
    }
    return sum;
  }

 private:
  JetSpacePtr space_;
  std::vector<Rational> c_;
  unsigned valid_ = 0;
};

/// Taylor expansion of p at point, where variable v of p moves with local
/// variable active[v] (or stays fixed when active[v] < 0).
inline Jet taylor_jet(const MultiPoly& p, const std::vector<Rational>& point, const std::vector<int>& active,
                      const JetSpacePtr& space) {
  const std::size_t nv = p.num_vars();
  if (point.size() != nv || active.size() != nv) throw DomainError("taylor_jet: dimension mismatch");
  const unsigned order = space->order();
  // Collapse fixed variables first.
  std::vector<std::size_t> act_vars;
  for (std::size_t v = 0; v < nv; ++v)
    if (active[v] >= 0) act_vars.push_back(v);
  std::vector<std::vector<Rational>> pw(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const unsigned d = p.degree_in(v);
    pw[v].resize(d + 1);
    pw[v][0] = 1;
    for (unsigned k = 1; k <= d; ++k) pw[v][k] = pw[v][k - 1] * point[v];
  }
  std::unordered_map<Exponents, Rational, ExponentsHash> reduced;
  Exponents key(act_vars.size());
  for (const auto& [e, c] : p.terms()) {
    Rational t = c;
    for (std::size_t v = 0; v < nv; ++v)
      if (active[v] < 0 && e[v]) t *= pw[v][e[v]];
    for (std::size_t a = 0; a < act_vars.size(); ++a) key[a] = e[act_vars[a]];
    auto [it, ins] = reduced.try_emplace(key, t);
    if (!ins) it->second += t;
  }
  Jet out(space);
  Exponents local(space->nvars(), 0);
  std::vector<unsigned> alpha(act_vars.size());
  for (const auto& [e, c] : reduced) {
    if (c == 0) continue;
    // sum over alpha <= e, |alpha| <= order of c * prod C(e,alpha) P^(e-alpha) h^alpha
    std::fill(alpha.begin(), alpha.end(), 0u);
    while (true) {
      unsigned deg = 0;
      for (auto a : alpha) deg += a;
      if (deg <= order) {
        Rational t = c;
        std::fill(local.begin(), local.end(), 0);
        for (std::size_t a = 0; a < act_vars.size(); ++a) {
          const std::size_t v = act_vars[a];
          if (e[a] != alpha[a]) t *= pw[v][e[a] - alpha[a]] * Rational(binomial(e[a], alpha[a]));
          local[active[v]] += alpha[a];
        }
        out[space->index(local)] += t;
      }
      std::size_t a = 0;
      for (; a < alpha.size(); ++a) {
        if (alpha[a] < e[a] && alpha[a] < order) {
          ++alpha[a];
          break;
        }
        alpha[a] = 0;
      }
      if (a == alpha.size()) break;
    }
  }
  return out;
}

/// sum_q e^q * J_q(h): a local expansion of an exponential-polynomial sum,
/// with the exponential's value at the expansion point kept symbolic.
class ExpJet {
 public:
  using Map = std::map<Rational, Jet>;

  ExpJet() = default;
  explicit ExpJet(JetSpacePtr space) : space_(std::move(space)) {}

  const JetSpacePtr& space() const noexcept { return space_; }
  const Map& terms() const noexcept { return terms_; }

  void add(const Rational& q, const Jet& j) {
    auto it = terms_.find(q);
    if (it == terms_.end())
      terms_.emplace(q, j);
    else
      it->second += j;
  }

  ExpJet& operator+=(const ExpJet& o) {
    for (const auto& [q, j] : o.terms_) add(q, j);
    return *this;
  }
  ExpJet& operator-=(const ExpJet& o) {
    for (const auto& [q, j] : o.terms_) add(q, -j);
    return *this;
  }
  friend ExpJet operator+(ExpJet a, const ExpJet& b) { return a += b; }
  friend ExpJet operator-(ExpJet a, const ExpJet& b) { return a -= b; }

  friend ExpJet operator*(const Jet& f, const ExpJet& s) {
    ExpJet out(s.space_);
    for (const auto& [q, j] : s.terms_) out.terms_.emplace(q, f * j);
    return out;
  }
  friend ExpJet operator*(const Rational& c, const ExpJet& s) {
    ExpJet out(s.space_);
    for (const auto& [q, j] : s.terms_) out.terms_.emplace(q, j * c);
    return out;
  }

  ExpJet derive(std::size_t var) const {
    ExpJet out(space_);
    for (const auto& [q, j] : terms_) out.terms_.emplace(q, j.derive(var));
    return out;
  }

  /// Value at the expansion point as exact symbols.
  ExpValue value() const {
    ExpValue v;
    for (const auto& [q, j] : terms_) v.add(q, j.value());
    return v;
  }

 private:
  JetSpacePtr space_;
  Map terms_;
};

}  // namespace angulon
