#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/rational.hpp"

namespace angulon {

enum class BesselKind { Y, Q };

struct BesselPoly {
  BesselKind kind = BesselKind::Y;
  int m_or_beta = 0;
  int j = 0;
  MultiPoly poly;
};

namespace detail {

inline MultiPoly univariate(const std::vector<Rational>& coeffs, const std::string& var = "x") {
  MultiPoly p({var});
  for (std::size_t k = 0; k < coeffs.size(); ++k) p.add_term(Exponents{static_cast<std::uint16_t>(k)}, coeffs[k]);
  return p;
}

inline std::vector<Rational> coefficients(const MultiPoly& p) {
  if (p.num_vars() != 1) throw DomainError("expected a univariate polynomial");
  std::vector<Rational> c(p.total_degree() + 1);
  for (const auto& [e, v] : p.terms()) c[e[0]] = v;
  return c;
}

inline MultiPoly x_times(const MultiPoly& p, unsigned k = 1) {
  return p * MultiPoly::variable(p.vars(), std::size_t{0}).pow(k);
}

/// p(s x) for a univariate p.
inline MultiPoly scale_argument(const MultiPoly& p, const Rational& s) {
  MultiPoly out(p.vars());
  for (const auto& [e, c] : p.terms()) out.add_term(e, c * pow(s, e[0]));
  return out;
}

/// x^d p(1/x) for deg p <= d.
inline MultiPoly reverse(const MultiPoly& p, unsigned d) {
  MultiPoly out(p.vars());
  for (const auto& [e, c] : p.terms()) {
    if (e[0] > d) throw DomainError("reverse: degree exceeds bound");
    out.add_term(Exponents{static_cast<std::uint16_t>(d - e[0])}, c);
  }
  return out;
}

}  // namespace detail

/// Y_m(x) = sum_k (m+k)! / (k! (m-k)!) (x/2)^k.
inline BesselPoly bessel_Y(int m) {
  if (m < 0) throw DomainError("bessel_Y needs m >= 0");
  std::vector<Rational> c(m + 1);
  for (int k = 0; k <= m; ++k) {
    Integer two_k;
    mpz_ui_pow_ui(two_k.get_mpz_t(), 2, k);
    c[k] = Rational(factorial(m + k), factorial(k) * factorial(m - k) * two_k);
    c[k].canonicalize();
  }
  return {BesselKind::Y, m, 0, detail::univariate(c)};
}

/// Q_{beta,j}(x) = sum_k (beta+j+k-1)! / (k! (beta-j-k-1)!) 2^{-k} x^{beta-j-k}; Q_{beta,beta} = 0.
inline BesselPoly bessel_Q(int beta, int j) {
  if (beta < 1) throw DomainError("bessel_Q needs integer beta >= 1");
  if (j < 0 || j > beta) throw DomainError("bessel_Q needs 0 <= j <= beta");
  std::vector<Rational> c(beta - j + 1);
  for (int k = 0; k < beta - j; ++k) {
    Integer two_k;
    mpz_ui_pow_ui(two_k.get_mpz_t(), 2, k);
    Rational v(factorial(beta + j + k - 1), factorial(k) * factorial(beta - j - k - 1) * two_k);
    v.canonicalize();
    c[beta - j - k] = v;
  }
  return {BesselKind::Q, beta, j, detail::univariate(c)};
}

/// Ladder Q_{b,j+1} = 2(b - j - x d/dx) Q_{b,j} (0 <= j <= b-1) and, for
/// 1 <= j <= b-1, -x Q_{b,j} = Q_{b,j+1}/4 + j Q_{b,j} + (j-b)(j+b-1) Q_{b,j-1}.
inline bool q_ladder_check(int beta, int j) {
  if (beta < 1 || j < 0 || j > beta - 1) throw DomainError("q_ladder_check needs 0 <= j <= beta-1");
  const MultiPoly q = bessel_Q(beta, j).poly;
  const MultiPoly next = bessel_Q(beta, j + 1).poly;
  const MultiPoly ladder = q * Rational(2 * (beta - j)) - detail::x_times(q.derive(0)) * Rational(2);
  if (!(ladder == next)) return false;
  if (j >= 1) {
    const MultiPoly prev = bessel_Q(beta, j - 1).poly;
    const MultiPoly lhs = -detail::x_times(q);
    const MultiPoly rhs = next * Rational(1, 4) + q * Rational(j) + prev * Rational((j - beta) * (j + beta - 1));
    if (!(lhs == rhs)) return false;
  }
  return true;
}

/// x^2 Q'' - 2x(b + x) Q' + 2b(x + 1) Q = 0 for Q = Q_{b,0}.
inline bool carlitz_ode_check(int beta) {
  const MultiPoly q = bessel_Q(beta, 0).poly;
  const auto& v = q.vars();
  const MultiPoly x = MultiPoly::variable(v, std::size_t{0});
  const MultiPoly one = MultiPoly::constant(v, 1);
  const MultiPoly r = x * x * q.derive(0).derive(0) - x * (one * Rational(beta) + x) * q.derive(0) * Rational(2) +
                      (x + one) * q * Rational(2 * beta);
  return r.is_zero();
}

/// x^2 Y'' + (2x + 2) Y' - m(m+1) Y = 0.
inline bool y_ode_check(int m) {
  const MultiPoly y = bessel_Y(m).poly;
  const auto& v = y.vars();
  const MultiPoly x = MultiPoly::variable(v, std::size_t{0});
  const MultiPoly one = MultiPoly::constant(v, 1);
  const MultiPoly r =
      x * x * y.derive(0).derive(0) + (x * Rational(2) + one * Rational(2)) * y.derive(0) - y * Rational(m * (m + 1));
  return r.is_zero();
}

/// Q_{b,0}(x) = x^b Y_{b-1}(1/x) and x^{b-j} Q_{b,j}(1/x) = 2^j Y^{(j)}_{b-1}(x) for 0 <= j <= b-1.
inline bool q_y_relation_check(int beta) {
  if (beta < 1) throw DomainError("q_y_relation_check needs beta >= 1");
  const MultiPoly y = bessel_Y(beta - 1).poly;
  if (!(bessel_Q(beta, 0).poly == detail::reverse(y, beta))) return false;
  MultiPoly dy = y;
  for (int j = 0; j <= beta - 1; ++j) {
    const MultiPoly lhs = detail::reverse(bessel_Q(beta, j).poly, beta - j);
    if (!(lhs == dy * pow(Rational(2), j))) return false;
    dy = dy.derive(0);
  }
  return true;
}

/// Polynomials of the alternating-sign family, (-1)^b Q_{b,k}(-x).
inline MultiPoly q_alternating(int beta, int k) {
  MultiPoly p = detail::scale_argument(bessel_Q(beta, k).poly, Rational(-1));
  return beta % 2 ? -p : p;
}

/// Same family from its own series: sum_l (-1)^{l+k} (b+l+k-1)!/(b-l-k-1)! 2^{-l}/l! x^{b-l-k}.
inline MultiPoly q_alternating_series(int beta, int k) {
  std::vector<Rational> c(beta - k + 1 > 0 ? beta - k + 1 : 1);
  for (int l = 0; l < beta - k; ++l) {
    Integer two_l;
    mpz_ui_pow_ui(two_l.get_mpz_t(), 2, l);
    Rational v(factorial(beta + l + k - 1), factorial(beta - l - k - 1) * factorial(l) * two_l);
    v.canonicalize();
    c[beta - l - k] = (l + k) % 2 ? Rational(-v) : v;
  }
  return detail::univariate(c);
}

/// The alternating-sign relations checked after the x -> -x translation:
/// the series definition, the k-ladder, its first two instances, the ODE,
/// the three-term relation at k = 0 and the general three-term relation,
/// and the operator definition via (x^2 d/dx)^k.
inline bool alternating_relations_check(int beta) {
  if (beta < 1) throw DomainError("alternating_relations_check needs beta >= 1");
  auto Q = [&](int k) { return k > beta ? MultiPoly({"x"}) : q_alternating(beta, k); };
  const std::vector<std::string> v{"x"};
  const MultiPoly x = MultiPoly::variable(v, std::size_t{0});
  const MultiPoly one = MultiPoly::constant(v, 1);
  const Rational b(beta);
  for (int k = 0; k <= beta; ++k)
    if (!(Q(k) == q_alternating_series(beta, k))) return false;
  for (int k = 1; k <= beta; ++k) {
    MultiPoly r = Q(k) - Q(k - 1) * Rational(2 * (beta - k + 1)) + x * Q(k - 1).derive(0) * Rational(2);
    if (!r.is_zero()) return false;
  }
  if (!(Q(1) - Q(0) * (2 * b) + x * Q(0).derive(0) * Rational(2)).is_zero()) return false;
  if (!(Q(2) - Q(1) * (2 * (b - 1)) + x * Q(1).derive(0) * Rational(2)).is_zero()) return false;
  const MultiPoly q0 = Q(0);
  if (!(Q(2) - (x * x * q0.derive(0).derive(0) * Rational(4) - x * q0.derive(0) * (8 * (b - 1)) +
                q0 * (4 * b * (b - 1))))
           .is_zero())
    return false;
  if (!(x * x * q0.derive(0).derive(0) - x * (one * b - x) * q0.derive(0) * Rational(2) +
        (one - x) * q0 * (2 * b))
           .is_zero())
    return false;
  if (!(Q(2) + (one - x) * Q(1) * Rational(4) - Q(0) * (4 * b * (b - 1))).is_zero()) return false;
  for (int k = 0; k + 2 <= beta + 1; ++k) {
    MultiPoly r = Q(k + 2) + (one * Rational(k + 1) - x) * Q(k + 1) * Rational(4) -
                  Q(k) * Rational(4 * (beta * (beta - 1) - k * (k + 1)));
    if (!r.is_zero()) return false;
  }
  // Q_k = (-2)^k x^{b-k} (x^2 d/dx)^k (Q_0 / x^b) on Laurent coefficients in 1/x.
  std::vector<Rational> g(beta + 1);  // g[l] is the coefficient of x^{-l}
  for (const auto& [e, c] : q0.terms()) g[beta - e[0]] = c;
  for (int k = 0; k <= beta; ++k) {
    MultiPoly lhs({"x"});
    for (int l = 0; l <= beta; ++l) {
      if (g[l] == 0) continue;
      const int power = beta - k - l;
      if (power < 0) return false;
      lhs.add_term(Exponents{static_cast<std::uint16_t>(power)}, g[l] * pow(Rational(-2), k));
    }
    if (!(lhs == Q(k))) return false;
    std::vector<Rational> next(beta + 1);
    for (int l = 1; l <= beta; ++l) next[l - 1] = g[l] * Rational(-l);
    g = next;
  }
  return true;
}

/// Standard modified Bessel function of the first kind by its power series.
inline double mod_bessel_I(double nu, double tau, double tol = 1e-16) {
  if (!(tol > 0)) throw DomainError("mod_bessel_I needs tol > 0");
  if (tau < 0 && std::floor(nu) != nu) throw DomainError("mod_bessel_I: negative argument needs integer order");
  if (tau == 0) return nu == 0 ? 1.0 : 0.0;
  const double half = tau / 2;
  double term = std::pow(half, nu) / std::tgamma(nu + 1);
  if (!std::isfinite(term)) throw DomainError("mod_bessel_I: leading term not representable");
  double sum = term;
  const double q = half * half;
  for (int k = 0; k < 10000; ++k) {
    term *= q / ((k + 1) * (nu + k + 1));
    if (std::fabs(term) < tol * std::fabs(sum)) return sum;
    sum += term;
  }
  throw ConvergenceError("mod_bessel_I did not converge within 10^4 terms");
}

}  // namespace angulon
