#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "angulon/besselpoly.hpp"
#include "angulon/errors.hpp"
#include "angulon/linsolve.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/principal.hpp"

namespace angulon {

/// Pairs (i, j), 1 <= i < j <= n, in lexicographic order.
inline std::vector<std::pair<int, int>> tau_pairs(int n) {
  std::vector<std::pair<int, int>> p;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) p.emplace_back(i, j);
  return p;
}

inline std::string tau_name(int i, int j) {
  if (i > j) std::swap(i, j);
  return j < 10 ? "t" + std::to_string(i) + std::to_string(j) : "t" + std::to_string(i) + "_" + std::to_string(j);
}

inline std::vector<std::string> tau_vars(int n) {
  std::vector<std::string> v;
  for (auto [i, j] : tau_pairs(n)) v.push_back(tau_name(i, j));
  return v;
}

/// Symmetric polynomial in tau_ij = -(x_i - x_j)(y_i - y_j)/2.
struct TauPoly {
  int beta = 1;
  int n = 1;
  MultiPoly poly;
};

/// tau_ij as polynomials over x1..xn, y1..yn.
inline std::vector<MultiPoly> tau_images(int n) {
  const auto vars = xy_vars(n);
  std::vector<MultiPoly> out;
  for (auto [i, j] : tau_pairs(n)) {
    MultiPoly dx = MultiPoly::variable(vars, i - 1) - MultiPoly::variable(vars, j - 1);
    MultiPoly dy = MultiPoly::variable(vars, n + i - 1) - MultiPoly::variable(vars, n + j - 1);
    out.push_back(dx * dy * Rational(-1, 2));
  }
  return out;
}

inline MultiPoly tau_to_xy(const TauPoly& t) {
  if (t.n == 1) return t.poly.embed(xy_vars(1));
  return t.poly.substitute(tau_images(t.n));
}

inline std::vector<Rational> tau_values(const std::vector<Rational>& x, const std::vector<Rational>& y) {
  std::vector<Rational> t;
  const int n = static_cast<int>(x.size());
  for (auto [i, j] : tau_pairs(n)) t.push_back(Rational(-1, 2) * (x[i - 1] - x[j - 1]) * (y[i - 1] - y[j - 1]));
  return t;
}

/// Index permutation of the tau variables induced by relabeling k -> pi[k] (0-based).
inline std::vector<std::size_t> tau_relabel_perm(int n, const std::vector<int>& pi) {
  const auto pairs = tau_pairs(n);
  std::map<std::pair<int, int>, std::size_t> idx;
  for (std::size_t k = 0; k < pairs.size(); ++k) idx[pairs[k]] = k;
  std::vector<std::size_t> perm(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    int a = pi[pairs[k].first - 1] + 1, b = pi[pairs[k].second - 1] + 1;
    if (a > b) std::swap(a, b);
    perm[k] = idx.at({a, b});
  }
  return perm;
}

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline TauPoly tau_relabel(const TauPoly& t, const std::vector<int>& pi) {
  return {t.beta, t.n, t.poly.permute_vars(tau_relabel_perm(t.n, pi))};
}

inline bool tau_symmetric(const TauPoly& t) {
  for (const auto& pi : all_permutations(t.n))
    if (!(tau_relabel(t, pi).poly == t.poly)) return false;
  return true;
}

/// Largest exponent of any single tau variable.
inline unsigned tau_max_degree(const TauPoly& t) {
  unsigned d = 0;
  for (std::size_t v = 0; v < t.poly.num_vars(); ++v) d = std::max(d, t.poly.degree_in(v));
  return d;
}

/// Average over all relabelings.
inline TauPoly tau_symmetrize(const TauPoly& t) {
  MultiPoly sum(t.poly.vars());
  const auto perms = all_permutations(t.n);
  for (const auto& pi : perms) sum += t.poly.permute_vars(tau_relabel_perm(t.n, pi));
  sum *= Rational(1, static_cast<unsigned long>(perms.size()));
  return {t.beta, t.n, sum};
}

/// c with a = c b, if a and b are proportional with c != 0.
inline std::optional<Rational> proportionality_constant(const MultiPoly& a, const MultiPoly& b) {
  if (a.vars() != b.vars() || a.size() != b.size() || a.is_zero()) return std::nullopt;
  std::optional<Rational> c;
  auto ia = a.terms().begin();
  for (auto ib = b.terms().begin(); ib != b.terms().end(); ++ib, ++ia) {
    if (ia->first != ib->first) return std::nullopt;
    Rational r = ia->second / ib->second;
    if (!c)
      c = r;
    else if (*c != r)
      return std::nullopt;
  }
  return c;
}

enum class TauBasis { Orbits, Monomials };

struct TauExtractOptions {
  TauBasis basis = TauBasis::Orbits;
  std::uint64_t seed = 0x5eed7a0ull;
  std::size_t extra_points = 5;
  std::size_t verify_points = 10;
  long range = 1000000;
};

struct TauExtractReport {
  TauPoly tau;
  std::size_t unknowns = 0;
  std::size_t rank = 0;
  std::size_t solve_points = 0;
  std::size_t verify_points = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Integer-coefficient copy of p and the common denominator removed.
struct ScaledPoly {
  std::vector<std::pair<Exponents, Integer>> terms;
  Integer denominator = 1;
};

inline ScaledPoly scale_to_integers(const MultiPoly& p) {
  ScaledPoly s;
  for (const auto& [e, c] : p.terms()) mpz_lcm(s.denominator.get_mpz_t(), s.denominator.get_mpz_t(), c.get_den_mpz_t());
  for (const auto& [e, c] : p.terms()) s.terms.emplace_back(e, c.get_num() * (s.denominator / c.get_den()));
  return s;
}

/// Values of the x-degree-d parts of p at an integer point, as exact rationals.
inline std::map<unsigned, Rational> eval_by_x_degree(const ScaledPoly& p, const std::vector<Integer>& pt,
                                                     std::size_t nx) {
  const std::size_t nv = pt.size();
  std::vector<std::vector<Integer>> pw(nv);
  unsigned maxdeg = 0;
  for (const auto& [e, c] : p.terms)
    for (auto v : e) maxdeg = std::max<unsigned>(maxdeg, v);
  for (std::size_t v = 0; v < nv; ++v) {
    pw[v].resize(maxdeg + 1);
    pw[v][0] = 1;
    for (unsigned k = 1; k <= maxdeg; ++k) pw[v][k] = pw[v][k - 1] * pt[v];
  }
  std::map<unsigned, Integer> acc;
  Integer t;
  for (const auto& [e, c] : p.terms) {
    t = c;
    unsigned d = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (e[v]) t *= pw[v][e[v]];
      if (v < nx) d += e[v];
    }
    acc[d] += t;
  }
  std::map<unsigned, Rational> out;
  for (auto& [d, v] : acc) {
    Rational r(v, p.denominator);
    r.canonicalize();
    out[d] = r;
  }
  return out;
}

inline std::vector<Integer> random_distinct(std::mt19937_64& rng, std::size_t count, long range) {
  std::uniform_int_distribution<long> dist(-range, range);
  std::vector<Integer> v;
  while (v.size() < count) {
    Integer c(dist(rng));
    if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
  }
  return v;
}

}  // namespace detail

/// Writes the principal term as a polynomial in the tau variables with every
/// tau of degree at most beta. Each x-degree component is solved separately in
/// a basis of relabeling-orbit sums (or plain monomials, symmetrized
/// afterwards), from random integer points; the result is then confirmed at
/// fresh points. Failure raises NotTauPolynomial.
inline TauExtractReport tau_extract_report(const PrincipalTerm& p, const TauExtractOptions& opt = {}) {
  const int n = p.n, beta = p.beta;
  const auto tv = tau_vars(n);
  const std::size_t P = tv.size();
  TauExtractReport rep;
  rep.seed = opt.seed;
  if (n == 1) {
    if (p.poly.total_degree() != 0) throw NotTauPolynomial("n = 1 principal term must be constant");
    rep.tau = {beta, 1, MultiPoly::constant(tv, p.poly.constant_term())};
    return rep;
  }
  // every term must have equal x- and y-degree
  for (const auto& [e, c] : p.poly.terms()) {
    unsigned dx = 0, dy = 0;
    for (int k = 0; k < n; ++k) {
      dx += e[k];
      dy += e[n + k];
    }
    if (dx != dy) throw NotTauPolynomial("not a tau-polynomial within degree bound: unequal x and y degrees");
  }

  // basis elements grouped by tau-degree
  std::vector<Exponents> monos;
  {
    Exponents e(P, 0);
    while (true) {
      monos.push_back(e);
      std::size_t k = 0;
      for (; k < P; ++k) {
        if (e[k] < beta) {
          ++e[k];
          break;
        }
        e[k] = 0;
      }
      if (k == P) break;
    }
  }
  const auto perms = all_permutations(n);
  std::vector<std::vector<std::size_t>> pair_perms;
  for (const auto& pi : perms) pair_perms.push_back(tau_relabel_perm(n, pi));
  // basis: list of members (monomials) per basis element, by degree
  std::map<unsigned, std::vector<std::vector<Exponents>>> basis;
  if (opt.basis == TauBasis::Orbits) {
    std::map<Exponents, std::set<Exponents>> orbits;
    for (const auto& m : monos) {
      std::set<Exponents> images;
      for (const auto& pp : pair_perms) {
        Exponents im(P);
        for (std::size_t k = 0; k < P; ++k) im[pp[k]] = m[k];
        images.insert(im);
      }
      orbits.emplace(*images.rbegin(), std::move(images));
    }
    for (auto& [rep_e, members] : orbits)
      basis[total_degree(rep_e)].emplace_back(members.begin(), members.end());
  } else {
    for (const auto& m : monos) basis[total_degree(m)].push_back({m});
  }

  std::size_t max_unknowns = 0;
  for (const auto& [d, b] : basis) max_unknowns = std::max(max_unknowns, b.size());
  rep.solve_points = max_unknowns + opt.extra_points;
  rep.verify_points = opt.verify_points;

  const detail::ScaledPoly scaled = detail::scale_to_integers(p.poly);
  std::mt19937_64 rng(opt.seed);

  auto basis_values = [&](const std::vector<Rational>& t, unsigned d) {
    std::vector<Rational> vals;
    for (const auto& members : basis[d]) {
      Rational s = 0;
      for (const auto& m : members) {
        Rational v = 1;
        for (std::size_t k = 0; k < P; ++k)
          if (m[k]) v *= pow(t[k], m[k]);
        s += v;
      }
      vals.push_back(s);
    }
    return vals;
  };

  auto draw = [&](std::vector<Rational>& t, std::map<unsigned, Rational>& parts) {
    auto xs = detail::random_distinct(rng, n, opt.range);
    auto ys = detail::random_distinct(rng, n, opt.range);
    std::vector<Integer> pt(xs);
    pt.insert(pt.end(), ys.begin(), ys.end());
    parts = detail::eval_by_x_degree(scaled, pt, n);
    std::vector<Rational> xr(xs.begin(), xs.end()), yr(ys.begin(), ys.end());
    t = tau_values(xr, yr);
  };

  std::map<unsigned, RationalMatrix> systems;
  std::map<unsigned, std::vector<Rational>> rhs;
  for (std::size_t r = 0; r < rep.solve_points; ++r) {
    std::vector<Rational> t;
    std::map<unsigned, Rational> parts;
    draw(t, parts);
    for (const auto& [d, v] : parts)
      if (v != 0 && !basis.count(d))
        throw NotTauPolynomial("not a tau-polynomial within degree bound: degree " + std::to_string(d) +
                               " exceeds the available tau monomials");
    for (const auto& [d, b] : basis) {
      systems[d].push_back(basis_values(t, d));
      auto it = parts.find(d);
      rhs[d].push_back(it == parts.end() ? Rational(0) : it->second);
    }
  }

  MultiPoly result(tv);
  for (auto& [d, A] : systems) {
    auto sol = solve_exact(A, rhs[d]);
    if (!sol.consistent)
      throw NotTauPolynomial("not a tau-polynomial within degree bound: inconsistent system at degree " +
                             std::to_string(d));
    rep.unknowns += sol.x.size();
    rep.rank += sol.rank;
    for (std::size_t k = 0; k < sol.x.size(); ++k) {
      if (sol.x[k] == 0) continue;
      for (const auto& m : basis[d][k]) result.add_term(m, sol.x[k]);
    }
  }
  TauPoly tau{beta, n, result};
  if (opt.basis == TauBasis::Monomials) tau = tau_symmetrize(tau);

  for (std::size_t r = 0; r < opt.verify_points; ++r) {
    std::vector<Rational> t;
    std::map<unsigned, Rational> parts;
    draw(t, parts);
    Rational want = 0;
    for (const auto& [d, v] : parts) want += v;
    if (tau.poly.evaluate(t) != want)
      throw NotTauPolynomial("not a tau-polynomial within degree bound: verification point " + std::to_string(r) +
                             " disagrees");
  }
  rep.tau = std::move(tau);
  return rep;
}

inline TauPoly tau_extract(const PrincipalTerm& p, const TauExtractOptions& opt = {}) {
  return tau_extract_report(p, opt).tau;
}

/// Q_{beta,k}(tau_ij) as a polynomial over the tau variables.
inline MultiPoly q_of_tau(int n, int beta, int k, int i, int j) {
  const auto tv = tau_vars(n);
  const MultiPoly q = bessel_Q(beta, k).poly;
  return q.substitute({MultiPoly::variable(tv, tau_name(i, j))});
}

/// sum_{k<beta} (beta-k-1)! / (8^k k! (beta+k-1)!) prod_{i<j} Q_{beta,k}(tau_ij).
inline TauPoly closed_form_n3(int beta) {
  if (beta < 1) throw DomainError("closed_form_n3 needs integer beta >= 1");
  const auto tv = tau_vars(3);
  MultiPoly sum(tv);
  for (int k = 0; k < beta; ++k) {
    Integer eight_k;
    mpz_ui_pow_ui(eight_k.get_mpz_t(), 8, k);
    Rational c(factorial(beta - k - 1), eight_k * factorial(k) * factorial(beta + k - 1));
    c.canonicalize();
    MultiPoly prod = MultiPoly::constant(tv, c);
    for (auto [i, j] : tau_pairs(3)) prod *= q_of_tau(3, beta, k, i, j);
    sum += prod;
  }
  return {beta, 3, sum};
}

/// The variant with 2^{6k} and derivatives of Y_{beta-1} at 1/tau, multiplied
/// through by (prod tau)^beta so that it is a polynomial:
/// sum_k (beta-k-1)! / (2^{6k} k! (beta+k-1)!) 2^{-3k} (prod tau)^k prod Q_{beta,k}(tau).
inline TauPoly closed_form_n3_y_variant(int beta) {
  const auto tv = tau_vars(3);
  MultiPoly tprod = MultiPoly::constant(tv, 1);
  for (std::size_t v = 0; v < 3; ++v) tprod *= MultiPoly::variable(tv, v);
  MultiPoly sum(tv);
  for (int k = 0; k < beta; ++k) {
    Integer two;
    mpz_ui_pow_ui(two.get_mpz_t(), 2, 9 * k);
    Rational c(factorial(beta - k - 1), two * factorial(k) * factorial(beta + k - 1));
    c.canonicalize();
    MultiPoly prod = tprod.pow(k) * c;
    for (auto [i, j] : tau_pairs(3)) prod *= q_of_tau(3, beta, k, i, j);
    sum += prod;
  }
  return {beta, 3, sum};
}

/// Edge labels l_ij in {0..beta-1} for prod Q_{beta,l_ij}(tau_ij), keyed by pair.
using EdgeLabels = std::map<std::pair<int, int>, int>;

/// sum over the distinct relabeling images of prod_{i<j} Q_{beta, l_ij}(tau_ij).
inline MultiPoly label_form_sym(int n, int beta, const EdgeLabels& labels) {
  const auto tv = tau_vars(n);
  std::set<EdgeLabels> images;
  for (const auto& pi : all_permutations(n)) {
    EdgeLabels im;
    for (const auto& [e, l] : labels) {
      int a = pi[e.first - 1] + 1, b = pi[e.second - 1] + 1;
      if (a > b) std::swap(a, b);
      im[{a, b}] = l;
    }
    images.insert(im);
  }
  MultiPoly sum(tv);
  for (const auto& im : images) {
    MultiPoly prod = MultiPoly::constant(tv, 1);
    for (const auto& [e, l] : im) prod *= q_of_tau(n, beta, l, e.first, e.second);
    sum += prod;
  }
  return sum;
}

/// Q-form of the n = 4, beta = 2 principal term with "+sym" read as a sum
/// over distinct relabeling images.
inline TauPoly q_form_2_4(const Rational& c_star = Rational(1, 16), const Rational& c_edge = Rational(1, 128)) {
  EdgeLabels all0, star, edge;
  for (auto pr : tau_pairs(4)) {
    all0[pr] = 0;
    star[pr] = pr.first == 1 ? 0 : 1;
    edge[pr] = pr == std::make_pair(1, 2) ? 0 : 1;
  }
  MultiPoly p = label_form_sym(4, 2, all0) + label_form_sym(4, 2, star) * c_star + label_form_sym(4, 2, edge) * c_edge;
  return {2, 4, p};
}

/// Triangles {i,j,k}, i<j<k.
inline std::vector<std::array<int, 3>> triangles(int n) {
  std::vector<std::array<int, 3>> t;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) t.push_back({i, j, k});
  return t;
}

/// (sum over sets S of triangles with |S| < coeffs.size() of coeffs[|S|] prod_{T in S} T) prod |0>,
/// where |0>_ij = tau^2 + tau and each triangle projects its three edges onto tau.
inline TauPoly triangle_expansion(int n, const std::vector<Rational>& coeffs) {
  const auto tv = tau_vars(n);
  const auto tris = triangles(n);
  MultiPoly sum(tv);
  const std::size_t T = tris.size();
  for (std::uint64_t mask = 0; mask < (1ull << T); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (size >= coeffs.size() || coeffs[size] == 0) continue;
    std::set<std::pair<int, int>> covered;
    for (std::size_t k = 0; k < T; ++k)
      if (mask >> k & 1u) {
        const auto& t = tris[k];
        covered.insert({t[0], t[1]});
        covered.insert({t[1], t[2]});
        covered.insert({t[0], t[2]});
      }
    MultiPoly prod = MultiPoly::constant(tv, coeffs[size]);
    for (auto [i, j] : tau_pairs(n)) {
      MultiPoly t = MultiPoly::variable(tv, tau_name(i, j));
      prod *= covered.count({i, j}) ? t : t * t + t;
    }
    sum += prod;
  }
  return {2, n, sum};
}

/// Product of all tau_ij.
inline TauPoly tau_product(int n, int beta = 1) {
  const auto tv = tau_vars(n);
  MultiPoly p = MultiPoly::constant(tv, 1);
  for (std::size_t v = 0; v < tv.size(); ++v) p *= MultiPoly::variable(tv, v);
  return {beta, n, p};
}

/// Proportionality of two tau forms as functions of x and y (tau forms are not
/// unique once n >= 4, so there the difference is expanded and tested for zero).
inline std::optional<Rational> tau_proportional(const TauPoly& a, const TauPoly& b, std::uint64_t seed = 17) {
  if (a.n != b.n) return std::nullopt;
  if (a.n <= 3) return proportionality_constant(a.poly, b.poly);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 20; ++attempt) {
    auto xs = detail::random_distinct(rng, a.n, 1000);
    auto ys = detail::random_distinct(rng, a.n, 1000);
    const auto t = tau_values(std::vector<Rational>(xs.begin(), xs.end()), std::vector<Rational>(ys.begin(), ys.end()));
    const Rational vb = b.poly.evaluate(t);
    if (vb == 0) continue;
    const Rational c = a.poly.evaluate(t) / vb;
    if (c == 0) return std::nullopt;
    TauPoly diff{a.beta, a.n, a.poly - b.poly * c};
    if (!tau_to_xy(diff).is_zero()) return std::nullopt;
    return c;
  }
  return std::nullopt;
}

}  // namespace angulon
