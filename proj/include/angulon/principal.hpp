#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "angulon/besselpoly.hpp"
#include "angulon/errors.hpp"
#include "angulon/expsum.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/rational.hpp"

namespace angulon {

struct PrincipalTerm {
  int beta = 1;
  int n = 1;
  MultiPoly poly;
};

struct PrincipalOptions {
  /// Largest intermediate polynomial (in terms) before giving up.
  std::size_t max_terms = 50'000'000;
  /// Worker threads for the outer derivative sum; the result does not depend on it.
  unsigned jobs = 1;
  /// Called after each completed level with (level, number of terms).
  std::function<void(int, std::size_t)> progress;
};

namespace detail {

inline MultiPoly xvar(const std::vector<std::string>& vars, int i) {
  return MultiPoly::variable(vars, static_cast<std::size_t>(i - 1));
}
inline MultiPoly yvar(const std::vector<std::string>& vars, int n, int i) {
  return MultiPoly::variable(vars, static_cast<std::size_t>(n + i - 1));
}

inline void check_budget(const MultiPoly& p, const PrincipalOptions& opt, int beta, int n) {
  if (p.size() > opt.max_terms)
    throw ResourceLimit("principal term (beta=" + std::to_string(beta) + ", n=" + std::to_string(n) +
                        "): intermediate polynomial reached " + std::to_string(p.size()) + " terms (budget " +
                        std::to_string(opt.max_terms) + "); levels 1.." + std::to_string(n - 1) + " completed");
}

/// One level of the derivative recursion: the level-(n-1) term over x1..x_{n-1},
/// y1..y_{n-1} becomes the level-n term over x1..xn, y1..yn.
///
/// For each i < n the factor exp(x_{i,n} h) prod_{k != i} (y_k - y_i - h)^{-beta}
/// is expanded in h; its coefficients, with the Vandermonde powers cleared,
/// are the polynomials V[i][g]. The remaining (y_a - y_b)^{2 beta - 2} factors
/// are removed by exact division at the end.
inline MultiPoly principal_step(const MultiPoly& prev, int beta, int n, const PrincipalOptions& opt) {
  const auto vars = xy_vars(n);
  const int N = n - 1;
  const MultiPoly f = prev.embed(vars);
  const MultiPoly one = MultiPoly::constant(vars, 1);

  std::vector<std::vector<MultiPoly>> V(N + 1);
  for (int i = 1; i <= N; ++i) {
    const MultiPoly xin = xvar(vars, i) - xvar(vars, n);
    std::vector<MultiPoly> series(beta, MultiPoly(vars));
    {
      MultiPoly p = one;
      for (int s = 0; s < beta; ++s) {
        series[s] = p * Rational(Integer(1), factorial(s));
        p = p * xin;
      }
    }
    for (int k = 1; k <= n; ++k) {
      if (k == i) continue;
      const int E = k == n ? beta : beta - 1;
      const MultiPoly yki = yvar(vars, n, k) - yvar(vars, n, i);
      std::vector<MultiPoly> factor(beta, MultiPoly(vars));
      for (int r = 0; r < beta && r <= E; ++r)
        factor[r] = yki.pow(E - r) * Rational(binomial(beta + r - 1, r));
      std::vector<MultiPoly> next(beta, MultiPoly(vars));
      for (int a = 0; a < beta; ++a)
        for (int b = 0; a + b < beta; ++b)
          if (!series[a].is_zero() && !factor[b].is_zero()) next[a + b] += series[a] * factor[b];
      series = std::move(next);
    }
    V[i] = std::move(series);
  }

  // rec(i, g) = sum_{gamma_i..gamma_N} prod_{k>=i} V_k(beta-1-gamma_k) d^gamma g / gamma!
  std::function<MultiPoly(int, const MultiPoly&)> rec = [&](int i, const MultiPoly& g) -> MultiPoly {
    if (i > N) return g;
    MultiPoly sum(vars);
    MultiPoly d = g;
    for (int gamma = 0; gamma < beta; ++gamma) {
      if (gamma > 0) d = d.derive(static_cast<std::size_t>(n + i - 1)) * Rational(1, gamma);
      if (d.is_zero()) break;
      MultiPoly inner = rec(i + 1, d);
      sum += inner * V[i][beta - 1 - gamma];
      check_budget(sum, opt, beta, n);
    }
    return sum;
  };

  MultiPoly S(vars);
  if (N >= 1) {
    std::vector<MultiPoly> derivs;
    MultiPoly d = f;
    for (int gamma = 0; gamma < beta; ++gamma) {
      if (gamma > 0) d = d.derive(static_cast<std::size_t>(n)) * Rational(1, gamma);
      derivs.push_back(d);
    }
    std::vector<MultiPoly> parts(beta, MultiPoly(vars));
    std::vector<std::exception_ptr> errors(beta);
    auto work = [&](int gamma) {
      try {
        if (derivs[gamma].is_zero()) return;
        parts[gamma] = rec(2, derivs[gamma]) * V[1][beta - 1 - gamma];
        check_budget(parts[gamma], opt, beta, n);
      } catch (...) {
        errors[gamma] = std::current_exception();
      }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, beta));
    if (jobs == 1) {
      for (int g = 0; g < beta; ++g) work(g);
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
          for (int g; (g = next.fetch_add(1)) < beta;) work(g);
        });
      for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (int g = 0; g < beta; ++g) S += parts[g];
  } else {
    S = f;
  }

  for (int a = 1; a <= N; ++a)
    for (int b = a + 1; b <= N; ++b)
      for (int r = 0; r < 2 * beta - 2; ++r) S = S.divide_linear(static_cast<std::size_t>(n + b - 1),
                                                                   static_cast<std::size_t>(n + a - 1));
  Rational scale = pow(Rational(factorial(beta - 1)), N);
  if ((N * (N - 1) / 2) % 2) scale = -scale;
  S *= scale;
  for (int i = 1; i <= N; ++i) {
    S *= xvar(vars, i) - xvar(vars, n);
    check_budget(S, opt, beta, n);
  }
  return S;
}

inline std::mutex& principal_cache_mutex() {
  static std::mutex m;
  return m;
}
inline std::map<std::pair<int, int>, MultiPoly>& principal_cache() {
  static std::map<std::pair<int, int>, MultiPoly> c;
  return c;
}

}  // namespace detail

/// Principal term by the derivative recursion, normalized so that the n = 2
/// term is 2^beta Q_{beta,0}(tau_12). Results are memoized per process.
inline PrincipalTerm principal_term(int beta, int n, const PrincipalOptions& opt = {}) {
  if (beta < 1) throw DomainError("principal_term needs integer beta >= 1");
  if (n < 1) throw DomainError("principal_term needs n >= 1");
  if (n == 1) return {beta, 1, MultiPoly::constant(xy_vars(1), 1)};
  {
    std::lock_guard lock(detail::principal_cache_mutex());
    auto& cache = detail::principal_cache();
    if (auto it = cache.find({beta, n}); it != cache.end()) return {beta, n, it->second};
  }
  MultiPoly p;
  int start = 1;
  {
    std::lock_guard lock(detail::principal_cache_mutex());
    auto& cache = detail::principal_cache();
    for (int m = n - 1; m >= 2; --m)
      if (auto it = cache.find({beta, m}); it != cache.end()) {
        p = it->second;
        start = m;
        break;
      }
  }
  if (start == 1) p = MultiPoly::constant(xy_vars(1), 1);
  for (int m = start + 1; m <= n; ++m) {
    p = detail::principal_step(p, beta, m, opt);
    if (opt.progress) opt.progress(m, p.size());
    std::lock_guard lock(detail::principal_cache_mutex());
    detail::principal_cache().emplace(std::make_pair(beta, m), p);
  }
  return {beta, n, p};
}

/// Seeds the in-process memo (used by the on-disk cache loader).
inline void principal_memo_insert(const PrincipalTerm& p) {
  std::lock_guard lock(detail::principal_cache_mutex());
  detail::principal_cache().insert_or_assign(std::make_pair(p.beta, p.n), p.poly);
}

inline void principal_memo_clear() {
  std::lock_guard lock(detail::principal_cache_mutex());
  detail::principal_cache().clear();
}

/// Vandermonde prod_{i<j} (v_j - v_i) over the given variable indices.
inline MultiPoly vandermonde(const std::vector<std::string>& vars, const std::vector<std::size_t>& idx) {
  MultiPoly d = MultiPoly::constant(vars, 1);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      d *= MultiPoly::variable(vars, idx[b]) - MultiPoly::variable(vars, idx[a]);
  return d;
}

/// Variable permutation sending y_k to y_{sigma(k)} (0-based sigma).
inline std::vector<std::size_t> y_permutation(int n, const std::vector<int>& sigma) {
  std::vector<std::size_t> perm(2 * n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k < n; ++k) perm[n + k] = static_cast<std::size_t>(n + sigma[k]);
  return perm;
}

/// sum_sigma exp(sum_i x_i y_sigma(i)) Ihat(X, Y_sigma) / (Delta(X) Delta(Y_sigma))^{2 beta}.
inline ExpRatSum assemble_I(const PrincipalTerm& p) {
  const int n = p.n;
  const auto vars = xy_vars(n);
  std::vector<std::size_t> xs(n), ys(n);
  std::iota(xs.begin(), xs.end(), 0);
  std::iota(ys.begin(), ys.end(), static_cast<std::size_t>(n));
  const MultiPoly den = (vandermonde(vars, xs) * vandermonde(vars, ys)).pow(2 * p.beta);
  ExpRatSum out(vars);
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    MultiPoly ex(vars);
    for (int i = 0; i < n; ++i) {
      Exponents e(2 * n, 0);
      e[i] = 1;
      e[n + sigma[i]] = 1;
      ex.add_term(e, 1);
    }
    // Ihat(X, Y_sigma): the slot of y_i receives y_sigma(i)
    MultiPoly num = p.poly.permute_vars(y_permutation(n, sigma));
    out.add(RatFunc(num, den), ex);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

/// Spectra of the two diagonal matrices.
struct SpectrumPair {
  std::vector<Rational> x;
  std::vector<Rational> y;

  std::size_t n() const { return x.size(); }
  std::vector<Rational> point() const {
    std::vector<Rational> p = x;
    p.insert(p.end(), y.begin(), y.end());
    return p;
  }
  static SpectrumPair from_doubles(const std::vector<double>& x, const std::vector<double>& y) {
    SpectrumPair s;
    for (double v : x) s.x.push_back(from_double(v));
    for (double v : y) s.y.push_back(from_double(v));
    return s;
  }
};

inline double min_gap(const std::vector<Rational>& v) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) g = std::min(g, std::fabs(Rational(v[a] - v[b]).get_d()));
  return g;
}

/// Exact value of the assembled sum at a regular rational point.
inline ExpValue eval_I_exact(const PrincipalTerm& p, const SpectrumPair& s) {
  const int n = p.n;
  if (s.x.size() != static_cast<std::size_t>(n) || s.y.size() != static_cast<std::size_t>(n))
    throw DomainError("spectrum size does not match n");
  Rational dx = 1, dy = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      dx *= s.x[b] - s.x[a];
      dy *= s.y[b] - s.y[a];
    }
  if (dx == 0 || dy == 0) throw PoleError("coinciding eigenvalues: the permutation sum has a removable singularity here");
  const Rational inv = Rational(1) / pow(dx * dy, 2 * p.beta);
  ExpValue out;
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<Rational> pt(2 * n);
  do {
    Rational q = 0;
    for (int i = 0; i < n; ++i) {
      pt[i] = s.x[i];
      pt[n + i] = s.y[sigma[i]];
      q += s.x[i] * s.y[sigma[i]];
    }
    out.add(q, p.poly.evaluate(pt) * inv);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

/// Float value of the assembled sum; spectra must be separated by at least eps.
inline double eval_I_numeric(const PrincipalTerm& p, const SpectrumPair& s, double eps = 1e-6) {
  if (s.n() != static_cast<std::size_t>(p.n)) throw DomainError("spectrum size does not match n");
  if (min_gap(s.x) < eps || min_gap(s.y) < eps)
    throw PreconditionError("eigenvalues closer than " + std::to_string(eps) +
                            "; use the exact rational evaluation for nearly coinciding spectra");
  return eval_I_exact(p, s).to_double();
}

/// Gamma(b + 1/2) e^s (t/2)^{1/2 - b} I_{b-1/2}(t) with t = |tau_12|: the n = 2
/// integral normalized to 1 at Y = 0.
inline double bessel_form_n2(double beta, const SpectrumPair& s) {
  if (s.n() != 2) throw DomainError("the Bessel form is for n = 2");
  const double x1 = s.x[0].get_d(), x2 = s.x[1].get_d(), y1 = s.y[0].get_d(), y2 = s.y[1].get_d();
  const double tau = -0.5 * (x1 - x2) * (y1 - y2);
  if (tau == 0) throw PreconditionError("tau_12 = 0: the Bessel form is singular there");
  const double t = std::fabs(tau);
  const double shift = 0.5 * (x1 + x2) * (y1 + y2);
  const double nu = beta - 0.5;
  return std::exp(shift) * std::tgamma(beta + 0.5) * std::pow(t / 2, -nu) * mod_bessel_I(nu, t, 1e-17);
}

namespace detail {
inline std::mutex& calibration_mutex() {
  static std::mutex m;
  return m;
}
inline std::map<int, double>& calibration_cache() {
  static std::map<int, double> c;
  return c;
}
}  // namespace detail

/// n = 2 integral for any beta > 0. Integer beta is scaled to the normalization of
/// the assembled permutation sum (constant fitted once at x = (0,1), y = (0,1));
/// other beta are Haar-normalized.
inline double eval_I2_any_beta(double beta, const SpectrumPair& s) {
  if (!(beta > 0)) throw DomainError("beta must be positive");
  const double shape = bessel_form_n2(beta, s);
  if (beta != std::floor(beta)) return shape;
  const int b = static_cast<int>(beta);
  double c;
  {
    std::lock_guard lock(detail::calibration_mutex());
    auto& cache = detail::calibration_cache();
    auto it = cache.find(b);
    if (it == cache.end()) {
      SpectrumPair ref{{0, 1}, {0, 1}};
      const double exact = eval_I_numeric(principal_term(b, 2), ref);
      it = cache.emplace(b, exact / bessel_form_n2(beta, ref)).first;
    }
    c = it->second;
  }
  return c * shape;
}

}  // namespace angulon
