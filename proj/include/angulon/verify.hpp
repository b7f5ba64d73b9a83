#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <atomic>
#include <vector>

#include "angulon/besselpoly.hpp"
#include "angulon/errors.hpp"
#include "angulon/expsum.hpp"
#include "angulon/haar.hpp"
#include "angulon/jet.hpp"
#include "angulon/polyjson.hpp"
#include "angulon/principal.hpp"
#include "angulon/tau.hpp"

namespace angulon {

/// Random rational spectra: entries p/q with q <= 3, |entry| <= 20, pairwise gaps >= 1.
inline SpectrumPair random_spectrum(int n, std::mt19937_64& rng) {
  auto draw = [&](std::vector<Rational>& v) {
    std::uniform_int_distribution<int> den(1, 3);
    while (true) {
      v.clear();
      for (int i = 0; i < n; ++i) {
        const int d = den(rng);
        std::uniform_int_distribution<int> num(-20 * d, 20 * d);
        v.push_back(rat_normalize(num(rng), d));
      }
      bool ok = true;
      for (int a = 0; a < n && ok; ++a)
        for (int b = a + 1; b < n && ok; ++b) ok = abs(v[a] - v[b]) >= 1;
      if (ok) return;
    }
  };
  SpectrumPair s;
  draw(s.x);
  draw(s.y);
  return s;
}

inline std::vector<SpectrumPair> random_spectra(int n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SpectrumPair> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_spectrum(n, rng));
  return out;
}

inline std::string spectrum_to_string(const SpectrumPair& s) {
  std::string out = "x=(";
  for (std::size_t i = 0; i < s.x.size(); ++i) out += (i ? "," : "") + s.x[i].get_str();
  out += ") y=(";
  for (std::size_t i = 0; i < s.y.size(); ++i) out += (i ? "," : "") + s.y[i].get_str();
  return out + ")";
}

/// Coordinates of a point as jets. The x's always move; the y's move only when
/// y_active (needed for y-derivatives).
struct LocalExpansion {
  int beta = 1;
  int n = 0;
  SpectrumPair s;
  JetSpacePtr space;
  std::vector<int> xl, yl;
  std::vector<Jet> X, Y;
  std::vector<std::vector<Jet>> inv_dx, inv_dy;  // 1/(x_i - x_k), 1/(y_i - y_k)
};

inline LocalExpansion local_expansion(int beta, const SpectrumPair& s, unsigned order, bool y_active) {
  const int n = static_cast<int>(s.x.size());
  if (s.y.size() != s.x.size()) throw DomainError("x and y must have the same length");
  LocalExpansion L;
  L.beta = beta;
  L.n = n;
  L.s = s;
  L.space = std::make_shared<JetSpace>(y_active ? 2 * n : n, order);
  for (int i = 0; i < n; ++i) {
    L.xl.push_back(i);
    L.yl.push_back(y_active ? n + i : -1);
    L.X.push_back(Jet::variable(L.space, i, s.x[i]));
    L.Y.push_back(y_active ? Jet::variable(L.space, n + i, s.y[i]) : Jet::constant(L.space, s.y[i]));
  }
  L.inv_dx.assign(n, std::vector<Jet>(n));
  L.inv_dy.assign(n, std::vector<Jet>(n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      if (s.x[i] == s.x[k] || s.y[i] == s.y[k]) throw PoleError("coinciding eigenvalues at the evaluation point");
      L.inv_dx[i][k] = (L.X[i] - L.X[k]).inverse();
      L.inv_dy[i][k] = (L.Y[i] - L.Y[k]).inverse();
    }
  return L;
}

/// Local expansion of the assembled permutation sum for the polynomial `poly`.
inline ExpJet integral_jet(const MultiPoly& poly, int beta, const LocalExpansion& L) {
  const int n = L.n;
  Jet den = Jet::constant(L.space, 1);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) den = den * (L.X[b] - L.X[a]) * (L.Y[b] - L.Y[a]);
  const Jet inv = den.pow(2 * beta).inverse();
  ExpJet out(L.space);
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<Rational> pt(2 * n);
  std::vector<int> active(2 * n);
  do {
    for (int i = 0; i < n; ++i) {
      pt[i] = L.s.x[i];
      active[i] = L.xl[i];
      pt[n + i] = L.s.y[sigma[i]];
      active[n + i] = L.yl[sigma[i]];
    }
    const Jet ph = taylor_jet(poly, pt, active, L.space);
    Jet ex = Jet::constant(L.space, 0);
    for (int i = 0; i < n; ++i) ex += L.X[i] * L.Y[sigma[i]];
    const Rational q = ex.value();
    ex[0] = 0;
    out.add(q, inv * ph * ex.exp_nilpotent());
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

/// Operator matrix with K_ii = d/dx_i + beta sum_{k != i} 1/(x_i - x_k) and
/// K_ik = -beta/(x_i - x_k), acting on vectors of functions.
struct KOperator {
  int beta = 1;
  int n = 0;

  std::vector<ExpJet> apply(const std::vector<ExpJet>& v, const LocalExpansion& L) const {
    std::vector<ExpJet> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      ExpJet r = v[i].derive(L.xl[i]);
      for (int k = 0; k < n; ++k)
        if (k != i) r += (L.inv_dx[i][k] * Rational(beta)) * (v[i] - v[k]);
      out.push_back(std::move(r));
    }
    return out;
  }
};

/// Column j of the moment table: prod_{l != j} (y_l - K)/(y_l - y_j) applied to I e,
/// factors in increasing l. 0-based j.
inline std::vector<ExpJet> moment_column(const ExpJet& I, int j, const LocalExpansion& L) {
  const KOperator K{L.beta, L.n};
  std::vector<ExpJet> v(L.n, I);
  for (int l = 0; l < L.n; ++l) {
    if (l == j) continue;
    const auto Kv = K.apply(v, L);
    for (int i = 0; i < L.n; ++i) v[i] = L.inv_dy[l][j] * (L.Y[l] * v[i] - Kv[i]);
  }
  return v;
}

/// Local moment table M_ij at one point.
struct MomentTable {
  int beta = 1;
  int n = 0;
  SpectrumPair point;
  std::vector<std::vector<ExpJet>> entries;  // entries[i][j]

  ExpValue value(int i, int j) const { return entries[i][j].value(); }
};

namespace detail {

inline MultiPoly perturbed(const MultiPoly& p) {
  MultiPoly q = p;
  q.add_term(Exponents(p.num_vars(), 0), 1);
  return q;
}

/// Lazily built expansions of I and its moments at one point.
class ExactWorkspace {
 public:
  ExactWorkspace(const PrincipalTerm& p, const SpectrumPair& s, bool perturb = false)
      : beta_(p.beta), n_(p.n), poly_(perturb ? perturbed(p.poly) : p.poly), s_(s) {
    if (s.x.size() != static_cast<std::size_t>(n_) || s.y.size() != static_cast<std::size_t>(n_))
      throw DomainError("spectrum size does not match n");
  }

  int n() const { return n_; }
  int beta() const { return beta_; }

  const LocalExpansion& xs() {
    if (!x_) x_ = local_expansion(beta_, s_, std::max(n_, 2), false);
    return *x_;
  }
  const ExpJet& I() {
    if (!Ix_) Ix_ = integral_jet(poly_, beta_, xs());
    return *Ix_;
  }
  const std::vector<ExpJet>& column(int j) {
    if (cols_.empty()) cols_.resize(n_);
    if (!cols_[j]) cols_[j] = moment_column(I(), j, xs());
    return *cols_[j];
  }

  const LocalExpansion& xys() {
    if (!xy_) xy_ = local_expansion(beta_, s_, std::max(n_, 1), true);
    return *xy_;
  }
  const ExpJet& Ixy() {
    if (!Ixy_) Ixy_ = integral_jet(poly_, beta_, xys());
    return *Ixy_;
  }
  const std::vector<ExpJet>& column_xy(int j) {
    if (cols_xy_.empty()) cols_xy_.resize(n_);
    if (!cols_xy_[j]) cols_xy_[j] = moment_column(Ixy(), j, xys());
    return *cols_xy_[j];
  }

 private:
  int beta_, n_;
  MultiPoly poly_;
  SpectrumPair s_;
  std::optional<LocalExpansion> x_, xy_;
  std::optional<ExpJet> Ix_, Ixy_;
  std::vector<std::optional<std::vector<ExpJet>>> cols_, cols_xy_;
};

inline void check_index(int i, int n, const char* what) {
  if (i < 1 || i > n) throw DomainError(std::string(what) + " index out of range");
}

inline ExpValue calogero(ExactWorkspace& w) {
  const auto& L = w.xs();
  const auto& I = w.I();
  const int n = w.n();
  std::vector<ExpJet> d;
  for (int i = 0; i < n; ++i) d.push_back(I.derive(L.xl[i]));
  ExpJet h(L.space);
  Rational ysq = 0;
  for (int i = 0; i < n; ++i) {
    h += d[i].derive(L.xl[i]);
    for (int j = 0; j < n; ++j)
      if (j != i) h += (L.inv_dx[i][j] * Rational(w.beta())) * (d[i] - d[j]);
    ysq += L.s.y[i] * L.s.y[i];
  }
  h -= ysq * I;
  return h.value();
}

inline ExpValue dunkl_x(ExactWorkspace& w, int i, int j) {
  const auto& L = w.xs();
  const auto& M = w.column(j);
  ExpJet r = M[i].derive(L.xl[i]);
  for (int k = 0; k < w.n(); ++k)
    if (k != i) r += (L.inv_dx[i][k] * Rational(w.beta())) * (M[i] - M[k]);
  r -= L.Y[j] * M[i];
  return r.value();
}

inline ExpValue dunkl_y(ExactWorkspace& w, int i, int j) {
  const auto& L = w.xys();
  const ExpJet& Mij = w.column_xy(j)[i];
  ExpJet r = Mij.derive(static_cast<std::size_t>(L.yl[j]));
  for (int l = 0; l < w.n(); ++l)
    if (l != j) r += (L.inv_dy[l][j] * Rational(w.beta())) * (w.column_xy(l)[i] - Mij);
  r -= L.X[i] * Mij;
  return r.value();
}

inline ExpValue kmatrix(ExactWorkspace& w, int i, int j) {
  const auto& L = w.xs();
  const auto& M = w.column(j);
  const auto KM = KOperator{w.beta(), w.n()}.apply(M, L);
  return (KM[i] - L.Y[j] * M[i]).value();
}

/// prod_l (y_l - K) applied to I e in the given factor order.
inline std::vector<ExpValue> charpoly(ExactWorkspace& w, bool reversed) {
  const auto& L = w.xs();
  const KOperator K{w.beta(), w.n()};
  std::vector<ExpJet> v(w.n(), w.I());
  for (int step = 0; step < w.n(); ++step) {
    const int l = reversed ? w.n() - 1 - step : step;
    const auto Kv = K.apply(v, L);
    for (int i = 0; i < w.n(); ++i) v[i] = L.Y[l] * v[i] - Kv[i];
  }
  std::vector<ExpValue> out;
  for (const auto& e : v) out.push_back(e.value());
  return out;
}

}  // namespace detail

inline MomentTable moments_at(const PrincipalTerm& p, const SpectrumPair& s) {
  const auto L = local_expansion(p.beta, s, static_cast<unsigned>(std::max(p.n - 1, 0)), false);
  const ExpJet I = integral_jet(p.poly, p.beta, L);
  MomentTable t{p.beta, p.n, s, std::vector<std::vector<ExpJet>>(p.n, std::vector<ExpJet>(p.n))};
  for (int j = 0; j < p.n; ++j) {
    auto col = moment_column(I, j, L);
    for (int i = 0; i < p.n; ++i) t.entries[i][j] = std::move(col[i]);
  }
  return t;
}

/// Symbolic moment table as exponential-rational sums. Denominators are kept
/// unreduced, so this is practical for n <= 2 (n = 3 at beta = 1).
inline std::vector<std::vector<ExpRatSum>> moments_symbolic(const PrincipalTerm& p) {
  const int n = p.n;
  const auto vars = xy_vars(n);
  const ExpRatSum I = assemble_I(p);
  auto x = [&](int i) { return MultiPoly::variable(vars, static_cast<std::size_t>(i)); };
  auto y = [&](int i) { return MultiPoly::variable(vars, static_cast<std::size_t>(n + i)); };
  const MultiPoly one = MultiPoly::constant(vars, 1);
  std::vector<std::vector<ExpRatSum>> table(n, std::vector<ExpRatSum>(n, ExpRatSum(vars)));
  for (int j = 0; j < n; ++j) {
    std::vector<ExpRatSum> v(n, I);
    for (int l = 0; l < n; ++l) {
      if (l == j) continue;
      std::vector<ExpRatSum> next;
      for (int i = 0; i < n; ++i) {
        ExpRatSum Kv = v[i].derive(static_cast<std::size_t>(i));
        for (int k = 0; k < n; ++k)
          if (k != i) Kv += RatFunc(one * Rational(p.beta), x(i) - x(k)) * (v[i] - v[k]);
        ExpRatSum r = RatFunc(y(l), one) * v[i] - Kv;
        next.push_back(RatFunc(one, y(l) - y(j)) * r);
      }
      v = std::move(next);
    }
    for (int i = 0; i < n; ++i) table[i][j] = std::move(v[i]);
  }
  return table;
}

// ---- single identity residuals (1-based indices) ----

inline ExpValue calogero_residual(const PrincipalTerm& p, const SpectrumPair& s) {
  detail::ExactWorkspace w(p, s);
  return detail::calogero(w);
}

/// x-side: dM_ij/dx_i + beta sum_{k != i} (M_ij - M_kj)/(x_i - x_k) - y_j M_ij.
inline ExpValue dunkl_residual_x(const PrincipalTerm& p, const SpectrumPair& s, int i, int j) {
  detail::check_index(i, p.n, "row");
  detail::check_index(j, p.n, "column");
  detail::ExactWorkspace w(p, s);
  return detail::dunkl_x(w, i - 1, j - 1);
}

/// y-side: dM_ij/dy_j + beta sum_{l != j} (M_il - M_ij)/(y_l - y_j) - x_i M_ij.
inline ExpValue dunkl_residual_y(const PrincipalTerm& p, const SpectrumPair& s, int i, int j) {
  detail::check_index(i, p.n, "row");
  detail::check_index(j, p.n, "column");
  detail::ExactWorkspace w(p, s);
  return detail::dunkl_y(w, i - 1, j - 1);
}

inline ExpValue charpoly_identity(const PrincipalTerm& p, const SpectrumPair& s, int i) {
  detail::check_index(i, p.n, "row");
  detail::ExactWorkspace w(p, s);
  return detail::charpoly(w, false)[i - 1];
}

/// Exact value of I at s (same normalization as the moment table).
inline ExpValue integral_value(const PrincipalTerm& p, const SpectrumPair& s) { return eval_I_exact(p, s); }

// ---- exact suites ----

enum class ExactCheck { Calogero, DunklX, DunklY, KMatrix, Charpoly, SumRules, Chain };

inline std::string check_name(ExactCheck c) {
  switch (c) {
    case ExactCheck::Calogero: return "calogero";
    case ExactCheck::DunklX: return "dunkl-x";
    case ExactCheck::DunklY: return "dunkl-y";
    case ExactCheck::KMatrix: return "kmatrix";
    case ExactCheck::Charpoly: return "charpoly";
    case ExactCheck::SumRules: return "sumrules";
    case ExactCheck::Chain: return "chain";
  }
  return "?";
}

inline std::vector<ExactCheck> all_exact_checks() {
  return {ExactCheck::Calogero, ExactCheck::DunklX,   ExactCheck::DunklY, ExactCheck::KMatrix,
          ExactCheck::Charpoly, ExactCheck::SumRules, ExactCheck::Chain};
}

struct CheckReport {
  std::string check;
  int beta = 0;
  int n = 0;
  std::vector<SpectrumPair> points;
  std::uint64_t seed = 0;
  bool pass = false;
  std::vector<std::string> residuals;
  std::optional<Rational> constant;
  std::string reference;
  std::string note;
};

/// Every component of check c at one point; empty means all zero, otherwise the
/// first nonzero component is described.
inline std::string exact_check_at(detail::ExactWorkspace& w, ExactCheck c) {
  const int n = w.n();
  auto nz = [](const ExpValue& v, const std::string& where) -> std::string {
    return v.is_zero() ? std::string() : where + ": " + v.to_string();
  };
  auto idx = [](int i, int j) { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; };
  switch (c) {
    case ExactCheck::Calogero:
      return nz(detail::calogero(w), "H I - (sum y^2) I");
    case ExactCheck::DunklX:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (auto s = nz(detail::dunkl_x(w, i, j), "x-side " + idx(i, j)); !s.empty()) return s;
      return {};
    case ExactCheck::DunklY:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (auto s = nz(detail::dunkl_y(w, i, j), "y-side " + idx(i, j)); !s.empty()) return s;
      return {};
    case ExactCheck::KMatrix:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (auto s = nz(detail::kmatrix(w, i, j), "(KM - MY)" + idx(i, j)); !s.empty()) return s;
      return {};
    case ExactCheck::Charpoly: {
      const auto fwd = detail::charpoly(w, false);
      const auto bwd = detail::charpoly(w, true);
      for (int i = 0; i < n; ++i) {
        if (auto s = nz(fwd[i], "row " + std::to_string(i + 1)); !s.empty()) return s;
        if (!(fwd[i] == bwd[i])) return "factor order changes row " + std::to_string(i + 1);
      }
      return {};
    }
    case ExactCheck::SumRules: {
      const ExpValue I = w.I().value();
      for (int i = 0; i < n; ++i) {
        ExpValue row, col;
        for (int j = 0; j < n; ++j) {
          row += w.column(j)[i].value();
          col += w.column(i)[j].value();
        }
        if (auto s = nz(row - I, "row sum " + std::to_string(i + 1)); !s.empty()) return s;
        if (auto s = nz(col - I, "column sum " + std::to_string(i + 1)); !s.empty()) return s;
      }
      return {};
    }
    case ExactCheck::Chain: {
      const auto& L = w.xs();
      for (int i = 0; i < n; ++i) {
        ExpJet r = Rational(-1) * w.I().derive(L.xl[i]);
        for (int j = 0; j < n; ++j) r += L.Y[j] * w.column(j)[i];
        if (auto s = nz(r.value(), "row " + std::to_string(i + 1)); !s.empty()) return s;
      }
      return {};
    }
  }
  return {};
}

struct ExactSuiteOptions {
  std::size_t points = 10;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  /// Adds 1 to the principal term before assembling (mutation control).
  bool perturb = false;
};

/// One report per check; each report lists one residual per point ("0" when
/// every component vanishes exactly).
inline std::vector<CheckReport> run_exact_suite(const PrincipalTerm& p, const std::vector<ExactCheck>& checks,
                                                const ExactSuiteOptions& opt = {}) {
  const auto pts = random_spectra(p.n, opt.points, opt.seed);
  std::vector<std::vector<std::string>> res(pts.size());
  std::vector<std::exception_ptr> errors(pts.size());
  auto work = [&](std::size_t k) {
    try {
      detail::ExactWorkspace w(p, pts[k], opt.perturb);
      for (auto c : checks) res[k].push_back(exact_check_at(w, c));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(pts.size())));
  if (jobs <= 1) {
    for (std::size_t k = 0; k < pts.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < pts.size();) work(k);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<CheckReport> out;
  for (std::size_t c = 0; c < checks.size(); ++c) {
    CheckReport r;
    r.check = check_name(checks[c]);
    r.beta = p.beta;
    r.n = p.n;
    r.points = pts;
    r.seed = opt.seed;
    r.pass = true;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto& s = res[k][c];
      r.residuals.push_back(s.empty() ? "0" : s);
      if (!s.empty()) r.pass = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---- tau-form checks ----

/// Per-variable tau degree <= beta and invariance under index relabeling.
inline bool bh_degree_check(const TauPoly& t) {
  return tau_max_degree(t) <= static_cast<unsigned>(t.beta) && tau_symmetric(t);
}

inline CheckReport bh_report(const PrincipalTerm& p) {
  CheckReport r;
  r.check = "bh";
  r.beta = p.beta;
  r.n = p.n;
  try {
    const auto rep = tau_extract_report(p);
    r.seed = rep.seed;
    r.pass = bh_degree_check(rep.tau);
    r.note = "tau degree " + std::to_string(tau_max_degree(rep.tau)) + ", " + std::to_string(rep.tau.poly.size()) +
             " tau terms, rank " + std::to_string(rep.rank) + "/" + std::to_string(rep.unknowns);
  } catch (const NotTauPolynomial& e) {
    r.pass = false;
    r.note = e.what();
  }
  return r;
}

/// Coefficients of the beta = 2 triangle expansions (by number of triangles).
inline std::vector<Rational> triangle_coefficients(int n) {
  if (n == 3) return {Rational(1), Rational(1, 2)};
  if (n == 4) return {Rational(1), Rational(1, 2), Rational(1, 4)};
  throw DomainError("triangle expansions are known for n = 3, 4");
}

inline CheckReport triangle_report(int n, const std::vector<Rational>& coeffs) {
  CheckReport r;
  r.check = "triangle";
  r.beta = 2;
  r.n = n;
  r.reference = "triangle expansion";
  const TauPoly ref = triangle_expansion(n, coeffs);
  const TauPoly got = tau_extract(principal_term(2, n));
  r.constant = tau_proportional(got, ref);
  r.pass = r.constant.has_value();
  return r;
}

inline bool triangle_check(int n, const std::vector<Rational>& coeffs) { return triangle_report(n, coeffs).pass; }
inline bool triangle_check(int n) { return triangle_check(n, triangle_coefficients(n)); }

/// closed_form_n3(beta) against the recursion; the note records the status of
/// the 2^{6k} variant of the series.
inline CheckReport n3_report(int beta) {
  CheckReport r;
  r.check = "n3";
  r.beta = beta;
  r.n = 3;
  r.reference = "closed_form_n3";
  const TauPoly got = tau_extract(principal_term(beta, 3));
  r.constant = proportionality_constant(got.poly, closed_form_n3(beta).poly);
  r.pass = r.constant.has_value();
  const bool variant = proportionality_constant(got.poly, closed_form_n3_y_variant(beta).poly).has_value();
  r.note = std::string("2^{6k} variant ") + (variant ? "also proportional" : "not proportional");
  return r;
}

// ---- duality at n = 2 ----

struct QuadratureSpec {
  int nodes = 256;
  std::vector<double> radii;
  std::complex<double> center{0.0, 0.0};
};

inline QuadratureSpec default_quadrature(const std::vector<double>& y, int nodes) {
  double m = 0;
  for (double v : y) m = std::max(m, std::fabs(v));
  if (m == 0) m = 1;
  QuadratureSpec q;
  q.nodes = nodes;
  for (std::size_t i = 0; i < y.size(); ++i) q.radii.push_back((1.5 + 0.25 * static_cast<double>(i)) * m);
  return q;
}

/// (Delta(X) Delta(L))^beta I(X, L) at complex L.
inline std::complex<double> check_I(const PrincipalTerm& p, const std::vector<double>& x,
                                    const std::vector<std::complex<double>>& lam) {
  using C = std::complex<double>;
  const int n = p.n;
  C dx = 1, dl = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      dx *= x[b] - x[a];
      dl *= lam[b] - lam[a];
    }
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<C> pt(2 * n);
  C sum = 0;
  do {
    C ex = 0;
    for (int i = 0; i < n; ++i) {
      pt[i] = x[i];
      pt[n + i] = lam[sigma[i]];
      ex += x[i] * lam[sigma[i]];
    }
    sum += std::exp(ex) * p.poly.evaluate(pt);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return sum / std::pow(dx * dl, p.beta);
}

/// det(1/(l_i - y_j)).
inline std::complex<double> cauchy_det(const std::vector<std::complex<double>>& lam, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(lam.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = 1.0 / (lam[i] - y[j]);
  return m.determinant();
}

/// Product trapezoidal rule for prod_i (1/2 pi i) oint dl_i f(l) on circles.
inline std::complex<double> circle_quadrature(const std::function<std::complex<double>(const std::vector<std::complex<double>>&)>& f,
                                              const QuadratureSpec& q, std::size_t dims) {
  using C = std::complex<double>;
  if (q.nodes < 16) throw DomainError("quadrature needs at least 16 nodes per circle");
  if (q.radii.size() != dims) throw DomainError("one radius per integration variable");
  const double pi = std::acos(-1.0);
  std::vector<C> nodes, w;
  std::vector<std::vector<C>> pts(dims), wts(dims);
  for (std::size_t d = 0; d < dims; ++d)
    for (int k = 0; k < q.nodes; ++k) {
      const C u = std::polar(1.0, 2 * pi * k / q.nodes);
      pts[d].push_back(q.center + q.radii[d] * u);
      wts[d].push_back(q.radii[d] * u / static_cast<double>(q.nodes));
    }
  std::vector<C> lam(dims);
  std::vector<int> k(dims, 0);
  C sum = 0;
  while (true) {
    C wt = 1;
    for (std::size_t d = 0; d < dims; ++d) {
      lam[d] = pts[d][k[d]];
      wt *= wts[d][k[d]];
    }
    sum += wt * f(lam);
    std::size_t d = 0;
    for (; d < dims; ++d) {
      if (++k[d] < q.nodes) break;
      k[d] = 0;
    }
    if (d == dims) break;
  }
  return sum;
}

/// det(X)^{1-beta} oint Icheck(X, L) D(L, Y)^beta dL.
inline std::complex<double> duality_integral(const PrincipalTerm& p, const std::vector<double>& x,
                                             const std::vector<double>& y, const QuadratureSpec& q) {
  double ymax = 0;
  for (double v : y) ymax = std::max(ymax, std::abs(std::complex<double>(v) - q.center));
  for (double r : q.radii)
    if (!(r > ymax)) throw DomainError("contour radii must exceed max |y_k|");
  double detx = 1;
  for (double v : x) detx *= v;
  auto f = [&](const std::vector<std::complex<double>>& lam) {
    return check_I(p, x, lam) * std::pow(cauchy_det(lam, y), p.beta);
  };
  return std::pow(detx, 1.0 - p.beta) * circle_quadrature(f, q, x.size());
}

struct DualityReport {
  int beta = 1;
  int nodes = 0;
  std::vector<SpectrumPair> spectra;
  std::complex<double> constant;
  std::vector<double> deviation;
  double max_deviation = 0;
};

/// One contour set for a whole study: circles enclosing every y_k of every spectrum.
inline QuadratureSpec common_quadrature(const std::vector<SpectrumPair>& spectra, int nodes) {
  std::vector<double> ymax(2, 0.0);
  for (const auto& s : spectra)
    for (std::size_t k = 0; k < s.y.size(); ++k) ymax[0] = std::max(ymax[0], std::fabs(s.y[k].get_d()));
  ymax[1] = ymax[0];
  return default_quadrature(ymax, nodes);
}

/// Relative deviation of the contour integral from c Icheck(X, Y), with c fitted
/// at the first spectrum. The same contours are used at every spectrum.
inline DualityReport duality_residual(int beta, const std::vector<SpectrumPair>& spectra, const QuadratureSpec& q) {
  if (spectra.empty()) throw DomainError("duality needs at least one spectrum");
  const PrincipalTerm p = principal_term(beta, 2);
  DualityReport rep;
  rep.beta = beta;
  rep.nodes = q.nodes;
  rep.spectra = spectra;
  std::vector<std::complex<double>> ratio;
  for (const auto& s : spectra) {
    if (s.n() != 2) throw DomainError("duality is checked at n = 2");
    std::vector<double> x, y;
    for (const auto& v : s.x) {
      if (v <= 0) throw PreconditionError("duality needs positive x entries");
      x.push_back(v.get_d());
    }
    for (const auto& v : s.y) y.push_back(v.get_d());
    const std::vector<std::complex<double>> yc(y.begin(), y.end());
    ratio.push_back(duality_integral(p, x, y, q) / check_I(p, x, yc));
  }
  rep.constant = ratio.front();
  for (const auto& r : ratio) {
    rep.deviation.push_back(std::abs(r - rep.constant) / std::abs(rep.constant));
    rep.max_deviation = std::max(rep.max_deviation, rep.deviation.back());
  }
  return rep;
}

inline DualityReport duality_residual(int beta, const std::vector<SpectrumPair>& spectra, int nodes) {
  return duality_residual(beta, spectra, common_quadrature(spectra, nodes));
}

struct DualityConvergence {
  DualityReport coarse, fine;
  double reduction = 0;
};

inline DualityConvergence duality_convergence(int beta, const std::vector<SpectrumPair>& spectra, int coarse = 32,
                                              int fine = 256) {
  DualityConvergence c{duality_residual(beta, spectra, coarse), duality_residual(beta, spectra, fine), 0};
  if (c.fine.max_deviation > c.coarse.max_deviation && c.coarse.max_deviation > 1e-13)
    throw ConvergenceError("duality quadrature deviation grows with the node count");
  c.reduction = c.fine.max_deviation > 0 ? c.coarse.max_deviation / c.fine.max_deviation
                                         : std::numeric_limits<double>::infinity();
  return c;
}

/// Residue check of the kernel property at beta = 1: oint det(e^{x_i l_j}) D(L, Y) dL = n! det(e^{x_i y_j}).
/// Returns the relative error of the quadrature.
inline double duality_iz_check(const std::vector<double>& x, const std::vector<double>& y, int nodes) {
  const auto n = static_cast<Eigen::Index>(x.size());
  auto f = [&](const std::vector<std::complex<double>>& lam) {
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = std::exp(x[i] * lam[j]);
    return m.determinant() * cauchy_det(lam, y);
  };
  const auto got = circle_quadrature(f, default_quadrature(y, nodes), x.size());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = std::exp(x[i] * y[j]);
  double fact = 1;
  for (Eigen::Index k = 2; k <= n; ++k) fact *= static_cast<double>(k);
  const double want = fact * e.determinant();
  return std::abs(got - want) / std::abs(want);
}

// ---- Monte Carlo comparison ----

struct MCCompareReport {
  GroupKind group = GroupKind::U;
  int n = 0;
  std::vector<SpectrumPair> points;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> symbolic, mc_mean, mc_stderr, ratio, ratio_err;
  double constant = 0, constant_err = 0;
  bool integrals_pass = false;
  bool with_moments = false;
  /// moment_z[k][i*n+j]: |ratio - constant| / combined sigma for M_ij at point k.
  std::vector<std::vector<double>> moment_z;
  double max_integral_z = 0, max_moment_z = 0;
  bool moments_pass = true;
  bool pass = false;
};

namespace detail {

/// Reference integral and moments: the assembled sum for integer beta, the
/// Bessel form (with M from the n = 2 reconstruction) for beta = 1/2.
inline std::pair<double, std::vector<double>> reference_values(GroupKind g, int n, const SpectrumPair& s,
                                                               bool moments) {
  std::vector<double> m;
  if (g == GroupKind::O) {
    if (n != 2) throw DomainError("the orthogonal reference is available at n = 2 only");
    const double I = eval_I2_any_beta(0.5, s);
    if (moments) {
      m.resize(4);
      const double h = 1e-4;
      for (int i = 0; i < 2; ++i) {
        SpectrumPair sp = s, sm = s;
        sp.x[i] += from_double(h);
        sm.x[i] -= from_double(h);
        const double dI = (eval_I2_any_beta(0.5, sp) - eval_I2_any_beta(0.5, sm)) / (2 * h);
        for (int j = 0; j < 2; ++j) {
          const int l = 1 - j;
          const double yl = s.y[l].get_d(), yj = s.y[j].get_d();
          m[i * 2 + j] = (yl * I - dI) / (yl - yj);
        }
      }
    }
    return {I, m};
  }
  const int beta = g == GroupKind::U ? 1 : 2;
  const PrincipalTerm p = principal_term(beta, n);
  const double I = eval_I_exact(p, s).to_double();
  if (moments) {
    const auto t = moments_at(p, s);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.push_back(t.value(i, j).to_double());
  }
  return {I, m};
}

}  // namespace detail

/// Ratios MC / reference at each point must agree within 3 sigma (the constant
/// is the inverse-variance mean of the ratios); moments are compared against
/// the same constant.
inline MCCompareReport mc_compare(GroupKind g, int n, const std::vector<SpectrumPair>& points, std::uint64_t samples,
                                  std::uint64_t seed, unsigned jobs = 1, bool with_moments = true) {
  if (points.size() < 3) throw DomainError("mc_compare needs at least 3 spectra");
  MCCompareReport rep;
  rep.group = g;
  rep.n = n;
  rep.points = points;
  rep.samples = samples;
  rep.seed = seed;
  rep.with_moments = with_moments;
  std::vector<FloatSpectrum> fs;
  for (const auto& s : points) {
    FloatSpectrum f;
    for (const auto& v : s.x) f.x.push_back(v.get_d());
    for (const auto& v : s.y) f.y.push_back(v.get_d());
    fs.push_back(std::move(f));
  }
  const MCRun run = mc_run(g, n, fs, MCOptions{samples, seed, jobs, with_moments});
  std::vector<std::vector<double>> ref_m;
  double wsum = 0, wr = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    auto [I, m] = detail::reference_values(g, n, points[k], with_moments);
    ref_m.push_back(std::move(m));
    rep.symbolic.push_back(I);
    rep.mc_mean.push_back(run.integral[k].mean);
    rep.mc_stderr.push_back(run.integral[k].stderr_);
    rep.ratio.push_back(run.integral[k].mean / I);
    rep.ratio_err.push_back(run.integral[k].stderr_ / std::fabs(I));
    const double w = 1.0 / (rep.ratio_err.back() * rep.ratio_err.back());
    wsum += w;
    wr += w * rep.ratio.back();
  }
  rep.constant = wr / wsum;
  rep.constant_err = std::sqrt(1.0 / wsum);
  rep.integrals_pass = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double z = std::fabs(rep.ratio[k] - rep.constant) /
                     std::sqrt(rep.ratio_err[k] * rep.ratio_err[k] + rep.constant_err * rep.constant_err);
    rep.max_integral_z = std::max(rep.max_integral_z, z);
    if (!(z <= 3)) rep.integrals_pass = false;
  }
  if (with_moments) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      std::vector<double> zs;
      for (int q = 0; q < n * n; ++q) {
        const auto& e = run.moments[k][q];
        const double r = e.mean / ref_m[k][q];
        const double se = e.stderr_ / std::fabs(ref_m[k][q]);
        const double z = std::fabs(r - rep.constant) / std::sqrt(se * se + rep.constant_err * rep.constant_err);
        zs.push_back(z);
        rep.max_moment_z = std::max(rep.max_moment_z, z);
        if (!(z <= 3)) rep.moments_pass = false;
      }
      rep.moment_z.push_back(std::move(zs));
    }
  }
  rep.pass = rep.integrals_pass && rep.moments_pass;
  return rep;
}

inline SpectrumPair spectrum_from_strings(const std::vector<std::string>& x, const std::vector<std::string>& y) {
  SpectrumPair s;
  for (const auto& v : x) s.x.push_back(parse_rational(v));
  for (const auto& v : y) s.y.push_back(parse_rational(v));
  return s;
}

/// Five spectra of desk scale (entries in [-1, 2]) for the Monte Carlo comparisons, n = 2 or 3.
inline std::vector<SpectrumPair> mc_reference_spectra(int n) {
  if (n == 2)
    return {spectrum_from_strings({"0", "1"}, {"0", "1"}), spectrum_from_strings({"0", "1"}, {"0", "2"}),
            spectrum_from_strings({"-1/2", "1"}, {"1/2", "3/2"}), spectrum_from_strings({"1", "3/2"}, {"-1", "1"}),
            spectrum_from_strings({"0", "3/2"}, {"-1/2", "1"})};
  if (n == 3)
    return {spectrum_from_strings({"0", "1", "2"}, {"0", "1/2", "1"}),
            spectrum_from_strings({"-1", "0", "1"}, {"0", "1", "3/2"}),
            spectrum_from_strings({"0", "1/2", "1"}, {"-1", "0", "1"}),
            spectrum_from_strings({"1/2", "1", "3/2"}, {"-1/2", "1/2", "1"}),
            spectrum_from_strings({"-1", "1/2", "1"}, {"0", "1/2", "3/2"})};
  throw DomainError("reference spectra exist for n = 2, 3");
}

/// Three n = 2 spectra with positive x for the duality check.
inline std::vector<SpectrumPair> duality_reference_spectra() {
  return {spectrum_from_strings({"1", "2"}, {"0", "1"}), spectrum_from_strings({"1/2", "3/2"}, {"-1", "1/2"}),
          spectrum_from_strings({"2", "3"}, {"1/3", "-2/3"})};
}

// ---- JSON reports ----

inline ojson spectrum_to_json(const SpectrumPair& s) {
  ojson j;
  std::vector<std::string> x, y;
  for (const auto& v : s.x) x.push_back(v.get_str());
  for (const auto& v : s.y) y.push_back(v.get_str());
  j["x"] = x;
  j["y"] = y;
  return j;
}

inline ojson report_to_json(const CheckReport& r) {
  ojson j;
  j["check"] = r.check;
  j["beta"] = r.beta;
  j["n"] = r.n;
  ojson pts = ojson::array();
  for (const auto& s : r.points) pts.push_back(spectrum_to_json(s));
  j["points"] = pts;
  j["seed"] = r.seed;
  j["status"] = r.pass ? "pass" : "fail";
  j["residuals"] = r.residuals;
  if (r.constant) {
    ojson c;
    c["beta"] = r.beta;
    c["n"] = r.n;
    c["reference"] = r.reference;
    c["constant_num"] = r.constant->get_num().get_str();
    c["constant_den"] = r.constant->get_den().get_str();
    j["constant"] = c;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline ojson report_to_json(const DualityConvergence& d) {
  ojson j;
  j["check"] = "duality";
  j["beta"] = d.fine.beta;
  j["n"] = 2;
  ojson pts = ojson::array();
  for (const auto& s : d.fine.spectra) pts.push_back(spectrum_to_json(s));
  j["points"] = pts;
  j["seed"] = nullptr;
  j["residuals"] = d.fine.deviation;
  j["residuals_coarse"] = d.coarse.deviation;
  j["nodes"] = {d.coarse.nodes, d.fine.nodes};
  j["reduction"] = std::isfinite(d.reduction) ? ojson(d.reduction) : ojson("inf");
  j["constant"] = {d.fine.constant.real(), d.fine.constant.imag()};
  return j;
}

inline ojson estimate_to_json(const MCEstimate& e) {
  ojson j;
  j["mean"] = e.mean;
  j["stderr"] = e.stderr_;
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  j["group"] = group_name(e.group);
  j["n"] = e.n;
  return j;
}

inline ojson report_to_json(const MCCompareReport& r) {
  ojson j;
  j["check"] = "mc";
  j["group"] = group_name(r.group);
  j["beta"] = group_beta(r.group);
  j["n"] = r.n;
  ojson pts = ojson::array();
  for (const auto& s : r.points) pts.push_back(spectrum_to_json(s));
  j["points"] = pts;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["status"] = r.pass ? "pass" : "fail";
  j["reference"] = r.symbolic;
  j["mc_mean"] = r.mc_mean;
  j["mc_stderr"] = r.mc_stderr;
  j["ratio"] = r.ratio;
  j["constant"] = r.constant;
  j["constant_stderr"] = r.constant_err;
  j["max_integral_z"] = r.max_integral_z;
  if (r.with_moments) j["max_moment_z"] = r.max_moment_z;
  return j;
}

}  // namespace angulon
