// Acceptance run: one line per criterion, exit status 1 if any line fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "angulon/angulon.hpp"

using namespace angulon;

namespace {

constexpr double kMCSigma = 3.0;
constexpr std::uint64_t kMCSamples = 1000000;
constexpr double kDualityTol = 1e-8;
constexpr double kDualityReduction = 1e4;
constexpr std::size_t kExactPoints = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

MultiPoly uni(std::initializer_list<long> low_to_high) {
  MultiPoly p({"x"});
  std::uint16_t k = 0;
  for (long c : low_to_high) p.add_term(Exponents{k++}, Rational(c));
  return p;
}

Outcome golden_tables() {
  struct Row {
    MultiPoly got, want;
    const char* name;
  };
  const std::vector<Row> rows = {
      {bessel_Y(0).poly, uni({1}), "Y0"},
      {bessel_Y(1).poly, uni({1, 1}), "Y1"},
      {bessel_Y(2).poly, uni({1, 3, 3}), "Y2"},
      {bessel_Y(3).poly, uni({1, 6, 15, 15}), "Y3"},
      {bessel_Q(1, 0).poly, uni({0, 1}), "Q1,0"},
      {bessel_Q(2, 0).poly, uni({0, 1, 1}), "Q2,0"},
      {bessel_Q(3, 0).poly, uni({0, 3, 3, 1}), "Q3,0"},
      {bessel_Q(4, 0).poly, uni({0, 15, 15, 6, 1}), "Q4,0"},
      {bessel_Q(2, 1).poly, uni({0, 2}), "Q2,1"},
      {bessel_Q(3, 1).poly, uni({0, 12, 6}), "Q3,1"},
      {bessel_Q(4, 1).poly, uni({0, 90, 60, 12}), "Q4,1"},
      {bessel_Q(3, 2).poly, uni({0, 24}), "Q3,2"},
      {bessel_Q(4, 2).poly, uni({0, 360, 120}), "Q4,2"},
      {bessel_Q(4, 3).poly, uni({0, 720}), "Q4,3"},
  };
  for (const auto& r : rows)
    if (!(r.got == r.want)) return {false, std::string(r.name) + " = " + r.got.to_string()};
  return {true, std::to_string(rows.size()) + " polynomials"};
}

Outcome recurrence_suites() {
  const MultiPoly x = MultiPoly::variable({"x"}, std::size_t{0});
  for (int m = 1; m < 6; ++m)
    if (!(bessel_Y(m + 1).poly == x * bessel_Y(m).poly * Rational(2 * m + 1) + bessel_Y(m - 1).poly))
      return {false, "three-term m=" + std::to_string(m)};
  for (int m = 0; m <= 6; ++m)
    if (!y_ode_check(m)) return {false, "Y ODE m=" + std::to_string(m)};
  for (int b = 1; b <= 6; ++b) {
    for (int j = 0; j < b; ++j)
      if (!q_ladder_check(b, j)) return {false, "ladder beta=" + std::to_string(b) + " j=" + std::to_string(j)};
    if (!carlitz_ode_check(b)) return {false, "Carlitz ODE beta=" + std::to_string(b)};
    if (!q_y_relation_check(b)) return {false, "Q/Y relation beta=" + std::to_string(b)};
    if (!alternating_relations_check(b)) return {false, "alternating family beta=" + std::to_string(b)};
  }
  return {true, "beta <= 6"};
}

Outcome n2_carlitz() {
  for (int b = 1; b <= 5; ++b) {
    const TauPoly t = tau_extract(principal_term(b, 2));
    MultiPoly want(tau_vars(2));
    const MultiPoly q = bessel_Q(b, 0).poly;
    for (const auto& [e, c] : q.terms()) want.add_term(e, c * pow(Rational(2), b));
    if (!(t.poly == want)) return {false, "beta=" + std::to_string(b) + ": " + t.poly.to_string()};
  }
  return {true, "beta = 1..5"};
}

Outcome beta_one_product() {
  std::ostringstream os;
  for (int n = 2; n <= 5; ++n) {
    const auto c = proportionality_constant(tau_extract(principal_term(1, n)).poly, tau_product(n).poly);
    if (!c || *c == 0) return {false, "n=" + std::to_string(n)};
    os << "n=" << n << " c=" << c->get_str() << ' ';
  }
  return {true, os.str()};
}

Outcome triangle_forms() {
  MultiPoly want = MultiPoly::constant(tau_vars(3), 1);
  for (std::size_t k = 0; k < 3; ++k) {
    const MultiPoly t = MultiPoly::variable(tau_vars(3), k);
    want *= t * t + t;
  }
  want += tau_product(3).poly * Rational(1, 2);
  if (!proportionality_constant(tau_extract(principal_term(2, 3)).poly, want))
    return {false, "n=3 product form"};
  std::ostringstream os;
  for (int n : {3, 4}) {
    const CheckReport r = triangle_report(n, triangle_coefficients(n));
    if (!r.pass) return {false, "triangle n=" + std::to_string(n)};
    os << "n=" << n << " c=" << r.constant->get_str() << ' ';
  }
  return {true, os.str()};
}

Outcome n3_closed_form() {
  std::ostringstream os;
  for (int b = 1; b <= 3; ++b) {
    const CheckReport r = n3_report(b);
    if (!r.pass) return {false, "beta=" + std::to_string(b)};
    os << "beta=" << b << " c=" << r.constant->get_str() << " (" << r.note << ") ";
  }
  return {true, os.str()};
}

Outcome exact_suites() {
  const std::vector<std::pair<int, int>> cases = {{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}, {3, 2}, {3, 3}};
  ExactSuiteOptions opt;
  opt.points = kExactPoints;
  opt.seed = 1;
  for (auto [b, n] : cases)
    for (const auto& r : run_exact_suite(principal_term(b, n), all_exact_checks(), opt))
      if (!r.pass) {
        std::string first;
        for (const auto& s : r.residuals)
          if (s != "0") {
            first = s;
            break;
          }
        return {false, r.check + " beta=" + std::to_string(b) + " n=" + std::to_string(n) + ": " + first};
      }
  return {true, std::to_string(cases.size()) + " cases x " + std::to_string(kExactPoints) + " points"};
}

Outcome bh_all() {
  const std::vector<std::pair<int, int>> computed = {{1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}, {1, 3}, {2, 3},
                                                     {3, 3}, {1, 4}, {2, 4}, {1, 5}};
  for (auto [b, n] : computed) {
    const CheckReport r = bh_report(principal_term(b, n));
    if (!r.pass) return {false, "beta=" + std::to_string(b) + " n=" + std::to_string(n) + ": " + r.note};
  }
  return {true, std::to_string(computed.size()) + " principal terms"};
}

Outcome monte_carlo() {
  const std::vector<std::pair<GroupKind, int>> cases = {
      {GroupKind::U, 2}, {GroupKind::U, 3}, {GroupKind::Sp, 2}, {GroupKind::Sp, 3}, {GroupKind::O, 2}};
  std::ostringstream os;
  bool pass = true;
  for (auto [g, n] : cases) {
    const MCCompareReport r = mc_compare(g, n, mc_reference_spectra(n), kMCSamples, 20240101);
    const bool ok = r.max_integral_z <= kMCSigma && r.max_moment_z <= kMCSigma;
    pass = pass && ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%d c=%.5f z_I=%.2f z_M=%.2f%s ", group_name(g).c_str(), n, r.constant,
                  r.max_integral_z, r.max_moment_z, ok ? "" : "!");
    os << buf;
  }
  return {pass, os.str()};
}

Outcome duality_study() {
  const DualityConvergence d = duality_convergence(1, duality_reference_spectra(), 32, 256);
  char buf[128];
  std::snprintf(buf, sizeof buf, "M=256 dev=%.3g reduction=%.3g", d.fine.max_deviation, d.reduction);
  return {d.fine.max_deviation < kDualityTol && d.reduction >= kDualityReduction, buf};
}

Outcome determinism() {
  for (auto g : {GroupKind::O, GroupKind::U, GroupKind::Sp}) {
    std::vector<FloatSpectrum> fs;
    for (const auto& s : mc_reference_spectra(2)) {
      FloatSpectrum f;
      for (const auto& v : s.x) f.x.push_back(v.get_d());
      for (const auto& v : s.y) f.y.push_back(v.get_d());
      fs.push_back(std::move(f));
    }
    const MCRun a = mc_run(g, 2, fs, MCOptions{50000, 77, 1, true});
    const MCRun b = mc_run(g, 2, fs, MCOptions{50000, 77, 8, true});
    for (std::size_t k = 0; k < fs.size(); ++k) {
      if (a.integral[k].mean != b.integral[k].mean || a.integral[k].stderr_ != b.integral[k].stderr_)
        return {false, group_name(g) + " integral differs across jobs"};
      for (std::size_t q = 0; q < a.moments[k].size(); ++q)
        if (a.moments[k][q].mean != b.moments[k][q].mean) return {false, group_name(g) + " moment differs"};
    }
  }
  for (auto [b, n] : std::vector<std::pair<int, int>>{{2, 3}, {3, 3}, {1, 4}}) {
    principal_memo_clear();
    const std::string first = poly_to_json_string(principal_term(b, n).poly);
    principal_memo_clear();
    PrincipalOptions opt;
    opt.jobs = 4;
    const std::string second = poly_to_json_string(principal_term(b, n, opt).poly);
    if (first != second) return {false, "principal term differs, beta=" + std::to_string(b)};
  }
  return {true, "jobs 1 vs 8, repeated principal terms"};
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "Bessel golden tables", 1, golden_tables},
      {2, "recurrence suites", 5, recurrence_suites},
      {3, "n=2 principal terms are scaled Carlitz polynomials", 10, n2_carlitz},
      {4, "beta=1 tau product", 120, beta_one_product},
      {5, "beta=2 triangle expansions", 600, triangle_forms},
      {6, "n=3 closed form", 300, n3_closed_form},
      {7, "exact identity suites", 900, exact_suites},
      {8, "tau degree bound", 900, bh_all},
      {9, "Monte Carlo agreement", 1200, monte_carlo},
      {10, "duality at n=2", 60, duality_study},
      {11, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s <= c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    char head[160];
    std::snprintf(head, sizeof head, "criterion %2d %s  %-50s %8.2fs / %gs%s  ", c.id, pass ? "PASS" : "FAIL", c.title,
                  s, c.limit_s, in_time ? "" : " (over limit)");
    std::cout << head << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
