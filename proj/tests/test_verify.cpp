#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "angulon/angulon.hpp"
#include "printers.hpp"

using namespace angulon;

namespace {

SpectrumPair sp(std::vector<std::string> x, std::vector<std::string> y) { return spectrum_from_strings(x, y); }

// H I - (sum y^2) I built from the symbolic assembly, independent of the jet route
ExpRatSum calogero_symbolic(const PrincipalTerm& p) {
  const int n = p.n;
  const auto vars = xy_vars(n);
  const ExpRatSum I = assemble_I(p);
  const MultiPoly one = MultiPoly::constant(vars, 1);
  ExpRatSum r(vars);
  std::vector<ExpRatSum> d;
  for (int i = 0; i < n; ++i) d.push_back(I.derive(i));
  MultiPoly ysq(vars);
  for (int i = 0; i < n; ++i) {
    r += d[i].derive(i);
    const MultiPoly yi = MultiPoly::variable(vars, n + i);
    ysq += yi * yi;
    for (int j = 0; j < n; ++j)
      if (j != i)
        r += RatFunc(one * Rational(p.beta), MultiPoly::variable(vars, i) - MultiPoly::variable(vars, j)) * (d[i] - d[j]);
  }
  r -= RatFunc(ysq) * I;
  return r;
}

}  // namespace

TEST(RandomSpectra, DeskScaleAndSeparated) {
  const auto pts = random_spectra(4, 30, 99);
  ASSERT_EQ(pts.size(), 30u);
  for (const auto& s : pts) {
    for (const auto* v : {&s.x, &s.y}) {
      for (const auto& a : *v) {
        EXPECT_LE(abs(a), 20);
        EXPECT_LE(a.get_den(), 3);
      }
      EXPECT_GE(min_gap(*v), 1.0);
    }
  }
  EXPECT_EQ(spectrum_to_string(random_spectra(3, 1, 5)[0]), spectrum_to_string(random_spectra(3, 1, 5)[0]));
}

TEST(Calogero, WorkedPoints) {
  EXPECT_TRUE(calogero_residual(principal_term(1, 2), sp({"0", "1"}, {"2", "3"})).is_zero());
  EXPECT_TRUE(calogero_residual(principal_term(2, 3), sp({"0", "1", "3"}, {"1", "4", "9"})).is_zero());
}

TEST(Calogero, AgreesWithSymbolicDifferentiation) {
  for (auto [b, n] : std::vector<std::pair<int, int>>{{1, 2}}) {
    const auto p = principal_term(b, n);
    const ExpRatSum h = calogero_symbolic(p);
    for (const auto& s : random_spectra(n, 4, 13)) EXPECT_TRUE(expsum_eval(h, s.point()).is_zero()) << b << "," << n;
  }
}

TEST(Calogero, PerturbedTermIsDetected) {
  auto p = principal_term(1, 2);
  p.poly = detail::perturbed(p.poly);
  EXPECT_FALSE(calogero_residual(p, sp({"0", "1"}, {"2", "3"})).is_zero());
  const ExpRatSum h = calogero_symbolic(p);
  EXPECT_FALSE(expsum_eval(h, sp({"0", "1"}, {"2", "3"}).point()).is_zero());
}

TEST(Moments, NOneIsTheIntegral) {
  const auto t = moments_at(principal_term(2, 1), sp({"2"}, {"3"}));
  EXPECT_EQ(t.value(0, 0), ExpValue::symbol(6, 1));
}

TEST(Moments, JetRouteMatchesSymbolicTable) {
  for (auto [b, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {3, 2}}) {
    const auto p = principal_term(b, n);
    const auto sym = moments_symbolic(p);
    for (const auto& s : random_spectra(n, 3, 21)) {
      const auto t = moments_at(p, s);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) EXPECT_EQ(t.value(i, j), expsum_eval(sym[i][j], s.point())) << b << " " << i << j;
    }
  }
}

TEST(Moments, RowAndColumnSumsEqualIntegral) {
  const auto p = principal_term(1, 2);
  for (const auto& s : random_spectra(2, 10, 4)) {
    const auto t = moments_at(p, s);
    const ExpValue I = integral_value(p, s);
    EXPECT_EQ(t.value(0, 0) + t.value(0, 1), I);
    EXPECT_EQ(t.value(1, 0) + t.value(1, 1), I);
    EXPECT_EQ(t.value(0, 0) + t.value(1, 0), I);
  }
}

TEST(Moments, PairSwapPermutesTable) {
  for (auto [b, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}}) {
    const auto p = principal_term(b, n);
    for (const auto& s : random_spectra(n, 3, 8)) {
      SpectrumPair r = s;
      std::swap(r.x[0], r.x[1]);
      std::swap(r.y[0], r.y[1]);
      const auto a = moments_at(p, s), c = moments_at(p, r);
      auto sw = [](int k) { return k == 0 ? 1 : k == 1 ? 0 : k; };
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) EXPECT_EQ(a.value(i, j), c.value(sw(i), sw(j)));
    }
  }
}

TEST(Dunkl, BothSidesVanish) {
  for (auto [b, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}}) {
    const auto p = principal_term(b, n);
    for (const auto& s : random_spectra(n, 5, 31))
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
          EXPECT_TRUE(dunkl_residual_x(p, s, i, j).is_zero()) << b << " " << i << j;
          EXPECT_TRUE(dunkl_residual_y(p, s, i, j).is_zero()) << b << " " << i << j;
        }
  }
  EXPECT_TRUE(dunkl_residual_x(principal_term(1, 1), sp({"2"}, {"5"}), 1, 1).is_zero());
  EXPECT_THROW(dunkl_residual_x(principal_term(1, 2), sp({"0", "1"}, {"2", "3"}), 3, 1), DomainError);
}

TEST(Charpoly, WorkedCases) {
  const auto s2 = sp({"0", "1"}, {"2", "3"});
  EXPECT_TRUE(charpoly_identity(principal_term(1, 2), s2, 1).is_zero());
  EXPECT_TRUE(charpoly_identity(principal_term(2, 2), s2, 2).is_zero());
  EXPECT_TRUE(charpoly_identity(principal_term(1, 3), sp({"0", "1", "3"}, {"1", "4", "9"}), 1).is_zero());
}

TEST(ExactSuite, AllChecksPassAndMutationFails) {
  for (auto [b, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {1, 3}}) {
    ExactSuiteOptions opt;
    opt.points = 4;
    opt.seed = 7;
    const auto reps = run_exact_suite(principal_term(b, n), all_exact_checks(), opt);
    ASSERT_EQ(reps.size(), all_exact_checks().size());
    for (const auto& r : reps) {
      EXPECT_TRUE(r.pass) << r.check << " " << b << "," << n;
      for (const auto& res : r.residuals) EXPECT_EQ(res, "0");
      EXPECT_EQ(r.seed, 7u);
      EXPECT_EQ(r.points.size(), 4u);
    }
    opt.perturb = true;
    const auto bad = run_exact_suite(principal_term(b, n), {ExactCheck::Calogero, ExactCheck::DunklX}, opt);
    for (const auto& r : bad) EXPECT_FALSE(r.pass) << r.check;
  }
}

TEST(ExactSuite, DeterministicAcrossJobs) {
  ExactSuiteOptions a;
  a.points = 6;
  a.seed = 3;
  a.perturb = true;
  ExactSuiteOptions c = a;
  c.jobs = 3;
  const auto p = principal_term(2, 2);
  const auto ra = run_exact_suite(p, all_exact_checks(), a), rc = run_exact_suite(p, all_exact_checks(), c);
  for (std::size_t k = 0; k < ra.size(); ++k) EXPECT_EQ(report_to_json(ra[k]).dump(), report_to_json(rc[k]).dump());
}

TEST(ExactSuite, ReportJsonShape) {
  ExactSuiteOptions opt;
  opt.points = 2;
  const auto r = run_exact_suite(principal_term(1, 2), {ExactCheck::Calogero}, opt).front();
  const auto j = report_to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> want = {"check", "beta", "n", "points", "seed", "status", "residuals"};
  EXPECT_EQ(keys, want);
  EXPECT_EQ(j["status"], "pass");
}

TEST(BrezinHikami, DegreeCheck) {
  const TauPoly t13 = tau_extract(principal_term(1, 3));
  EXPECT_TRUE(bh_degree_check(t13));
  TauPoly raised = t13;
  raised.poly *= MultiPoly::variable(raised.poly.vars(), std::size_t{0});
  EXPECT_FALSE(bh_degree_check(raised));
  TauPoly lopsided = t13;
  lopsided.poly += MultiPoly::variable(lopsided.poly.vars(), std::size_t{0});
  EXPECT_FALSE(bh_degree_check(lopsided));
  for (auto [b, n] : std::vector<std::pair<int, int>>{{1, 4}, {2, 3}, {3, 3}}) EXPECT_TRUE(bh_report(principal_term(b, n)).pass);
}

TEST(Triangle, ThreePointExpansion) {
  EXPECT_TRUE(triangle_check(3));
  EXPECT_FALSE(triangle_check(3, {Rational(1), Rational(1, 3)}));
  EXPECT_THROW(triangle_coefficients(5), DomainError);
}

TEST(Triangle, QFormSymmetrizationMatchesTriangles) {
  // the symmetrized Q-form of the four-point term equals the triangle expansion
  const auto c = tau_proportional(q_form_2_4(), triangle_expansion(4, triangle_coefficients(4)));
  EXPECT_TRUE(c.has_value());
}

TEST(N3, ReportsAndRecordsVariant) {
  for (int b = 1; b <= 3; ++b) {
    const auto r = n3_report(b);
    EXPECT_TRUE(r.pass) << b;
    if (b >= 2) EXPECT_EQ(r.note, "2^{6k} variant not proportional");
  }
}

TEST(Duality, ResidueStructureAtBetaOne) {
  EXPECT_LT(duality_iz_check({1, 2}, {0, 1}, 64), 1e-10);
  EXPECT_LT(duality_iz_check({0.5, 1.5}, {-1, 0.5}, 64), 1e-10);
  EXPECT_LT(duality_iz_check({1, 2, 3}, {0, 1, -1}, 64), 1e-9);
}

TEST(Duality, ConvergesAndIsConstant) {
  const auto c = duality_convergence(1, duality_reference_spectra(), 32, 256);
  EXPECT_LT(c.fine.max_deviation, 1e-8);
  EXPECT_GE(c.reduction, 1e4);
  EXPECT_EQ(c.fine.deviation.size(), 3u);
  EXPECT_EQ(c.fine.deviation.front(), 0.0);
}

TEST(Duality, Preconditions) {
  EXPECT_THROW(duality_residual(1, {sp({"-1", "2"}, {"0", "1"})}, 32), PreconditionError);
  QuadratureSpec q;
  q.nodes = 32;
  q.radii = {0.5, 0.5};
  EXPECT_THROW(duality_residual(1, {sp({"1", "2"}, {"0", "1"})}, q), DomainError);
  q.radii = {3, 3};
  q.nodes = 8;
  EXPECT_THROW(duality_residual(1, {sp({"1", "2"}, {"0", "1"})}, q), DomainError);
}

TEST(MonteCarloCompare, ConsistentRatios) {
  const auto pts = mc_reference_spectra(2);
  for (auto g : {GroupKind::U, GroupKind::Sp, GroupKind::O}) {
    const auto r = mc_compare(g, 2, {pts[0], pts[1], pts[2]}, 100000, 17, 1, true);
    // twelve correlated moment comparisons at 10^5 samples: 4 sigma on the maximum
    EXPECT_TRUE(r.integrals_pass) << group_name(g) << " z=" << r.max_integral_z;
    EXPECT_LT(r.max_moment_z, 4.0) << group_name(g);
    EXPECT_EQ(r.ratio.size(), 3u);
    EXPECT_EQ(r.moment_z.size(), 3u);
  }
  const auto r = mc_compare(GroupKind::U, 2, {pts[0], pts[1], pts[2]}, 100000, 17, 1, true);
  EXPECT_NEAR(r.constant, -1.0, 5 * r.constant_err);
  EXPECT_THROW(mc_compare(GroupKind::U, 2, {pts[0], pts[1]}, 1000, 1), DomainError);
}
