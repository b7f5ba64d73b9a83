#include <gtest/gtest.h>

#include <random>

#include "angulon/angulon.hpp"
#include "printers.hpp"

using namespace angulon;

namespace {

std::vector<std::string> vars_xy() { return {"x", "y"}; }

MultiPoly X(const std::vector<std::string>& v, const std::string& name) { return MultiPoly::variable(v, name); }

MultiPoly random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars, unsigned max_deg, int terms) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 4), deg(0, static_cast<int>(max_deg));
  MultiPoly p(vars);
  for (int t = 0; t < terms; ++t) {
    Exponents e(vars.size(), 0);
    unsigned budget = static_cast<unsigned>(deg(rng));
    for (std::size_t v = 0; v < vars.size() && budget; ++v) {
      std::uniform_int_distribution<unsigned> k(0, budget);
      e[v] = static_cast<std::uint16_t>(k(rng));
      budget -= e[v];
    }
    p.add_term(e, rat_normalize(coef(rng), den(rng)));
  }
  return p;
}

std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-50, 50);
  std::vector<Rational> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(rat_normalize(d(rng), 7));
  return p;
}

}  // namespace

TEST(Rational, NormalizeReducesAndFixesSign) {
  EXPECT_EQ(rat_normalize(2, 4), Rational(1, 2));
  const Rational z = rat_normalize(0, 5);
  EXPECT_EQ(z.get_num(), 0);
  EXPECT_EQ(z.get_den(), 1);
  const Rational h = rat_normalize(-3, -6);
  EXPECT_EQ(h.get_num(), 1);
  EXPECT_EQ(h.get_den(), 2);
  EXPECT_THROW(rat_normalize(1, 0), DivisionByZero);
}

TEST(Rational, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("3/2"), Rational(3, 2));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("-1.5e-3"), Rational(-3, 2000));
  EXPECT_EQ(parse_rational("-4/6"), Rational(-2, 3));
  EXPECT_THROW(parse_rational("1.2.3"), DomainError);
  EXPECT_THROW(parse_rational("abc"), DomainError);
  EXPECT_THROW(parse_rational("1/0"), DivisionByZero);
}

TEST(MultiPoly, DeriveExamples) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x"), y = X(v, "y");
  EXPECT_EQ(poly_derive(x * x * y, "x"), x * y * Rational(2));
  EXPECT_TRUE(poly_derive(x * x, "y").is_zero());
  const MultiPoly c = x.pow(3) + x * x * Rational(3) + x * Rational(3);
  EXPECT_EQ(poly_derive(c, "x"), x * x * Rational(3) + x * Rational(6) + MultiPoly::constant(v, 3));
  EXPECT_THROW(poly_derive(x, "z"), UnknownVariable);
}

TEST(MultiPoly, NoZeroTermsAreStored) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x");
  const MultiPoly d = (x + MultiPoly::constant(v, 1)) - x;
  EXPECT_EQ(d.size(), 1u);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_EQ((x - x).size(), 0u);
}

TEST(MultiPoly, TermsAreInGradedLexOrder) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x"), y = X(v, "y");
  const MultiPoly p = y + x * y + x * x + MultiPoly::constant(v, 5) + x;
  std::vector<Exponents> order;
  for (const auto& [e, c] : p.terms()) order.push_back(e);
  const std::vector<Exponents> want = {{2, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}};
  EXPECT_EQ(order, want);
}

TEST(MultiPoly, RingAxiomsOnRandomPolynomials) {
  std::mt19937_64 rng(20240601);
  const std::vector<std::string> v = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 40; ++trial) {
    const MultiPoly p = random_poly(rng, v, 6, 6), q = random_poly(rng, v, 6, 6), r = random_poly(rng, v, 6, 6);
    EXPECT_EQ((p * q) * r, p * (q * r));
    EXPECT_EQ((p + q) + r, p + (q + r));
    EXPECT_EQ(p * (q + r), p * q + p * r);
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ(p + q, q + p);
  }
}

TEST(MultiPoly, MixedPartialsCommute) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> v = {"a", "b", "c"};
  for (int trial = 0; trial < 30; ++trial) {
    const MultiPoly p = random_poly(rng, v, 6, 8);
    EXPECT_EQ(p.derive(0).derive(2), p.derive(2).derive(0));
    EXPECT_EQ(p.derive(1).derive(1).derive(0), p.derive(0).derive(1).derive(1));
  }
}

TEST(MultiPoly, EvaluateMatchesSubstitution) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> v = {"a", "b"};
  const MultiPoly p = random_poly(rng, v, 5, 10);
  const std::vector<Rational> pt = {Rational(3, 2), Rational(-2)};
  const MultiPoly s = p.substitute({MultiPoly::constant(v, pt[0]), MultiPoly::constant(v, pt[1])});
  EXPECT_EQ(s.constant_term(), p.evaluate(pt));
  EXPECT_NEAR(p.evaluate(std::vector<double>{1.5, -2.0}), p.evaluate(pt).get_d(), 1e-9);
}

TEST(MultiPoly, DivideLinearIsExact) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> v = {"a", "b", "c"};
  const MultiPoly lin = MultiPoly::variable(v, 0) - MultiPoly::variable(v, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const MultiPoly q = random_poly(rng, v, 4, 6);
    EXPECT_EQ((q * lin).divide_linear(0, 2), q);
  }
  EXPECT_THROW((MultiPoly::variable(v, 0) * MultiPoly::variable(v, 1)).divide_linear(0, 2), Error);
}

TEST(MultiPoly, JsonRoundTripAndCanonicalOrder) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> v = {"x1", "x2", "y1"};
  const MultiPoly p = random_poly(rng, v, 6, 12);
  const std::string s = poly_to_json_string(p);
  EXPECT_EQ(poly_from_json_string(s), p);
  EXPECT_EQ(poly_to_json_string(poly_from_json_string(s)), s);
  const auto j = nlohmann::json::parse(s);
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["vars"].size(), 3u);
}

TEST(MultiPoly, JsonParseErrorNamesByteOffset) {
  try {
    poly_from_json_string("{\"version\":1,\"vars\":[\"x\"],\"terms\":[{]}");
    FAIL() << "expected a parse error";
  } catch (const CacheParseError& e) {
    EXPECT_GT(e.byte(), 0u);
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
  EXPECT_THROW(poly_from_json_string("{\"version\":1,\"vars\":[\"x\"],\"terms\":[{\"e\":[1,2],\"n\":\"1\",\"d\":\"1\"}]}"),
               CacheParseError);
}

TEST(RatFunc, DeriveExamples) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x"), y = X(v, "y"), one = MultiPoly::constant(v, 1);
  EXPECT_TRUE(ratfunc_derive(RatFunc(one, x), "x").equals(RatFunc(-one, x * x)));
  EXPECT_TRUE(ratfunc_derive(RatFunc(x, x - y), "x").equals(RatFunc(-y, (x - y) * (x - y))));
  EXPECT_TRUE(ratfunc_derive(RatFunc::constant(v, 7), "x").is_zero());
}

TEST(RatFunc, ZeroDenominatorRejected) {
  const auto v = vars_xy();
  EXPECT_THROW(RatFunc(X(v, "x"), MultiPoly(v)), DivisionByZero);
}

TEST(RatFunc, CrossMultiplicationEqualityIsAnEquivalence) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> v = {"a", "b"};
  for (int trial = 0; trial < 20; ++trial) {
    const MultiPoly n = random_poly(rng, v, 3, 4), d = random_poly(rng, v, 3, 4) + MultiPoly::constant(v, 100);
    const MultiPoly k1 = random_poly(rng, v, 2, 3) + MultiPoly::constant(v, 50);
    const MultiPoly k2 = random_poly(rng, v, 2, 3) + MultiPoly::constant(v, 70);
    const RatFunc f(n, d), g(n * k1, d * k1), h(n * k2, d * k2);
    EXPECT_TRUE(f.equals(f));
    EXPECT_EQ(f.equals(g), g.equals(f));
    EXPECT_TRUE(f.equals(g));
    EXPECT_TRUE(g.equals(h));
    EXPECT_TRUE(f.equals(h));
    // arithmetic respects the relation
    const RatFunc e(random_poly(rng, v, 2, 3), d + MultiPoly::constant(v, 1));
    EXPECT_TRUE((f + e).equals(g + e));
    EXPECT_TRUE((f * e).equals(h * e));
    EXPECT_TRUE((f - g).is_zero() || (f - g).equals(RatFunc::constant(v, 0)));
  }
}

TEST(RatFunc, MixedPartialsCommute) {
  std::mt19937_64 rng(1234);
  const std::vector<std::string> v = {"a", "b"};
  for (int trial = 0; trial < 10; ++trial) {
    const RatFunc f(random_poly(rng, v, 3, 4), random_poly(rng, v, 2, 3) + MultiPoly::constant(v, 9));
    EXPECT_TRUE(f.derive(0).derive(1).equals(f.derive(1).derive(0)));
  }
}

TEST(RatFunc, RandomZeroTestReportsBound) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x"), y = X(v, "y");
  const RatFunc zero = RatFunc(x * x - y * y, x + y) - RatFunc(x - y);
  const auto r = random_zero_test(zero, 10, 17);
  EXPECT_TRUE(r.zero);
  EXPECT_EQ(r.points, 10u);
  EXPECT_LT(r.false_negative_bound, 1e-50);
  EXPECT_FALSE(random_zero_test(RatFunc(x - y), 10, 17).zero);
}

TEST(ExpRatSum, DeriveExamples) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x"), y = X(v, "y"), one = MultiPoly::constant(v, 1);
  ExpRatSum e(v);
  e.add(RatFunc(one), x * y);
  const ExpRatSum de = expsum_derive(e, "x");
  ASSERT_EQ(de.size(), 1u);
  EXPECT_TRUE(de.terms()[0].coeff.equals(RatFunc(y)));

  ExpRatSum f(v);
  f.add(RatFunc(one, x), x * y);
  const ExpRatSum df = expsum_derive(f, "x");
  const RatFunc want = RatFunc(-one, x * x) + RatFunc(y, x);
  ASSERT_EQ(df.size(), 1u);
  EXPECT_TRUE(df.terms()[0].coeff.equals(want));

  ExpRatSum g(v);
  g.add(RatFunc(x), x * y);
  g.add(RatFunc(y), x * y * Rational(2));
  const ExpRatSum dg = expsum_derive(g, "x");
  EXPECT_EQ(dg.size(), 2u);
  ExpRatSum g1(v), g2(v);
  g1.add(RatFunc(x), x * y);
  g2.add(RatFunc(y), x * y * Rational(2));
  const std::vector<Rational> pt = {Rational(2, 3), Rational(-5, 4)};
  EXPECT_EQ(dg.eval_exact(pt), expsum_derive(g1, "x").eval_exact(pt) + expsum_derive(g2, "x").eval_exact(pt));
}

TEST(ExpRatSum, ExactSymbolEvaluation) {
  const auto v = vars_xy();
  const MultiPoly x = X(v, "x"), y = X(v, "y"), one = MultiPoly::constant(v, 1);
  ExpRatSum e(v);
  e.add(RatFunc(one), x * y);
  const auto val = expsum_eval(e, {{"x", Rational(0)}, {"y", Rational(5)}}, ExpMode::ExactSymbol);
  EXPECT_EQ(std::get<ExpValue>(val), ExpValue::symbol(0, 1));
  const auto fl = expsum_eval(e, {{"x", Rational(2)}, {"y", Rational(3)}}, ExpMode::Float);
  EXPECT_NEAR(std::get<double>(fl), std::exp(6.0), 1e-9);

  // y e^{xy} - d/dx e^{xy} == 0
  ExpRatSum id(v);
  id.add(RatFunc(y), x * y);
  id -= expsum_derive(e, "x");
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(expsum_eval(id, random_point(rng, 2)).is_zero());
}

TEST(ExpRatSum, PoleIsReportedWithDenominator) {
  const std::vector<std::string> v = {"x1", "x2", "y1"};
  const MultiPoly x1 = MultiPoly::variable(v, 0), x2 = MultiPoly::variable(v, 1), y1 = MultiPoly::variable(v, 2);
  ExpRatSum e(v);
  e.add(RatFunc(MultiPoly::constant(v, 1), x1 - x2), x1 * y1);
  try {
    expsum_eval(e, {Rational(1), Rational(1), Rational(2)});
    FAIL() << "expected a pole";
  } catch (const PoleError& err) {
    EXPECT_NE(std::string(err.what()).find("x1"), std::string::npos);
  }
}

TEST(ExpRatSum, MixedPartialsCommute) {
  const std::vector<std::string> v = {"x1", "x2", "y1", "y2"};
  const MultiPoly x1 = MultiPoly::variable(v, 0), x2 = MultiPoly::variable(v, 1);
  const MultiPoly y1 = MultiPoly::variable(v, 2), y2 = MultiPoly::variable(v, 3);
  ExpRatSum e(v);
  e.add(RatFunc(x1 * y2, x1 - x2), x1 * y1 + x2 * y2);
  e.add(RatFunc(x2 * x2, y1 - y2), x1 * y2 + x2 * y1);
  const ExpRatSum a = e.derive(0).derive(3), b = e.derive(3).derive(0);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 10; ++k) {
    const auto pt = random_point(rng, 4);
    if (pt[0] == pt[1] || pt[2] == pt[3]) continue;
    EXPECT_TRUE((expsum_eval(a, pt) - expsum_eval(b, pt)).is_zero());
  }
}

TEST(ExpRatSum, IdenticallyZeroSumEvaluatesToLiteralZero) {
  const std::vector<std::string> v = {"x1", "x2", "y1", "y2"};
  const MultiPoly x1 = MultiPoly::variable(v, 0), x2 = MultiPoly::variable(v, 1);
  const MultiPoly y1 = MultiPoly::variable(v, 2), y2 = MultiPoly::variable(v, 3);
  ExpRatSum e(v);
  e.add(RatFunc(x1, x1 - x2), x1 * y1 + x2 * y2);
  e.add(RatFunc(y2), x1 * y2 + x2 * y1);
  ExpRatSum z = e - e;
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    auto pt = random_point(rng, 4);
    pt[1] = pt[0] + 1;
    EXPECT_TRUE(expsum_eval(z, pt).is_zero());
  }
}

TEST(Jet, ProductsAndDerivativesMatchPolynomials) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> v = {"a", "b", "c"};
  auto space = std::make_shared<JetSpace>(3, 3);
  const std::vector<Rational> pt = {Rational(1, 2), Rational(-3), Rational(2, 5)};
  const std::vector<int> act = {0, 1, 2};
  for (int trial = 0; trial < 5; ++trial) {
    const MultiPoly p = random_poly(rng, v, 5, 6), q = random_poly(rng, v, 5, 6);
    const Jet jp = taylor_jet(p, pt, act, space), jq = taylor_jet(q, pt, act, space);
    const Jet prod = jp * jq;
    const Jet want = taylor_jet(p * q, pt, act, space);
    for (std::size_t k = 0; k < space->size(); ++k) EXPECT_EQ(prod[k], want[k]);
    EXPECT_EQ(jp.derive(1).value(), p.derive(1).evaluate(pt));
    EXPECT_EQ(jp.derivative_at_origin({1, 0, 2}), p.derive(0).derive(2).derive(2).evaluate(pt));
  }
}

TEST(Jet, InverseAndExponential) {
  auto space = std::make_shared<JetSpace>(2, 4);
  const Jet x = Jet::variable(space, 0, Rational(3));
  const Jet inv = x.inverse();
  const Jet one = x * inv;
  EXPECT_EQ(one.value(), 1);
  for (std::size_t k = 1; k < space->size(); ++k) EXPECT_EQ(one[k], 0);
  Jet h = Jet::variable(space, 1, 0);
  const Jet e = h.exp_nilpotent();
  EXPECT_EQ(e.coefficient({0, 3}), Rational(1, 6));
  EXPECT_THROW(Jet::variable(space, 0, 0).inverse(), PoleError);
  Jet d = x;
  for (int k = 0; k < 4; ++k) d = d.derive(0);
  EXPECT_THROW(d.derive(0), PreconditionError);
}
