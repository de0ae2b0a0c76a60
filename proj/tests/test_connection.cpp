#include <gtest/gtest.h>

#include "tmlab/connection.hpp"
#include "tmlab/errors.hpp"

using namespace tmlab;

TEST(Connection, BuiltinValuesAndTags) {
  const auto g = geometric_fn();
  EXPECT_DOUBLE_EQ(g(4.0), 2.0);
  EXPECT_TRUE(g.tags().tmi);
  EXPECT_FALSE(g.tags().tc);
  EXPECT_DOUBLE_EQ(g.derivative_at_1(), 0.5);
  EXPECT_EQ(g.value_at_0plus(), 0.0);

  const auto sq = square_fn();
  EXPECT_TRUE(sq.tags().tc);
  EXPECT_FALSE(sq.tags().tmi);
  EXPECT_DOUBLE_EQ(sq.derivative_at_1(), 2.0);

  const auto h = harmonic_fn();
  EXPECT_DOUBLE_EQ(h(3.0), 1.5);
  EXPECT_DOUBLE_EQ(h.derivative_at_1(), 0.5);

  const auto inv = power_fn(-1.0);
  EXPECT_TRUE(inv.tags().tmd);
  EXPECT_TRUE(inv.tags().tc);
  EXPECT_FALSE(inv.finite_at_0plus());
}

TEST(Connection, ProbesRejectFalseClaims) {
  ConnectionFunction::Options opt;
  opt.tags.tmi = true;
  EXPECT_THROW(ConnectionFunction("decreasing", [](double x) { return 1.0 / x; }, opt), UnsupportedFunction);
  ConnectionFunction::Options convex;
  convex.tags.tc = true;
  EXPECT_THROW(ConnectionFunction("concave", [](double x) { return std::sqrt(x); }, convex), UnsupportedFunction);
}

TEST(Connection, NumericDerivativeMatchesAnalytic) {
  EXPECT_NEAR(numeric_derivative_at_one([](double x) { return std::pow(x, 0.3); }), 0.3, 1e-9);
  EXPECT_NEAR(numeric_derivative_at_one([](double x) { return std::log1p(x); }), 0.5, 1e-9);
}

TEST(Connection, Combinators) {
  const auto f = geometric_fn();
  const auto lift = power_lift(f, 2);
  EXPECT_NEAR(lift(4.0), 32.0, 1e-12);
  EXPECT_NEAR(lift.derivative_at_1(), 2.5, 1e-14);

  const auto t = transpose_fn(square_fn());  // x (1/x)^2 = 1/x
  EXPECT_NEAR(t(4.0), 0.25, 1e-14);
  EXPECT_NEAR(t.derivative_at_1(), -1.0, 1e-14);

  const auto r = reciprocal_fn(arithmetic_fn());  // 2 / (1 + x)
  EXPECT_NEAR(r(3.0), 0.5, 1e-14);
  EXPECT_TRUE(r.tags().tmd);
  EXPECT_TRUE(r.tags().tc);
  EXPECT_DOUBLE_EQ(r.value_at_0plus(), 2.0);

  // NaN at 0 itself; the limit is extrapolated.
  EXPECT_LT(transpose_fn(geometric_fn()).value_at_0plus(), 1e-12);
  EXPECT_LT(ando_hiai_g(geometric_fn(), 2).value_at_0plus(), 1e-10);
  EXPECT_NEAR(transpose_fn(reciprocal_fn(arithmetic_fn())).value_at_0plus(), 0.0, 1e-12);
}

TEST(Connection, AndoHiaiInverse) {
  // F(x) = x^{m-1} x^{1/2}, m = 2: F^{-1}(y) = y^{2/3}, so g(x) = 1 / (1/x)^{2/3} = x^{2/3}.
  const auto g = ando_hiai_g(geometric_fn(), 2);
  for (double x : {0.01, 0.5, 1.0, 3.0, 100.0}) EXPECT_NEAR(g(x), std::pow(x, 2.0 / 3.0), 1e-12 * std::max(1.0, x));
  EXPECT_NEAR(g.derivative_at_1(), 2.0 / 3.0, 1e-14);
  EXPECT_THROW(ando_hiai_g(geometric_fn(), 1), ConfigError);
}

TEST(Connection, InvertFunction) {
  const auto cube = [](double x) { return x * x * x; };
  EXPECT_NEAR(invert_fn(cube, 27.0), 3.0, 1e-12);
  EXPECT_NEAR(invert_fn([](double x) { return 1.0 / x; }, 4.0), 0.25, 1e-14);
  EXPECT_THROW(invert_fn([](double x) { return x / (1 + x); }, 2.0), RangeError);
}

TEST(Connection, PsiFunction) {
  const auto p = psi_fn(1.0);
  EXPECT_NEAR(p(1.0), 0.0, 1e-15);
  EXPECT_NEAR(p(3.0), 1.5 - 0.75, 1e-14);
  EXPECT_LT(p(0.5), 0.0);
  EXPECT_NEAR(p.derivative_at_1(), 0.25, 1e-15);
  EXPECT_THROW(psi_fn(0.0), ConfigError);
}

TEST(Connection, PowerMonotonicityCertificates) {
  const auto grid = probe_grid();
  EXPECT_EQ(grid.size(), 64u);
  // Powers satisfy f(x^q) = f(x)^q exactly.
  const auto pmi = check_pmi(geometric_fn(), {0.5, 1.0, 2.0}, grid);
  EXPECT_TRUE(pmi.holds);
  EXPECT_NEAR(pmi.m_estimate, 1.0, 1e-12);
  // (1 + x^2)/2 >= ((1 + x)/2)^2, so arithmetic is not pmi at q = 2 without a constant.
  const auto arith = check_pmi(arithmetic_fn(), {2.0}, grid);
  EXPECT_GT(arith.m_estimate, 1.0);
  EXPECT_LE(arith.m_estimate, 2.0 + 1e-12);
  EXPECT_NEAR(check_pmd(arithmetic_fn(), {2.0}, grid).m_estimate, 1.0, 1e-12);
}

TEST(Connection, ParserChains) {
  EXPECT_EQ(parse_function("power:0.5").label(), "geometric");
  EXPECT_NEAR(parse_function("liftn:2:geometric")(4.0), 32.0, 1e-12);
  EXPECT_NEAR(parse_function("transpose:psi:1")(2.0), transpose_fn(psi_fn(1.0))(2.0), 0.0);
  EXPECT_NEAR(parse_function("andohiai:2:power:0.5")(8.0), 4.0, 1e-11);
  EXPECT_EQ(parse_function("harmonic_like").label(), "harmonic");
  EXPECT_THROW(parse_function("cosine"), ConfigError);
  EXPECT_THROW(parse_function("power"), ConfigError);
  EXPECT_THROW(parse_function("power:abc"), ConfigError);
  EXPECT_THROW(parse_function("geometric:extra"), ConfigError);
}
