#include <gtest/gtest.h>

#include "support.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/means.hpp"

using namespace tmlab;

namespace {
const TensorShape kShape({2, 2});

double rel(const HermitianTensor& a, const HermitianTensor& b) { return fixtures::rel_diff(a.unfold(), b.unfold()); }
}  // namespace

TEST(MeanPd, CommutingPairsReduceToScalars) {
  std::mt19937_64 rng(11);
  const Matrix u = fixtures::unitary(rng, 4);
  const Eigen::Vector4d a(0.3, 1.0, 2.0, 5.0), b(1.5, 0.2, 2.0, 0.7);
  auto build = [&](const Eigen::Vector4d& v) {
    return HermitianTensor(kShape, u * v.cast<Complex>().asDiagonal() * u.adjoint());
  };
  for (const auto& g : {geometric_fn(), square_fn(), harmonic_fn(), arithmetic_fn(), power_fn(-0.5)}) {
    Eigen::Vector4d s;
    for (int i = 0; i < 4; ++i) s(i) = b(i) * g(a(i) / b(i));
    EXPECT_LT(rel(mean_pd(build(a), build(b), g), build(s)), 1e-12) << g.label();
  }
}

TEST(MeanPd, TwoByTwoReferenceValue) {
  // 40-digit mpmath eigendecomposition, cross-checked with the 2x2 closed form.
  const TensorShape s({2});
  Matrix x(2, 2), y(2, 2), ref(2, 2);
  x << 2, 1, 1, 2;
  y << 1, 0, 0, 4;
  ref << 1.393171556269221980004, 0.486098816301352679375, 0.486098816301352679375, 2.656093327268771843766;
  const HermitianTensor g = mean_pd(HermitianTensor(s, x), HermitianTensor(s, y), geometric_fn());
  EXPECT_LT((g.unfold() - ref).cwiseAbs().maxCoeff(), 1e-9);
  const HermitianTensor four = 4.0 * HermitianTensor::identity(s);
  EXPECT_LT(rel(mean_pd(four, HermitianTensor::identity(s), geometric_fn()), 2.0 * HermitianTensor::identity(s)),
            1e-15);
}

TEST(MeanPd, GeometricMeanSolvesRiccati) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    const HermitianTensor x = fixtures::pd(rng, kShape, 0.1, 10.0);
    const HermitianTensor y = fixtures::pd(rng, kShape, 0.1, 10.0);
    const HermitianTensor g = mean_pd(x, y, geometric_fn());
    const Matrix riccati = g.unfold() * y.unfold().inverse() * g.unfold();
    EXPECT_LT(fixtures::rel_diff(riccati, x.unfold()), 1e-10);
    EXPECT_LT(rel(g, mean_pd(y, x, geometric_fn())), 1e-10);  // symmetric
  }
}

TEST(MeanPd, AlgebraicIdentities) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    const HermitianTensor x = fixtures::pd(rng, kShape);
    const HermitianTensor y = fixtures::pd(rng, kShape);
    for (const auto& g : {geometric_fn(), square_fn(), harmonic_fn()}) {
      EXPECT_LT(rel(mean_pd(x, x, g), x), 1e-10);
      EXPECT_LT(rel(mean_pd(3.0 * x, 3.0 * y, g), 3.0 * mean_pd(x, y, g)), 1e-10);
      EXPECT_LT(rel(mean_pd(x, y, g), mean_pd(y, x, transpose_fn(g))), 1e-10);
    }
  }
}

TEST(MeanPd, RequiresPositiveDefinite) {
  std::mt19937_64 rng(14);
  const HermitianTensor x = fixtures::pd(rng, kShape);
  EXPECT_THROW(mean_pd(x, fixtures::rank_deficient(rng, kShape, 2), geometric_fn()), NotPositive);
  EXPECT_THROW(mean_pd(x, HermitianTensor::identity(TensorShape({4})), geometric_fn()), ShapeMismatch);
}

TEST(MeanRecursive, MatchesDirectLift) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const HermitianTensor x = fixtures::pd(rng, kShape);
    const HermitianTensor y = fixtures::pd(rng, kShape);
    for (int n = 0; n <= 6; ++n) {
      EXPECT_LT(rel(mean_recursive(x, y, geometric_fn(), n), mean_pd(x, y, power_lift(geometric_fn(), n))), 1e-9)
          << "n=" << n;
    }
  }
}

TEST(Eta, ReconstructsAndAnnihilatesComplement) {
  std::mt19937_64 rng(16);
  const HermitianTensor y = fixtures::rank_deficient(rng, kShape, 2);
  const HermitianTensor x = congruence(sqrt(y).tensor(), fixtures::pd(rng, kShape));
  const EtaResult e = eta(x, y);
  EXPECT_TRUE(e.range_ok);
  EXPECT_LT(rel(congruence(sqrt(y).tensor(), e.eta), x), 1e-9);
  const HermitianTensor p = range_projector(y);
  const Matrix complement = Matrix::Identity(4, 4) - p.unfold();
  EXPECT_LT((e.eta.unfold() * complement).norm(), 1e-9);
  EXPECT_NEAR(e.domination_constant, lambda_max(e.eta), 1e-12);
  // Least c with X <= cY: cY - X is singular on range(Y) at c.
  EXPECT_GT(lambda_min(e.domination_constant * y - x), -1e-9);
}

TEST(Eta, PdCaseIsTheUsualCongruence) {
  std::mt19937_64 rng(17);
  const HermitianTensor x = fixtures::pd(rng, kShape), y = fixtures::pd(rng, kShape);
  const HermitianTensor yi = power(y, -0.5);
  EXPECT_LT(rel(eta(x, y).eta, congruence(yi.tensor(), x)), 1e-10);
}

TEST(Eta, RangeViolationIsADominationError) {
  const TensorShape s({2});
  const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
  EXPECT_THROW(eta(HermitianTensor::diagonal(s, a), HermitianTensor::diagonal(s, b)), DominationError);
}

TEST(MeanPsd, AgreesWithPdMeanAndUsesValueAtZero) {
  std::mt19937_64 rng(18);
  const HermitianTensor x = fixtures::pd(rng, kShape), y = fixtures::pd(rng, kShape);
  EXPECT_LT(rel(mean_psd(x, y, square_fn()), mean_pd(x, y, square_fn())), 1e-10);

  const HermitianTensor ry = fixtures::rank_deficient(rng, kShape, 2);
  const HermitianTensor zero = HermitianTensor::zero(kShape);
  EXPECT_LT(gauge_norm(mean_psd(zero, ry, square_fn()), GaugeNorm::frobenius()), 1e-12);
  EXPECT_LT(rel(mean_psd(zero, ry, reciprocal_fn(arithmetic_fn())), 2.0 * ry), 1e-10);
  EXPECT_THROW(mean_psd(zero, ry, power_fn(-1.0)), UnsupportedFunction);
}

TEST(MeanPsd, EpsilonLimitConverges) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 10; ++t) {
    const HermitianTensor y = fixtures::rank_deficient(rng, kShape, 2);
    const HermitianTensor x = congruence(sqrt(y).tensor(), fixtures::pd(rng, kShape));
    for (const auto& g : {geometric_fn(), square_fn()}) {
      const auto [limit, diag] = epsilon_mean_limit(x, y, g, {1e-2, 1e-4, 1e-6, 1e-8});
      EXPECT_TRUE(diag.strictly_decreasing) << g.label();
      EXPECT_LE(diag.final_relative_error, 1e-3);
      EXPECT_LT(rel(limit, mean_psd(x, y, g)), 1e-12);
      std::vector<HermitianTensor> seq;
      for (double e : {1e-2, 1e-4, 1e-6}) seq.push_back(e * fixtures::pd(rng, kShape));
      EXPECT_TRUE(perturbation_sequence_limit(x, y, g, seq).second.converged);
    }
  }
  EXPECT_THROW(epsilon_mean_limit(HermitianTensor::identity(kShape), HermitianTensor::identity(kShape), square_fn(),
                                  {1e-4, 1e-2}),
               ConfigError);
}
