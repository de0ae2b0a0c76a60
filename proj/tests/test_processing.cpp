#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/means.hpp"
#include "tmlab/processing.hpp"

using namespace tmlab;

namespace {
const TensorShape kShape({2, 2});
bool leq(const LoewnerVerdict& v) { return v.relation == LoewnerRelation::kLeq || v.relation == LoewnerRelation::kEq; }
bool geq(const LoewnerVerdict& v) { return v.relation == LoewnerRelation::kGeq || v.relation == LoewnerRelation::kEq; }
}  // namespace

TEST(Fusion, ScalarGapIsCauchySchwarz) {
  // One-dimensional tensors: x #_square y = x^2 / y.
  const TensorShape s({1});
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 100; ++t) {
    const double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
    auto scalar = [&](double v) {
      const std::vector<double> one{v};
      return HermitianTensor::diagonal(s, one);
    };
    const auto p1 = DominationPair::make(scalar(x1), scalar(y1), DominationSide::kLeft);
    const auto p2 = DominationPair::make(scalar(x2), scalar(y2), DominationSide::kLeft);
    const GapResult r = fusion_gap(p1, p2, square_fn());
    const double expect = (x1 * y2 - x2 * y1) * (x1 * y2 - x2 * y1) / (y1 * y2 * (y1 + y2));
    EXPECT_NEAR(r.gap, expect, 1e-10 * std::max(1.0, expect));
  }
}

TEST(Fusion, HoldsForConvexFunctionsOnRandomQuadruples) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto p1 = DominationPair::make(fixtures::pd(rng, kShape), fixtures::pd(rng, kShape), DominationSide::kLeft);
    const auto p2 = DominationPair::make(fixtures::pd(rng, kShape), fixtures::pd(rng, kShape), DominationSide::kLeft);
    for (const auto& g : {square_fn(), reciprocal_fn(arithmetic_fn())}) {
      const GapResult r = fusion_gap(p1, p2, g);
      EXPECT_TRUE(leq(r.verdict)) << g.label() << " gap " << r.gap;
      EXPECT_GE(r.gap, -1e-8);
    }
  }
}

TEST(Fusion, RejectsUnsupportedFunctions) {
  std::mt19937_64 rng(43);
  const auto p = DominationPair::make(fixtures::pd(rng, kShape), fixtures::pd(rng, kShape), DominationSide::kLeft);
  EXPECT_THROW(fusion_gap(p, p, geometric_fn()), UnsupportedFunction);
  EXPECT_THROW(fusion_gap(p, p, power_fn(-1.0)), UnsupportedFunction);
  const auto q = DominationPair::make(fixtures::pd(rng, kShape), fixtures::pd(rng, kShape), DominationSide::kRight);
  EXPECT_THROW(fusion_gap(p, q, square_fn()), PreconditionError);
}

TEST(DominationPair, RecordsLeastConstant) {
  const TensorShape s({2});
  const std::vector<double> a{1.0, 0.0}, b{4.0, 0.0}, c{1.0, 1.0};
  const auto p = DominationPair::make(HermitianTensor::diagonal(s, a), HermitianTensor::diagonal(s, b),
                                      DominationSide::kLeft);
  EXPECT_NEAR(p.constant(), 0.25, 1e-14);
  EXPECT_THROW(DominationPair::make(HermitianTensor::diagonal(s, c), HermitianTensor::diagonal(s, a),
                                    DominationSide::kLeft),
               DominationError);
  const auto right = DominationPair::make(HermitianTensor::diagonal(s, c), HermitianTensor::diagonal(s, a),
                                          DominationSide::kRight);
  // Right pairs go through the transposed function; the geometric mean is its own transpose.
  const HermitianTensor m = pair_mean(right.x(), right.y(), right.side(), geometric_fn());
  EXPECT_NEAR(m.unfold()(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(m.unfold()(1, 1).real(), 0.0, 1e-12);
}

TEST(Maps, PinchingAndMixture) {
  std::mt19937_64 rng(44);
  const HermitianTensor h = fixtures::pd(rng, kShape);
  const PositiveLinearMap diag = parse_map("pinching:diag");
  const HermitianTensor d = apply_map(diag, h);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_EQ(d.unfold()(i, j), i == j ? h.unfold()(i, j) : Complex(0.0));
  const PositiveLinearMap blocks = parse_map("pinching:0,1|2,3");
  EXPECT_EQ(describe(blocks), "pinching:0,1|2,3");
  EXPECT_EQ(apply_map(blocks, h).unfold()(0, 1), h.unfold()(0, 1));
  EXPECT_EQ(apply_map(blocks, h).unfold()(0, 2), Complex(0.0));
  const PositiveLinearMap mix = parse_map("mix:0.25:pinching:diag:0.75:pinching:0,1|2,3");
  const Matrix expect = 0.25 * d.unfold() + 0.75 * apply_map(blocks, h).unfold();
  EXPECT_LT((apply_map(mix, h).unfold() - expect).norm(), 1e-14);
  EXPECT_EQ(describe(mix), "mix:0.25:pinching:diag:0.75:pinching:0,1|2,3");
}

TEST(Maps, ParserErrors) {
  EXPECT_THROW(parse_map("rotate:1"), ConfigError);
  EXPECT_THROW(parse_map("pinching"), ConfigError);
  EXPECT_THROW(parse_map("pinching:0||1"), ConfigError);
  EXPECT_THROW(parse_map("mix:0.3:pinching:diag:0.3:pinching:diag"), ConfigError);
  EXPECT_THROW(parse_map("mix:1.5:pinching:diag:-0.5:pinching:diag"), ConfigError);
  EXPECT_THROW(parse_map("congruence:/nonexistent.json"), ConfigError);
}

TEST(Maps, CongruenceFromFile) {
  std::mt19937_64 rng(45);
  const Tensor k(kShape, fixtures::gaussian(rng, 4, 4));
  const auto path = std::filesystem::temp_directory_path() / "tmlab_congruence.json";
  write_tensor_file(path, k);
  const PositiveLinearMap map = parse_map("congruence:" + path.string());
  const HermitianTensor h = fixtures::pd(rng, kShape);
  const Matrix expect = k.unfold().adjoint() * h.unfold() * k.unfold();
  EXPECT_LT((apply_map(map, h).unfold() - expect).norm(), 1e-12 * expect.norm());
  std::filesystem::remove(path);
}

TEST(Maps, ProbeDetectsPositivityAndLinearity) {
  std::mt19937_64 rng(46);
  const MapProbe ok = probe_map(parse_map("mix:0.5:pinching:diag:0.5:pinching:0,3"), kShape);
  EXPECT_TRUE(ok.preserves_psd);
  EXPECT_TRUE(ok.linear);
  // Transpose-like maps are not in the grammar; a negative-weight mixture is rejected earlier.
  const PositiveLinearMap cong{Congruence{Tensor(kShape, fixtures::gaussian(rng, 4, 4)), "g"}};
  EXPECT_TRUE(probe_map(cong, kShape, 20).preserves_psd);
}

TEST(Transform, PositiveMapsSatisfyTheInequality) {
  std::mt19937_64 rng(47);
  const PositiveLinearMap pinch = parse_map("pinching:0,1|2,3");
  for (int t = 0; t < 100; ++t) {
    const auto pair = DominationPair::make(fixtures::pd(rng, kShape), fixtures::pd(rng, kShape), DominationSide::kLeft);
    const PositiveLinearMap cong{Congruence{Tensor(kShape, fixtures::gaussian(rng, 4, 4)), "g"}};
    for (const auto& map : {pinch, cong}) {
      const GapResult r = transform_gap(map, pair, square_fn());
      EXPECT_TRUE(geq(r.verdict)) << describe(map) << " gap " << r.gap;
    }
  }
}

TEST(Transform, UnitaryCongruenceIsAnEquality) {
  std::mt19937_64 rng(48);
  for (int t = 0; t < 20; ++t) {
    const auto pair = DominationPair::make(fixtures::pd(rng, kShape), fixtures::pd(rng, kShape), DominationSide::kLeft);
    const PositiveLinearMap u{Congruence{Tensor(kShape, fixtures::unitary(rng, 4)), "u"}};
    EXPECT_EQ(transform_gap(u, pair, square_fn()).verdict.relation, LoewnerRelation::kEq);
  }
}
