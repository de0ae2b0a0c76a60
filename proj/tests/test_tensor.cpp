#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/tensor.hpp"

using namespace tmlab;

namespace {

// Entry formula for a 4th-order 2x3 x 2x3 tensor, indexed without the library.
Complex entry_a(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) {
  return {std::sin(1.0 + i1 + 2.0 * i2 + 3.0 * j1 + 5.0 * j2), std::cos(0.5 * i1 - j2 + 0.25 * i2 * j1)};
}
Complex entry_b(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) {
  return {0.1 * (i1 + 1) * (j2 + 2) - 0.3 * i2, 0.2 * j1 - 0.05 * i2 * j2};
}

Tensor build(const TensorShape& s, Complex (*f)(std::size_t, std::size_t, std::size_t, std::size_t)) {
  const auto& d = s.dims();
  Matrix m(static_cast<Eigen::Index>(s.side()), static_cast<Eigen::Index>(s.side()));
  for (std::size_t i1 = 0; i1 < d[0]; ++i1)
    for (std::size_t i2 = 0; i2 < d[1]; ++i2)
      for (std::size_t j1 = 0; j1 < d[0]; ++j1)
        for (std::size_t j2 = 0; j2 < d[1]; ++j2)
          m(static_cast<Eigen::Index>(i1 * d[1] + i2), static_cast<Eigen::Index>(j1 * d[1] + j2)) =
              f(i1, i2, j1, j2);
  return Tensor(s, m);
}

}  // namespace

TEST(TensorShape, EncodeDecodeRoundTrip) {
  const TensorShape s({2, 3, 4});
  EXPECT_EQ(s.side(), 24u);
  EXPECT_EQ(s.order(), 3u);
  for (std::size_t k = 0; k < s.side(); ++k) EXPECT_EQ(s.encode(s.decode(k)), k);
  const std::vector<std::size_t> idx{1, 2, 3};
  EXPECT_EQ(s.encode(idx), 1u * 12 + 2u * 4 + 3u);  // last index fastest
}

TEST(Tensor, UnfoldingSizeIsChecked) {
  EXPECT_THROW(Tensor(TensorShape({2, 2}), Matrix::Zero(3, 3)), ShapeMismatch);
}

TEST(Tensor, EinsteinProductMatchesIndexSum) {
  const TensorShape s({2, 3});
  const Tensor a = build(s, entry_a);
  const Tensor b = build(s, entry_b);
  const Tensor c = a * b;
  for (std::size_t i1 = 0; i1 < 2; ++i1)
    for (std::size_t i2 = 0; i2 < 3; ++i2)
      for (std::size_t j1 = 0; j1 < 2; ++j1)
        for (std::size_t j2 = 0; j2 < 3; ++j2) {
          Complex sum = 0.0;
          for (std::size_t k1 = 0; k1 < 2; ++k1)
            for (std::size_t k2 = 0; k2 < 3; ++k2) sum += entry_a(i1, i2, k1, k2) * entry_b(k1, k2, j1, j2);
          const std::vector<std::size_t> row{i1, i2}, col{j1, j2};
          EXPECT_NEAR(std::abs(c.entry(row, col) - sum), 0.0, 1e-13);
        }
}

TEST(Tensor, EinsteinProductIsAssociativeWithIdentity) {
  std::mt19937_64 rng(3);
  const TensorShape s({2, 2, 2});
  const Tensor a(s, fixtures::gaussian(rng, 8, 8));
  const Tensor b(s, fixtures::gaussian(rng, 8, 8));
  const Tensor c(s, fixtures::gaussian(rng, 8, 8));
  EXPECT_LT(((a * b) * c - a * (b * c)).unfold().norm(), 1e-12 * a.unfold().norm() * b.unfold().norm() * c.unfold().norm());
  EXPECT_EQ((a * Tensor::identity(s)).unfold(), a.unfold());
}

TEST(Tensor, ProductShapesMustAgree) {
  EXPECT_THROW(Tensor::identity(TensorShape({2, 2})) * Tensor::identity(TensorShape({4})), ShapeMismatch);
}

TEST(HermitianTensor, RejectsNonHermitianAndSymmetrizes) {
  const TensorShape s({2});
  Matrix m(2, 2);
  m << 1.0, Complex(0, 1), Complex(0, 1), 2.0;
  EXPECT_THROW(HermitianTensor(s, m), NotHermitian);
  Matrix n(2, 2);
  n << 1.0, Complex(2, 1e-12), Complex(2, -1.0e-12 + 2e-13), 3.0;
  const HermitianTensor h(s, n);
  EXPECT_EQ(h.unfold(), h.unfold().adjoint());
}

TEST(HermitianTensor, ArithmeticAndTrace) {
  const TensorShape s({2, 2});
  const std::vector<double> v{1, 2, 3, 4};
  const HermitianTensor d = HermitianTensor::diagonal(s, v);
  EXPECT_DOUBLE_EQ(d.trace(), 10.0);
  EXPECT_DOUBLE_EQ((2.0 * d - d + HermitianTensor::identity(s)).trace(), 14.0);
  EXPECT_DOUBLE_EQ(HermitianTensor::zero(s).trace(), 0.0);
}

TEST(HermitianTensor, CongruenceIsHermitian) {
  std::mt19937_64 rng(5);
  const TensorShape s({2, 2});
  const Tensor a(s, fixtures::gaussian(rng, 4, 4));
  const HermitianTensor h = fixtures::pd(rng, s);
  const HermitianTensor c = congruence(a, h);
  const Matrix expect = a.unfold() * h.unfold() * a.unfold().adjoint();
  EXPECT_LT((c.unfold() - expect).norm(), 1e-12 * expect.norm());
}

TEST(TensorJson, RoundTripThroughFile) {
  std::mt19937_64 rng(9);
  const TensorShape s({2, 3});
  const Tensor t(s, fixtures::gaussian(rng, 6, 6));
  const auto path = std::filesystem::temp_directory_path() / "tmlab_tensor_roundtrip.json";
  write_tensor_file(path, t);
  const Tensor back = read_tensor_file(path);
  EXPECT_EQ(back.shape(), s);
  EXPECT_EQ(back.unfold(), t.unfold());
  std::filesystem::remove(path);
}

TEST(TensorJson, MalformedInputIsAConfigError) {
  EXPECT_THROW(tensor_from_json(nlohmann::json::parse(R"({"dims":[2],"re":[1,2,3]})")), ShapeMismatch);
  EXPECT_THROW(tensor_from_json(nlohmann::json::parse(R"({"re":[1]})")), ConfigError);
  EXPECT_THROW(read_tensor_file("/nonexistent/tensor.json"), ConfigError);
}
