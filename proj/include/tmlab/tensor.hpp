#pragma once

// Even-order square tensors in C^{I1 x ... x IN x I1 x ... x IN}.
//
// A tensor is stored through its square unfolding: the D x D matrix whose row
// index is the mixed-radix (row-major, last index fastest) encoding of
// (i1..iN) and whose column index encodes (j1..jN), with D = I1 * ... * IN.
// Under this isomorphism the Einstein product contracting N indices is the
// ordinary matrix product, so all algebra below acts on the unfolding.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace tmlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Accept a tensor as Hermitian if ||H - H^H||_F <= this * max(1, ||H||_F).
inline constexpr double kHermiticityTolerance = 1e-9;
/// Default slack for PSD and Loewner tests, relative to the spectral scale.
inline constexpr double kPsdTolerance = 1e-8;
/// Eigenvalues at or below rank_tol * lambda_max count as zero.
inline constexpr double kRankTolerance = 1e-10;

class TensorShape {
 public:
  explicit TensorShape(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  /// The order parameter N (half of the tensor order).
  std::size_t order() const { return dims_.size(); }
  /// Side length D of the square unfolding.
  std::size_t side() const { return side_; }

  std::size_t encode(std::span<const std::size_t> index) const;
  std::vector<std::size_t> decode(std::size_t flat) const;

  bool operator==(const TensorShape& other) const { return dims_ == other.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t side_ = 1;
};

class Tensor {
 public:
  /// Wraps a D x D unfolding; throws ShapeMismatch if the sizes disagree.
  Tensor(TensorShape shape, Matrix unfolded);

  static Tensor zero(const TensorShape& shape);
  static Tensor identity(const TensorShape& shape);
  /// Inverse of unfold(): reinterpret a D x D matrix as a tensor of `shape`.
  static Tensor fold(const TensorShape& shape, const Matrix& unfolded) { return Tensor(shape, unfolded); }

  const TensorShape& shape() const { return shape_; }
  const Matrix& unfold() const { return data_; }

  Complex entry(std::span<const std::size_t> row, std::span<const std::size_t> col) const;
  Tensor adjoint() const;
  Complex trace() const { return data_.trace(); }

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(Complex scale);

 private:
  TensorShape shape_;
  Matrix data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(Complex scale, Tensor a);

/// (A * B)(i, j) = sum_k A(i, k) B(k, j) over all multi-indices k.
Tensor einstein_product(const Tensor& a, const Tensor& b);
inline Tensor operator*(const Tensor& a, const Tensor& b) { return einstein_product(a, b); }

/// ||T - T^H||_F, the raw hermiticity defect of a tensor.
double hermiticity_defect(const Tensor& t);

/// A tensor equal to its conjugate index swap.  Construction validates the
/// hermiticity defect against kHermiticityTolerance and stores the symmetrized
/// part (T + T^H) / 2, so values of this type are exactly Hermitian.
class HermitianTensor {
 public:
  explicit HermitianTensor(const Tensor& t);
  HermitianTensor(const TensorShape& shape, const Matrix& unfolded);

  static HermitianTensor zero(const TensorShape& shape);
  static HermitianTensor identity(const TensorShape& shape);
  static HermitianTensor diagonal(const TensorShape& shape, std::span<const double> values);

  const TensorShape& shape() const { return tensor_.shape(); }
  const Matrix& unfold() const { return tensor_.unfold(); }
  const Tensor& tensor() const { return tensor_; }
  double trace() const { return tensor_.trace().real(); }

  HermitianTensor& operator+=(const HermitianTensor& other);
  HermitianTensor& operator-=(const HermitianTensor& other);
  HermitianTensor& operator*=(double scale);

 private:
  struct Trusted {};
  HermitianTensor(Trusted, Tensor t) : tensor_(std::move(t)) {}
  friend HermitianTensor congruence(const Tensor& a, const HermitianTensor& h);

  Tensor tensor_;
};

HermitianTensor operator+(HermitianTensor a, const HermitianTensor& b);
HermitianTensor operator-(HermitianTensor a, const HermitianTensor& b);
HermitianTensor operator*(double scale, HermitianTensor a);

inline Tensor operator*(const HermitianTensor& a, const HermitianTensor& b) { return a.tensor() * b.tensor(); }
inline Tensor operator*(const Tensor& a, const HermitianTensor& b) { return a * b.tensor(); }
inline Tensor operator*(const HermitianTensor& a, const Tensor& b) { return a.tensor() * b; }

/// A * H * A^H, Hermitian for any conformable A.
HermitianTensor congruence(const Tensor& a, const HermitianTensor& h);

// JSON form {"dims": [...], "re": [...], "im": [...]} with entries listed in
// row-major (i, j) mixed-radix order, i.e. row-major over the unfolding.
nlohmann::ordered_json to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);
Tensor read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, const Tensor& t);

}  // namespace tmlab
