#pragma once
// Random fixtures and brute-force references shared by the tests.  The
// references deliberately avoid the library's spectral code.
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tmlab/tensor.hpp"

namespace fixtures {

using tmlab::Complex;
using tmlab::HermitianTensor;
using tmlab::Matrix;
using tmlab::Tensor;
using tmlab::TensorShape;

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline Matrix unitary(std::mt19937_64& rng, Eigen::Index d) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, d, d));
  return qr.householderQ() * Matrix::Identity(d, d);
}

/// U diag(spectrum) U^H with a random unitary U.
inline HermitianTensor with_spectrum(std::mt19937_64& rng, const TensorShape& shape,
                                     const std::vector<double>& spectrum) {
  const auto d = static_cast<Eigen::Index>(shape.side());
  const Matrix u = unitary(rng, d);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = spectrum[static_cast<std::size_t>(i)];
  return HermitianTensor(shape, u * v.cast<Complex>().asDiagonal() * u.adjoint());
}

/// PD with eigenvalues uniform in [lo, hi].
inline HermitianTensor pd(std::mt19937_64& rng, const TensorShape& shape, double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> s(shape.side());
  for (double& x : s) x = u(rng);
  return with_spectrum(rng, shape, s);
}

/// PSD of exact rank r.
inline HermitianTensor rank_deficient(std::mt19937_64& rng, const TensorShape& shape, std::size_t r) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<double> s(shape.side(), 0.0);
  for (std::size_t i = 0; i < r; ++i) s[i] = u(rng);
  return with_spectrum(rng, shape, s);
}

inline HermitianTensor hermitian(std::mt19937_64& rng, const TensorShape& shape, double norm_bound) {
  const auto d = static_cast<Eigen::Index>(shape.side());
  Matrix g = gaussian(rng, d, d);
  Matrix h = (g + g.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const double n = es.eigenvalues().cwiseAbs().maxCoeff();
  std::uniform_real_distribution<double> u(0.1, 1.0);
  return HermitianTensor(shape, h * (norm_bound * u(rng) / n));
}

/// Truncated Taylor series with scaling and squaring.
inline Matrix series_exp(const Matrix& a) {
  int squarings = 0;
  double n = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (n > 0.5) {
    n /= 2;
    ++squarings;
  }
  const Matrix s = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * s / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Matrix function through Eigen's own eigensolver.
template <class F>
Matrix eigen_function(const Matrix& h, F f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXd v = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace fixtures
