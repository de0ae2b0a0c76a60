#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include "tmlab/connection.hpp"
#include "tmlab/spectral.hpp"

namespace tmlab::harness {

struct EnsembleSpec {
  enum class Kind { kWishart, kSpectrum, kRank };

  TensorShape shape{{2, 2}};
  Kind kind = Kind::kSpectrum;
  double dof = 8.0;                 // Wishart degrees of freedom
  double lo = 0.5, hi = 2.0;        // spectrum bounds
  std::size_t rank = 1;             // exact rank of rank-deficient samples
  std::uint64_t seed = 0;

  /// "wishart:<dof>", "spectrum:<m>:<M>", "rank:<r>".  Throws ConfigError.
  static EnsembleSpec parse(const std::string& text, const TensorShape& shape, std::uint64_t seed);
  std::string describe() const;
};

/// Independent generator for (seed, trial, stream); never depends on the
/// order in which trials are evaluated.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream);

/// WishartLike: G^H G / dof + 1e-6 I with complex standard normal G (dof x D).
/// SpectrumBounded: U diag(uniform[m, M]) U^H with U from a QR factorization.
/// RankDeficient: G G^H / r with G of size D x r.
HermitianTensor sample(const EnsembleSpec& spec, std::uint64_t trial, std::uint64_t stream = 0);

/// Haar-like unitary from the QR factorization of a complex Gaussian matrix.
Matrix random_unitary(std::mt19937_64& rng, Eigen::Index d);
/// Complex standard normal matrix with E|g|^2 = 1.
Matrix complex_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);
/// Hermitian with spectral norm drawn uniformly from [lo, hi].
HermitianTensor random_hermitian(std::mt19937_64& rng, const TensorShape& shape, double lo, double hi);

enum class PremiseDirection { kBelowIdentity, kAboveIdentity };

struct PremiseResult {
  HermitianTensor x;
  HermitianTensor y;
  double scale = 1.0;  // t with X' = X / t, Y' = Y / t
};

using MeanFn = std::function<HermitianTensor(const HermitianTensor&, const HermitianTensor&)>;

/// Jointly rescale so that X' #_F Y' <= I (lambda_max = 1) or >= I
/// (lambda_min = 1).
PremiseResult enforce_premise(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f,
                              PremiseDirection direction);
/// Same, with the mean supplied by the caller (any argument order); it must be
/// positively homogeneous of degree 1.
PremiseResult enforce_premise(const HermitianTensor& x, const HermitianTensor& y, const MeanFn& mean,
                              PremiseDirection direction);

}  // namespace tmlab::harness
