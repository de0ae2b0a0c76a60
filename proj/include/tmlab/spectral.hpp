#pragma once

#include <functional>
#include <optional>

#include "tmlab/tensor.hpp"

namespace tmlab {

struct SpectralDecomposition {
  RealVector eigenvalues;  // descending
  Tensor eigenbasis;       // columns of the unfolding are eigenvectors
  std::size_t rank = 0;    // |lambda| > rank_tol * max|lambda|

  double lambda_max() const { return eigenvalues(0); }
  double lambda_min() const { return eigenvalues(eigenvalues.size() - 1); }
  /// U diag(values) U^H for an arbitrary real spectrum on this basis.
  HermitianTensor reconstruct(const RealVector& values) const;
  HermitianTensor reconstruct() const { return reconstruct(eigenvalues); }
};

SpectralDecomposition spectral_decompose(const HermitianTensor& h, double rank_tol = kRankTolerance);
/// Descending eigenvalues only.
RealVector eigenvalues(const HermitianTensor& h);
double lambda_max(const HermitianTensor& h);
double lambda_min(const HermitianTensor& h);

enum class DomainCheck { kNone, kFinite, kPositiveSpectrum };

/// U diag(phi(lambda)) U^H.  kFinite rejects non-finite phi values,
/// kPositiveSpectrum additionally requires every eigenvalue to be > 0.
HermitianTensor apply_spectral(const HermitianTensor& h, const std::function<double(double)>& phi,
                               DomainCheck check = DomainCheck::kFinite);
HermitianTensor apply_spectral(const SpectralDecomposition& s, const std::function<double(double)>& phi,
                               DomainCheck check = DomainCheck::kFinite);

/// Require lambda_min > 0 and lambda_min > 1e-13 * lambda_max.
void require_pd(const HermitianTensor& h, const char* what);
bool is_pd(const HermitianTensor& h);
/// lambda_min >= -tol * max(1, lambda_max).
void require_psd(const HermitianTensor& h, const char* what, double tol = kPsdTolerance);

HermitianTensor power(const HermitianTensor& h, double exponent);
/// Power on a PSD tensor: small negative eigenvalues are clamped to 0, and 0^a
/// with a > 0 is 0.
HermitianTensor psd_power(const HermitianTensor& h, double exponent);
HermitianTensor sqrt(const HermitianTensor& h);
HermitianTensor inverse(const HermitianTensor& h);

enum class LoewnerRelation { kLeq, kGeq, kEq, kIncomparable };
const char* to_string(LoewnerRelation r);

struct LoewnerVerdict {
  LoewnerRelation relation;
  /// Extreme eigenvalue of Y - X: lambda_min when the verdict is LEQ, EQ or
  /// INCOMPARABLE; lambda_max (negative or zero) for GEQ.
  double witness;
  double min_gap;  // lambda_min(Y - X)
  double max_gap;  // lambda_max(Y - X)
};

/// Compare X against Y: LEQ iff lambda_min(Y - X) >= -tol * scale.
LoewnerVerdict loewner_compare(const HermitianTensor& x, const HermitianTensor& y, double tol = kPsdTolerance);

struct GaugeNorm {
  enum class Kind { kSpectral, kFrobenius, kTrace, kKyFan } kind = Kind::kFrobenius;
  std::size_t k = 1;  // only for KyFan

  static GaugeNorm spectral() { return {Kind::kSpectral, 1}; }
  static GaugeNorm frobenius() { return {Kind::kFrobenius, 1}; }
  static GaugeNorm trace() { return {Kind::kTrace, 1}; }
  static GaugeNorm ky_fan(std::size_t k) { return {Kind::kKyFan, k}; }
};

/// Parses "spectral", "frobenius", "trace", "kyfan:k".
GaugeNorm parse_gauge_norm(const std::string& text);

/// Symmetric gauge applied to |lambda|.
double gauge_norm(const HermitianTensor& h, const GaugeNorm& norm);
/// Symmetric gauge applied to singular values, for non-Hermitian tensors.
double gauge_norm(const Tensor& t, const GaugeNorm& norm);

HermitianTensor range_projector(const HermitianTensor& h, double rank_tol = kRankTolerance);

}  // namespace tmlab
