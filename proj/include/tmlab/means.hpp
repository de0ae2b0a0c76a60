#pragma once

#include <utility>
#include <vector>

#include "tmlab/connection.hpp"
#include "tmlab/spectral.hpp"

namespace tmlab {

/// X #_g Y = Y^{1/2} g(Y^{-1/2} X Y^{-1/2}) Y^{1/2} for PD X, Y.
HermitianTensor mean_pd(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g);

/// X #_{x^n f} Y through the two-step identity
///   X #_{F_n} Y = X Y^{-1} (X #_{F_{n-2}} Y) Y^{-1} X,
/// with the n = 0, 1 cases evaluated directly.
HermitianTensor mean_recursive(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f,
                               int n);

struct EtaResult {
  HermitianTensor eta;
  /// Least c with X <= cY, i.e. lambda_max(eta).
  double domination_constant = 0.0;
  /// range(X) lies in range(Y), so eta annihilates the complement of range(Y).
  bool range_ok = false;
};

/// The PSD solution of X = Y^{1/2} eta Y^{1/2} supported on range(Y).
/// Throws DominationError if range(X) is not inside range(Y).
EtaResult eta(const HermitianTensor& x, const HermitianTensor& y, double rank_tol = kRankTolerance);

/// Y^{1/2} g(eta(X, Y)) Y^{1/2}, with g(0+) used on the null space of eta.
/// Throws UnsupportedFunction when g(0+) is infinite.
HermitianTensor mean_psd(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g,
                         double rank_tol = kRankTolerance);

struct RttDiagnostic {
  std::vector<double> epsilon_grid;
  std::vector<double> errors;
  double final_relative_error = 0.0;
  bool strictly_decreasing = false;
  /// Nonincreasing errors and final relative error <= 1e-3.
  bool converged = false;
};

/// mean_pd(X + eps I, Y + eps I, g) for each eps, measured against mean_psd(X, Y, g).
std::pair<HermitianTensor, RttDiagnostic> epsilon_mean_limit(const HermitianTensor& x, const HermitianTensor& y,
                                                             const ConnectionFunction& g,
                                                             const std::vector<double>& eps_grid,
                                                             const GaugeNorm& norm = GaugeNorm::frobenius());

/// X #_g (Y + A_n) for a sequence of PD perturbations; the diagnostic grid
/// holds the spectral norms of the A_n.
std::pair<HermitianTensor, RttDiagnostic> perturbation_sequence_limit(
    const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g,
    const std::vector<HermitianTensor>& perturbations, const GaugeNorm& norm = GaugeNorm::frobenius());

}  // namespace tmlab
