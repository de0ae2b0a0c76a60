#pragma once

#include <vector>

#include "tmlab/connection.hpp"
#include "tmlab/spectral.hpp"

namespace tmlab {

HermitianTensor tensor_exp(const HermitianTensor& h);
/// Throws NotPositive for a non-PD argument.
HermitianTensor tensor_log(const HermitianTensor& p);

/// (e^{qX} #_g e^{qY})^{1/q}
HermitianTensor lt_expression(double q, const HermitianTensor& x, const HermitianTensor& y,
                              const ConnectionFunction& g);

/// exp(g'(1) X + (1 - g'(1)) Y); requires g(1) = 1.
HermitianTensor lt_limit(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g);

struct ConvergenceStudy {
  std::vector<double> q_grid;
  std::vector<double> distances;
  /// d(q_{i+1}) <= 1.05 d(q_i) + 1e-12 along the grid.
  bool monotone = false;
  double final_relative_error = 0.0;
};

/// 2^-1, 2^-2, ..., 2^-8
std::vector<double> default_q_grid();

ConvergenceStudy convergence_study(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g,
                                   const std::vector<double>& q_grid = default_q_grid(),
                                   const GaugeNorm& norm = GaugeNorm::frobenius());

enum class PowerBranch { kPmi, kPmd };

struct OrderingCheck {
  HermitianTensor log_affine;  // exp((m + f'(1)) log X + (1 - m - f'(1)) log Y)
  HermitianTensor root_mean;   // (X^q #_{x^m f} Y^q)^{1/q}
  /// log_affine compared against root_mean; LEQ is the pmi claim, GEQ the pmd one.
  LoewnerVerdict verdict;
  bool claim_holds = false;
};

/// The pmi branch requires X #_{x^m f} Y <= I, the pmd branch >= I; a
/// violated premise throws PreconditionError.  q must lie in (0, 1/2].
OrderingCheck lt_ordering_check(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f,
                                int m, double q, PowerBranch branch, double tol = kPsdTolerance);

}  // namespace tmlab
