#pragma once

#include <vector>

#include "tmlab/connection.hpp"
#include "tmlab/spectral.hpp"

namespace tmlab {

/// Kantorovich constant K(m, M, p) for a spectrum in [m, M].  Returns 1 for
/// p in [0, 1] or m == M.  Throws DomainError if m <= 0 or M < m.
double kantorovich(double m, double big_m, double p);

struct BoundFactors {
  double kantorovich = 1.0;
  std::vector<double> kk_list;  // K_k in increasing k
  double kk_product = 1.0;
  double psi_lower = 1.0, psi_upper = 1.0;
  double phi_lower = 1.0, phi_upper = 1.0;
  double k1 = 1.0, k2 = 1.0;
  double m1 = 1.0, m2 = 1.0;
};

enum class KRange { kFromOne, kFromTwo };

/// K_k = K(1/lambda_max(W_k), 1/lambda_min(W_k), 2q) with W_k = X^{-1} g(X)^{m-k},
/// for k in [1, m] or [2, m].  For q <= 1/2 the exponent 2q is <= 1 and every
/// factor is 1.
BoundFactors kk_factors(const HermitianTensor& x, const ConnectionFunction& g, int m, double q,
                        KRange range = KRange::kFromOne);

struct ExponentSplit {
  int n = 0;
  double q0 = 1.0;  // q = 2^n q0
};

/// n = max(0, ceil(log2(q / 2))), q0 = q / 2^n, so q0 lands in [1, 2] for
/// q >= 1 and exact powers of two keep the smaller n.  For q < 1, n = 0.
ExponentSplit decompose_exponent(double q);

struct FactorPair {
  double lower = 1.0;
  double upper = 1.0;
};

/// Extreme eigenvalues of f(Z)^{-a} f(Z^a).  Null directions of Z use
/// f(0+)^{1-a} when 0 < f(0+) < inf and are skipped otherwise.
FactorPair power_ratio_extremes(const HermitianTensor& z, const ConnectionFunction& f, double a,
                                double rank_tol = kRankTolerance);

/// Z_k = eta(Y^{2^k}, X^{2^k}) for k = 0..levels-1.
std::vector<HermitianTensor> dyadic_ratios(const HermitianTensor& x, const HermitianTensor& y, int levels);

/// Psi factors for q = 2^n q0:
///   extreme(f^{-q0}(Z_n) f(Z_n^{q0})) * prod_{k=1..n} extreme(f^{-2}(Z_{k-1}) f(Z_{k-1}^2)).
/// For q <= 1 only Z_0 with exponent q is used.
FactorPair psi_factors(double q, const ConnectionFunction& f, const HermitianTensor& x, const HermitianTensor& y);
/// Same construction for a decreasing h.
FactorPair phi_factors(double q, const ConnectionFunction& h, const HermitianTensor& x, const HermitianTensor& y);

/// (K(1/lmax, 1/lmin, q-1), K(1/lmax, 1/lmin, 2q-1)) from the spectrum of X.
FactorPair convex_kantorovich_factors(const HermitianTensor& x, double q);

struct TailEstimate {
  double bound = 0.0;   // Tr(mean_i(Z_i^q) C^{-1})
  double standard_error = 0.0;  // standard error of the per-sample trace statistic
};

TailEstimate trace_tail_bound(const std::vector<HermitianTensor>& samples, double q, const HermitianTensor& c);

struct KyFanStats {
  double sum = 0.0;
  double product = 1.0;
};

/// Sum and product of the k largest eigenvalues, 1 <= k <= D.
KyFanStats kyfan_stats(const HermitianTensor& h, std::size_t k);
KyFanStats kyfan_stats(const RealVector& descending, std::size_t k);

}  // namespace tmlab
