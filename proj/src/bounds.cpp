#include "tmlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/means.hpp"
#include "tmlab/stats.hpp"

namespace tmlab {

double kantorovich(double m, double big_m, double p) {
  if (!(m > 0.0) || !(big_m >= m) || !std::isfinite(big_m) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "Kantorovich constant needs 0 < m <= M, got m = " << m << ", M = " << big_m;
    throw DomainError(msg.str());
  }
  // Only the ratio h = M/m matters; working with it avoids the cancellation
  // in m M^p - M m^p when the spectrum sits far from 1.
  const long double h = static_cast<long double>(big_m) / static_cast<long double>(m);
  if ((p >= 0.0 && p <= 1.0) || h - 1.0L <= 1e-12L) return 1.0;
  const long double lp = p;
  const long double hp = std::pow(h, lp);
  const long double base = (lp - 1) * (hp - 1) / (lp * (hp - h));
  const long double k = std::pow(base, lp) * (hp - h) / ((lp - 1) * (h - 1));
  const double out = static_cast<double>(k);
  if (std::isnan(out)) throw DomainError("Kantorovich constant evaluation failed");
  return std::max(1.0, out);
}

BoundFactors kk_factors(const HermitianTensor& x, const ConnectionFunction& g, int m, double q, KRange range) {
  require_pd(x, "Kantorovich base tensor");
  if (m < 2) throw ConfigError("K_k factors need m >= 2");
  if (!(q > 0.0)) throw ConfigError("K_k factors need q > 0");
  const RealVector lambda = eigenvalues(x);
  BoundFactors out;
  const int first = range == KRange::kFromOne ? 1 : 2;
  for (int k = first; k <= m; ++k) {
    // X^{-1} g(X)^{m-k} commutes with X, so its spectrum is g(l)^{m-k} / l.
    double w_min = std::numeric_limits<double>::infinity();
    double w_max = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      const double w = std::pow(g(lambda(i)), m - k) / lambda(i);
      if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("K_k spectrum is not positive and finite");
      w_min = std::min(w_min, w);
      w_max = std::max(w_max, w);
    }
    const double kk = kantorovich(1.0 / w_max, 1.0 / w_min, 2.0 * q);
    out.kk_list.push_back(kk);
    out.kk_product *= kk;
  }
  out.kantorovich = out.kk_product;
  return out;
}

ExponentSplit decompose_exponent(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw ConfigError("exponent must be positive and finite");
  if (q < 1.0) return {0, q};
  int n = std::max(0, static_cast<int>(std::ceil(std::log2(q / 2.0))));
  double q0 = std::ldexp(q, -n);
  while (q0 > 2.0) {
    ++n;
    q0 = std::ldexp(q, -n);
  }
  while (q0 < 1.0 && n > 0) {
    --n;
    q0 = std::ldexp(q, -n);
  }
  return {n, q0};
}

FactorPair power_ratio_extremes(const HermitianTensor& z, const ConnectionFunction& f, double a, double rank_tol) {
  const RealVector lambda = eigenvalues(z);
  const double top = std::max(0.0, lambda(0));
  FactorPair out{std::numeric_limits<double>::infinity(), 0.0};
  // Null directions count only where f(0+) gives a finite nonzero ratio.
  const double f0 = f.value_at_0plus();
  const bool null_counts = std::isfinite(f0) && f0 > 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double v = lambda(i);
    const bool null = !(v > rank_tol * top) || top == 0.0;
    if (null && !null_counts) continue;
    const double r = null ? std::pow(f0, 1.0 - a) : f(std::pow(v, a)) / std::pow(f(v), a);
    if (!std::isfinite(r)) throw DomainError("power ratio of '" + f.label() + "' is not finite");
    out.lower = std::min(out.lower, r);
    out.upper = std::max(out.upper, r);
    any = true;
  }
  if (!any) return {1.0, 1.0};
  return out;
}

std::vector<HermitianTensor> dyadic_ratios(const HermitianTensor& x, const HermitianTensor& y, int levels) {
  std::vector<HermitianTensor> z;
  z.reserve(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double e = std::ldexp(1.0, k);
    try {
      z.push_back(eta(psd_power(y, e), psd_power(x, e)).eta);
    } catch (const DominationError& err) {
      throw DominationError("dyadic level " + std::to_string(k) + ": " + err.what());
    }
  }
  return z;
}

namespace {

FactorPair dyadic_factors(double q, const ConnectionFunction& f, const HermitianTensor& x,
                          const HermitianTensor& y) {
  const ExponentSplit split = decompose_exponent(q);
  const std::vector<HermitianTensor> z = dyadic_ratios(x, y, split.n + 1);
  FactorPair out = power_ratio_extremes(z[static_cast<std::size_t>(split.n)], f, split.q0);
  for (int k = 1; k <= split.n; ++k) {
    const FactorPair level = power_ratio_extremes(z[static_cast<std::size_t>(k - 1)], f, 2.0);
    out.lower *= level.lower;
    out.upper *= level.upper;
  }
  return out;
}

}  // namespace

FactorPair psi_factors(double q, const ConnectionFunction& f, const HermitianTensor& x, const HermitianTensor& y) {
  return dyadic_factors(q, f, x, y);
}

FactorPair phi_factors(double q, const ConnectionFunction& h, const HermitianTensor& x, const HermitianTensor& y) {
  return dyadic_factors(q, h, x, y);
}

FactorPair convex_kantorovich_factors(const HermitianTensor& x, double q) {
  require_pd(x, "K1/K2 base tensor");
  if (!(q >= 1.0)) throw ConfigError("K1/K2 need q >= 1");
  const RealVector lambda = eigenvalues(x);
  const double lo = 1.0 / lambda(0);
  const double hi = 1.0 / lambda(lambda.size() - 1);
  return {kantorovich(lo, hi, q - 1.0), kantorovich(lo, hi, 2.0 * q - 1.0)};
}

TailEstimate trace_tail_bound(const std::vector<HermitianTensor>& samples, double q, const HermitianTensor& c) {
  if (samples.empty()) throw ConfigError("tail bound needs at least one sample");
  if (!(q >= 1.0)) throw ConfigError("tail bound needs q >= 1");
  const HermitianTensor c_inv = inverse(c);
  MeanEstimator est;
  for (const HermitianTensor& z : samples) {
    require_psd(z, "tail-bound sample");
    const HermitianTensor zq = psd_power(z, q);
    est.add((zq.unfold() * c_inv.unfold()).trace().real());
  }
  return {est.mean(), est.stderr_of_mean()};
}

KyFanStats kyfan_stats(const RealVector& descending, std::size_t k) {
  if (k < 1 || k > static_cast<std::size_t>(descending.size())) {
    throw ShapeMismatch("Ky Fan index " + std::to_string(k) + " outside [1, " + std::to_string(descending.size()) + "]");
  }
  KyFanStats s;
  for (std::size_t i = 0; i < k; ++i) {
    s.sum += descending(static_cast<Eigen::Index>(i));
    s.product *= descending(static_cast<Eigen::Index>(i));
  }
  return s;
}

KyFanStats kyfan_stats(const HermitianTensor& h, std::size_t k) { return kyfan_stats(eigenvalues(h), k); }

}  // namespace tmlab
