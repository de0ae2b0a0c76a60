#include "tmlab/means.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmlab/errors.hpp"

namespace tmlab {

namespace {

void require_same_shape(const HermitianTensor& x, const HermitianTensor& y) {
  if (!(x.shape() == y.shape())) throw ShapeMismatch("mean arguments have different shapes");
}

HermitianTensor apply_connection(const HermitianTensor& z, const ConnectionFunction& g) {
  try {
    return apply_spectral(z, g.eval(), DomainCheck::kFinite);
  } catch (const DomainError& e) {
    throw DomainError("connection function '" + g.label() + "': " + e.what());
  }
}

}  // namespace

HermitianTensor mean_pd(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g) {
  require_same_shape(x, y);
  require_pd(x, "first mean argument");
  require_pd(y, "second mean argument");
  const SpectralDecomposition sy = spectral_decompose(y);
  const HermitianTensor y_half = apply_spectral(sy, [](double v) { return std::sqrt(v); });
  const HermitianTensor y_inv_half = apply_spectral(sy, [](double v) { return 1.0 / std::sqrt(v); });
  const HermitianTensor z = congruence(y_inv_half.tensor(), x);
  return congruence(y_half.tensor(), apply_connection(z, g));
}

HermitianTensor mean_recursive(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f,
                               int n) {
  if (n < 0) throw ConfigError("lift order must be nonnegative");
  if (n == 0) return mean_pd(x, y, f);
  if (n == 1) return mean_pd(x, y, power_lift(f, 1));
  const HermitianTensor inner = mean_recursive(x, y, f, n - 2);
  // (X Y^{-1})^H = Y^{-1} X, so the sandwich is a congruence.
  const Tensor outer = x * inverse(y);
  return congruence(outer, inner);
}

EtaResult eta(const HermitianTensor& x, const HermitianTensor& y, double rank_tol) {
  require_same_shape(x, y);
  require_psd(x, "dominated argument");
  require_psd(y, "dominating argument");
  const SpectralDecomposition sy = spectral_decompose(y, rank_tol);
  const double top = std::max(0.0, sy.lambda_max());
  auto kept = [&](double v) { return top > 0.0 && v > rank_tol * top; };
  const HermitianTensor pinv_half = apply_spectral(sy, [&](double v) { return kept(v) ? 1.0 / std::sqrt(v) : 0.0; });
  const HermitianTensor complement = apply_spectral(sy, [&](double v) { return kept(v) ? 0.0 : 1.0; });

  // range(X) in range(Y) iff X vanishes on the null space of Y.
  const double x_scale = std::max(1.0, std::abs(lambda_max(x)));
  const double leak = lambda_max(congruence(complement.tensor(), x));
  if (leak > kPsdTolerance * x_scale) {
    std::ostringstream msg;
    msg << "range of the first argument is not inside the range of the second (leak " << leak << ")";
    throw DominationError(msg.str());
  }
  HermitianTensor e = congruence(pinv_half.tensor(), x);
  const double c = std::max(0.0, lambda_max(e));
  return EtaResult{std::move(e), c, true};
}

HermitianTensor mean_psd(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g,
                         double rank_tol) {
  if (!g.finite_at_0plus()) {
    throw UnsupportedFunction("connection function '" + g.label() + "' is unbounded at 0+, so the PSD mean is undefined");
  }
  const EtaResult e = eta(x, y, rank_tol);
  const SpectralDecomposition se = spectral_decompose(e.eta, rank_tol);
  const double top = std::max(0.0, se.lambda_max());
  const double at_zero = g.value_at_0plus();
  const auto& eval = g.eval();
  const HermitianTensor ge = apply_spectral(se, [&](double v) { return v > rank_tol * top ? eval(v) : at_zero; });
  return congruence(sqrt(y).tensor(), ge);
}

namespace {

RttDiagnostic finish_diagnostic(std::vector<double> grid, std::vector<double> errors, double limit_norm) {
  RttDiagnostic d;
  d.epsilon_grid = std::move(grid);
  d.errors = std::move(errors);
  bool nonincreasing = true;
  bool strict = true;
  for (std::size_t i = 1; i < d.errors.size(); ++i) {
    if (d.errors[i] > d.errors[i - 1]) nonincreasing = false;
    if (!(d.errors[i] < d.errors[i - 1])) strict = false;
  }
  const double denom = limit_norm > 0.0 ? limit_norm : 1.0;
  d.final_relative_error = d.errors.empty() ? 0.0 : d.errors.back() / denom;
  d.strictly_decreasing = strict;
  d.converged = nonincreasing && d.final_relative_error <= 1e-3;
  return d;
}

}  // namespace

std::pair<HermitianTensor, RttDiagnostic> epsilon_mean_limit(const HermitianTensor& x, const HermitianTensor& y,
                                                             const ConnectionFunction& g,
                                                             const std::vector<double>& eps_grid,
                                                             const GaugeNorm& norm) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0) || (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))) {
      throw ConfigError("epsilon grid must be positive and strictly descending");
    }
  }
  HermitianTensor limit = mean_psd(x, y, g);
  const HermitianTensor id = HermitianTensor::identity(x.shape());
  std::vector<double> errors;
  errors.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const HermitianTensor approx = mean_pd(x + eps * id, y + eps * id, g);
    errors.push_back(gauge_norm(approx - limit, norm));
  }
  RttDiagnostic d = finish_diagnostic(eps_grid, std::move(errors), gauge_norm(limit, norm));
  return {std::move(limit), std::move(d)};
}

std::pair<HermitianTensor, RttDiagnostic> perturbation_sequence_limit(
    const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g,
    const std::vector<HermitianTensor>& perturbations, const GaugeNorm& norm) {
  HermitianTensor limit = mean_psd(x, y, g);
  std::vector<double> grid;
  std::vector<double> errors;
  for (const HermitianTensor& a : perturbations) {
    require_pd(a, "perturbation");
    grid.push_back(gauge_norm(a, GaugeNorm::spectral()));
    errors.push_back(gauge_norm(mean_psd(x, y + a, g) - limit, norm));
  }
  RttDiagnostic d = finish_diagnostic(std::move(grid), std::move(errors), gauge_norm(limit, norm));
  return {std::move(limit), std::move(d)};
}

}  // namespace tmlab
