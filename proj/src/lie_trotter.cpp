#include "tmlab/lie_trotter.hpp"

#include <cmath>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/means.hpp"

namespace tmlab {

HermitianTensor tensor_exp(const HermitianTensor& h) {
  return apply_spectral(h, [](double v) { return std::exp(v); });
}

HermitianTensor tensor_log(const HermitianTensor& p) {
  require_pd(p, "logarithm argument");
  return apply_spectral(p, [](double v) { return std::log(v); });
}

HermitianTensor lt_expression(double q, const HermitianTensor& x, const HermitianTensor& y,
                              const ConnectionFunction& g) {
  if (q == 0.0 || !std::isfinite(q)) throw ConfigError("Lie-Trotter exponent must be finite and nonzero");
  const HermitianTensor m = mean_pd(tensor_exp(q * x), tensor_exp(q * y), g);
  return apply_spectral(m, [q](double v) { return std::pow(v, 1.0 / q); }, DomainCheck::kPositiveSpectrum);
}

HermitianTensor lt_limit(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g) {
  if (std::abs(g.value_at_1() - 1.0) > 1e-12) {
    throw PreconditionError("Lie-Trotter limit needs g(1) = 1, '" + g.label() + "' has " +
                            std::to_string(g.value_at_1()));
  }
  const double w = g.derivative_at_1();
  return tensor_exp(w * x + (1.0 - w) * y);
}

std::vector<double> default_q_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 8; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

ConvergenceStudy convergence_study(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& g,
                                   const std::vector<double>& q_grid, const GaugeNorm& norm) {
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (!(q_grid[i] > 0.0) || (i > 0 && !(q_grid[i] < q_grid[i - 1]))) {
      throw ConfigError("q grid must be positive and strictly descending");
    }
  }
  const HermitianTensor limit = lt_limit(x, y, g);
  ConvergenceStudy s;
  s.q_grid = q_grid;
  for (double q : q_grid) s.distances.push_back(gauge_norm(lt_expression(q, x, y, g) - limit, norm));
  s.monotone = true;
  for (std::size_t i = 1; i < s.distances.size(); ++i) {
    if (s.distances[i] > 1.05 * s.distances[i - 1] + 1e-12) s.monotone = false;
  }
  const double scale = gauge_norm(limit, norm);
  s.final_relative_error = s.distances.empty() ? 0.0 : s.distances.back() / (scale > 0 ? scale : 1.0);
  return s;
}

OrderingCheck lt_ordering_check(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f,
                                int m, double q, PowerBranch branch, double tol) {
  if (!(q > 0.0 && q <= 0.5)) throw PreconditionError("ordering check needs q in (0, 1/2]");
  if (m < 0) throw PreconditionError("lift order must be nonnegative");
  const ConnectionFunction lifted = power_lift(f, m);

  // The ordering is only claimed under the premise on the unpowered mean.
  const HermitianTensor base = mean_pd(x, y, lifted);
  const HermitianTensor id = HermitianTensor::identity(x.shape());
  const LoewnerVerdict premise = loewner_compare(base, id, tol);
  const bool premise_ok = branch == PowerBranch::kPmi
                              ? premise.relation == LoewnerRelation::kLeq || premise.relation == LoewnerRelation::kEq
                              : premise.relation == LoewnerRelation::kGeq || premise.relation == LoewnerRelation::kEq;
  if (!premise_ok) {
    std::ostringstream msg;
    msg << "premise " << (branch == PowerBranch::kPmi ? "mean <= I" : "mean >= I") << " fails (relation "
        << to_string(premise.relation) << ")";
    throw PreconditionError(msg.str());
  }

  const double w = m + f.derivative_at_1();
  const HermitianTensor log_affine = tensor_exp(w * tensor_log(x) + (1.0 - w) * tensor_log(y));
  const HermitianTensor powered = mean_pd(power(x, q), power(y, q), lifted);
  const HermitianTensor root_mean =
      apply_spectral(powered, [q](double v) { return std::pow(v, 1.0 / q); }, DomainCheck::kPositiveSpectrum);
  const LoewnerVerdict verdict = loewner_compare(log_affine, root_mean, tol);
  const bool leq = verdict.relation == LoewnerRelation::kLeq || verdict.relation == LoewnerRelation::kEq;
  const bool geq = verdict.relation == LoewnerRelation::kGeq || verdict.relation == LoewnerRelation::kEq;
  return OrderingCheck{log_affine, root_mean, verdict, branch == PowerBranch::kPmi ? leq : geq};
}

}  // namespace tmlab
