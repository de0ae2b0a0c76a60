#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tmlab {

/// Claimed operator classes.  Claims are checked against their scalar shadow
/// (monotonicity, midpoint convexity) on a log grid when a function is built.
struct ClassTags {
  bool tmi = false;  // operator monotone increasing
  bool tmd = false;  // operator monotone decreasing
  bool tc = false;   // operator convex
  bool normalized = false;  // g(1) = 1

  std::string describe() const;
};

class ConnectionFunction {
 public:
  using Eval = std::function<double(double)>;

  struct Options {
    ClassTags tags;
    std::optional<double> derivative_at_1;
    bool require_positive = true;
  };

  /// Throws UnsupportedFunction when a probe contradicts the options.
  ConnectionFunction(std::string label, Eval eval, Options options);

  double operator()(double x) const { return impl_->eval(x); }
  const Eval& eval() const { return impl_->eval; }
  const std::string& label() const { return impl_->label; }
  const ClassTags& tags() const { return impl_->tags; }
  double value_at_1() const { return impl_->value_at_1; }
  /// Probe at x = 1e-12; +inf when the probe exceeds 1e10.
  double value_at_0plus() const { return impl_->value_at_0plus; }
  bool finite_at_0plus() const { return std::isfinite(impl_->value_at_0plus); }
  /// Registered analytic value, otherwise a Richardson-refined central difference.
  double derivative_at_1() const { return impl_->derivative_at_1; }
  bool analytic_derivative() const { return impl_->analytic_derivative; }
  bool requires_positive() const { return impl_->require_positive; }

 private:
  struct Impl {
    std::string label;
    Eval eval;
    ClassTags tags;
    bool require_positive = true;
    double value_at_1 = 1.0;
    double value_at_0plus = 0.0;
    double derivative_at_1 = 0.0;
    bool analytic_derivative = false;
  };
  std::shared_ptr<const Impl> impl_;
};

/// 64 log-spaced points in [1e-3, 1e3].
std::vector<double> probe_grid();

// Builtins.
ConnectionFunction power_fn(double alpha);
ConnectionFunction identity_fn();
ConnectionFunction square_fn();
ConnectionFunction geometric_fn();
/// 2x / (1 + x)
ConnectionFunction harmonic_fn();
/// (1 + x) / 2
ConnectionFunction arithmetic_fn();
/// x / (1 + s) - x / (x + s); vanishes at 1 and is negative below it, so the
/// positivity probe is not applied.
ConnectionFunction psi_fn(double s);

/// x^n f(x)
ConnectionFunction power_lift(const ConnectionFunction& f, int n);
/// x g(1/x)
ConnectionFunction transpose_fn(const ConnectionFunction& g);
/// 1 / f(x)
ConnectionFunction reciprocal_fn(const ConnectionFunction& f);

/// Solve g(x) = y for strictly monotone g: exponential bracketing up to 2^+-64,
/// then bisection in log space.  Throws RangeError if y cannot be bracketed.
double invert_fn(const ConnectionFunction& g, double y);
double invert_fn(const ConnectionFunction::Eval& g, double y);

/// x -> 1 / F^{-1}(1/x) with F(x) = x^{m-1} f(x).
ConnectionFunction ando_hiai_g(const ConnectionFunction& f, int m);

/// Five-point central difference at h = 1e-5 with one Richardson step.
double numeric_derivative_at_one(const ConnectionFunction::Eval& g);
inline double derivative_at_one(const ConnectionFunction& g) { return g.derivative_at_1(); }

struct PmiCertificate {
  bool holds = false;
  /// Least M on the grid with f(x^q) <= M f(x)^q (pmi) or f(x)^q <= M f(x^q)
  /// (pmd), clamped below at 1.
  double m_estimate = 1.0;
  /// Largest raw ratio seen before clamping; <= 1 means the scalar condition
  /// held without slack.
  double worst_ratio = 0.0;
  std::string grid;
};

PmiCertificate check_pmi(const ConnectionFunction& f, const std::vector<double>& q_grid,
                         const std::vector<double>& x_grid);
PmiCertificate check_pmd(const ConnectionFunction& f, const std::vector<double>& q_grid,
                         const std::vector<double>& x_grid);

/// Colon-separated constructor chain, e.g. "power:0.5", "liftn:2:geometric",
/// "transpose:psi:1", "andohiai:2:power:0.5".  Throws ConfigError.
ConnectionFunction parse_function(const std::string& text);

}  // namespace tmlab
