#include "tmlab/connection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/format.hpp"

namespace tmlab {

std::string ClassTags::describe() const {
  std::string out;
  auto add = [&](bool flag, const char* name) {
    if (!flag) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(tmi, "TMI");
  add(tmd, "TMD");
  add(tc, "TC");
  add(normalized, "normalized");
  return out.empty() ? "none" : out;
}

std::vector<double> probe_grid() {
  std::vector<double> grid(64);
  for (int i = 0; i < 64; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 6.0 * i / 63.0);
  return grid;
}

double numeric_derivative_at_one(const ConnectionFunction::Eval& g) {
  auto stencil = [&](double h) {
    return (-g(1 + 2 * h) + 8 * g(1 + h) - 8 * g(1 - h) + g(1 - 2 * h)) / (12 * h);
  };
  const double coarse = stencil(1e-5);
  const double fine = stencil(0.5e-5);
  const double d = (16 * fine - coarse) / 15;
  if (!std::isfinite(d)) throw DomainError("derivative probe at 1 is not finite");
  return d;
}

namespace {

[[noreturn]] void probe_failure(const std::string& label, const std::string& what, double x) {
  std::ostringstream msg;
  msg << "function '" << label << "' fails the " << what << " probe at x = " << x;
  throw UnsupportedFunction(msg.str());
}

void run_probes(const std::string& label, const ConnectionFunction::Eval& f, const ClassTags& tags,
                bool require_positive) {
  const std::vector<double> grid = probe_grid();
  std::vector<double> vals(grid.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = f(grid[i]);
    if (!std::isfinite(vals[i])) probe_failure(label, "finiteness", grid[i]);
    if (require_positive && !(vals[i] > 0.0)) probe_failure(label, "positivity", grid[i]);
    scale = std::max(scale, std::abs(vals[i]));
  }
  const double slack = 1e-10 * scale;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (tags.tmi && vals[i + 1] < vals[i] - slack) probe_failure(label, "increasing", grid[i]);
    if (tags.tmd && vals[i + 1] > vals[i] + slack) probe_failure(label, "decreasing", grid[i]);
  }
  if (tags.tc) {
    for (std::size_t step : {1u, 4u, 16u}) {
      for (std::size_t i = 0; i + step < grid.size(); ++i) {
        const double mid = f(0.5 * (grid[i] + grid[i + step]));
        if (mid > 0.5 * (vals[i] + vals[i + step]) + slack) probe_failure(label, "midpoint convexity", grid[i]);
      }
    }
  }
  if (tags.normalized && std::abs(f(1.0) - 1.0) > 1e-12) probe_failure(label, "normalization", 1.0);
}

}  // namespace

ConnectionFunction::ConnectionFunction(std::string label, Eval eval, Options options) {
  run_probes(label, eval, options.tags, options.require_positive);
  auto impl = std::make_shared<Impl>();
  impl->label = std::move(label);
  impl->eval = std::move(eval);
  impl->tags = options.tags;
  impl->require_positive = options.require_positive;
  impl->value_at_1 = impl->eval(1.0);
  auto safe_eval = [&](double x) {
    try {
      return impl->eval(x);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const double near_zero = safe_eval(1e-12);
  if (!std::isfinite(near_zero) || near_zero > 1e10) {
    impl->value_at_0plus = std::numeric_limits<double>::infinity();
  } else if (const double at_zero = safe_eval(0.0); std::isfinite(at_zero)) {
    // The formula extends to 0 itself, so sqrt(0+) is 0 rather than the probe's 1e-6.
    impl->value_at_0plus = at_zero;
  } else {
    // x g(1/x) and inverse-based functions are NaN at 0: Aitken extrapolation
    // on x = 1e-6, 1e-9, 1e-12.
    impl->value_at_0plus = near_zero;
    const double f1 = safe_eval(1e-6), f2 = safe_eval(1e-9);
    const double d1 = f2 - f1, d2 = near_zero - f2;
    if (std::isfinite(f1) && std::isfinite(f2) && d1 != 0.0) {
      const double r = d2 / d1;
      if (r > 0.0 && r < 0.5) impl->value_at_0plus = std::max(0.0, near_zero + d2 * r / (1.0 - r));
    }
  }
  if (options.derivative_at_1) {
    impl->derivative_at_1 = *options.derivative_at_1;
    impl->analytic_derivative = true;
  } else {
    impl->derivative_at_1 = numeric_derivative_at_one(impl->eval);
  }
  impl_ = std::move(impl);
}

ConnectionFunction power_fn(double alpha) {
  ClassTags tags;
  tags.normalized = true;
  tags.tmi = alpha >= 0 && alpha <= 1;
  tags.tmd = alpha >= -1 && alpha <= 0;
  tags.tc = (alpha >= 1 && alpha <= 2) || (alpha >= -1 && alpha <= 0);
  std::string label = "power:" + format_number(alpha);
  if (alpha == 1.0) label = "identity";
  if (alpha == 2.0) label = "square";
  if (alpha == 0.5) label = "geometric";
  return ConnectionFunction(label, [alpha](double x) { return std::pow(x, alpha); }, {tags, alpha, true});
}

ConnectionFunction identity_fn() { return power_fn(1.0); }
ConnectionFunction square_fn() { return power_fn(2.0); }
ConnectionFunction geometric_fn() { return power_fn(0.5); }

ConnectionFunction harmonic_fn() {
  ClassTags tags{.tmi = true, .tmd = false, .tc = false, .normalized = true};
  return ConnectionFunction("harmonic", [](double x) { return 2 * x / (1 + x); }, {tags, 0.5, true});
}

ConnectionFunction arithmetic_fn() {
  ClassTags tags{.tmi = true, .tmd = false, .tc = true, .normalized = true};
  return ConnectionFunction("arithmetic", [](double x) { return 0.5 * (1 + x); }, {tags, 0.5, true});
}

ConnectionFunction psi_fn(double s) {
  if (!(s > 0)) throw ConfigError("psi parameter must be positive");
  ClassTags tags;
  tags.tc = true;
  // d/dx [x/(1+s) - x/(x+s)] = 1/(1+s) - s/(x+s)^2, which is 1/(1+s)^2 at x = 1.
  const double d1 = 1.0 / ((1 + s) * (1 + s));
  return ConnectionFunction("psi:" + format_number(s),
                            [s](double x) { return x / (1 + s) - x / (x + s); }, {tags, d1, false});
}

ConnectionFunction power_lift(const ConnectionFunction& f, int n) {
  if (n < 0) throw ConfigError("lift exponent must be nonnegative");
  if (n == 0) return f;
  ClassTags tags;
  tags.normalized = f.tags().normalized;
  std::optional<double> d1;
  // (x^n f)'(1) = n f(1) + f'(1)
  if (f.analytic_derivative()) d1 = n * f.value_at_1() + f.derivative_at_1();
  auto base = f.eval();
  return ConnectionFunction("liftn:" + std::to_string(n) + ":" + f.label(),
                            [base, n](double x) { return std::pow(x, n) * base(x); },
                            {tags, d1, f.requires_positive()});
}

ConnectionFunction transpose_fn(const ConnectionFunction& g) {
  ClassTags tags;
  tags.tmi = g.tags().tmi;
  tags.tc = g.tags().tc || g.tags().tmd;
  tags.normalized = g.tags().normalized;
  std::optional<double> d1;
  // h(x) = x g(1/x) gives h'(1) = g(1) - g'(1).
  if (g.analytic_derivative()) d1 = g.value_at_1() - g.derivative_at_1();
  auto base = g.eval();
  return ConnectionFunction("transpose:" + g.label(), [base](double x) { return x * base(1.0 / x); },
                            {tags, d1, g.requires_positive()});
}

ConnectionFunction reciprocal_fn(const ConnectionFunction& f) {
  ClassTags tags;
  tags.tmi = f.tags().tmd;
  tags.tmd = f.tags().tmi;
  tags.tc = f.tags().tmi;
  tags.normalized = f.tags().normalized;
  std::optional<double> d1;
  if (f.analytic_derivative()) d1 = -f.derivative_at_1() / (f.value_at_1() * f.value_at_1());
  auto base = f.eval();
  return ConnectionFunction("reciprocal:" + f.label(), [base](double x) { return 1.0 / base(x); },
                            {tags, d1, true});
}

double invert_fn(const ConnectionFunction::Eval& g, double y) {
  if (!std::isfinite(y)) throw RangeError("cannot invert at a non-finite value");
  const bool increasing = g(2.0) > g(0.5);
  // Work in t = log2(x); the sign flip makes the target "increasing" either way.
  auto h = [&](double t) {
    const double v = g(std::exp2(t));
    return increasing ? v - y : y - v;
  };
  double lo = 0.0;
  double hi = 0.0;
  if (h(0.0) < 0.0) {
    hi = 1.0;
    while (h(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 64.0) throw RangeError("no bracket for inverse up to 2^64 (y = " + format_number(y) + ")");
    }
  } else {
    lo = -1.0;
    while (h(lo) >= 0.0) {
      hi = lo;
      lo *= 2.0;
      if (lo < -64.0) throw RangeError("no bracket for inverse down to 2^-64 (y = " + format_number(y) + ")");
    }
  }
  // Invariant: h(lo) < 0 <= h(hi).  hi converges to the lowest root.
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (h(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double x_lo = std::exp2(lo);
  const double x_hi = std::exp2(hi);
  return std::abs(g(x_lo) - y) < std::abs(g(x_hi) - y) ? x_lo : x_hi;
}

double invert_fn(const ConnectionFunction& g, double y) { return invert_fn(g.eval(), y); }

ConnectionFunction ando_hiai_g(const ConnectionFunction& f, int m) {
  if (m < 2) throw ConfigError("Ando-Hiai order must be at least 2");
  auto base = f.eval();
  ConnectionFunction::Eval outer = [base, m](double x) { return std::pow(x, m - 1) * base(x); };
  ClassTags tags;
  tags.tmi = true;
  tags.normalized = f.tags().normalized;
  std::optional<double> d1;
  // With F(1) = 1 the chain rule gives g'(1) = 1 / F'(1), F'(1) = (m-1) + f'(1).
  if (f.tags().normalized && f.analytic_derivative()) d1 = 1.0 / ((m - 1) + f.derivative_at_1());
  return ConnectionFunction("andohiai:" + std::to_string(m) + ":" + f.label(),
                            [outer](double x) { return 1.0 / invert_fn(outer, 1.0 / x); }, {tags, d1, true});
}

namespace {

PmiCertificate power_ratio_scan(const ConnectionFunction& f, const std::vector<double>& q_grid,
                                const std::vector<double>& x_grid, bool pmi) {
  if (q_grid.empty() || x_grid.empty()) throw ConfigError("pmi probe grids must be nonempty");
  PmiCertificate cert;
  cert.holds = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (double q : q_grid) {
    for (double x : x_grid) {
      const double lifted = f(std::pow(x, q));
      const double powered = std::pow(f(x), q);
      const double ratio = pmi ? lifted / powered : powered / lifted;
      if (!std::isfinite(ratio)) {
        cert.holds = false;
        continue;
      }
      worst = std::max(worst, ratio);
    }
  }
  cert.worst_ratio = worst;
  // Ratios within rounding of 1 are the equality case, not slack.
  cert.m_estimate = worst <= 1.0 + 1e-12 ? 1.0 : worst;
  std::ostringstream desc;
  desc << q_grid.size() << " exponents in [" << *std::min_element(q_grid.begin(), q_grid.end()) << ", "
       << *std::max_element(q_grid.begin(), q_grid.end()) << "] x " << x_grid.size() << " points in ["
       << *std::min_element(x_grid.begin(), x_grid.end()) << ", "
       << *std::max_element(x_grid.begin(), x_grid.end()) << "]";
  cert.grid = desc.str();
  return cert;
}

}  // namespace

PmiCertificate check_pmi(const ConnectionFunction& f, const std::vector<double>& q_grid,
                         const std::vector<double>& x_grid) {
  return power_ratio_scan(f, q_grid, x_grid, true);
}

PmiCertificate check_pmd(const ConnectionFunction& f, const std::vector<double>& q_grid,
                         const std::vector<double>& x_grid) {
  return power_ratio_scan(f, q_grid, x_grid, false);
}

namespace {

double parse_real(const std::string& tok, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("expected a number after '" + context + "', got '" + tok + "'");
}

int parse_int(const std::string& tok, const std::string& context) {
  const double v = parse_real(tok, context);
  if (v != std::floor(v) || std::abs(v) > 1e6) throw ConfigError("expected an integer after '" + context + "'");
  return static_cast<int>(v);
}

ConnectionFunction parse_chain(const std::vector<std::string>& toks, std::size_t& pos, const std::string& text) {
  if (pos >= toks.size()) throw ConfigError("function id '" + text + "' ends early");
  const std::string head = toks[pos++];
  auto next = [&](const char* what) -> const std::string& {
    if (pos >= toks.size()) throw ConfigError("function id '" + text + "' is missing " + what);
    return toks[pos++];
  };
  if (head == "identity") return identity_fn();
  if (head == "square") return square_fn();
  if (head == "geometric") return geometric_fn();
  if (head == "harmonic" || head == "harmonic_like") return harmonic_fn();
  if (head == "arithmetic") return arithmetic_fn();
  if (head == "power") return power_fn(parse_real(next("an exponent"), head));
  if (head == "psi") return psi_fn(parse_real(next("a parameter"), head));
  if (head == "liftn") {
    const int n = parse_int(next("a lift order"), head);
    return power_lift(parse_chain(toks, pos, text), n);
  }
  if (head == "transpose") return transpose_fn(parse_chain(toks, pos, text));
  if (head == "reciprocal") return reciprocal_fn(parse_chain(toks, pos, text));
  if (head == "andohiai") {
    const int m = parse_int(next("an order"), head);
    return ando_hiai_g(parse_chain(toks, pos, text), m);
  }
  throw ConfigError("unknown function id '" + head + "' in '" + text + "'");
}

}  // namespace

ConnectionFunction parse_function(const std::string& text) {
  std::vector<std::string> toks;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ':')) toks.push_back(tok);
  std::size_t pos = 0;
  ConnectionFunction f = parse_chain(toks, pos, text);
  if (pos != toks.size()) throw ConfigError("trailing tokens in function id '" + text + "'");
  return f;
}

}  // namespace tmlab
