#include "tmlab/harness/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "tmlab/bounds.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/format.hpp"
#include "tmlab/harness/ensemble.hpp"
#include "tmlab/lie_trotter.hpp"
#include "tmlab/means.hpp"
#include "tmlab/processing.hpp"
#include "tmlab/stats.hpp"

namespace tmlab::harness {

namespace {

std::string num(double v) { return format_number(v); }

// Per-trial work in parallel, results returned in trial order.  The first
// failing trial (by index) decides which exception propagates.
template <class Fn>
auto map_trials(long n, unsigned workers, Fn&& fn) -> std::vector<decltype(fn(0L))> {
  using T = decltype(fn(0L));
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(n));
  std::atomic<long> next{0};
  std::mutex mu;
  long err_index = n;
  std::exception_ptr err;
  auto work = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[static_cast<std::size_t>(i)].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  const auto w = static_cast<unsigned>(std::max<long>(1, std::min<long>(workers, n)));
  if (w == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < w; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::uint64_t suite_seed(std::uint64_t seed, SuiteId id) {
  return seed ^ ((static_cast<std::uint64_t>(id) + 1) * 0x9e3779b97f4a7c15ULL);
}

class Context {
 public:
  Context(const ExperimentConfig& cfg, SuiteId id, const RunOptions& opt)
      : cfg(cfg), id(id), workers(opt.workers), seed(suite_seed(cfg.seed, id)), norm(parse_gauge_norm(cfg.norm)) {
    cfg.validate();
    report.suite = to_string(id);
    report.seed = cfg.seed;
    report.tolerance = cfg.tolerance;
  }

  EnsembleSpec ensemble(const std::optional<std::string>& override, const std::string& fallback) const {
    return EnsembleSpec::parse(override.value_or(fallback), cfg.shape, seed);
  }
  EnsembleSpec x_ensemble(const std::string& fallback) const { return ensemble(cfg.x_ensemble, fallback); }
  EnsembleSpec y_ensemble(const std::string& fallback) const { return ensemble(cfg.y_ensemble, fallback); }
  EnsembleSpec increment_ensemble(const std::string& fallback) const {
    return ensemble(cfg.increment_ensemble, fallback);
  }
  ConnectionFunction function(const std::string& fallback) const {
    return parse_function(cfg.function.value_or(fallback));
  }

  template <class Fn>
  auto trials(Fn&& fn) const {
    return map_trials(cfg.trials, workers, std::forward<Fn>(fn));
  }

  std::vector<double> exponent_list(const std::optional<double>& value, std::vector<double> defaults,
                                    const std::function<bool(double)>& admissible, const std::string& what,
                                    const std::string& range) {
    if (!value) return defaults;
    if (admissible(*value)) return {*value};
    note("exponents." + what + " = " + num(*value) + " is outside " + range + " here; suite defaults used");
    return defaults;
  }
  std::vector<int> order_list(const std::optional<int>& value, std::vector<int> defaults) const {
    return value ? std::vector<int>{*value} : defaults;
  }

  void note(std::string s) { report.regime_notes.push_back(std::move(s)); }

  const ExperimentConfig& cfg;
  SuiteId id;
  unsigned workers;
  std::uint64_t seed;
  GaugeNorm norm;
  VerificationReport report;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return "{" + s + "}";
}

bool leq_or_eq(const LoewnerVerdict& v) {
  return v.relation == LoewnerRelation::kLeq || v.relation == LoewnerRelation::kEq;
}

/// Löwner check a <= b; returns the excess (0 when it holds).
struct Check {
  bool violated = false;
  double excess = 0.0;
};

Check check_leq(const HermitianTensor& a, const HermitianTensor& b, double tol) {
  const LoewnerVerdict v = loewner_compare(a, b, tol);
  const bool ok = leq_or_eq(v);
  return {!ok, ok ? 0.0 : std::max(0.0, -v.min_gap)};
}

/// A not-below c I for a tensor with largest eigenvalue `lmax`.
bool exceeds(double lmax, double level, double tol) {
  return lmax - level > tol * std::max({std::abs(lmax), std::abs(level), 1.0});
}

struct OrderingTally {
  long checks = 0;
  long violations = 0;
  double max_violation = 0.0;

  void add(const Check& c) {
    ++checks;
    if (c.violated) {
      ++violations;
      max_violation = std::max(max_violation, c.excess);
    }
  }
  void fill(VerificationReport& r) const {
    r.trials = checks;
    r.violations = violations;
    r.max_violation = max_violation;
    const double p = checks ? static_cast<double>(violations) / static_cast<double>(checks) : 0.0;
    r.empirical_prob = p;
    r.bound_value = 0.0;
    r.mc_stderr = checks ? std::sqrt(p * (1.0 - p) / static_cast<double>(checks)) : 0.0;
  }
};

// ---------------------------------------------------------------------------
// Tail-bound bookkeeping: Pr(event) against the Monte Carlo mean of a trace
// statistic, PASS iff empirical <= min(1, bound) + 3 stderr.

struct TailCase {
  std::string label;
  MeanEstimator event;
  MeanEstimator bound;

  double stderr_combined() const { return std::hypot(event.stderr_of_mean(), bound.stderr_of_mean()); }
  double excess() const { return event.mean() - std::min(1.0, bound.mean()) - 3.0 * stderr_combined(); }
};

struct TailTally {
  std::vector<TailCase> cases;
  long draws = 0;

  TailCase& add_case(std::string label) {
    cases.push_back(TailCase{std::move(label), {}, {}});
    return cases.back();
  }

  long failures() const {
    return std::count_if(cases.begin(), cases.end(), [](const TailCase& c) { return c.excess() > 0.0; });
  }

  void notes(Context& ctx) const {
    for (const TailCase& c : cases) {
      const double b = c.bound.mean();
      ctx.note(c.label + ": Pr=" + num(c.event.mean()) + " bound=" + num(b) + (b > 1.0 ? " (clamped to 1)" : "") +
               " stderr=" + num(c.stderr_combined()) + (c.excess() > 0.0 ? " FAIL" : ""));
    }
  }

  void fill(VerificationReport& r) const {
    r.trials = draws * static_cast<long>(cases.size());
    r.violations = failures();
    const TailCase* worst = nullptr;
    for (const TailCase& c : cases) {
      if (!worst || c.excess() > worst->excess()) worst = &c;
    }
    if (!worst) return;
    r.empirical_prob = worst->event.mean();
    r.bound_value = worst->bound.mean();
    r.mc_stderr = worst->stderr_combined();
    r.max_violation = std::max(0.0, worst->excess());
  }
};

// ---------------------------------------------------------------------------
// Majorization bookkeeping: Pr(stat(A) >= kappa) <= Pr(stat(B) >= kappa) on a
// kappa grid of sample deciles, with 3 stderr slack.

struct Comparison {
  double p_small = 0.0;
  double p_large = 0.0;
  double se = 0.0;
  double excess() const { return p_small - p_large - 3.0 * se; }
};

struct MajorTally {
  long comparisons = 0;
  long failures = 0;
  long draws = 0;
  std::optional<Comparison> worst;
  std::vector<std::string> lines;

  void add(const Comparison& c) {
    ++comparisons;
    if (c.excess() > 0.0) ++failures;
    if (!worst || c.excess() > worst->excess()) worst = c;
  }

  void fill(VerificationReport& r) const {
    r.trials = comparisons;
    r.violations = failures;
    if (!worst) return;
    r.empirical_prob = worst->p_small;
    r.bound_value = worst->p_large;
    r.mc_stderr = worst->se;
    r.max_violation = std::max(0.0, worst->excess());
  }
};

double tail_frequency(const std::vector<double>& values, double kappa) {
  long hits = 0;
  for (double v : values) hits += v >= kappa ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

std::vector<double> decile_grid(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) {
    grid.push_back(values[static_cast<std::size_t>(i) * values.size() / 10]);
  }
  return grid;
}

/// small[i] and large[i] are descending spectra for draw i; compares the Ky Fan
/// sum and product tails for every k.
void compare_spectra(const std::string& label, const std::vector<RealVector>& small,
                     const std::vector<RealVector>& large, const std::vector<RealVector>& reference,
                     MajorTally& tally) {
  const auto d = static_cast<std::size_t>(reference.front().size());
  const double n = static_cast<double>(reference.size());
  long fails = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= d; ++k) {
    for (int statistic = 0; statistic < 2; ++statistic) {
      auto stat = [&](const RealVector& v) {
        const KyFanStats s = kyfan_stats(v, k);
        return statistic == 0 ? s.sum : s.product;
      };
      std::vector<double> a, b, ref;
      for (const auto& v : small) a.push_back(stat(v));
      for (const auto& v : large) b.push_back(stat(v));
      for (const auto& v : reference) ref.push_back(stat(v));
      for (double kappa : decile_grid(ref)) {
        Comparison c;
        c.p_small = tail_frequency(a, kappa);
        c.p_large = tail_frequency(b, kappa);
        c.se = std::sqrt(c.p_small * (1 - c.p_small) / n + c.p_large * (1 - c.p_large) / n);
        tally.add(c);
        if (c.excess() > 0.0) ++fails;
        worst = std::max(worst, c.excess());
      }
    }
  }
  tally.lines.push_back(label + ": " + std::to_string(fails) + " of " + std::to_string(d * 2 * 9) +
                        " comparisons fail, worst margin " + num(worst));
}

// ---------------------------------------------------------------------------

VerificationReport power_monotone(Context& ctx) {
  const EnsembleSpec base = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec inc = ctx.increment_ensemble("spectrum:0:0.5");
  const std::vector<double> qs = ctx.exponent_list(
      ctx.cfg.exponents.q, {0.25, 0.5, 0.75, 1.0}, [](double q) { return q > 0 && q <= 1; }, "q", "(0, 1]");
  const double tol = ctx.cfg.tolerance;

  struct Row {
    std::vector<Check> checks;
    Check control;
  };
  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor b = sample(base, t, 0);
    const HermitianTensor a = b + sample(inc, t, 1);
    Row row;
    for (double q : qs) row.checks.push_back(check_leq(psd_power(b, q), psd_power(a, q), tol));
    // For q > 1 the ordering is expected to break.
    row.control = check_leq(psd_power(b, 2.0), psd_power(a, 2.0), tol);
    return row;
  });

  OrderingTally tally;
  long control = 0;
  for (const Row& r : rows) {
    for (const Check& c : r.checks) tally.add(c);
    control += r.control.violated ? 1 : 0;
  }
  tally.fill(ctx.report);
  ctx.note("A = B + P with B ~ " + base.describe() + ", P ~ " + inc.describe() + "; checks B^q <= A^q");
  ctx.note("q grid " + join(qs));
  ctx.note("control q=2 (outside (0, 1]): " + std::to_string(control) + " of " + std::to_string(rows.size()) +
           " pairs break the ordering");
  return ctx.report;
}

VerificationReport kantorovich_suite(Context& ctx) {
  const EnsembleSpec base = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec contraction = ctx.y_ensemble("spectrum:0.2:1");
  const std::vector<double> ps =
      ctx.exponent_list(ctx.cfg.exponents.p, {1.5, 2.0, 3.0}, [](double p) { return p >= 1; }, "p", "[1, inf)");
  const double tol = ctx.cfg.tolerance;

  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor a = sample(base, t, 0);
    HermitianTensor c = sample(contraction, t, 1);
    c *= 1.0 / std::max(1.0, lambda_max(c));
    const HermitianTensor b = congruence(sqrt(a).tensor(), c);  // B <= A
    const RealVector ea = eigenvalues(a);
    const RealVector eb = eigenvalues(b);
    std::vector<Check> checks;
    for (double p : ps) {
      const HermitianTensor ap = psd_power(a, p);
      const HermitianTensor bp = psd_power(b, p);
      // Spectrum bounds of A, then of B.
      const double ka = kantorovich(ea(ea.size() - 1), ea(0), p);
      const double kb = kantorovich(eb(eb.size() - 1), eb(0), p);
      checks.push_back(check_leq(bp, ka * ap, tol));
      checks.push_back(check_leq(bp, kb * ap, tol));
    }
    return checks;
  });

  OrderingTally tally;
  for (const auto& r : rows)
    for (const Check& c : r) tally.add(c);
  tally.fill(ctx.report);
  ctx.note("B = A^{1/2} C A^{1/2} with A ~ " + base.describe() + ", C ~ " + contraction.describe() +
           " scaled to C <= I; checks B^p <= K(m, M, p) A^p");
  ctx.note("p grid " + join(ps) + "; [m, M] taken from the spectrum of A and, separately, of B");
  return ctx.report;
}

VerificationReport markov_chebyshev(Context& ctx) {
  const EnsembleSpec base = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec inc = ctx.increment_ensemble("spectrum:0:0.5");
  const std::vector<double> qs =
      ctx.exponent_list(ctx.cfg.exponents.q, {1.0, 2.0}, [](double q) { return q >= 1; }, "q", "[1, inf)");
  const std::vector<double> cs{0.5, 1.0, 2.0};
  const double tol = ctx.cfg.tolerance;

  struct Row {
    double lmax_x, lmax_y;
    std::vector<double> tr_y, tr_z;  // Tr(Y^q), Tr(Z^q) per q
  };
  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor x = sample(base, t, 0);
    const HermitianTensor y = x + sample(inc, t, 1);
    const HermitianTensor z = y + sample(inc, t, 2);
    Row r{lambda_max(x), lambda_max(y), {}, {}};
    for (double q : qs) {
      r.tr_y.push_back(psd_power(y, q).trace());
      r.tr_z.push_back(psd_power(z, q).trace());
    }
    return r;
  });

  TailTally tally;
  tally.draws = static_cast<long>(rows.size());
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    for (double c : cs) {
      TailCase& upper = tally.add_case("q=" + num(qs[qi]) + " c=" + num(c) + " Pr(Y !<= C) vs Tr(E[Z^q] C^-1)");
      for (const Row& r : rows) {
        upper.event.add(exceeds(r.lmax_y, c, tol) ? 1.0 : 0.0);
        upper.bound.add(r.tr_z[qi] / c);
      }
      TailCase& lower = tally.add_case("q=" + num(qs[qi]) + " c=" + num(c) + " Pr(X !<= C) vs Tr(E[Y^q] C^-1)");
      for (const Row& r : rows) {
        lower.event.add(exceeds(r.lmax_x, c, tol) ? 1.0 : 0.0);
        lower.bound.add(r.tr_y[qi] / c);
      }
    }
  }
  tally.fill(ctx.report);
  ctx.note("chain X <= Y = X + P1 <= Z = Y + P2 with X ~ " + base.describe() + ", P_i ~ " + inc.describe());
  ctx.note("C = c I, c in {0.5, 1, 2}");
  tally.notes(ctx);
  return ctx.report;
}

struct AndoHiaiSetup {
  ConnectionFunction f;
  std::vector<int> ms;
  std::vector<double> qs;
};

VerificationReport ando_hiai(Context& ctx, bool dual) {
  const EnsembleSpec ex = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec ey = ctx.y_ensemble("spectrum:0.5:2");
  const ConnectionFunction f = ctx.function("power:0.5");
  if (!f.tags().normalized) throw UnsupportedFunction("'" + f.label() + "' is not normalized at 1");
  if (!f.tags().tmi && !(dual && f.tags().tmd)) {
    throw UnsupportedFunction("'" + f.label() + "' is not tagged " + (dual ? "TMI or TMD" : "TMI"));
  }
  const std::vector<int> ms = ctx.order_list(ctx.cfg.exponents.m, {2, 3});
  const std::vector<double> qs =
      ctx.exponent_list(ctx.cfg.exponents.q, {0.5, 1.0, 2.0}, [](double q) { return q > 0; }, "q", "(0, inf)");
  const double tol = ctx.cfg.tolerance;
  const PremiseDirection direction = dual ? PremiseDirection::kAboveIdentity : PremiseDirection::kBelowIdentity;

  std::vector<ConnectionFunction> lifted, inner;
  for (int m : ms) {
    lifted.push_back(power_lift(f, m));
    inner.push_back(ando_hiai_g(f, m));
  }
  std::vector<double> constants;  // M1 (or M2) per q
  for (double q : qs) {
    const PmiCertificate cert = dual ? check_pmd(f, {q}, probe_grid()) : check_pmi(f, {q}, probe_grid());
    constants.push_back(cert.m_estimate);
  }

  struct Row {
    std::vector<Check> checks;
    double bound_min = std::numeric_limits<double>::infinity();
    double bound_max = 0.0;
    double recursion_gap = 0.0;
  };
  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor x0 = sample(ex, t, 0);
    const HermitianTensor y0 = sample(ey, t, 1);
    Row row;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const PremiseResult pr = enforce_premise(x0, y0, lifted[mi], direction);
      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        const double q = qs[qi];
        const HermitianTensor xq = power(pr.x, q);
        const HermitianTensor yq = power(pr.y, q);
        const HermitianTensor value = mean_pd(xq, yq, lifted[mi]);
        const BoundFactors bf = kk_factors(pr.x, inner[mi], ms[mi], q);
        Check c;
        double bound = 0.0;
        if (!dual) {
          bound = constants[qi] * bf.kk_product;
          const double top = lambda_max(value);
          c.violated = top > bound + tol;
          c.excess = std::max(0.0, top - bound);
        } else {
          bound = 1.0 / (constants[qi] * bf.kk_product);
          const double bottom = lambda_min(value);
          c.violated = bottom < bound - tol;
          c.excess = std::max(0.0, bound - bottom);
        }
        row.checks.push_back(c);
        row.bound_min = std::min(row.bound_min, bound);
        row.bound_max = std::max(row.bound_max, bound);

        const int n = ctx.cfg.exponents.n.value_or(ms[mi]);
        const HermitianTensor direct = n == ms[mi] ? value : mean_pd(xq, yq, power_lift(f, n));
        const HermitianTensor recursive = mean_recursive(xq, yq, f, n);
        const double scale = std::max(1.0, gauge_norm(direct, GaugeNorm::frobenius()));
        row.recursion_gap =
            std::max(row.recursion_gap, gauge_norm(recursive - direct, GaugeNorm::frobenius()) / scale);
      }
    }
    return row;
  });

  OrderingTally tally;
  double bmin = std::numeric_limits<double>::infinity(), bmax = 0.0, rec = 0.0;
  for (const Row& r : rows) {
    for (const Check& c : r.checks) tally.add(c);
    bmin = std::min(bmin, r.bound_min);
    bmax = std::max(bmax, r.bound_max);
    rec = std::max(rec, r.recursion_gap);
  }
  tally.fill(ctx.report);
  ctx.report.bound_value = dual ? bmin : bmax;
  std::string ms_text;
  for (int m : ms) ms_text += (ms_text.empty() ? "" : ",") + std::to_string(m);
  ctx.note(std::string("premise X #_{x^m f} Y ") + (dual ? ">=" : "<=") + " I enforced by joint rescaling");
  ctx.note("f = " + f.label() + " tagged " + f.tags().describe() +
           (dual ? "; the dual statement accepts either monotonicity tag" : ""));
  ctx.note(std::string(dual ? "pmd" : "pmi") + " working definition: f(x^q) " + (dual ? ">=" : "<=") +
           " f(x)^q up to a constant on the probe grid; constants per q " + join(constants));
  ctx.note("m in {" + ms_text + "}, q grid " + join(qs) + "; X ~ " + ex.describe() + ", Y ~ " + ey.describe());
  ctx.note(std::string(dual ? "checks lambda_min(X^q # Y^q) >= (M2 prod K_k)^-1" :
                              "checks lambda_max(X^q # Y^q) <= M1 prod K_k") +
           "; bound range [" + num(bmin) + ", " + num(bmax) + "]");
  ctx.note("two-step recursion vs direct lift, worst relative gap " + num(rec));
  return ctx.report;
}

VerificationReport lie_trotter_limit(Context& ctx) {
  const ConnectionFunction g = ctx.function("geometric");
  if (!g.tags().normalized) throw UnsupportedFunction("'" + g.label() + "' is not normalized at 1");
  const std::vector<double> grid = default_q_grid();
  const auto d = static_cast<Eigen::Index>(ctx.cfg.shape.side());

  struct Row {
    Check noncommuting;
    Check commuting;
    double final_error = 0.0;
    double ratio = 0.0;
    double commuting_gap = 0.0;
  };
  const auto rows = ctx.trials([&](long t) {
    std::mt19937_64 rx = trial_rng(ctx.seed, static_cast<std::uint64_t>(t), 0);
    std::mt19937_64 ry = trial_rng(ctx.seed, static_cast<std::uint64_t>(t), 1);
    const HermitianTensor x = random_hermitian(rx, ctx.cfg.shape, 0.05, 1.0);
    const HermitianTensor y = random_hermitian(ry, ctx.cfg.shape, 0.05, 1.0);
    const ConvergenceStudy s = convergence_study(x, y, g, grid, ctx.norm);
    Row row;
    row.final_error = s.final_relative_error;
    double excess = std::max(0.0, s.final_relative_error - 1e-2);
    for (std::size_t i = 1; i < s.distances.size(); ++i) {
      if (s.distances[i - 1] > 0) row.ratio = std::max(row.ratio, s.distances[i] / s.distances[i - 1]);
      excess = std::max(excess, s.distances[i] - 1.05 * s.distances[i - 1] - 1e-12);
    }
    row.noncommuting = {!s.monotone || s.final_relative_error > 1e-2, excess};

    // Commuting pair: the tensor expression must match the scalar one per eigenvalue.
    std::mt19937_64 rc = trial_rng(ctx.seed, static_cast<std::uint64_t>(t), 2);
    const Matrix u = random_unitary(rc, d);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    RealVector a(d), b(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      a(i) = unif(rc);
      b(i) = unif(rc);
    }
    auto build = [&](const RealVector& v) {
      return HermitianTensor(ctx.cfg.shape, u * v.cast<Complex>().asDiagonal() * u.adjoint());
    };
    const HermitianTensor cx = build(a);
    const HermitianTensor cy = build(b);
    double gap = 0.0;
    for (double q : grid) {
      RealVector scalar(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double ex = std::exp(q * a(i)), ey = std::exp(q * b(i));
        scalar(i) = std::pow(ey * g(ex / ey), 1.0 / q);
      }
      const HermitianTensor diff = lt_expression(q, cx, cy, g) - build(scalar);
      gap = std::max(gap, gauge_norm(diff, ctx.norm) / std::max(1.0, gauge_norm(build(scalar), ctx.norm)));
    }
    row.commuting_gap = gap;
    row.commuting = {gap > 1e-9, gap};
    return row;
  });

  OrderingTally tally;
  double worst_final = 0.0, worst_ratio = 0.0, worst_commuting = 0.0;
  for (const Row& r : rows) {
    tally.add(r.noncommuting);
    tally.add(r.commuting);
    worst_final = std::max(worst_final, r.final_error);
    worst_ratio = std::max(worst_ratio, r.ratio);
    worst_commuting = std::max(worst_commuting, r.commuting_gap);
  }
  tally.fill(ctx.report);
  ctx.note("g = " + g.label() + ", limit weight g'(1) = " + num(g.derivative_at_1()));
  ctx.note("Hermitian pairs with spectral norm in [0.05, 1]; q grid 2^-1 .. 2^-8; norm " + ctx.cfg.norm);
  ctx.note("noncommuting: worst final relative error " + num(worst_final) + " (limit 1e-2), worst d(q/2)/d(q) " +
           num(worst_ratio) + " (limit 1.05)");
  ctx.note("commuting: worst relative gap to the scalar formula " + num(worst_commuting) + " (limit 1e-9)");
  return ctx.report;
}

VerificationReport lie_trotter_tail(Context& ctx) {
  const EnsembleSpec ex = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec ey = ctx.y_ensemble("spectrum:0.5:2");
  const ConnectionFunction f = ctx.function("power:0.5");
  if (!f.tags().normalized) throw UnsupportedFunction("'" + f.label() + "' is not normalized at 1");
  const std::vector<int> ms = ctx.order_list(ctx.cfg.exponents.m, {1, 2});
  const std::vector<double> qs = ctx.exponent_list(
      ctx.cfg.exponents.q, {0.25}, [](double q) { return q > 0 && q <= 0.5; }, "q", "(0, 1/2]");
  const double q = qs.front();
  const double tol = ctx.cfg.tolerance;
  const auto d = static_cast<Eigen::Index>(ctx.cfg.shape.side());
  const std::vector<double> cs{0.5, 1.0, 2.0};

  struct Case {
    Check check;
    bool commuting_violated = false;
    double lmax_log_affine = 0.0, lmax_root = 0.0;
    double tr_log_affine = 0.0, tr_root = 0.0;
  };
  // cases ordered as (branch, m)
  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor x0 = sample(ex, t, 0);
    const HermitianTensor y0 = sample(ey, t, 1);
    std::mt19937_64 rc = trial_rng(ctx.seed, static_cast<std::uint64_t>(t), 2);
    const Matrix u = random_unitary(rc, d);
    std::uniform_real_distribution<double> unif(0.5, 2.0);
    RealVector a(d), b(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      a(i) = unif(rc);
      b(i) = unif(rc);
    }
    const HermitianTensor cx(ctx.cfg.shape, u * a.cast<Complex>().asDiagonal() * u.adjoint());
    const HermitianTensor cy(ctx.cfg.shape, u * b.cast<Complex>().asDiagonal() * u.adjoint());

    std::vector<Case> out;
    for (PowerBranch branch : {PowerBranch::kPmi, PowerBranch::kPmd}) {
      const PremiseDirection dir =
          branch == PowerBranch::kPmi ? PremiseDirection::kBelowIdentity : PremiseDirection::kAboveIdentity;
      for (int m : ms) {
        const ConnectionFunction lifted = power_lift(f, m);
        const PremiseResult pr = enforce_premise(x0, y0, lifted, dir);
        const OrderingCheck oc = lt_ordering_check(pr.x, pr.y, f, m, q, branch, tol);
        Case c;
        const double excess =
            branch == PowerBranch::kPmi ? std::max(0.0, -oc.verdict.min_gap) : std::max(0.0, oc.verdict.max_gap);
        c.check = {!oc.claim_holds, oc.claim_holds ? 0.0 : excess};
        c.lmax_log_affine = lambda_max(oc.log_affine);
        c.lmax_root = lambda_max(oc.root_mean);
        c.tr_log_affine = oc.log_affine.trace();
        c.tr_root = oc.root_mean.trace();
        const PremiseResult cp = enforce_premise(cx, cy, lifted, dir);
        c.commuting_violated = !lt_ordering_check(cp.x, cp.y, f, m, q, branch, tol).claim_holds;
        out.push_back(c);
      }
    }
    return out;
  });

  OrderingTally tally;
  std::vector<long> per_case(2 * ms.size(), 0), commuting(2 * ms.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      tally.add(r[i].check);
      per_case[i] += r[i].check.violated ? 1 : 0;
      commuting[i] += r[i].commuting_violated ? 1 : 0;
    }
  }

  // Tail statements with r = 1, C = c s I and s the sample mean of the
  // largest eigenvalue of the tensor inside the event.
  TailTally tails;
  tails.draws = static_cast<long>(rows.size());
  for (std::size_t i = 0; i < 2 * ms.size(); ++i) {
    const bool pmi = i < ms.size();
    MeanEstimator level;
    for (const auto& r : rows) level.add(pmi ? r[i].lmax_log_affine : r[i].lmax_root);
    const double s = level.mean();
    for (double c : cs) {
      TailCase& tc = tails.add_case(std::string(pmi ? "pmi" : "pmd") + " m=" + std::to_string(ms[i % ms.size()]) +
                                    " c=" + num(c) + " tail");
      for (const auto& r : rows) {
        tc.event.add(exceeds(pmi ? r[i].lmax_log_affine : r[i].lmax_root, c * s, tol) ? 1.0 : 0.0);
        tc.bound.add((pmi ? r[i].tr_root : r[i].tr_log_affine) / (c * s));
      }
    }
  }

  tally.fill(ctx.report);
  ctx.report.trials += tails.draws * static_cast<long>(tails.cases.size());
  ctx.report.violations += tails.failures();
  ctx.note("premise X #_{x^m f} Y <= I (pmi) / >= I (pmd) enforced by joint rescaling; f = " + f.label() +
           ", q = " + num(q));
  ctx.note("checks exp(w log X + (1 - w) log Y) <= (X^q #_{x^m f} Y^q)^{1/q} (pmi) and >= (pmd), w = m + f'(1)");
  for (std::size_t i = 0; i < 2 * ms.size(); ++i) {
    ctx.note(std::string(i < ms.size() ? "pmi" : "pmd") + " m=" + std::to_string(ms[i % ms.size()]) + ": " +
             std::to_string(per_case[i]) + " of " + std::to_string(rows.size()) +
             " noncommuting pairs violate the ordering; commuting control: " + std::to_string(commuting[i]));
  }
  ctx.note("tail statements use r = 1 and C = c s I with s the sample mean of lambda_max of the event tensor");
  tails.notes(ctx);
  return ctx.report;
}

// ---------------------------------------------------------------------------
// Extended ordering families on PSD pairs.  The means here put X on the outside:
// X #_f Y = X^{1/2} f(eta(Y, X)) X^{1/2}.

HermitianTensor outer_x_mean(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f) {
  return mean_psd(y, x, f);
}

enum class Family { kIncreasing, kDecreasing };

struct SandwichRow {
  // per q
  std::vector<RealVector> lower, middle, upper;
  std::vector<double> tr_upper_p, tr_middle_p;
  std::vector<Check> middle_le_upper, lower_le_middle;
  // the same orderings with lambda_min/lambda_max swapped in the scalings
  std::vector<Check> stated_upper, stated_lower;
};

struct SandwichSetup {
  ConnectionFunction f;
  EnsembleSpec ex, ey;
  std::vector<double> qs;
  double p = 1.0;
};

SandwichSetup sandwich_setup(Context& ctx, Family family) {
  const bool inc = family == Family::kIncreasing;
  SandwichSetup s{ctx.function(inc ? "arithmetic" : "reciprocal:arithmetic"), ctx.x_ensemble("spectrum:0.5:2"),
                  ctx.y_ensemble("rank:2"), {}, 1.0};
  const ClassTags& tags = s.f.tags();
  if (!tags.normalized || !(inc ? tags.tmi : tags.tmd)) {
    throw UnsupportedFunction("'" + s.f.label() + "' must be " + (inc ? "TMI" : "TMD") + " and normalized here");
  }
  if (!s.f.finite_at_0plus()) throw UnsupportedFunction("'" + s.f.label() + "' is unbounded at 0+");
  s.qs = ctx.exponent_list(ctx.cfg.exponents.q, {0.5, 1.5, 3.0}, [](double q) { return q > 0; }, "q", "(0, inf)");
  s.p = ctx.cfg.exponents.p.value_or(1.0);
  return s;
}

std::vector<SandwichRow> sandwich_rows(Context& ctx, const SandwichSetup& s, Family family) {
  const bool inc = family == Family::kIncreasing;
  const double tol = ctx.cfg.tolerance;
  const MeanFn mean = [&](const HermitianTensor& a, const HermitianTensor& b) { return outer_x_mean(a, b, s.f); };
  return ctx.trials([&](long t) {
    const PremiseResult pr =
        enforce_premise(sample(s.ex, t, 0), sample(s.ey, t, 1), mean,
                        inc ? PremiseDirection::kAboveIdentity : PremiseDirection::kBelowIdentity);
    const HermitianTensor m = mean(pr.x, pr.y);
    const double lo = lambda_min(m), hi = lambda_max(m);
    SandwichRow row;
    for (double q : s.qs) {
      const HermitianTensor value = mean(psd_power(pr.x, q), psd_power(pr.y, q));
      const FactorPair fp = inc ? psi_factors(q, s.f, pr.x, pr.y) : phi_factors(q, s.f, pr.x, pr.y);
      // Commuting scalars give X^q # Y^q = r (X # Y)^q with r in [fp.lower, fp.upper],
      // and (X # Y)^q sits between lambda_min^{q-1} and lambda_max^{q-1} times X # Y.
      const double small = std::pow(q >= 1.0 ? lo : hi, q - 1.0);
      const double large = std::pow(q >= 1.0 ? hi : lo, q - 1.0);
      const HermitianTensor upper = (fp.upper * large) * m;
      const HermitianTensor lower = (fp.lower * small) * m;
      double stated_up = fp.upper, stated_low = fp.lower;
      if (q < 1.0 && inc) std::swap(stated_up, stated_low);
      row.stated_upper.push_back(check_leq(value, (stated_up * std::pow(lo, q - 1.0)) * m, tol));
      row.stated_lower.push_back(check_leq((stated_low * std::pow(hi, q - 1.0)) * m, value, tol));
      row.upper.push_back(eigenvalues(upper));
      row.middle.push_back(eigenvalues(value));
      row.lower.push_back(eigenvalues(lower));
      row.tr_upper_p.push_back(psd_power(upper, s.p).trace());
      row.tr_middle_p.push_back(psd_power(value, s.p).trace());
      row.middle_le_upper.push_back(check_leq(value, upper, tol));
      row.lower_le_middle.push_back(check_leq(lower, value, tol));
    }
    return row;
  });
}

void sandwich_notes(Context& ctx, const SandwichSetup& s, Family family, const std::vector<SandwichRow>& rows) {
  const bool inc = family == Family::kIncreasing;
  const char* factor = inc ? "Psi" : "Phi";
  ctx.note(std::string("premise X #_f Y ") + (inc ? ">=" : "<=") + " I enforced by joint rescaling; X #_f Y = X^{1/2} f(eta(Y, X)) X^{1/2}");
  ctx.note("f = " + s.f.label() + " tagged " + s.f.tags().describe() + "; X ~ " + s.ex.describe() + ", Y ~ " +
           s.ey.describe() + "; q grid " + join(s.qs) + ", p = " + num(s.p));
  ctx.note(std::string("upper tensor ") + factor + "_upper lambda^{q-1}(X # Y) X # Y and lower tensor " + factor +
           "_lower lambda^{q-1}(X # Y) X # Y, taking lambda_max^{q-1} above and lambda_min^{q-1} below for q >= 1 "
           "(reversed for q < 1)");
  ctx.note(std::string("swapped form: q >= 1 puts lambda_min^{q-1} in the upper tensor") +
           (inc ? " and q < 1 pairs the upper tensor with the smaller ratio extreme" : "") +
           "; tracked below as 'swapped', informational only");
  for (std::size_t qi = 0; qi < s.qs.size(); ++qi) {
    long up = 0, low = 0, sup = 0, slow = 0;
    for (const auto& r : rows) {
      up += r.middle_le_upper[qi].violated ? 1 : 0;
      low += r.lower_le_middle[qi].violated ? 1 : 0;
      sup += r.stated_upper[qi].violated ? 1 : 0;
      slow += r.stated_lower[qi].violated ? 1 : 0;
    }
    ctx.note("q=" + num(s.qs[qi]) + " orderings of " + std::to_string(rows.size()) + ": X^q # Y^q above upper " +
             std::to_string(up) + ", lower above X^q # Y^q " + std::to_string(low) + "; swapped " +
             std::to_string(sup) + " and " + std::to_string(slow));
  }
}

VerificationReport sandwich_tail(Context& ctx, Family family) {
  const SandwichSetup s = sandwich_setup(ctx, family);
  const auto rows = sandwich_rows(ctx, s, family);
  const double tol = ctx.cfg.tolerance;
  const std::vector<double> cs{0.5, 1.0, 2.0};
  TailTally tally;
  tally.draws = static_cast<long>(rows.size());
  for (std::size_t qi = 0; qi < s.qs.size(); ++qi) {
    MeanEstimator level_mid, level_low;
    for (const auto& r : rows) {
      level_mid.add(r.middle[qi](0));
      level_low.add(r.lower[qi](0));
    }
    for (double c : cs) {
      TailCase& a = tally.add_case("q=" + num(s.qs[qi]) + " c=" + num(c) + " Pr(X^q # Y^q !<= C) vs upper trace");
      const double ca = c * level_mid.mean();
      for (const auto& r : rows) {
        a.event.add(exceeds(r.middle[qi](0), ca, tol) ? 1.0 : 0.0);
        a.bound.add(r.tr_upper_p[qi] / ca);
      }
      TailCase& b = tally.add_case("q=" + num(s.qs[qi]) + " c=" + num(c) + " Pr(lower !<= C) vs Tr(E[(X^q # Y^q)^p] C^-1)");
      const double cb = c * level_low.mean();
      for (const auto& r : rows) {
        b.event.add(exceeds(r.lower[qi](0), cb, tol) ? 1.0 : 0.0);
        b.bound.add(r.tr_middle_p[qi] / cb);
      }
    }
  }
  tally.fill(ctx.report);
  sandwich_notes(ctx, s, family, rows);
  ctx.note("C = c s I, c in {0.5, 1, 2}, s the sample mean of lambda_max of the event tensor");
  tally.notes(ctx);
  return ctx.report;
}

VerificationReport sandwich_majorization(Context& ctx, Family family) {
  const SandwichSetup s = sandwich_setup(ctx, family);
  const auto rows = sandwich_rows(ctx, s, family);
  MajorTally tally;
  for (std::size_t qi = 0; qi < s.qs.size(); ++qi) {
    std::vector<RealVector> lower, middle, upper;
    for (const auto& r : rows) {
      lower.push_back(r.lower[qi]);
      middle.push_back(r.middle[qi]);
      upper.push_back(r.upper[qi]);
    }
    compare_spectra("q=" + num(s.qs[qi]) + " lower vs X^q # Y^q", lower, middle, middle, tally);
    compare_spectra("q=" + num(s.qs[qi]) + " X^q # Y^q vs upper", middle, upper, middle, tally);
  }
  tally.fill(ctx.report);
  sandwich_notes(ctx, s, family, rows);
  ctx.note("Ky Fan sums and products for k = 1..D on the deciles of the middle statistic; 3 stderr slack");
  for (const auto& l : tally.lines) ctx.note(l);
  return ctx.report;
}

// Convex family: premise <= I gives an upper scalar, >= I a lower one.
struct ConvexRow {
  std::vector<RealVector> middle_below, middle_above;  // X^q # Y^q under each premise
  std::vector<double> upper_scalar, lower_scalar;
  std::vector<double> tr_middle_above_p;
  std::vector<Check> upper_check, lower_check;
};

struct ConvexSetup {
  ConnectionFunction g;
  EnsembleSpec ex, ey;
  std::vector<double> qs;
  double p = 1.0;
};

ConvexSetup convex_setup(Context& ctx) {
  ConvexSetup s{ctx.function("square"), ctx.x_ensemble("spectrum:0.5:2"), ctx.y_ensemble("spectrum:0.5:2"), {}, 1.0};
  if (!s.g.tags().tc || !s.g.tags().normalized) {
    throw UnsupportedFunction("'" + s.g.label() + "' must be TC and normalized here");
  }
  if (!s.g.finite_at_0plus()) throw UnsupportedFunction("'" + s.g.label() + "' is unbounded at 0+");
  s.qs = ctx.exponent_list(ctx.cfg.exponents.q, {1.5, 2.0}, [](double q) { return q >= 1; }, "q", "[1, inf)");
  s.p = ctx.cfg.exponents.p.value_or(1.0);
  return s;
}

std::vector<ConvexRow> convex_rows(Context& ctx, const ConvexSetup& s) {
  const double tol = ctx.cfg.tolerance;
  const auto d = static_cast<double>(ctx.cfg.shape.side());
  const MeanFn mean = [&](const HermitianTensor& a, const HermitianTensor& b) { return outer_x_mean(a, b, s.g); };
  const HermitianTensor id = HermitianTensor::identity(ctx.cfg.shape);
  return ctx.trials([&](long t) {
    const HermitianTensor x0 = sample(s.ex, t, 0);
    const HermitianTensor y0 = sample(s.ey, t, 1);
    ConvexRow row;
    for (int regime = 0; regime < 2; ++regime) {
      const PremiseResult pr = enforce_premise(
          x0, y0, mean, regime == 0 ? PremiseDirection::kBelowIdentity : PremiseDirection::kAboveIdentity);
      const HermitianTensor m = mean(pr.x, pr.y);
      const EtaResult e = eta(pr.y, pr.x);
      if (!is_pd(e.eta)) throw UnsupportedFunction("convex suites need eta(Y, X) invertible; use a PD Y ensemble");
      const HermitianTensor z = inverse(e.eta);
      for (double q : s.qs) {
        const HermitianTensor value = mean(psd_power(pr.x, q), psd_power(pr.y, q));
        const FactorPair k = convex_kantorovich_factors(pr.x, q);
        const double ratio = power_ratio_extremes(z, s.g, q).upper;
        const double base = std::pow(lambda_min(m), 1.0 - q) * ratio;
        if (regime == 0) {
          const double b = k.lower * base * k.upper;
          row.middle_below.push_back(eigenvalues(value));
          row.upper_scalar.push_back(b);
          row.upper_check.push_back(check_leq(value, b * id, tol));
        } else {
          const double b = base / k.upper;
          row.middle_above.push_back(eigenvalues(value));
          row.lower_scalar.push_back(b);
          row.tr_middle_above_p.push_back(psd_power(value, s.p).trace());
          row.lower_check.push_back(check_leq(b * id, value, tol));
        }
      }
    }
    (void)d;
    return row;
  });
}

void convex_notes(Context& ctx, const ConvexSetup& s, const std::vector<ConvexRow>& rows) {
  ctx.note("premises X #_g Y <= I and >= I enforced separately by joint rescaling; X #_g Y = X^{1/2} g(eta(Y, X)) X^{1/2}");
  ctx.note("g = " + s.g.label() + " tagged " + s.g.tags().describe() + "; X ~ " + s.ex.describe() + ", Y ~ " +
           s.ey.describe() + "; q grid " + join(s.qs) + ", p = " + num(s.p) + "; Z = eta(Y, X)^-1");
  for (std::size_t qi = 0; qi < s.qs.size(); ++qi) {
    long up = 0, low = 0;
    for (const auto& r : rows) {
      up += r.upper_check[qi].violated ? 1 : 0;
      low += r.lower_check[qi].violated ? 1 : 0;
    }
    ctx.note("q=" + num(s.qs[qi]) + " ordering diagnostics: above the K1 K2 scalar in " + std::to_string(up) + " of " +
             std::to_string(rows.size()) + ", below the K2^-1 scalar in " + std::to_string(low));
  }
}

VerificationReport convex_tail(Context& ctx) {
  const ConvexSetup s = convex_setup(ctx);
  const auto rows = convex_rows(ctx, s);
  const double tol = ctx.cfg.tolerance;
  const auto d = static_cast<double>(ctx.cfg.shape.side());
  const std::vector<double> cs{0.5, 1.0, 2.0};
  TailTally tally;
  tally.draws = static_cast<long>(rows.size());
  for (std::size_t qi = 0; qi < s.qs.size(); ++qi) {
    MeanEstimator level_mid, level_low;
    for (const auto& r : rows) {
      level_mid.add(r.middle_below[qi](0));
      level_low.add(r.lower_scalar[qi]);
    }
    for (double c : cs) {
      TailCase& a = tally.add_case("q=" + num(s.qs[qi]) + " c=" + num(c) + " Pr(X^q # Y^q !<= C) vs K1 K2 trace");
      const double ca = c * level_mid.mean();
      for (const auto& r : rows) {
        a.event.add(exceeds(r.middle_below[qi](0), ca, tol) ? 1.0 : 0.0);
        a.bound.add(d * std::pow(r.upper_scalar[qi], s.p) / ca);
      }
      TailCase& b = tally.add_case("q=" + num(s.qs[qi]) + " c=" + num(c) + " Pr(K2^-1 scalar !<= C) vs Tr(E[(X^q # Y^q)^p] C^-1)");
      const double cb = c * level_low.mean();
      for (const auto& r : rows) {
        b.event.add(exceeds(r.lower_scalar[qi], cb, tol) ? 1.0 : 0.0);
        b.bound.add(r.tr_middle_above_p[qi] / cb);
      }
    }
  }
  tally.fill(ctx.report);
  convex_notes(ctx, s, rows);
  ctx.note("C = c s I, c in {0.5, 1, 2}, s the sample mean of lambda_max of the event tensor");
  tally.notes(ctx);
  return ctx.report;
}

VerificationReport convex_majorization(Context& ctx) {
  const ConvexSetup s = convex_setup(ctx);
  const auto rows = convex_rows(ctx, s);
  const auto d = static_cast<Eigen::Index>(ctx.cfg.shape.side());
  MajorTally tally;
  for (std::size_t qi = 0; qi < s.qs.size(); ++qi) {
    std::vector<RealVector> below, upper, above, lower;
    for (const auto& r : rows) {
      below.push_back(r.middle_below[qi]);
      upper.push_back(RealVector::Constant(d, r.upper_scalar[qi]));
      above.push_back(r.middle_above[qi]);
      lower.push_back(RealVector::Constant(d, r.lower_scalar[qi]));
    }
    compare_spectra("q=" + num(s.qs[qi]) + " X^q # Y^q vs K1 K2 scalar (premise <= I)", below, upper, below, tally);
    compare_spectra("q=" + num(s.qs[qi]) + " K2^-1 scalar vs X^q # Y^q (premise >= I)", lower, above, above, tally);
  }
  tally.fill(ctx.report);
  convex_notes(ctx, s, rows);
  ctx.note("Ky Fan sums and products for k = 1..D on the deciles of the X^q # Y^q statistic; 3 stderr slack");
  for (const auto& l : tally.lines) ctx.note(l);
  return ctx.report;
}

// ---------------------------------------------------------------------------

VerificationReport psd_limit(Context& ctx) {
  std::vector<ConnectionFunction> gs;
  if (ctx.cfg.function) {
    gs.push_back(ctx.function(""));
  } else {
    gs = {geometric_fn(), square_fn()};
  }
  const EnsembleSpec ey = ctx.y_ensemble("rank:2");
  const EnsembleSpec inner = ctx.x_ensemble("spectrum:0.5:2");
  const std::vector<double> eps{1e-2, 1e-4, 1e-6, 1e-8};

  struct Row {
    std::vector<Check> checks;
    double final_eps = 0.0, final_seq = 0.0;
  };
  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor y = sample(ey, t, 1);
    const HermitianTensor x = congruence(sqrt(y).tensor(), sample(inner, t, 0));  // range(X) inside range(Y)
    const HermitianTensor w = sample(inner, t, 2);
    std::vector<HermitianTensor> seq;
    for (double e : eps) seq.push_back(e * w);
    Row row;
    for (const ConnectionFunction& g : gs) {
      const RttDiagnostic a = epsilon_mean_limit(x, y, g, eps, ctx.norm).second;
      row.checks.push_back({!a.strictly_decreasing || a.final_relative_error > 1e-3,
                            std::max(0.0, a.final_relative_error - 1e-3)});
      const RttDiagnostic b = perturbation_sequence_limit(x, y, g, seq, ctx.norm).second;
      row.checks.push_back({!b.converged, std::max(0.0, b.final_relative_error - 1e-3)});
      row.final_eps = std::max(row.final_eps, a.final_relative_error);
      row.final_seq = std::max(row.final_seq, b.final_relative_error);
    }
    return row;
  });

  OrderingTally tally;
  double fe = 0.0, fs = 0.0;
  for (const Row& r : rows) {
    for (const Check& c : r.checks) tally.add(c);
    fe = std::max(fe, r.final_eps);
    fs = std::max(fs, r.final_seq);
  }
  tally.fill(ctx.report);
  std::string labels;
  for (const auto& g : gs) labels += (labels.empty() ? "" : ", ") + g.label();
  ctx.note("g in {" + labels + "}; Y ~ " + ey.describe() + ", X = Y^{1/2} E Y^{1/2} with E ~ " + inner.describe());
  ctx.note("(X + eps I) # (Y + eps I) for eps in {1e-2, 1e-4, 1e-6, 1e-8}: strictly decreasing error, final <= 1e-3 relative; worst final " + num(fe));
  ctx.note("X # (Y + A_n) with A_n = eps_n W, W ~ " + inner.describe() + ": nonincreasing error, final <= 1e-3 relative; worst final " + num(fs));
  return ctx.report;
}

VerificationReport joint_convexity(Context& ctx) {
  const ConnectionFunction g = ctx.function("square");
  if (!g.tags().tc) throw UnsupportedFunction("'" + g.label() + "' is not tagged operator convex");
  if (!g.finite_at_0plus()) throw UnsupportedFunction("'" + g.label() + "' is unbounded at 0+");
  const EnsembleSpec ex = ctx.x_ensemble("rank:2");
  const EnsembleSpec ey = ctx.y_ensemble("spectrum:0.5:2");
  const std::vector<double> weights{0.25, 0.5, 0.75};
  const double tol = ctx.cfg.tolerance;

  const auto rows = ctx.trials([&](long t) {
    const HermitianTensor x1 = sample(ex, t, 0), x2 = sample(ex, t, 1);
    const HermitianTensor y1 = sample(ey, t, 2), y2 = sample(ey, t, 3);
    const HermitianTensor m1 = mean_psd(x1, y1, g), m2 = mean_psd(x2, y2, g);
    std::vector<Check> checks;
    for (double w : weights) {
      const HermitianTensor mixed = mean_psd(w * x1 + (1 - w) * x2, w * y1 + (1 - w) * y2, g);
      checks.push_back(check_leq(mixed, w * m1 + (1 - w) * m2, tol));
    }
    return checks;
  });
  OrderingTally tally;
  for (const auto& r : rows)
    for (const Check& c : r) tally.add(c);
  tally.fill(ctx.report);
  ctx.note("g = " + g.label() + " (g(0+) = " + num(g.value_at_0plus()) + "); pairs X ~ " + ex.describe() +
           " dominated by Y ~ " + ey.describe());
  ctx.note("checks (wX1 + (1-w)X2) # (wY1 + (1-w)Y2) <= w X1 # Y1 + (1-w) X2 # Y2 for w in {0.25, 0.5, 0.75}");
  return ctx.report;
}

VerificationReport fusion(Context& ctx) {
  const ConnectionFunction g = ctx.function("square");
  // Second regime: a convex function with the other kind of value at 0+.
  const ConnectionFunction alt = g.value_at_0plus() == 0.0 ? parse_function("reciprocal:arithmetic") : square_fn();
  const EnsembleSpec ex = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec ey = ctx.y_ensemble("spectrum:0.5:2");
  const double tol = ctx.cfg.tolerance;

  const auto rows = ctx.trials([&](long t) {
    const DominationPair p1 = DominationPair::make(sample(ex, t, 0), sample(ey, t, 1), DominationSide::kLeft);
    const DominationPair p2 = DominationPair::make(sample(ex, t, 2), sample(ey, t, 3), DominationSide::kLeft);
    std::array<Check, 2> out;
    const ConnectionFunction* fns[2] = {&g, &alt};
    for (int i = 0; i < 2; ++i) {
      const GapResult r = fusion_gap(p1, p2, *fns[i], tol);
      const bool ok = leq_or_eq(r.verdict);
      out[static_cast<std::size_t>(i)] = {!ok, ok ? 0.0 : std::max(0.0, -r.gap)};
    }
    return out;
  });
  OrderingTally tally;
  long counts[2] = {0, 0};
  for (const auto& r : rows) {
    for (int i = 0; i < 2; ++i) {
      tally.add(r[static_cast<std::size_t>(i)]);
      counts[i] += r[static_cast<std::size_t>(i)].violated ? 1 : 0;
    }
  }
  tally.fill(ctx.report);
  ctx.note("left-dominated PD quadruples, X ~ " + ex.describe() + ", Y ~ " + ey.describe() +
           "; checks (X1 + X2) # (Y1 + Y2) <= X1 # Y1 + X2 # Y2");
  const ConnectionFunction* fns[2] = {&g, &alt};
  for (int i = 0; i < 2; ++i) {
    ctx.note("regime g(0+) = " + num(fns[i]->value_at_0plus()) + " (" + fns[i]->label() + "): " +
             std::to_string(counts[i]) + " of " + std::to_string(rows.size()) + " violations");
  }
  return ctx.report;
}

VerificationReport linear_transform(Context& ctx) {
  const ConnectionFunction g = ctx.function("square");
  const EnsembleSpec ex = ctx.x_ensemble("spectrum:0.5:2");
  const EnsembleSpec ey = ctx.y_ensemble("spectrum:0.5:2");
  const double tol = ctx.cfg.tolerance;
  const TensorShape& shape = ctx.cfg.shape;
  const std::size_t side = shape.side();

  std::optional<PositiveLinearMap> fixed;
  if (ctx.cfg.map) fixed = parse_map(*ctx.cfg.map);
  Pinching halves;
  {
    std::vector<std::size_t> first, second;
    for (std::size_t i = 0; i < side; ++i) (i < side / 2 ? first : second).push_back(i);
    if (!first.empty()) halves.blocks.push_back(first);
    if (!second.empty()) halves.blocks.push_back(second);
  }

  struct Row {
    std::vector<Check> checks;
    Check unitary;
    double unitary_gap = 0.0;
  };
  const auto rows = ctx.trials([&](long t) {
    const DominationPair pair = DominationPair::make(sample(ex, t, 0), sample(ey, t, 1), DominationSide::kLeft);
    std::mt19937_64 rng = trial_rng(ctx.seed, static_cast<std::uint64_t>(t), 2);
    const auto d = static_cast<Eigen::Index>(side);
    std::vector<PositiveLinearMap> maps;
    if (fixed) {
      maps.push_back(*fixed);
    } else {
      const PositiveLinearMap cong{Congruence{Tensor(shape, complex_gaussian(rng, d, d)), "congruence:gaussian"}};
      maps.push_back(cong);
      maps.push_back(PositiveLinearMap{halves});
      maps.push_back(PositiveLinearMap{Mixture{{cong, PositiveLinearMap{Pinching{}}}, {0.5, 0.5}}});
    }
    Row row;
    for (const auto& map : maps) {
      const GapResult r = transform_gap(map, pair, g, tol);
      const bool ok = r.verdict.relation == LoewnerRelation::kGeq || r.verdict.relation == LoewnerRelation::kEq;
      row.checks.push_back({!ok, ok ? 0.0 : std::max(0.0, -r.gap)});
    }
    // Unitary congruence commutes with the mean exactly.
    const PositiveLinearMap unitary{Congruence{Tensor(shape, random_unitary(rng, d)), "congruence:unitary"}};
    const HermitianTensor lhs = apply_map(unitary, pair_mean(pair.x(), pair.y(), pair.side(), g));
    const HermitianTensor rhs =
        pair_mean(apply_map(unitary, pair.x()), apply_map(unitary, pair.y()), pair.side(), g);
    const double gap = gauge_norm(lhs - rhs, GaugeNorm::frobenius()) /
                       std::max(1.0, gauge_norm(rhs, GaugeNorm::frobenius()));
    row.unitary_gap = gap;
    row.unitary = {gap > 1e-9, gap};
    return row;
  });

  OrderingTally tally;
  double ugap = 0.0;
  for (const Row& r : rows) {
    for (const Check& c : r.checks) tally.add(c);
    tally.add(r.unitary);
    ugap = std::max(ugap, r.unitary_gap);
  }
  tally.fill(ctx.report);
  ctx.note("g = " + g.label() + "; X ~ " + ex.describe() + ", Y ~ " + ey.describe() +
           "; checks L(X # Y) >= L(X) # L(Y)");
  if (fixed) {
    const MapProbe probe = probe_map(*fixed, shape);
    ctx.note("map " + describe(*fixed) + "; probe: psd " + (probe.preserves_psd ? "ok" : "FAILS") + ", linear " +
             (probe.linear ? "ok" : "FAILS"));
  } else {
    ctx.note("maps per trial: Gaussian congruence, " + describe(PositiveLinearMap{halves}) +
             ", and an equal mix of the congruence with pinching:diag");
  }
  ctx.note("admissible maps restricted to congruences, pinchings and convex combinations (all completely positive)");
  ctx.note("unitary congruence: worst relative gap " + num(ugap) + " (limit 1e-9)");
  return ctx.report;
}

}  // namespace

bool is_ordering_suite(SuiteId id) {
  switch (id) {
    case SuiteId::L1_PowerMonotone:
    case SuiteId::L2_Kantorovich:
    case SuiteId::T1_AndoHiaiGeneralized:
    case SuiteId::C1_AndoHiaiDual:
    case SuiteId::T2_LieTrotterLimit:
    case SuiteId::T3_LieTrotterTail:
    case SuiteId::T63_PsdLimit:
    case SuiteId::T65_JointConvexity:
    case SuiteId::APP_Fusion:
    case SuiteId::APP_LinearTransform:
      return true;
    default:
      return false;
  }
}

VerificationReport run_suite(SuiteId id, const ExperimentConfig& config, const RunOptions& options) {
  Context ctx(config, id, options);
  switch (id) {
    case SuiteId::L1_PowerMonotone: return power_monotone(ctx);
    case SuiteId::L2_Kantorovich: return kantorovich_suite(ctx);
    case SuiteId::L3_MarkovChebyshev: return markov_chebyshev(ctx);
    case SuiteId::T1_AndoHiaiGeneralized: return ando_hiai(ctx, false);
    case SuiteId::C1_AndoHiaiDual: return ando_hiai(ctx, true);
    case SuiteId::T2_LieTrotterLimit: return lie_trotter_limit(ctx);
    case SuiteId::T3_LieTrotterTail: return lie_trotter_tail(ctx);
    case SuiteId::T7_Psi: return sandwich_tail(ctx, Family::kIncreasing);
    case SuiteId::T8_Phi: return sandwich_tail(ctx, Family::kDecreasing);
    case SuiteId::T9_TC: return convex_tail(ctx);
    case SuiteId::C2_MajorizationTMI: return sandwich_majorization(ctx, Family::kIncreasing);
    case SuiteId::C3_MajorizationTMD: return sandwich_majorization(ctx, Family::kDecreasing);
    case SuiteId::C4_MajorizationTC: return convex_majorization(ctx);
    case SuiteId::T63_PsdLimit: return psd_limit(ctx);
    case SuiteId::T65_JointConvexity: return joint_convexity(ctx);
    case SuiteId::APP_Fusion: return fusion(ctx);
    case SuiteId::APP_LinearTransform: return linear_transform(ctx);
  }
  throw ConfigError("unknown suite");
}

std::vector<VerificationReport> run_suites(const ExperimentConfig& config, const RunOptions& options,
                                           const std::vector<SuiteId>& ids) {
  const std::vector<SuiteId>& chosen = !ids.empty() ? ids : !config.suites.empty() ? config.suites : all_suites();
  std::vector<VerificationReport> out;
  for (SuiteId id : chosen) out.push_back(run_suite(id, config, options));
  return out;
}

}  // namespace tmlab::harness
