// Command-line front end: verification suites, Lie-Trotter studies,
// Kantorovich constants and one-off means.
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tmlab/bounds.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/format.hpp"
#include "tmlab/harness/config.hpp"
#include "tmlab/harness/ensemble.hpp"
#include "tmlab/harness/report.hpp"
#include "tmlab/harness/suites.hpp"
#include "tmlab/lie_trotter.hpp"
#include "tmlab/means.hpp"

namespace {

using namespace tmlab;

constexpr int kUsageError = 2;

int usage_error(const CLI::App& app, const std::string& message) {
  std::cerr << "error: " << message << "\n\n" << app.help();
  return kUsageError;
}

struct VerifyArgs {
  std::string suite;
  std::string config = "default";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  unsigned workers = 1;
};

int run_verify(const CLI::App& sub, const VerifyArgs& a) {
  std::vector<harness::SuiteId> ids;
  try {
    if (a.suite != "all") ids.push_back(harness::parse_suite_id(a.suite));
  } catch (const ConfigError& e) {
    return usage_error(sub, e.what());
  }
  harness::ExperimentConfig cfg;
  try {
    cfg = harness::ExperimentConfig::load(a.config);
  } catch (const ConfigError& e) {
    return usage_error(sub, e.what());
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.trials) cfg.trials = *a.trials;
  if (a.suite == "all") ids = harness::all_suites();
  cfg.validate();

  harness::RunOptions opt;
  opt.workers = std::max(1u, a.workers);
  const auto reports = harness::run_suites(cfg, opt, ids);
  long violations = 0;
  for (const auto& r : reports) {
    violations += r.violations;
    std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.suite << "  trials=" << r.trials
              << " violations=" << r.violations << "\n";
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << harness::render_reports(reports);
  } else {
    harness::write_reports(a.out, reports);
  }
  return violations == 0 ? 0 : 1;
}

struct StudyArgs {
  bool study = false;
  std::string x, y;
  std::string fn = "geometric";
  std::string norm = "frobenius";
  std::uint64_t seed = 1;
  std::vector<std::size_t> shape{2, 2};
};

int run_lie_trotter(const CLI::App& sub, const StudyArgs& a) {
  if (!a.study) return usage_error(sub, "nothing to do; pass --study");
  if (a.x.empty() != a.y.empty()) return usage_error(sub, "--x and --y go together");
  const ConnectionFunction g = parse_function(a.fn);
  const GaugeNorm norm = parse_gauge_norm(a.norm);
  std::optional<HermitianTensor> x, y;
  if (!a.x.empty()) {
    x.emplace(read_tensor_file(a.x));
    y.emplace(read_tensor_file(a.y));
  } else {
    const TensorShape shape(a.shape);
    auto rx = harness::trial_rng(a.seed, 0, 0);
    auto ry = harness::trial_rng(a.seed, 0, 1);
    x.emplace(harness::random_hermitian(rx, shape, 0.05, 1.0));
    y.emplace(harness::random_hermitian(ry, shape, 0.05, 1.0));
  }
  const ConvergenceStudy s = convergence_study(*x, *y, g, default_q_grid(), norm);
  std::cout << "q\tdistance\n";
  for (std::size_t i = 0; i < s.q_grid.size(); ++i) {
    std::cout << format_number(s.q_grid[i]) << '\t' << format_number(s.distances[i]) << '\n';
  }
  std::cout << "monotone " << (s.monotone ? "yes" : "no") << "\nfinal_relative_error "
            << format_number(s.final_relative_error) << '\n';
  return 0;
}

struct MeanArgs {
  std::string x, y, fn, out;
};

int run_mean(const MeanArgs& a) {
  const ConnectionFunction g = parse_function(a.fn);
  const HermitianTensor x(read_tensor_file(a.x));
  const HermitianTensor y(read_tensor_file(a.y));
  const HermitianTensor m = mean_psd(x, y, g);
  if (a.out.empty()) {
    std::cout << to_json(m.tensor()).dump(2) << '\n';
  } else {
    write_tensor_file(a.out, m.tensor());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor means, bound factors and Monte Carlo verification suites"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run verification suites and write a JSON report");
  verify->add_option("--suite", va.suite, "Suite id, its short prefix (e.g. T1), or 'all'")->required();
  verify->add_option("--config", va.config, "Config JSON file, or 'default'");
  verify->add_option("--out", va.out, "Report file (stdout when omitted)");
  verify->add_option("--seed", va.seed, "Override the config seed");
  verify->add_option("--trials", va.trials, "Override the config trial count");
  verify->add_option("--workers", va.workers, "Worker threads; reports do not depend on it");

  StudyArgs sa;
  auto* lt = app.add_subcommand("lie-trotter", "Distance of (e^{qX} #_g e^{qY})^{1/q} to its limit along q = 2^-k");
  lt->add_flag("--study", sa.study, "Print the convergence table");
  lt->add_option("--x", sa.x, "Hermitian tensor file (random pair when omitted)");
  lt->add_option("--y", sa.y, "Hermitian tensor file");
  lt->add_option("--fn", sa.fn, "Connection function id");
  lt->add_option("--norm", sa.norm, "Gauge norm");
  lt->add_option("--seed", sa.seed, "Seed for the random pair");
  lt->add_option("--shape", sa.shape, "Tensor shape for the random pair");

  std::vector<double> kargs;
  auto* bounds = app.add_subcommand("bounds", "Bound constants");
  bounds->add_option("--kantorovich", kargs, "m M p")->expected(3)->required();

  MeanArgs ma;
  auto* mean = app.add_subcommand("mean", "X #_g Y for PSD tensors read from files");
  mean->add_option("--x", ma.x, "Tensor file")->required();
  mean->add_option("--y", ma.y, "Tensor file")->required();
  mean->add_option("--fn", ma.fn, "Connection function id")->required();
  mean->add_option("--out", ma.out, "Output tensor file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    const CLI::App* where = &app;
    for (const CLI::App* s : {verify, lt, bounds, mean}) {
      if (s->parsed()) where = s;
    }
    return usage_error(*where, e.what());
  }

  try {
    if (verify->parsed()) return run_verify(*verify, va);
    if (lt->parsed()) return run_lie_trotter(*lt, sa);
    if (bounds->parsed()) {
      std::cout << format_number(kantorovich(kargs[0], kargs[1], kargs[2])) << '\n';
      return 0;
    }
    if (mean->parsed()) return run_mean(ma);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return kUsageError;
}
