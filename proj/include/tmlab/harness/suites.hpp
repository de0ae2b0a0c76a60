#pragma once

#include <vector>

#include "tmlab/harness/config.hpp"
#include "tmlab/harness/report.hpp"

namespace tmlab::harness {

struct RunOptions {
  /// Trials are spread over this many threads; results do not depend on it.
  unsigned workers = 1;
};

/// Löwner-ordering suites count trials where the asserted relation fails.
/// Tail suites compare empirical probabilities against trace bounds and
/// majorization suites compare empirical tail frequencies of Ky Fan
/// statistics; both count failing configurations.
bool is_ordering_suite(SuiteId id);

/// Throws ConfigError / UnsupportedFunction for invalid combinations.
VerificationReport run_suite(SuiteId id, const ExperimentConfig& config, const RunOptions& options = {});

/// Runs `ids`, or the config's suite list, or every suite, in that order of preference.
std::vector<VerificationReport> run_suites(const ExperimentConfig& config, const RunOptions& options = {},
                                           const std::vector<SuiteId>& ids = {});

}  // namespace tmlab::harness
