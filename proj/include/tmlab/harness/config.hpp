#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tmlab/tensor.hpp"

namespace tmlab::harness {

enum class SuiteId {
  L1_PowerMonotone,
  L2_Kantorovich,
  L3_MarkovChebyshev,
  T1_AndoHiaiGeneralized,
  C1_AndoHiaiDual,
  T2_LieTrotterLimit,
  T3_LieTrotterTail,
  T7_Psi,
  T8_Phi,
  T9_TC,
  C2_MajorizationTMI,
  C3_MajorizationTMD,
  C4_MajorizationTC,
  T63_PsdLimit,
  T65_JointConvexity,
  APP_Fusion,
  APP_LinearTransform,
};

const std::vector<SuiteId>& all_suites();
const char* to_string(SuiteId id);
/// Full name, or the prefix before the first '_' when that is unambiguous
/// ("L3", "T63").  Throws ConfigError for anything else.
SuiteId parse_suite_id(const std::string& text);

struct Exponents {
  std::optional<double> q;
  std::optional<double> p;
  std::optional<int> m;
  std::optional<int> n;
};

struct ExperimentConfig {
  std::uint64_t seed = 20240917;
  long trials = 500;
  TensorShape shape{{2, 2}};
  /// Ensemble overrides; each suite has its own defaults.
  std::optional<std::string> x_ensemble;
  std::optional<std::string> y_ensemble;
  std::optional<std::string> increment_ensemble;
  /// Connection-function override (grammar of parse_function).
  std::optional<std::string> function;
  Exponents exponents;
  double tolerance = 1e-8;
  std::string norm = "frobenius";
  std::vector<SuiteId> suites;  // empty: every suite
  /// Positive map for the linear-transform suite (grammar of parse_map).
  std::optional<std::string> map;

  static ExperimentConfig defaults() { return {}; }
  /// Unknown keys are rejected.  Throws ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// "default" or a path to a JSON file.
  static ExperimentConfig load(const std::string& source);

  nlohmann::ordered_json to_json() const;
  /// Throws ConfigError for non-positive trials, bad ids, etc.
  void validate() const;
};

}  // namespace tmlab::harness
