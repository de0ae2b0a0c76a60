#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace tmlab::harness {

inline constexpr const char* kReportVersion = "tmlab-report/1";

struct VerificationReport {
  std::string suite;
  long trials = 0;
  long violations = 0;
  double max_violation = 0.0;
  double empirical_prob = 0.0;
  double bound_value = 0.0;
  double mc_stderr = 0.0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<std::string> regime_notes;

  bool passed() const { return violations == 0; }
};

/// Fixed field order, no timing data.
nlohmann::ordered_json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);

/// JSON array, two-space indent, trailing newline.
std::string render_reports(const std::vector<VerificationReport>& reports);
void write_reports(const std::filesystem::path& path, const std::vector<VerificationReport>& reports);

}  // namespace tmlab::harness
