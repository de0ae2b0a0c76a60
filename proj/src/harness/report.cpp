#include "tmlab/harness/report.hpp"

#include <fstream>
#include <limits>

#include "tmlab/errors.hpp"

namespace tmlab::harness {

nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["version"] = kReportVersion;
  j["suite"] = r.suite;
  j["trials"] = r.trials;
  j["violations"] = r.violations;
  j["max_violation"] = r.max_violation;
  j["empirical_prob"] = r.empirical_prob;
  j["bound_value"] = r.bound_value;
  j["mc_stderr"] = r.mc_stderr;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  j["regime_notes"] = r.regime_notes;
  return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kReportVersion) throw ConfigError("unsupported report version");
    VerificationReport r;
    r.suite = j.at("suite").get<std::string>();
    r.trials = j.at("trials").get<long>();
    r.violations = j.at("violations").get<long>();
    // Non-finite reals serialize as null.
    auto real = [&](const char* key) {
      const auto& v = j.at(key);
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    r.max_violation = real("max_violation");
    r.empirical_prob = real("empirical_prob");
    r.bound_value = real("bound_value");
    r.mc_stderr = real("mc_stderr");
    r.seed = j.at("seed").get<std::uint64_t>();
    r.tolerance = real("tolerance");
    r.regime_notes = j.at("regime_notes").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string render_reports(const std::vector<VerificationReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

void write_reports(const std::filesystem::path& path, const std::vector<VerificationReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report file '" + path.string() + "'");
  out << render_reports(reports);
  if (!out) throw ConfigError("failed writing report file '" + path.string() + "'");
}

}  // namespace tmlab::harness
