#include "tmlab/harness/config.hpp"

#include <fstream>
#include <cmath>
#include <set>

#include "tmlab/connection.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/harness/ensemble.hpp"
#include "tmlab/processing.hpp"
#include "tmlab/spectral.hpp"

namespace tmlab::harness {

const std::vector<SuiteId>& all_suites() {
  static const std::vector<SuiteId> ids{
      SuiteId::L1_PowerMonotone,   SuiteId::L2_Kantorovich,     SuiteId::L3_MarkovChebyshev,
      SuiteId::T1_AndoHiaiGeneralized, SuiteId::C1_AndoHiaiDual, SuiteId::T2_LieTrotterLimit,
      SuiteId::T3_LieTrotterTail,  SuiteId::T7_Psi,             SuiteId::T8_Phi,
      SuiteId::T9_TC,              SuiteId::C2_MajorizationTMI, SuiteId::C3_MajorizationTMD,
      SuiteId::C4_MajorizationTC,  SuiteId::T63_PsdLimit,       SuiteId::T65_JointConvexity,
      SuiteId::APP_Fusion,         SuiteId::APP_LinearTransform,
  };
  return ids;
}

const char* to_string(SuiteId id) {
  switch (id) {
    case SuiteId::L1_PowerMonotone: return "L1_PowerMonotone";
    case SuiteId::L2_Kantorovich: return "L2_Kantorovich";
    case SuiteId::L3_MarkovChebyshev: return "L3_MarkovChebyshev";
    case SuiteId::T1_AndoHiaiGeneralized: return "T1_AndoHiaiGeneralized";
    case SuiteId::C1_AndoHiaiDual: return "C1_AndoHiaiDual";
    case SuiteId::T2_LieTrotterLimit: return "T2_LieTrotterLimit";
    case SuiteId::T3_LieTrotterTail: return "T3_LieTrotterTail";
    case SuiteId::T7_Psi: return "T7_Psi";
    case SuiteId::T8_Phi: return "T8_Phi";
    case SuiteId::T9_TC: return "T9_TC";
    case SuiteId::C2_MajorizationTMI: return "C2_MajorizationTMI";
    case SuiteId::C3_MajorizationTMD: return "C3_MajorizationTMD";
    case SuiteId::C4_MajorizationTC: return "C4_MajorizationTC";
    case SuiteId::T63_PsdLimit: return "T63_PsdLimit";
    case SuiteId::T65_JointConvexity: return "T65_JointConvexity";
    case SuiteId::APP_Fusion: return "APP_Fusion";
    case SuiteId::APP_LinearTransform: return "APP_LinearTransform";
  }
  return "?";
}

SuiteId parse_suite_id(const std::string& text) {
  std::vector<SuiteId> prefix_hits;
  for (SuiteId id : all_suites()) {
    const std::string name = to_string(id);
    if (name == text) return id;
    if (name.substr(0, name.find('_')) == text) prefix_hits.push_back(id);
  }
  if (prefix_hits.size() == 1) return prefix_hits.front();
  throw ConfigError("unknown suite '" + text + "'");
}

namespace {

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "' in " + where);
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"seed", "trials", "shape", "ensembles", "function", "exponents", "tolerance", "norm", "suites", "map"},
                 "config");
  ExperimentConfig c;
  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("config field 'seed' must be a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer()) throw ConfigError("config field 'trials' must be an integer");
    c.trials = j["trials"].get<long>();
  }
  if (j.contains("shape")) c.shape = TensorShape(get_as<std::vector<std::size_t>>(j["shape"], "shape"));
  if (j.contains("ensembles")) {
    const auto& e = j["ensembles"];
    if (!e.is_object()) throw ConfigError("config field 'ensembles' must be an object");
    reject_unknown(e, {"x", "y", "increment"}, "ensembles");
    if (e.contains("x")) c.x_ensemble = get_as<std::string>(e["x"], "ensembles.x");
    if (e.contains("y")) c.y_ensemble = get_as<std::string>(e["y"], "ensembles.y");
    if (e.contains("increment")) c.increment_ensemble = get_as<std::string>(e["increment"], "ensembles.increment");
  }
  if (j.contains("function") && !j["function"].is_null()) c.function = get_as<std::string>(j["function"], "function");
  if (j.contains("exponents")) {
    const auto& e = j["exponents"];
    if (!e.is_object()) throw ConfigError("config field 'exponents' must be an object");
    reject_unknown(e, {"q", "p", "m", "n"}, "exponents");
    if (e.contains("q")) c.exponents.q = get_as<double>(e["q"], "exponents.q");
    if (e.contains("p")) c.exponents.p = get_as<double>(e["p"], "exponents.p");
    if (e.contains("m")) c.exponents.m = get_as<int>(e["m"], "exponents.m");
    if (e.contains("n")) c.exponents.n = get_as<int>(e["n"], "exponents.n");
  }
  if (j.contains("tolerance")) c.tolerance = get_as<double>(j["tolerance"], "tolerance");
  if (j.contains("norm")) c.norm = get_as<std::string>(j["norm"], "norm");
  if (j.contains("suites")) {
    for (const std::string& s : get_as<std::vector<std::string>>(j["suites"], "suites")) {
      c.suites.push_back(parse_suite_id(s));
    }
  }
  if (j.contains("map") && !j["map"].is_null()) c.map = get_as<std::string>(j["map"], "map");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& source) {
  if (source == "default") return defaults();
  std::ifstream in(source);
  if (!in) throw ConfigError("cannot read config file '" + source + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + source + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["trials"] = trials;
  j["shape"] = shape.dims();
  nlohmann::ordered_json e = nlohmann::ordered_json::object();
  if (x_ensemble) e["x"] = *x_ensemble;
  if (y_ensemble) e["y"] = *y_ensemble;
  if (increment_ensemble) e["increment"] = *increment_ensemble;
  j["ensembles"] = e;
  if (function) j["function"] = *function;
  nlohmann::ordered_json x = nlohmann::ordered_json::object();
  if (exponents.q) x["q"] = *exponents.q;
  if (exponents.p) x["p"] = *exponents.p;
  if (exponents.m) x["m"] = *exponents.m;
  if (exponents.n) x["n"] = *exponents.n;
  j["exponents"] = x;
  j["tolerance"] = tolerance;
  j["norm"] = norm;
  std::vector<std::string> ids;
  for (SuiteId s : suites) ids.emplace_back(to_string(s));
  j["suites"] = ids;
  if (map) j["map"] = *map;
  return j;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be positive");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) throw ConfigError("tolerance must be finite and >= 0");
  parse_gauge_norm(norm);
  for (const auto& e : {x_ensemble, y_ensemble, increment_ensemble}) {
    if (e) EnsembleSpec::parse(*e, shape, seed);
  }
  if (function) parse_function(*function);
  if (exponents.q && !(*exponents.q > 0.0 && std::isfinite(*exponents.q))) throw ConfigError("exponents.q must be > 0");
  if (exponents.p && !(*exponents.p >= 1.0 && std::isfinite(*exponents.p))) throw ConfigError("exponents.p must be >= 1");
  if (exponents.m && *exponents.m < 1) throw ConfigError("exponents.m must be >= 1");
  if (exponents.n && *exponents.n < 0) throw ConfigError("exponents.n must be >= 0");
  if (map) parse_map(*map);
}

}  // namespace tmlab::harness
