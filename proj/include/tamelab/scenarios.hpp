#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tamelab/doubling.hpp"
#include "tamelab/examples.hpp"
#include "tamelab/montecarlo.hpp"

namespace tamelab {

constexpr int kSummarySchemaVersion = 1;

struct ScenarioSpec {
  std::string name;
  std::string variant;
  std::vector<int> resolutions;
  std::vector<double> t_list;
  std::vector<std::string> checks;
  std::uint64_t seed = 1;
  int truncation = 0;  // singular measures are limits; every run records the level it used
  nlohmann::json params = nlohmann::json::object();
  std::string out_dir;
  bool dump_margins = false;
  int jobs = 0;  // OpenMP threads for the check kernels, 0 = runtime default
};

struct CheckRecord {
  InequalityReport report;
  std::shared_ptr<const GeneratorContext> ctx;  // for margin dumps
  std::string tag;
};

struct ScenarioResult {
  ScenarioSpec spec;
  std::vector<CheckRecord> checks;
  nlohmann::json extra = nlohmann::json::object();
  // name -> (header, rows)
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::vector<double>>>> tables;
  std::map<std::string, std::shared_ptr<const GridDomain>> domains;
  double elapsed = 0;

  bool passed() const;
};

std::vector<std::string> list_scenarios();
std::string describe_scenario(const std::string& name);
const std::vector<std::string>& known_checks();

ScenarioSpec default_spec(const std::string& name);  // UnknownScenario
// Overrides from a parsed config: top-level keys of ScenarioSpec plus a
// [params] table merged into the defaults.
void apply_config(ScenarioSpec& spec, const nlohmann::json& cfg);
void validate(const ScenarioSpec& spec);  // ConfigParse

ScenarioResult run_scenario(const ScenarioSpec& spec);

nlohmann::json summary_json(const ScenarioResult& r);
// summary.json, metadata.json, profile_*.csv and, on request, margins_*.csv and domain PGMs.
void write_bundle(const ScenarioResult& r, const std::string& dir);
inline int exit_code(const ScenarioResult& r) { return r.passed() ? 0 : 1; }

// Small reference geometries used by the direct CLI entry points:
// two-point, interval, interval-dirichlet, torus, box, halfplane.
GeneratorContext reference_context(const std::string& geometry, int resolution);

}  // namespace tamelab
