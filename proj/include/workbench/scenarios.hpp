// Loading of the bundled configurations and the shared runners behind the CLI and the acceptance checks.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "workbench/hopfcohomology.hpp"
#include "workbench/spectralsequences.hpp"

namespace wb {

// A bare name is looked up in the bundled config directory when no such file exists in the working directory.
std::string config_path(const std::string& name);
std::string read_text(const std::string& path);  // ConfigError when unreadable
RingPresentation load_ring(const std::string& name);
HopfAlgebroid load_algebroid(const std::string& name);

struct ScenarioWindow {
  SSWindow window;
  MultiDegree trusted;  // E_infinity is reported inside [0, trusted]; empty means the whole window
};

struct SSScenario {
  std::string name;
  std::string description;
  PageSpec spec;
  std::vector<std::string> columns;
  std::vector<DifferentialRule> rules;  // as given; lifted by `lift_element` when that is set
  std::string lift_element;
  std::vector<std::string> extensions;
  std::map<std::string, ScenarioWindow> windows;
  std::string default_window;
  std::string tower_element;
  unsigned long tower_prime = 0;
  std::vector<std::string> subring_generators, subring_names, subring_ideal;

  std::vector<DifferentialRule> effective_rules() const;
};

SSScenario load_ss_scenario(const std::string& name);
SSScenario parse_ss_scenario(const std::string& json_text, const std::string& origin);
// Runs the page sequence, registers the extensions, computes towers and restricts to the trusted box.
RunReport run_scenario(const SSScenario& s, const std::string& window = "");
SubringSpec scenario_subring(const SSScenario& s);

// Groups read off from towers of the scenario's tower element, keyed by the kept components of the birth degree.
std::map<MultiDegree, GroupDescriptor> tower_table(const RunReport& report, const std::vector<std::size_t>& keep,
                                                   unsigned long p);

struct MapCheck {
  std::string key;
  std::string ring;
  MapReport report;
  std::string error;  // parse or degree failure
  bool ok() const { return error.empty() && report.ok(); }
};
std::vector<std::string> discriminant_map_keys();
MapCheck verify_discriminant_map(const std::string& key);

struct ReductionResult {
  std::string name;
  HopfAlgebroid before, after;
  ExtTable ext_before, ext_after;
  std::vector<std::string> diffs;
  std::optional<MultiDegree> witness_failure;
};
std::vector<ReductionResult> run_reductions(const std::string& file = "reductions.json");

}  // namespace wb
