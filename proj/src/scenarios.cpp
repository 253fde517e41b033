#include "workbench/scenarios.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#ifndef WORKBENCH_CONFIG_DIR
#define WORKBENCH_CONFIG_DIR "configs"
#endif

namespace wb {

using nlohmann::json;

std::string config_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  const fs::path bundled = fs::path(WORKBENCH_CONFIG_DIR) / name;
  if (fs::exists(bundled)) return bundled.string();
  throw ConfigError("config file not found: " + name);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RingPresentation load_ring(const std::string& name) { return RingPresentation::from_json(read_text(config_path(name))); }

HopfAlgebroid load_algebroid(const std::string& name) { return HopfAlgebroid::from_json(read_text(config_path(name))); }

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

std::vector<DifferentialRule> rules_of(const json& arr) { return rules_from_json(json{{"rules", arr}}.dump()); }

}  // namespace

std::vector<DifferentialRule> SSScenario::effective_rules() const {
  return lift_element.empty() ? rules : lift_rules(rules, lift_element);
}

SSScenario parse_ss_scenario(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  SSScenario s;
  try {
    s.name = j.value("name", std::string("ss"));
    s.description = j.value("description", std::string());
    const json& e1 = j.at("e1");
    s.spec.ring = e1.is_string() ? load_ring(e1.get<std::string>()) : RingPresentation::from_json(e1.dump());
    s.spec.page = j.value("first_page", 1);
    const json& gr = j.at("grading");
    s.spec.grading.base = gr.at("base").get<MultiDegree>();
    s.spec.grading.step = gr.at("step").get<MultiDegree>();
    s.spec.grading.filtration_component = gr.value("filtration_component", -1);
    if (s.spec.grading.base.size() != s.spec.ring.arity() || s.spec.grading.step.size() != s.spec.ring.arity())
      throw ConfigError(origin + ": grading arity differs from the E1 ring");
    s.columns = j.value("columns", degree_column_names(s.spec.ring.arity()));
    if (j.contains("rules")) s.rules = rules_of(j.at("rules"));
    if (j.contains("rule_set")) {
      const json& rs = j.at("rule_set");
      const std::string file = rs.at("file").get<std::string>();
      const json sets = parse_json(read_text(config_path(file)), file);
      const std::string key = rs.at("name").get<std::string>();
      if (!sets.at("rule_sets").contains(key)) throw ConfigError(file + ": no rule set '" + key + "'");
      for (const auto& r : rules_of(sets.at("rule_sets").at(key))) s.rules.push_back(r);
    }
    if (j.contains("lift")) s.lift_element = j.at("lift").at("element").get<std::string>();
    s.extensions = j.value("extensions", std::vector<std::string>{});
    for (const auto& [k, w] : j.at("windows").items()) {
      ScenarioWindow sw;
      sw.window.hi = w.at("hi").get<MultiDegree>();
      sw.window.lo = MultiDegree(sw.window.hi.size(), 0);
      sw.window.max_page = w.value("max_page", 8);
      sw.trusted = w.value("trusted", MultiDegree{});
      if (sw.window.hi.size() != s.spec.ring.arity())
        throw ConfigError(origin + ": window '" + k + "' has the wrong arity");
      s.windows[k] = sw;
    }
    s.default_window = j.value("default_window", s.windows.empty() ? std::string() : s.windows.begin()->first);
    if (j.contains("towers")) {
      s.tower_element = j.at("towers").at("element").get<std::string>();
      s.tower_prime = j.at("towers").at("prime").get<unsigned long>();
    }
    if (j.contains("subring")) {
      const json& sr = j.at("subring");
      s.subring_generators = sr.at("generators").get<std::vector<std::string>>();
      s.subring_names = sr.value("names", s.subring_generators);
      s.subring_ideal = sr.value("ideal", std::vector<std::string>{});
    }
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return s;
}

SSScenario load_ss_scenario(const std::string& name) {
  const std::string path = config_path(name);
  return parse_ss_scenario(read_text(path), name);
}

RunReport run_scenario(const SSScenario& s, const std::string& window) {
  const std::string key = window.empty() ? s.default_window : window;
  auto it = s.windows.find(key);
  if (it == s.windows.end()) throw ConfigError("scenario " + s.name + " has no window '" + key + "'");
  const ScenarioWindow& w = it->second;
  RunReport rep = run(s.spec, s.effective_rules(), w.window, s.name);
  rep.column_names = s.columns;
  for (const auto& e : s.extensions) rep = register_hidden_extension(rep, s.spec, e);
  if (!s.tower_element.empty()) rep.towers = towers(rep, s.tower_element, s.tower_prime, w.trusted);
  if (!w.trusted.empty()) {
    rep = restrict_window(rep, MultiDegree(w.trusted.size(), 0), w.trusted);
    rep.notes.push_back("reported cells restricted to " + degree_str(w.trusted));
  }
  return rep;
}

SubringSpec scenario_subring(const SSScenario& s) {
  SubringSpec sub;
  for (const auto& g : s.subring_generators) sub.generators.push_back(s.spec.ring.parse(g));
  sub.generator_names = s.subring_names;
  for (const auto& g : s.subring_ideal) sub.ideal.push_back(s.spec.ring.parse(g));
  return sub;
}

std::map<MultiDegree, GroupDescriptor> tower_table(const RunReport& report, const std::vector<std::size_t>& keep,
                                                   unsigned long p) {
  std::map<MultiDegree, GroupDescriptor> out;
  for (const auto& t : report.towers) {
    MultiDegree d;
    for (std::size_t i : keep) d.push_back(t.key[i]);
    out[d] = direct_sum(out[d], tower_group(t, p));
  }
  return out;
}

namespace {

json discriminant_maps() { return parse_json(read_text(config_path("discriminant_maps.json")), "discriminant_maps.json"); }

}  // namespace

std::vector<std::string> discriminant_map_keys() {
  const json maps = discriminant_maps().at("maps");
  std::vector<std::string> keys;
  for (const auto& [k, v] : maps.items()) keys.push_back(k);
  return keys;
}

MapCheck verify_discriminant_map(const std::string& key) {
  const json maps = discriminant_maps().at("maps");
  if (!maps.contains(key)) throw ConfigError("unknown ring '" + key + "'");
  const json& m = maps.at(key);
  MapCheck out;
  out.key = key;
  out.ring = m.at("ring").get<std::string>();
  const RingPresentation source = load_ring(m.at("source").get<std::string>());
  const RingPresentation target = load_ring(out.ring);
  try {
    out.report = check_map(source, target, m.at("images").get<std::vector<std::string>>());
  } catch (const DegreeMismatch& e) {
    out.error = e.what();
  } catch (const ParseError& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<ReductionResult> run_reductions(const std::string& file) {
  const json j = parse_json(read_text(config_path(file)), file);
  std::vector<ReductionResult> out;
  long previous = -1;  // index into out
  try {
    for (const auto& r : j.at("reductions")) {
      ReductionResult res;
      res.name = r.at("name").get<std::string>();
      const std::string src = r.at("algebroid").get<std::string>();
      if (src == "previous") {
        if (previous < 0) throw ConfigError(file + ": 'previous' has no successful reduction before it");
        res.before = out[static_cast<std::size_t>(previous)].after;
      } else {
        res.before = load_algebroid(src);
      }
      CoverReduction red;
      red.kill = r.at("kill").get<std::vector<std::string>>();
      red.witness = r.at("witness").get<std::vector<std::string>>();
      red.bound = r.value("bound", 12);
      res.witness_failure = check_witness(res.before, red);
      CobarWindow w;
      w.s_max = r.value("smax", 2);
      w.hi = {r.value("tmax", 12)};
      res.ext_before = cobar_ext(res.before, w);
      if (!res.witness_failure) {
        res.after = change_of_cover(res.before, red);
        res.ext_after = cobar_ext(res.after, w);
        res.diffs = compare_ext(res.ext_before, res.ext_after);
      }
      out.push_back(std::move(res));
      previous = out.back().witness_failure ? -1 : static_cast<long>(out.size()) - 1;
    }
  } catch (const json::exception& e) {
    throw ConfigError(file + ": " + e.what());
  }
  return out;
}

}  // namespace wb
