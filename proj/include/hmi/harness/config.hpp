#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hmi/ahp/ahp.hpp"
#include "hmi/core/error.hpp"
#include "hmi/core/params.hpp"
#include "hmi/harness/world.hpp"
#include "hmi/operators/availability.hpp"
#include "hmi/operators/operator.hpp"

namespace hmi {

// Parameter file:
//
//   # comment
//   cooldown = 5
//   [operator.conflict-prone]
//   p_override = 0.8
//   availability = 0-30:1,30-45:0
//
// Assignments before the first section apply to every trial. A section
// `[operator.<name>]` applies to operators whose spec contains <name> as a
// component, or equals it.
struct ParamsFile {
  struct Section {
    std::string name;
    std::vector<std::string> assignments;
    std::optional<std::string> availability;
  };
  std::vector<std::string> general;
  std::optional<std::string> availability;
  std::vector<Section> sections;
};

inline ParamsFile parse_params_file(const std::string& text, const std::string& origin = "params") {
  ParamsFile f;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  bool in_section = false;
  while (std::getline(in, line)) {
    ++ln;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(ln) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || line.rfind("[operator.", 0) != 0)
        throw ConfigError(where + "expected [operator.<kind>]");
      f.sections.push_back({line.substr(10, line.size() - 11), {}, std::nullopt});
      in_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected name = value");
    const std::string name = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      ParamsFile::Section* current = in_section ? &f.sections.back() : nullptr;
      if (name == "availability") {
        (void)parse_availability(value);
        (current ? current->availability : f.availability) = value;
      } else {
        Params probe;
        set_param(probe, name, parse_number(value, name));
        (current ? current->assignments : f.general).push_back(name + "=" + value);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return f;
}

inline bool section_applies(const std::string& section, const std::string& op_spec) {
  if (section == op_spec) return true;
  std::istringstream parts(op_spec);
  for (std::string p; std::getline(parts, p, '+');)
    if (detail::trim(p) == section) return true;
  return false;
}

// Final parameters and script of one operator: the world's parameters, the
// matching sections in file order, then command-line overrides.
struct OperatorSetup {
  OperatorScript script;
  Params params;
};

inline OperatorSetup resolve_operator(const std::string& op_spec, const Params& world_params, const ParamsFile& file,
                                      const std::vector<std::string>& cli_overrides) {
  OperatorSetup s;
  s.script = parse_operator(op_spec);
  s.params = world_params;
  std::optional<std::string> avail = file.availability;
  for (const auto& sec : file.sections) {
    if (!section_applies(sec.name, op_spec)) continue;
    for (const auto& a : sec.assignments) apply_assignment(s.params, a);
    if (sec.availability) avail = sec.availability;
  }
  for (const auto& a : cli_overrides) apply_assignment(s.params, a);
  check_consistency(s.params);
  if (avail) s.script.availability = parse_availability(*avail);
  return s;
}

inline ParamsFile load_params_file(const std::string& path) {
  return parse_params_file(read_text_file(path), path);
}

inline std::string bundled_data_path(const std::string& file) {
#ifdef HMI_DATA_DIR
  return std::string(HMI_DATA_DIR) + "/" + file;
#else
  return "data/" + file;
#endif
}

inline TierOrder load_tier_order(const std::string& path) {
  return tier_order_from(ahp::parse_matrix(read_text_file(path), path));
}

// The world is shaped by the scenario's parameters plus the general part of
// the params file and the command-line overrides (inflation and AOI margin
// are baked into it). Operator sections only affect per-trial parameters.
inline std::shared_ptr<const World> load_world(const std::string& scenario_path, const ParamsFile& file,
                                               const std::vector<std::string>& cli_overrides,
                                               const TierOrder& order = kDefaultTierOrder) {
  std::vector<std::string> overrides = file.general;
  overrides.insert(overrides.end(), cli_overrides.begin(), cli_overrides.end());
  return make_world(load_scenario(scenario_path, {}, overrides), order);
}

}  // namespace hmi
