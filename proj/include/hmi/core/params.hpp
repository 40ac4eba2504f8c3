#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "hmi/core/error.hpp"

namespace hmi {

// Every tunable of the simulator, the planner, both switchers, the intent
// recogniser, the scripted operators and the conflict detector. Values can be
// overridden from scenario `param` lines, the controller parameter file, or
// the command line, all through the same name table below.
struct Params {
  // world
  double dt = 0.05;
  double v_max = 1.0;
  double omega_max = 1.5;
  double robot_radius = 0.3;
  double t_max = 600.0;
  double arrival_radius = 0.5;
  double collision_debounce = 1.0;

  // planner / autonomy
  double plan_margin = 0.15;  // extra inflation beyond the robot radius
  double a_dec = 0.5;
  double lookahead = 0.5;
  double curvature_lookahead = 1.0;
  double safety_clearance = 0.1;

  // switchers
  double error_window = 3.0;
  double trigger_time = 2.0;
  double cooldown = 5.0;
  double grace = 8.0;
  double firing_threshold = 0.5;

  // intent recognition
  double lambda_d = 0.5;
  double lambda_alpha = 1.0;
  double gamma = 0.9;
  double theta_intent = 0.6;
  double intent_rate = 5.0;

  // scripted operators
  double cruise_speed = 0.85;
  double heading_gain = 2.0;
  double noise_sigma = 0.05;
  double p_override = 0.9;
  double override_delay = 1.5;
  double dwell = 3.0;
  double visit_radius = 0.5;
  double stale_time = 2.0;
  double reaction_delay = 1.0;
  double distraction_length = 15.0;
  double distraction_delay_min = 4.0;
  double distraction_delay_max = 20.0;
  double aoi_margin = 2.0;

  // metrics
  double conflict_window = 10.0;
};

namespace detail {

struct ParamSpec {
  std::string_view name;
  double Params::*member;
  double lo;
  double hi;
};

inline constexpr double kInf = 1e300;

inline constexpr std::array kParamTable = {
    ParamSpec{"dt", &Params::dt, 1e-4, 1.0},
    ParamSpec{"v_max", &Params::v_max, 1e-3, 10.0},
    ParamSpec{"omega_max", &Params::omega_max, 1e-3, 20.0},
    ParamSpec{"robot_radius", &Params::robot_radius, 1e-3, 5.0},
    ParamSpec{"t_max", &Params::t_max, 1e-3, 1e6},
    ParamSpec{"arrival_radius", &Params::arrival_radius, 1e-3, 10.0},
    ParamSpec{"collision_debounce", &Params::collision_debounce, 0.0, 60.0},
    ParamSpec{"plan_margin", &Params::plan_margin, 0.0, 5.0},
    ParamSpec{"a_dec", &Params::a_dec, 1e-3, 10.0},
    ParamSpec{"lookahead", &Params::lookahead, 1e-2, 10.0},
    ParamSpec{"curvature_lookahead", &Params::curvature_lookahead, 1e-2, 10.0},
    ParamSpec{"safety_clearance", &Params::safety_clearance, 0.0, 5.0},
    ParamSpec{"error_window", &Params::error_window, 1e-2, 600.0},
    ParamSpec{"trigger_time", &Params::trigger_time, 0.0, 600.0},
    ParamSpec{"cooldown", &Params::cooldown, 0.0, 600.0},
    ParamSpec{"grace", &Params::grace, 0.0, 600.0},
    ParamSpec{"firing_threshold", &Params::firing_threshold, 0.0, 1.0},
    ParamSpec{"lambda_d", &Params::lambda_d, 0.0, 100.0},
    ParamSpec{"lambda_alpha", &Params::lambda_alpha, 0.0, 100.0},
    ParamSpec{"gamma", &Params::gamma, 0.0, 1.0},
    // theta_intent > 1 disables the exploring predicate entirely.
    ParamSpec{"theta_intent", &Params::theta_intent, 0.0, 2.0},
    ParamSpec{"intent_rate", &Params::intent_rate, 1e-2, 1000.0},
    ParamSpec{"cruise_speed", &Params::cruise_speed, 0.0, 10.0},
    ParamSpec{"heading_gain", &Params::heading_gain, 0.0, 100.0},
    ParamSpec{"noise_sigma", &Params::noise_sigma, 0.0, 10.0},
    ParamSpec{"p_override", &Params::p_override, 0.0, 1.0},
    ParamSpec{"override_delay", &Params::override_delay, 0.0, 600.0},
    ParamSpec{"dwell", &Params::dwell, 0.0, 600.0},
    ParamSpec{"visit_radius", &Params::visit_radius, 1e-3, 10.0},
    ParamSpec{"stale_time", &Params::stale_time, 0.0, 600.0},
    ParamSpec{"reaction_delay", &Params::reaction_delay, 0.0, 600.0},
    ParamSpec{"distraction_length", &Params::distraction_length, 0.0, 600.0},
    ParamSpec{"distraction_delay_min", &Params::distraction_delay_min, 0.0, 600.0},
    ParamSpec{"distraction_delay_max", &Params::distraction_delay_max, 0.0, 600.0},
    ParamSpec{"aoi_margin", &Params::aoi_margin, 0.0, 100.0},
    ParamSpec{"conflict_window", &Params::conflict_window, 0.0, 600.0},
};

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline bool has_param(std::string_view name) {
  for (const auto& p : detail::kParamTable)
    if (p.name == name) return true;
  return false;
}

inline double get_param(const Params& params, std::string_view name) {
  for (const auto& p : detail::kParamTable)
    if (p.name == name) return params.*p.member;
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

// Throws ConfigError for unknown names and out-of-range values.
inline void set_param(Params& params, std::string_view name, double value) {
  for (const auto& p : detail::kParamTable) {
    if (p.name != name) continue;
    if (!std::isfinite(value) || value < p.lo || value > p.hi) {
      std::ostringstream os;
      os << "parameter '" << name << "' = " << value << " outside [" << p.lo << ", " << p.hi << "]";
      throw ConfigError(os.str());
    }
    params.*p.member = value;
    return;
  }
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

inline double parse_number(std::string_view text, std::string_view what) {
  const std::string s = detail::trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + s + "' for " + std::string(what));
  }
}

// `name=value` with optional whitespace around '='.
inline void apply_assignment(Params& params, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("expected name=value, got '" + std::string(assignment) + "'");
  const auto name = detail::trim(assignment.substr(0, eq));
  set_param(params, name, parse_number(assignment.substr(eq + 1), name));
}

inline void check_consistency(const Params& p) {
  if (p.distraction_delay_min > p.distraction_delay_max)
    throw ConfigError("distraction_delay_min exceeds distraction_delay_max");
}

}  // namespace hmi
