#pragma once

// Run configuration: a single JSON document. Unknown keys are rejected.
//
//   {
//     "preset": "NMS" | "MRS" | "LN-chip" | "custom",
//     "overrides": {"J": 1.2, "alpha_in": [0.3, 0.0], "pump.g": 1e6, "pulse.tau_p": 4},
//     "sweep": {"axis": "Delta_a", "start": -6, "stop": 6, "step": 0.01, "lock_delta_b": true},
//     "solver": "analytic" | "moments" | "fock" | "cascade",
//     "sv_cancelled": true,
//     "squeeze_rule": 10,
//     "transistor": {"flux_start": 1e6, "flux_stop": 1e11, "points_per_decade": 10},
//     "validate": {"moment_tol": 1e-10, "fock_tol": 1e-3},
//     "outputs": {"csv": "out.csv"}
//   }

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sqnr/cascade.hpp"
#include "sqnr/device.hpp"
#include "sqnr/errors.hpp"

namespace sqnr {

enum class Solver { analytic, moments, fock, cascade };

inline const char* to_string(Solver s) {
  switch (s) {
    case Solver::analytic: return "analytic";
    case Solver::moments: return "moments";
    case Solver::fock: return "fock";
    case Solver::cascade: return "cascade";
  }
  return "?";
}

struct SweepSpec {
  std::string axis = "Delta_a";
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  bool lock_delta_b = true;  // Delta_a sweeps move Delta_b with them (probe-frequency scan)

  std::vector<double> grid() const {
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = start + step * static_cast<double>(k);
    return g;
  }
};

struct TransistorSpec {
  double flux_start = 1e6;
  double flux_stop = 1e11;
  int points_per_decade = 10;

  std::vector<double> flux_grid() const {
    const double lo = std::log10(flux_start), hi = std::log10(flux_stop);
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) * points_per_decade)) + 1;
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k)
      g[k] = std::pow(10.0, lo + static_cast<double>(k) / points_per_decade);
    return g;
  }
};

struct ValidateSpec {
  double moment_tol = 1e-10;
  double fock_tol = 1e-3;
};

struct RunConfig {
  std::string preset = "custom";
  DeviceParams device{};
  PumpSpec pump{};
  PulseSpec pulse{};
  std::optional<SweepSpec> sweep;
  Solver solver = Solver::analytic;
  bool sv_cancelled = true;
  std::optional<double> squeeze_rule;  // Delta_p_b = c sinh(r_p)
  TransistorSpec transistor{};
  ValidateSpec validate{};
  std::optional<std::string> csv_path;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"NMS", "MRS", "LN-chip", "custom"};
  return names;
}

// Scalar DeviceParams fields addressable by overrides and sweep axes.
inline double* device_field(DeviceParams& p, const std::string& key) {
  static const std::map<std::string, double DeviceParams::*> fields{
      {"kappa_a", &DeviceParams::kappa_a},     {"kappa_b", &DeviceParams::kappa_b},
      {"kappa_ex1", &DeviceParams::kappa_ex1}, {"kappa_ex2", &DeviceParams::kappa_ex2},
      {"J", &DeviceParams::J},                 {"Omega_p", &DeviceParams::Omega_p},
      {"theta_p", &DeviceParams::theta_p},     {"Delta_p_b", &DeviceParams::Delta_p_b},
      {"Delta_a", &DeviceParams::Delta_a},     {"Delta_b", &DeviceParams::Delta_b}};
  const auto it = fields.find(key);
  return it == fields.end() ? nullptr : &(p.*(it->second));
}

inline double* pump_field(PumpSpec& s, const std::string& key) {
  static const std::map<std::string, double PumpSpec::*> fields{
      {"g", &PumpSpec::g},         {"kappa_p", &PumpSpec::kappa_p}, {"kappa_ex2_p", &PumpSpec::kappa_ex2_p},
      {"Delta_p_c", &PumpSpec::Delta_p_c}, {"omega_p", &PumpSpec::omega_p}, {"P_p", &PumpSpec::P_p},
      {"kappa_a", &PumpSpec::kappa_a}};
  const auto it = fields.find(key);
  return it == fields.end() ? nullptr : &(s.*(it->second));
}

inline double* pulse_field(PulseSpec& s, const std::string& key) {
  static const std::map<std::string, double PulseSpec::*> fields{
      {"tau_p", &PulseSpec::tau_p}, {"tau_d", &PulseSpec::tau_d},           {"t_end", &PulseSpec::t_end},
      {"peak_rate", &PulseSpec::peak_rate}, {"sample_step", &PulseSpec::sample_step}};
  const auto it = fields.find(key);
  return it == fields.end() ? nullptr : &(s.*(it->second));
}

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

inline double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": non-finite number");
  return x;
}

inline bool bool_at(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
  return v.get<bool>();
}

inline void apply_preset(RunConfig& c, const std::string& name) {
  if (name == "NMS") {
    c.device = presets::nms();
    c.pump = presets::transistor_pump();
  } else if (name == "MRS") {
    c.device = presets::mrs();
    c.pump = presets::transistor_pump();
  } else if (name == "LN-chip") {
    c.device = presets::ln_chip();
    c.pump = presets::ln_chip_pump();
  } else if (name == "custom") {
    c.device = DeviceParams{};
    c.pump = PumpSpec{};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.preset = name;
}

inline void apply_override(RunConfig& c, const std::string& key, const json& v) {
  const std::string where = "overrides." + key;
  if (key == "alpha_in") {
    if (v.is_number()) {
      c.device.alpha_in = number_at(v, where);
    } else if (v.is_array() && v.size() == 2) {
      c.device.alpha_in = cplx(number_at(v[0], where), number_at(v[1], where));
    } else {
      throw ConfigError(where + ": expected a number or [re, im]");
    }
    return;
  }
  if (key == "pulse.dims") {
    if (!v.is_array() || v.size() != 3) throw ConfigError(where + ": expected three integers");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!v[i].is_number_integer()) throw ConfigError(where + ": expected three integers");
      c.pulse.dims[i] = v[i].get<int>();
    }
    return;
  }
  double* slot = nullptr;
  if (key.rfind("pump.", 0) == 0) {
    slot = pump_field(c.pump, key.substr(5));
  } else if (key.rfind("pulse.", 0) == 0) {
    slot = pulse_field(c.pulse, key.substr(6));
  } else {
    slot = device_field(c.device, key);
  }
  if (!slot) throw ConfigError("overrides: unknown parameter '" + key + "'");
  *slot = number_at(v, where);
}

inline SweepSpec parse_sweep(const json& j) {
  reject_unknown(j, {"axis", "start", "stop", "step", "lock_delta_b"}, "sweep");
  for (const char* k : {"axis", "start", "stop", "step"})
    if (!j.contains(k)) throw ConfigError(std::string("sweep: missing '") + k + "'");
  SweepSpec s;
  if (!j["axis"].is_string()) throw ConfigError("sweep.axis: expected a string");
  s.axis = j["axis"].get<std::string>();
  DeviceParams probe;
  if (s.axis != "r_p" && !device_field(probe, s.axis))
    throw ConfigError("sweep.axis: '" + s.axis + "' is not a parameter");
  s.start = number_at(j["start"], "sweep.start");
  s.stop = number_at(j["stop"], "sweep.stop");
  s.step = number_at(j["step"], "sweep.step");
  if (j.contains("lock_delta_b")) s.lock_delta_b = bool_at(j["lock_delta_b"], "sweep.lock_delta_b");
  if (!(s.step > 0.0)) throw ConfigError("sweep.step must be > 0");
  if (!(s.stop > s.start)) throw ConfigError("sweep: empty range (stop must exceed start)");
  return s;
}

}  // namespace detail

// `preset_flag`, when given, replaces the document's preset.
inline RunConfig parse_config(const nlohmann::json& j, const std::optional<std::string>& preset_flag = {}) {
  using detail::json;
  detail::reject_unknown(j, {"preset", "overrides", "sweep", "solver", "sv_cancelled", "squeeze_rule", "transistor",
                             "validate", "outputs"},
                         "config");
  RunConfig c;
  std::string preset = "custom";
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw ConfigError("preset: expected a string");
    preset = j["preset"].get<std::string>();
  }
  if (preset_flag) preset = *preset_flag;
  detail::apply_preset(c, preset);

  if (j.contains("overrides")) {
    if (!j["overrides"].is_object()) throw ConfigError("overrides: expected an object");
    for (const auto& [key, v] : j["overrides"].items()) detail::apply_override(c, key, v);
  }
  if (j.contains("sweep")) c.sweep = detail::parse_sweep(j["sweep"]);
  if (j.contains("solver")) {
    const json& v = j["solver"];
    if (!v.is_string()) throw ConfigError("solver: expected a string");
    const std::string s = v.get<std::string>();
    if (s == "analytic") c.solver = Solver::analytic;
    else if (s == "moments") c.solver = Solver::moments;
    else if (s == "fock") c.solver = Solver::fock;
    else if (s == "cascade") c.solver = Solver::cascade;
    else throw ConfigError("solver: unknown solver '" + s + "'");
  }
  if (j.contains("sv_cancelled")) c.sv_cancelled = detail::bool_at(j["sv_cancelled"], "sv_cancelled");
  if (j.contains("squeeze_rule")) {
    c.squeeze_rule = detail::number_at(j["squeeze_rule"], "squeeze_rule");
    if (!(*c.squeeze_rule > 0.0)) throw ConfigError("squeeze_rule must be > 0");
  }
  if (j.contains("transistor")) {
    const json& t = j["transistor"];
    detail::reject_unknown(t, {"flux_start", "flux_stop", "points_per_decade"}, "transistor");
    if (t.contains("flux_start")) c.transistor.flux_start = detail::number_at(t["flux_start"], "transistor.flux_start");
    if (t.contains("flux_stop")) c.transistor.flux_stop = detail::number_at(t["flux_stop"], "transistor.flux_stop");
    if (t.contains("points_per_decade")) {
      if (!t["points_per_decade"].is_number_integer()) throw ConfigError("transistor.points_per_decade: expected an integer");
      c.transistor.points_per_decade = t["points_per_decade"].get<int>();
    }
    if (!(c.transistor.flux_start > 0.0) || !(c.transistor.flux_stop > c.transistor.flux_start))
      throw ConfigError("transistor: need 0 < flux_start < flux_stop");
    if (c.transistor.points_per_decade < 1) throw ConfigError("transistor.points_per_decade must be >= 1");
  }
  if (j.contains("validate")) {
    const json& v = j["validate"];
    detail::reject_unknown(v, {"moment_tol", "fock_tol"}, "validate");
    if (v.contains("moment_tol")) c.validate.moment_tol = detail::number_at(v["moment_tol"], "validate.moment_tol");
    if (v.contains("fock_tol")) c.validate.fock_tol = detail::number_at(v["fock_tol"], "validate.fock_tol");
  }
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    detail::reject_unknown(o, {"csv"}, "outputs");
    if (o.contains("csv")) {
      if (!o["csv"].is_string()) throw ConfigError("outputs.csv: expected a string");
      c.csv_path = o["csv"].get<std::string>();
    }
  }

  try {
    c.device.validate();
    c.pump.validate();
    c.pulse.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline RunConfig parse_config_text(const std::string& text, const std::optional<std::string>& preset_flag = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, preset_flag);
}

inline RunConfig load_config(const std::string& path, const std::optional<std::string>& preset_flag = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), preset_flag);
}

}  // namespace sqnr
