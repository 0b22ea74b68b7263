// Copyright 2026 The nvdfs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nvdfs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnitDef {
  std::string_view name;
  double scale;         // internal units per one of this unit
  double decimal = 0.0; // exact power-of-ten size within its quantity, 0 if none
};

const std::vector<UnitDef>& units_of(Quantity q) {
  static const std::vector<UnitDef> frequency{{"Hz", units::hz(1.0), 1.0},
                                              {"kHz", units::khz(1.0), 1e3},
                                              {"MHz", units::mhz(1.0), 1e6},
                                              {"GHz", units::ghz(1.0), 1e9},
                                              {"rad/us", 1.0}};
  static const std::vector<UnitDef> gyromagnetic{{"Hz/G", units::hz(1.0), 1.0},
                                                 {"kHz/G", units::khz_per_gauss(1.0), 1e3},
                                                 {"MHz/G", units::mhz_per_gauss(1.0), 1e6},
                                                 {"rad/us/G", 1.0}};
  static const std::vector<UnitDef> time{{"ns", 1e-3, 1.0}, {"us", 1.0, 1e3}, {"ms", 1e3, 1e6}, {"s", 1e6, 1e9}};
  static const std::vector<UnitDef> field{{"G", 1.0, 1.0}, {"mT", 10.0, 10.0}, {"T", 1e4, 1e4}};
  static const std::vector<UnitDef> field_rate{{"G/us", 1.0, 1e3}, {"G/ms", 1e-3, 1.0}, {"mT/us", 10.0, 1e4}};
  static const std::vector<UnitDef> angle{{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};
  switch (q) {
    case Quantity::frequency: return frequency;
    case Quantity::gyromagnetic: return gyromagnetic;
    case Quantity::time: return time;
    case Quantity::field: return field;
    case Quantity::field_rate: return field_rate;
    case Quantity::angle: return angle;
  }
  return time;
}

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::frequency: return "frequency";
    case Quantity::gyromagnetic: return "gyromagnetic ratio";
    case Quantity::time: return "time";
    case Quantity::field: return "magnetic field";
    case Quantity::field_rate: return "field ramp rate";
    case Quantity::angle: return "angle";
  }
  return "?";
}

std::string unit_list(Quantity q) {
  std::string out;
  for (const auto& u : units_of(q)) {
    if (!out.empty()) out += ", ";
    out += u.name;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Split {
  double number;
  const UnitDef* unit;
};

Split split_quantity(std::string_view text, Quantity kind, const std::string& path) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) {
    throw ConfigError(path, "expected '<number> <unit>' for a " + std::string(quantity_name(kind)) + ", got '" +
                                std::string(text) + "'");
  }
  std::string unit(trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr))));
  if (unit.empty()) {
    throw ConfigError(path, "missing unit on '" + std::string(text) + "' (expected one of " + unit_list(kind) + ")");
  }
  if (unit.rfind("\xC2\xB5", 0) == 0) unit = "u" + unit.substr(2);  // micro sign
  for (const auto& u : units_of(kind)) {
    if (u.name == unit) {
      if (!std::isfinite(value)) throw ConfigError(path, "value must be finite");
      return {value, &u};
    }
  }
  throw ConfigError(path, "unknown unit '" + unit + "' for a " + std::string(quantity_name(kind)) +
                              " (expected one of " + unit_list(kind) + ")");
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ConfigError("", "cannot format number");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Key table.

enum class Kind { quantity, quantity_or_auto, number, integer, boolean, choice, choice_list, quantity_pair, string, axes };

struct KeySpec {
  std::string path;
  Kind kind;
  Quantity quantity = Quantity::time;
  std::string unit;
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;
  bool nonzero = false;
  std::vector<std::string> choices;
  std::string description;
};

KeySpec make(std::string path, Kind kind, Quantity quantity = Quantity::time, std::string unit = {}) {
  KeySpec k;
  k.path = std::move(path);
  k.kind = kind;
  k.quantity = quantity;
  k.unit = std::move(unit);
  return k;
}

KeySpec q(std::string path, Quantity quantity, std::string unit, double lo, bool lo_open, std::string description) {
  KeySpec k = make(std::move(path), Kind::quantity, quantity, std::move(unit));
  k.lo = lo;
  k.lo_open = lo_open;
  k.description = std::move(description);
  return k;
}

KeySpec num(std::string path, double lo, bool lo_open, double hi, bool hi_open, std::string description) {
  KeySpec k = make(std::move(path), Kind::number);
  k.lo = lo;
  k.lo_open = lo_open;
  k.hi = hi;
  k.hi_open = hi_open;
  k.description = std::move(description);
  return k;
}

KeySpec pick(std::string path, Kind kind, std::vector<std::string> choices, std::string description) {
  KeySpec k = make(std::move(path), kind);
  k.choices = std::move(choices);
  k.description = std::move(description);
  return k;
}

KeySpec plain(std::string path, Kind kind, std::string description) {
  KeySpec k = make(std::move(path), kind);
  k.description = std::move(description);
  return k;
}

const std::vector<std::string> kSweepTargets{"prepare", "logic-flip", "single-c13", "intuitive"};
const std::vector<std::string> kPreparations{"average", "zero", "one", "plus", "minus", "plus_i", "minus_i"};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back(pick("protocol.name", Kind::choice, protocol_names(), "Protocol this config is written for"));
    t.push_back(pick("protocol.direction", Kind::choice, {"zero_to_one", "one_to_zero"}, "Logic flip direction"));
    t.push_back(num("protocol.adiabatic_threshold", 0.0, false, 1.0, false,
                    "Instantaneous-eigenstate overlap below which a ramp is flagged"));
    t.push_back(q("protocol.duration", Quantity::time, "us", 0.0, true, "Free evolution time"));
    t.push_back(pick("protocol.preparation", Kind::choice, kPreparations,
                     "Initial logical state, or the average over the six cardinal states"));
    t.push_back(pick("protocol.variants", Kind::choice_list, {"independent", "common", "none"},
                     "Nuclear reservoir models to compare"));
    t.push_back(plain("protocol.scan", Kind::boolean, "Coarse grid search over pump centre and delay"));
    {
      KeySpec k = make("protocol.scan_center", Kind::quantity_pair, Quantity::time, "us");
      k.description = "Pump-centre search interval [min, max]";
      t.push_back(k);
      k.path = "protocol.scan_delay";
      k.description = "Delay search interval [min, max]";
      t.push_back(k);
    }
    t.push_back(q("protocol.scan_step", Quantity::time, "us", 0.0, true, "Search grid spacing"));
    t.push_back(q("protocol.scan_margin", Quantity::time, "us", 0.0, false,
                  "Stokes centre stays at least this far before the window end"));
    {
      KeySpec k = num("protocol.scan_report_points", 2.0, false, 1e7, false, "Reporting grid size of scan runs");
      k.kind = Kind::integer;
      t.push_back(k);
    }
    t.push_back(num("protocol.scan_rtol", 0.0, true, 1.0, true, "Relative tolerance of scan runs"));
    t.push_back(num("protocol.scan_atol", 0.0, true, 1.0, true, "Absolute tolerance of scan runs"));

    t.push_back(q("system.D", Quantity::frequency, "MHz", 0.0, true, "Zero-field splitting D/2pi"));
    t.push_back(q("system.gamma_e", Quantity::gyromagnetic, "MHz/G", 0.0, true, "Electron gyromagnetic ratio / 2pi"));
    t.push_back(q("system.gamma_c", Quantity::gyromagnetic, "kHz/G", 0.0, true, "13C gyromagnetic ratio / 2pi"));
    t.push_back(q("system.d12", Quantity::frequency, "kHz", 0.0, false, "Nuclear dipolar coupling d12/2pi"));
    t.push_back(q("system.T2e_star", Quantity::time, "us", 0.0, true, "Electron dephasing time"));
    t.push_back(q("system.carbons[].A_zz", Quantity::frequency, "MHz", -kInf, false, "Secular hyperfine A_zz/2pi"));
    t.push_back(q("system.carbons[].A_ani", Quantity::frequency, "MHz", 0.0, false, "Anisotropic hyperfine A_ani/2pi"));
    t.push_back(q("system.carbons[].phi", Quantity::angle, "rad", -kInf, false, "Azimuth of the anisotropic term"));
    t.push_back(q("system.carbons[].T2n_star", Quantity::time, "us", 0.0, true, "Nuclear dephasing time"));

    t.push_back(q("fields.bx", Quantity::field, "G", 0.0, false, "Transverse field (target of the Bx ramp)"));
    {
      KeySpec k = q("fields.bz", Quantity::field, "G", -kInf, false,
                    "Axial field (ramp target); 'auto' selects the singlet degeneracy point");
      t.push_back(k);
    }
    t.push_back(q("fields.start_bx", Quantity::field, "G", 0.0, false, "Initial transverse field"));
    t.push_back(q("fields.start_bz", Quantity::field, "G", -kInf, false, "Initial axial field"));
    {
      KeySpec k = q("fields.bz_start", Quantity::field, "G", -kInf, false,
                    "Axial field before the logic-flip ramp; 'auto' picks it from the initial state");
      k.kind = Kind::quantity_or_auto;
      t.push_back(k);
    }
    {
      KeySpec k = q("fields.bx_rate", Quantity::field_rate, "G/us", -kInf, false, "Bx ramp rate");
      k.nonzero = true;
      t.push_back(k);
      k.path = "fields.bz_rate";
      k.description = "Bz ramp rate";
      t.push_back(k);
    }

    t.push_back(q("pulses.omega0", Quantity::frequency, "MHz", 0.0, false, "Peak Rabi frequency Omega0/2pi"));
    t.push_back(q("pulses.sigma", Quantity::time, "us", 0.0, true, "Gaussian width of both pulses"));
    t.push_back(q("pulses.window", Quantity::time, "us", 0.0, true, "Pulse window length"));
    t.push_back(num("pulses.boundary_ratio", 0.0, true, 1.0, true,
                    "Largest allowed ratio of the later to the earlier pulse at the window edges"));
    t.push_back(q("pulses.sigma_p", Quantity::time, "us", 0.0, true, "Pump width"));
    t.push_back(q("pulses.sigma_s", Quantity::time, "us", 0.0, true, "Stokes width"));
    t.push_back(q("pulses.pump_center", Quantity::time, "us", 0.0, false, "Pump centre"));
    t.push_back(q("pulses.delay", Quantity::time, "us", 0.0, false, "Stokes centre minus pump centre"));

    t.push_back(pick("dissipation.mode", Kind::choice, {"independent", "common", "none"}, "Nuclear reservoir model"));
    t.push_back(pick("model.ms1", Kind::choice, {"simple", "full"},
                     "m_s=+1 manifold: isotropic hyperfine only, or with transverse terms"));
    t.push_back(plain("model.full_coupling", Kind::boolean, "Drive every ground/excited pair with both fields"));

    t.push_back(num("tolerances.rtol", 0.0, true, 1.0, true, "Integrator relative tolerance"));
    t.push_back(num("tolerances.atol", 0.0, true, 1.0, true, "Integrator absolute tolerance"));
    t.push_back(q("tolerances.max_step", Quantity::time, "us", 0.0, true, "Largest integrator step"));
    t.push_back(q("tolerances.min_step", Quantity::time, "us", 0.0, true, "Step underflow threshold"));
    t.push_back(q("tolerances.initial_step", Quantity::time, "us", 0.0, true, "First trial step"));

    t.push_back(plain("output.directory", Kind::string, "Output directory (empty: --out, NVDFS_OUT_DIR, nvdfs_out)"));
    t.push_back(pick("output.format", Kind::choice, {"csv", "json", "both"}, "Trajectory file formats"));
    {
      KeySpec k = num("output.report_points", 2.0, false, 1e7, false, "Reporting grid size per protocol");
      k.kind = Kind::integer;
      t.push_back(k);
    }
    t.push_back(plain("output.observables", Kind::choice_list, "CSV columns after t_us, in order (empty: all)"));

    t.push_back(pick("sweep.protocol", Kind::choice, kSweepTargets, "Protocol run at every sweep point"));
    t.push_back(plain("sweep.axes", Kind::axes, "Swept keys; the cartesian product of their values is run"));
    return t;
  }();
  return table;
}

const KeySpec* find_spec(const std::string& path) {
  for (const auto& k : key_table()) {
    if (k.path == path) return &k;
  }
  return nullptr;
}

bool is_section(const std::string& path) {
  const std::string prefix = path + ".";
  const std::string array_prefix = path + "[].";
  for (const auto& k : key_table()) {
    if (k.path.rfind(prefix, 0) == 0 || k.path.rfind(array_prefix, 0) == 0) return true;
  }
  return false;
}

// fields.bz accepts "auto" for some protocols only; that is decided by the default.
bool auto_allowed(const std::string& path, const Json& defaults) {
  const auto ptr = Json::json_pointer("/" + [&] {
    std::string p = path;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }());
  return defaults.contains(ptr) && defaults.at(ptr).is_string() && defaults.at(ptr).get<std::string>() == "auto";
}

Json::json_pointer pointer(const std::string& dotted) {
  std::string p = "/" + dotted;
  std::replace(p.begin(), p.end(), '.', '/');
  return Json::json_pointer(p);
}

// ---------------------------------------------------------------------------
// Defaults.

Json carbon(std::string a_zz, std::string a_ani, std::string t2n) {
  return {{"A_zz", std::move(a_zz)}, {"A_ani", std::move(a_ani)}, {"phi", "0 rad"}, {"T2n_star", std::move(t2n)}};
}

Json system_section(int n_carbons) {
  Json s = {{"D", "2870 MHz"}, {"gamma_e", "2.8 MHz/G"}, {"gamma_c", "1.07 kHz/G"}};
  if (n_carbons == 2) s["d12"] = "4 kHz";
  s["T2e_star"] = "7 us";
  if (n_carbons == 2) {
    s["carbons"] = Json::array({carbon("12.45 MHz", "1.16 MHz", "500 us"), carbon("2.28 MHz", "0.24 MHz", "700 us")});
  } else {
    s["carbons"] = Json::array({carbon("1.07 MHz", "0 MHz", "500 us")});
  }
  return s;
}

Json tolerances_section() {
  return {{"rtol", 1e-8}, {"atol", 1e-10}, {"max_step", "0.1 us"}, {"min_step", "1e-09 us"}, {"initial_step", "0.001 us"}};
}

Json output_section(bool trajectories) {
  Json o = {{"directory", ""}, {"format", "both"}};
  if (trajectories) {
    o["report_points"] = 500;
    o["observables"] = Json::array();
  }
  return o;
}

Json stirap_pulses(std::string omega0, std::string sigma) {
  return {{"omega0", std::move(omega0)}, {"sigma", std::move(sigma)}, {"window", "30 us"}, {"boundary_ratio", 0.1}};
}

Json flip_defaults(const std::string& name) {
  Json proto = {{"name", name}};
  if (name == "logic-flip") proto["direction"] = "zero_to_one";
  proto["adiabatic_threshold"] = 0.9;
  return {{"protocol", proto},
          {"system", system_section(2)},
          {"fields", {{"bx", "100 G"}, {"bz", "auto"}, {"bz_start", "auto"}, {"bz_rate", "10 G/us"}}},
          {"pulses", stirap_pulses("1 MHz", "5 us")},
          {"dissipation", {{"mode", "independent"}}},
          {"model", {{"ms1", "simple"}, {"full_coupling", false}}},
          {"tolerances", tolerances_section()},
          {"output", output_section(true)}};
}

Json defaults_for(const std::string& name, const std::string& sweep_target) {
  if (name == "prepare") {
    return {{"protocol", {{"name", name}, {"adiabatic_threshold", 0.9}}},
            {"system", system_section(2)},
            {"fields",
             {{"start_bx", "5 G"},
              {"start_bz", "70 G"},
              {"bx", "100 G"},
              {"bz", "5 G"},
              {"bx_rate", "7 G/us"},
              {"bz_rate", "-10 G/us"}}},
            {"pulses", stirap_pulses("0.5 MHz", "5 us")},
            {"dissipation", {{"mode", "independent"}}},
            {"model", {{"ms1", "simple"}, {"full_coupling", false}}},
            {"tolerances", tolerances_section()},
            {"output", output_section(true)}};
  }
  if (name == "logic-flip" || name == "stirap-discriminate") return flip_defaults(name);
  if (name == "dfs-compare") {
    return {{"protocol",
             {{"name", name},
              {"duration", "100 us"},
              {"preparation", "average"},
              {"variants", Json::array({"independent", "common"})}}},
            {"system", system_section(2)},
            {"fields", {{"bx", "100 G"}, {"bz", "auto"}}},
            {"tolerances", tolerances_section()},
            {"output", output_section(true)}};
  }
  if (name == "single-c13") {
    return {{"protocol", {{"name", name}}},
            {"system", system_section(1)},
            {"fields", {{"bx", "100 G"}, {"bz", "10 G"}}},
            {"pulses", stirap_pulses("0.5 MHz", "9 us")},
            {"dissipation", {{"mode", "independent"}}},
            {"model", {{"full_coupling", false}}},
            {"tolerances", tolerances_section()},
            {"output", output_section(true)}};
  }
  if (name == "intuitive") {
    return {{"protocol",
             {{"name", name},
              {"scan", true},
              {"scan_center", Json::array({"6 us", "16 us"})},
              {"scan_delay", Json::array({"4 us", "20 us"})},
              {"scan_step", "2 us"},
              {"scan_margin", "2 us"},
              {"scan_report_points", 31},
              {"scan_rtol", 1e-6},
              {"scan_atol", 1e-8}}},
            {"system", system_section(2)},
            {"fields", {{"bx", "100 G"}, {"bz", "70 G"}}},
            {"pulses",
             {{"omega0", "0.1 MHz"},
              {"sigma_p", "5.5 us"},
              {"sigma_s", "2.8 us"},
              {"window", "30 us"},
              {"pump_center", "8 us"},
              {"delay", "16 us"}}},
            {"dissipation", {{"mode", "independent"}}},
            {"model", {{"ms1", "simple"}, {"full_coupling", false}}},
            {"tolerances", tolerances_section()},
            {"output", output_section(true)}};
  }
  if (name == "eig-report") {
    return {{"protocol", {{"name", name}}},
            {"system", system_section(2)},
            {"fields", {{"bx", "100 G"}, {"bz", "70 G"}}},
            {"output", output_section(false)}};
  }
  if (name == "sweep") {
    Json d = defaults_for(sweep_target, "");
    d["protocol"]["name"] = "sweep";
    d["sweep"] = {{"protocol", sweep_target}, {"axes", Json::array()}};
    return d;
  }
  throw ConfigError("protocol.name", "unknown protocol '" + name + "'");
}

// ---------------------------------------------------------------------------
// Validation.

void reject_unknown(const Json& node, const std::string& path, const Json& defaults, const std::string& protocol) {
  if (node.is_null()) throw ConfigError(path, "null is not allowed");
  if (path == "system.carbons") {
    if (!node.is_array()) throw ConfigError(path, "expected an array of carbon objects");
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::string elem = path + "[" + std::to_string(i) + "]";
      if (!node[i].is_object()) throw ConfigError(elem, "expected an object");
      for (const auto& [key, value] : node[i].items()) {
        if (!find_spec(path + "[]." + key)) throw ConfigError(elem + "." + key, "unknown key");
        if (value.is_null()) throw ConfigError(elem + "." + key, "null is not allowed");
      }
    }
    return;
  }
  if (node.is_object() && (path.empty() || is_section(path))) {
    for (const auto& [key, value] : node.items()) {
      const std::string child = path.empty() ? key : path + "." + key;
      if (!find_spec(child) && !is_section(child)) throw ConfigError(child, "unknown key");
      if (!defaults.contains(pointer(child))) {
        throw ConfigError(child, "not used by protocol '" + protocol + "'");
      }
      reject_unknown(value, child, defaults, protocol);
    }
    return;
  }
  if (path.empty()) throw ConfigError("", "config must be a JSON object");
  if (is_section(path) && !find_spec(path)) throw ConfigError(path, "expected an object");
}

void check_range(const KeySpec& k, double v, const std::string& path) {
  const bool below = k.lo_open ? !(v > k.lo) : !(v >= k.lo);
  const bool above = k.hi_open ? !(v < k.hi) : !(v <= k.hi);
  if (below || above || (k.nonzero && v == 0.0)) {
    std::ostringstream msg;
    msg << "value " << v << " out of range";
    if (std::isfinite(k.lo)) msg << (k.lo_open ? " (must be > " : " (must be >= ") << k.lo << ")";
    if (std::isfinite(k.hi)) msg << (k.hi_open ? " (must be < " : " (must be <= ") << k.hi << ")";
    if (k.nonzero) msg << " (must be nonzero)";
    throw ConfigError(path, msg.str());
  }
}

Json canonical_leaf(const KeySpec& k, const Json& v, const std::string& path, const Json& defaults,
                    const std::string& protocol) {
  switch (k.kind) {
    case Kind::quantity:
    case Kind::quantity_or_auto: {
      if (v.is_number()) throw ConfigError(path, "missing unit (write e.g. \"" + v.dump() + " " + k.unit + "\")");
      if (!v.is_string()) throw ConfigError(path, "expected a string with a unit");
      const auto s = v.get<std::string>();
      if (s == "auto") {
        if (k.kind == Kind::quantity_or_auto || auto_allowed(path, defaults)) return s;
        throw ConfigError(path, "'auto' is not accepted here");
      }
      const auto c = canonical_quantity(s, k.quantity, k.unit, path);
      check_range(k, split_quantity(c, k.quantity, path).number, path);
      return c;
    }
    case Kind::number: {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ConfigError(path, "value must be finite");
      check_range(k, d, path);
      return d;
    }
    case Kind::integer: {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
      check_range(k, static_cast<double>(v.get<long long>()), path);
      return v.get<long long>();
    }
    case Kind::boolean:
      if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
      return v;
    case Kind::string:
      if (!v.is_string()) throw ConfigError(path, "expected a string");
      return v;
    case Kind::choice: {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
      const auto s = v.get<std::string>();
      if (std::find(k.choices.begin(), k.choices.end(), s) == k.choices.end()) {
        std::string allowed;
        for (const auto& c : k.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        throw ConfigError(path, "'" + s + "' is not one of " + allowed);
      }
      return v;
    }
    case Kind::choice_list: {
      if (!v.is_array()) throw ConfigError(path, "expected an array of strings");
      const auto allowed = path == "output.observables" ? protocol_observables(protocol) : k.choices;
      std::set<std::string> seen;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string elem = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_string()) throw ConfigError(elem, "expected a string");
        const auto s = v[i].get<std::string>();
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
          throw ConfigError(elem, "'" + s + "' is not accepted here");
        }
        if (!seen.insert(s).second) throw ConfigError(elem, "duplicate entry '" + s + "'");
      }
      if (path == "protocol.variants" && v.empty()) throw ConfigError(path, "needs at least one variant");
      return v;
    }
    case Kind::quantity_pair: {
      if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [min, max]");
      Json out = Json::array();
      for (std::size_t i = 0; i < 2; ++i) {
        const std::string elem = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_string()) throw ConfigError(elem, "expected a string with a unit");
        out.push_back(canonical_quantity(v[i].get<std::string>(), k.quantity, k.unit, elem));
      }
      if (parse_quantity(out[0].get<std::string>(), k.quantity, path) >
          parse_quantity(out[1].get<std::string>(), k.quantity, path)) {
        throw ConfigError(path, "min exceeds max");
      }
      return out;
    }
    case Kind::axes: {
      if (!v.is_array()) throw ConfigError(path, "expected an array of {key, values}");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string elem = path + "[" + std::to_string(i) + "]";
        const auto& a = v[i];
        if (!a.is_object()) throw ConfigError(elem, "expected an object");
        for (const auto& [key, value] : a.items()) {
          if (key != "key" && key != "values") throw ConfigError(elem + "." + key, "unknown key");
        }
        if (!a.contains("key") || !a["key"].is_string()) throw ConfigError(elem + ".key", "expected a string");
        if (!a.contains("values") || !a["values"].is_array() || a["values"].empty()) {
          throw ConfigError(elem + ".values", "expected a non-empty array");
        }
      }
      return v;
    }
  }
  return v;
}

void canonicalize(Json& eff, const Json& defaults, const std::string& protocol) {
  for (const auto& k : key_table()) {
    const auto pos = k.path.find("[].");
    if (pos != std::string::npos) {
      const std::string array_path = k.path.substr(0, pos);
      const std::string field = k.path.substr(pos + 3);
      if (!eff.contains(pointer(array_path))) continue;
      auto& arr = eff.at(pointer(array_path));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string elem = array_path + "[" + std::to_string(i) + "]." + field;
        if (!arr[i].contains(field)) throw ConfigError(elem, "missing required key");
        arr[i][field] = canonical_leaf(k, arr[i][field], elem, defaults, protocol);
      }
      continue;
    }
    if (!eff.contains(pointer(k.path))) continue;
    auto& node = eff.at(pointer(k.path));
    node = canonical_leaf(k, node, k.path, defaults, protocol);
  }
}

// Missing carbon fields come from the default carbon at the same index.
void fill_carbons(Json& user, const Json& defaults) {
  const auto ptr = pointer("system.carbons");
  if (!user.contains(ptr) || !user.at(ptr).is_array()) return;
  const auto& def = defaults.at(ptr);
  auto& arr = user.at(ptr);
  if (arr.empty()) throw ConfigError("system.carbons", "at least one carbon is required");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_object()) continue;
    if (!arr[i].contains("phi")) arr[i]["phi"] = "0 rad";
    if (i < def.size()) {
      for (const auto& [key, value] : def[i].items()) {
        if (!arr[i].contains(key)) arr[i][key] = value;
      }
    }
  }
}

void apply_override(Json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must read key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (seg.empty()) throw ConfigError(path, "empty key segment");
    const bool last = dot == std::string::npos;
    if (node->is_array()) {
      std::size_t idx = 0;
      const auto [p, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
      if (ec != std::errc() || p != seg.data() + seg.size() || idx > node->size()) {
        throw ConfigError(path, "bad array index '" + seg + "'");
      }
      if (idx == node->size()) node->push_back(Json::object());
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) throw ConfigError(path, "cannot descend into a non-object");
      node = &(*node)[seg];
    }
    if (last) {
      *node = value;
      return;
    }
    start = dot + 1;
    if (node->is_null()) {
      const char c = start < path.size() ? path[start] : 'x';
      *node = (c >= '0' && c <= '9') ? Json::array() : Json::object();
    }
  }
}

Json parse_text(std::string_view text) {
  const auto t = trim(text);
  if (t.empty()) return Json::object();
  try {
    return Json::parse(t);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Typed access.

const Json& at(const RunConfig& cfg, const std::string& path) {
  const auto ptr = pointer(path);
  if (!cfg.effective.contains(ptr)) throw ConfigError(path, "missing from the effective config");
  return cfg.effective.at(ptr);
}

double quantity(const RunConfig& cfg, const std::string& path, Quantity kind) {
  return parse_quantity(at(cfg, path).get<std::string>(), kind, path);
}

std::optional<double> quantity_or_auto(const RunConfig& cfg, const std::string& path, Quantity kind) {
  const auto s = at(cfg, path).get<std::string>();
  if (s == "auto") return std::nullopt;
  return parse_quantity(s, kind, path);
}

RegisterConfig register_config(const RunConfig& cfg, std::size_t expected_min, std::size_t expected_max) {
  RegisterConfig reg;
  reg.constants.zero_field_splitting = quantity(cfg, "system.D", Quantity::frequency);
  reg.constants.gamma_e = quantity(cfg, "system.gamma_e", Quantity::gyromagnetic);
  reg.constants.gamma_c = quantity(cfg, "system.gamma_c", Quantity::gyromagnetic);
  if (cfg.effective.contains(pointer("system.d12"))) reg.d12 = quantity(cfg, "system.d12", Quantity::frequency);
  reg.t2e_star = quantity(cfg, "system.T2e_star", Quantity::time);
  const auto& arr = at(cfg, "system.carbons");
  if (arr.size() < expected_min || arr.size() > expected_max) {
    std::ostringstream msg;
    msg << "protocol '" << cfg.protocol << "' needs ";
    if (expected_min == expected_max) {
      msg << expected_min;
    } else {
      msg << expected_min << " to " << expected_max;
    }
    msg << " carbon(s), got " << arr.size();
    throw ConfigError("system.carbons", msg.str());
  }
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string base = "system.carbons[" + std::to_string(i) + "].";
    CarbonParams c;
    c.a_zz = parse_quantity(arr[i]["A_zz"].get<std::string>(), Quantity::frequency, base + "A_zz");
    c.a_ani = parse_quantity(arr[i]["A_ani"].get<std::string>(), Quantity::frequency, base + "A_ani");
    c.phi = parse_quantity(arr[i]["phi"].get<std::string>(), Quantity::angle, base + "phi");
    c.t2n_star = parse_quantity(arr[i]["T2n_star"].get<std::string>(), Quantity::time, base + "T2n_star");
    reg.carbons.push_back(c);
  }
  return reg;
}

SolverSettings solver_settings(const RunConfig& cfg) {
  SolverSettings s;
  s.integrator.rtol = at(cfg, "tolerances.rtol").get<double>();
  s.integrator.atol = at(cfg, "tolerances.atol").get<double>();
  s.integrator.max_step = quantity(cfg, "tolerances.max_step", Quantity::time);
  s.integrator.min_step = quantity(cfg, "tolerances.min_step", Quantity::time);
  s.integrator.initial_step = quantity(cfg, "tolerances.initial_step", Quantity::time);
  s.report_points = at(cfg, "output.report_points").get<int>();
  return s;
}

StirapSettings stirap_settings(const RunConfig& cfg) {
  StirapSettings s;
  s.omega0 = quantity(cfg, "pulses.omega0", Quantity::frequency);
  s.sigma = quantity(cfg, "pulses.sigma", Quantity::time);
  s.window = quantity(cfg, "pulses.window", Quantity::time);
  s.boundary_ratio = at(cfg, "pulses.boundary_ratio").get<double>();
  return s;
}

void require_protocol(const RunConfig& cfg, std::initializer_list<std::string_view> names) {
  for (auto n : names) {
    if (cfg.protocol == n) return;
  }
  throw ConfigError("protocol.name", "config is for '" + cfg.protocol + "'");
}

}  // namespace

double parse_quantity(std::string_view text, Quantity kind, const std::string& key_path) {
  const auto s = split_quantity(text, kind, key_path);
  return s.number * s.unit->scale;
}

std::string canonical_quantity(std::string_view text, Quantity kind, std::string_view canonical_unit,
                               const std::string& key_path) {
  const auto s = split_quantity(text, kind, key_path);
  const UnitDef* target = nullptr;
  for (const auto& u : units_of(kind)) {
    if (u.name == canonical_unit) target = &u;
  }
  if (!target) throw ConfigError(key_path, "internal: unknown canonical unit");
  double v = s.number;
  if (s.unit != target) {
    if (s.unit->decimal > 0.0 && target->decimal > 0.0) {
      // powers of ten: multiply or divide by an exact integer
      v = s.unit->decimal >= target->decimal ? v * (s.unit->decimal / target->decimal)
                                             : v / (target->decimal / s.unit->decimal);
    } else {
      v = v * (s.unit->scale / target->scale);
    }
  }
  return format_number(v) + " " + std::string(canonical_unit);
}

const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names{"dfs-compare", "prepare",   "logic-flip", "stirap-discriminate",
                                              "single-c13",  "intuitive", "eig-report", "sweep"};
  return names;
}

bool is_protocol(std::string_view name) {
  const auto& n = protocol_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<std::string> protocol_observables(std::string_view protocol) {
  std::vector<std::string> tri{"fidelity"};
  for (int k = 1; k <= 8; ++k) tri.push_back("pop_psi" + std::to_string(k));
  tri.push_back("pop_ms1");
  tri.push_back("energy");
  if (protocol == "prepare" || protocol == "logic-flip" || protocol == "intuitive") return tri;
  if (protocol == "stirap-discriminate") {
    std::vector<std::string> out;
    for (const char* prefix : {"stirap_", "b_stirap_"}) {
      for (const auto& n : tri) out.push_back(prefix + n);
    }
    return out;
  }
  if (protocol == "dfs-compare") {
    std::vector<std::string> out;
    for (const char* mode : {"independent", "common", "none"}) {
      for (const char* qubit : {"dfs_", "bare_"}) out.push_back(qubit + std::string(mode));
    }
    return out;
  }
  if (protocol == "single-c13") return {"fidelity", "pop_phi1", "pop_phi2", "pop_phi3", "pop_phi4", "pop_ms1"};
  return {};
}

Json default_config(std::string_view protocol) {
  const std::string name(protocol);
  Json d = defaults_for(name, "single-c13");
  RunConfig cfg{name, d};
  canonicalize(cfg.effective, d, name);
  return cfg.effective;
}

RunConfig parse_config(std::string_view text, std::string_view protocol, std::span<const std::string> overrides) {
  Json user = parse_text(text);
  if (!user.is_object()) throw ConfigError("", "config must be a JSON object");
  // Only used to find the protocol; override errors surface when applied to the full config.
  Json probe = user;
  for (const auto& o : overrides) {
    try {
      apply_override(probe, o);
    } catch (const ConfigError&) {
    }
  }

  std::string name(protocol);
  const auto name_ptr = pointer("protocol.name");
  if (probe.contains(name_ptr)) {
    if (!probe.at(name_ptr).is_string()) throw ConfigError("protocol.name", "expected a string");
    const auto given = probe.at(name_ptr).get<std::string>();
    if (name.empty()) {
      name = given;
    } else if (given != name) {
      throw ConfigError("protocol.name", "config is for '" + given + "' but '" + name + "' was requested");
    }
  }
  if (name.empty()) throw ConfigError("protocol.name", "no protocol given");
  if (!is_protocol(name)) throw ConfigError("protocol.name", "unknown protocol '" + name + "'");

  std::string target = "single-c13";
  if (name == "sweep") {
    const auto ptr = pointer("sweep.protocol");
    if (probe.contains(ptr)) {
      if (!probe.at(ptr).is_string()) throw ConfigError("sweep.protocol", "expected a string");
      target = probe.at(ptr).get<std::string>();
      if (std::find(kSweepTargets.begin(), kSweepTargets.end(), target) == kSweepTargets.end()) {
        throw ConfigError("sweep.protocol", "'" + target + "' cannot be swept");
      }
    }
  }
  const Json defaults = defaults_for(name, target);
  reject_unknown(user, "", defaults, name);
  fill_carbons(user, defaults);

  Json eff = defaults;
  eff.merge_patch(user);
  if (!overrides.empty()) {
    for (const auto& o : overrides) apply_override(eff, o);
    reject_unknown(eff, "", defaults, name);
    fill_carbons(eff, defaults);
  }
  eff["protocol"]["name"] = name;
  canonicalize(eff, defaults, name);
  RunConfig cfg{name, std::move(eff)};

  // Domain checks that need typed values.
  if (name == "prepare") {
    preparation_params(cfg);
  } else if (name == "logic-flip" || name == "stirap-discriminate") {
    logic_flip_params(cfg);
  } else if (name == "dfs-compare") {
    dfs_params(cfg);
  } else if (name == "single-c13") {
    single_c13_params(cfg);
  } else if (name == "intuitive") {
    intuitive_params(cfg);
  } else if (name == "eig-report") {
    eig_report_params(cfg);
  } else if (name == "sweep") {
    const auto spec = sweep_spec(cfg);
    for (const auto& axis : spec.axes) {
      for (const auto& v : axis.values) {
        const std::pair<std::string, Json> a{axis.key, v};
        sweep_job_config(cfg, std::span(&a, 1));
      }
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) { return cfg.effective.dump(2) + "\n"; }

Json config_schema() {
  Json root = {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
               {"title", "nvdfs run configuration"},
               {"type", "object"},
               {"additionalProperties", false},
               {"properties", Json::object()}};
  auto leaf_schema = [](const KeySpec& k) {
    Json s = {{"description", k.description}};
    switch (k.kind) {
      case Kind::quantity:
      case Kind::quantity_or_auto: {
        std::string pattern = "^\\s*[-+]?[0-9.eE+-]+\\s*(";
        bool first = true;
        for (const auto& u : units_of(k.quantity)) {
          pattern += (first ? "" : "|") + std::string(u.name);
          first = false;
        }
        pattern += ")\\s*$";
        if (k.path == "fields.bz" || k.kind == Kind::quantity_or_auto) pattern = "(" + pattern + ")|^auto$";
        s["type"] = "string";
        s["pattern"] = pattern;
        s["x-unit"] = k.unit;
        break;
      }
      case Kind::number: s["type"] = "number"; break;
      case Kind::integer: s["type"] = "integer"; break;
      case Kind::boolean: s["type"] = "boolean"; break;
      case Kind::string: s["type"] = "string"; break;
      case Kind::choice:
        s["type"] = "string";
        s["enum"] = k.choices;
        break;
      case Kind::choice_list:
        s["type"] = "array";
        s["items"] = {{"type", "string"}};
        if (!k.choices.empty()) s["items"]["enum"] = k.choices;
        break;
      case Kind::quantity_pair:
        s["type"] = "array";
        s["minItems"] = 2;
        s["maxItems"] = 2;
        s["items"] = {{"type", "string"}};
        s["x-unit"] = k.unit;
        break;
      case Kind::axes:
        s["type"] = "array";
        s["items"] = {{"type", "object"},
                      {"additionalProperties", false},
                      {"required", {"key", "values"}},
                      {"properties", {{"key", {{"type", "string"}}}, {"values", {{"type", "array"}, {"minItems", 1}}}}}};
        break;
    }
    if ((k.kind == Kind::number || k.kind == Kind::integer)) {
      if (std::isfinite(k.lo)) s[k.lo_open ? "exclusiveMinimum" : "minimum"] = k.lo;
      if (std::isfinite(k.hi)) s[k.hi_open ? "exclusiveMaximum" : "maximum"] = k.hi;
    }
    return s;
  };
  for (const auto& k : key_table()) {
    Json* node = &root;
    std::string rest = k.path;
    while (true) {
      const auto dot = rest.find('.');
      std::string seg = rest.substr(0, dot);
      const bool array = seg.size() > 2 && seg.compare(seg.size() - 2, 2, "[]") == 0;
      if (array) seg.resize(seg.size() - 2);
      if (dot == std::string::npos) {
        (*node)["properties"][seg] = leaf_schema(k);
        break;
      }
      Json& child = (*node)["properties"][seg];
      if (array) {
        if (child.is_null()) {
          child = {{"type", "array"},
                   {"items", {{"type", "object"}, {"additionalProperties", false}, {"properties", Json::object()}}}};
        }
        node = &child["items"];
      } else {
        if (child.is_null()) child = {{"type", "object"}, {"additionalProperties", false}, {"properties", Json::object()}};
        node = &child;
      }
      rest = rest.substr(dot + 1);
    }
  }
  return root;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.path);
  return out;
}

std::string run_id(const RunConfig& cfg) {
  Json copy = cfg.effective;
  copy.erase("output");
  const std::string text = copy.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OutputSettings output_settings(const RunConfig& cfg) {
  OutputSettings o;
  o.directory = at(cfg, "output.directory").get<std::string>();
  o.format = at(cfg, "output.format").get<std::string>();
  if (cfg.effective.contains(pointer("output.observables"))) {
    o.observables = at(cfg, "output.observables").get<std::vector<std::string>>();
  }
  return o;
}

DfsParams dfs_params(const RunConfig& cfg) {
  require_protocol(cfg, {"dfs-compare"});
  DfsParams p;
  p.reg = register_config(cfg, 2, 2);
  p.bx = quantity(cfg, "fields.bx", Quantity::field);
  p.bz = quantity_or_auto(cfg, "fields.bz", Quantity::field);
  p.duration = quantity(cfg, "protocol.duration", Quantity::time);
  p.preparation = at(cfg, "protocol.preparation").get<std::string>();
  p.variants.clear();
  for (const auto& v : at(cfg, "protocol.variants")) p.variants.push_back(parse_dephasing_mode(v.get<std::string>()));
  p.solver = solver_settings(cfg);
  return p;
}

PreparationParams preparation_params(const RunConfig& cfg) {
  require_protocol(cfg, {"prepare"});
  PreparationParams p;
  p.reg = register_config(cfg, 2, 2);
  p.start = {quantity(cfg, "fields.start_bx", Quantity::field), quantity(cfg, "fields.start_bz", Quantity::field)};
  p.bx_target = quantity(cfg, "fields.bx", Quantity::field);
  p.bz_target = quantity(cfg, "fields.bz", Quantity::field);
  p.bx_rate = quantity(cfg, "fields.bx_rate", Quantity::field_rate);
  p.bz_rate = quantity(cfg, "fields.bz_rate", Quantity::field_rate);
  if ((p.bx_target - p.start.bx) * p.bx_rate < 0.0) throw ConfigError("fields.bx_rate", "sign does not reach fields.bx");
  if ((p.bz_target - p.start.bz) * p.bz_rate < 0.0) throw ConfigError("fields.bz_rate", "sign does not reach fields.bz");
  p.pulses = stirap_settings(cfg);
  p.dephasing = parse_dephasing_mode(at(cfg, "dissipation.mode").get<std::string>());
  p.ms1_model = parse_ms1_model(at(cfg, "model.ms1").get<std::string>());
  p.full_coupling = at(cfg, "model.full_coupling").get<bool>();
  p.adiabatic_threshold = at(cfg, "protocol.adiabatic_threshold").get<double>();
  p.solver = solver_settings(cfg);
  if (p.pulses.window < minimum_stirap_span(p.pulses.sigma, p.pulses.boundary_ratio)) {
    throw ConfigError("pulses.window", "shorter than the minimum span of " +
                                           format_number(minimum_stirap_span(p.pulses.sigma, p.pulses.boundary_ratio)) +
                                           " us for this sigma");
  }
  return p;
}

LogicFlipParams logic_flip_params(const RunConfig& cfg) {
  require_protocol(cfg, {"logic-flip", "stirap-discriminate"});
  LogicFlipParams p;
  p.reg = register_config(cfg, 2, 2);
  p.bx = quantity(cfg, "fields.bx", Quantity::field);
  p.bz_target = quantity_or_auto(cfg, "fields.bz", Quantity::field);
  p.bz_start = quantity_or_auto(cfg, "fields.bz_start", Quantity::field);
  p.bz_rate = quantity(cfg, "fields.bz_rate", Quantity::field_rate);
  if (cfg.effective.contains(pointer("protocol.direction"))) {
    p.direction = parse_direction(at(cfg, "protocol.direction").get<std::string>());
  }
  p.pulses = stirap_settings(cfg);
  p.dephasing = parse_dephasing_mode(at(cfg, "dissipation.mode").get<std::string>());
  p.ms1_model = parse_ms1_model(at(cfg, "model.ms1").get<std::string>());
  p.full_coupling = at(cfg, "model.full_coupling").get<bool>();
  p.adiabatic_threshold = at(cfg, "protocol.adiabatic_threshold").get<double>();
  p.solver = solver_settings(cfg);
  if (p.pulses.window < minimum_stirap_span(p.pulses.sigma, p.pulses.boundary_ratio)) {
    throw ConfigError("pulses.window", "shorter than the minimum span of " +
                                           format_number(minimum_stirap_span(p.pulses.sigma, p.pulses.boundary_ratio)) +
                                           " us for this sigma");
  }
  return p;
}

SingleC13Params single_c13_params(const RunConfig& cfg) {
  require_protocol(cfg, {"single-c13"});
  SingleC13Params p;
  p.reg = register_config(cfg, 1, 1);
  p.field = {quantity(cfg, "fields.bx", Quantity::field), quantity(cfg, "fields.bz", Quantity::field)};
  p.pulses = stirap_settings(cfg);
  p.dephasing = parse_dephasing_mode(at(cfg, "dissipation.mode").get<std::string>());
  p.full_coupling = at(cfg, "model.full_coupling").get<bool>();
  p.solver = solver_settings(cfg);
  if (p.pulses.window < minimum_stirap_span(p.pulses.sigma, p.pulses.boundary_ratio)) {
    throw ConfigError("pulses.window", "shorter than the minimum span of " +
                                           format_number(minimum_stirap_span(p.pulses.sigma, p.pulses.boundary_ratio)) +
                                           " us for this sigma");
  }
  return p;
}

IntuitiveParams intuitive_params(const RunConfig& cfg) {
  require_protocol(cfg, {"intuitive"});
  IntuitiveParams p;
  p.reg = register_config(cfg, 2, 2);
  p.field = {quantity(cfg, "fields.bx", Quantity::field), quantity(cfg, "fields.bz", Quantity::field)};
  p.omega0 = quantity(cfg, "pulses.omega0", Quantity::frequency);
  p.sigma_p = quantity(cfg, "pulses.sigma_p", Quantity::time);
  p.sigma_s = quantity(cfg, "pulses.sigma_s", Quantity::time);
  p.window = quantity(cfg, "pulses.window", Quantity::time);
  p.pump_center = quantity(cfg, "pulses.pump_center", Quantity::time);
  p.delay = quantity(cfg, "pulses.delay", Quantity::time);
  p.scan = at(cfg, "protocol.scan").get<bool>();
  const auto& c = at(cfg, "protocol.scan_center");
  const auto& d = at(cfg, "protocol.scan_delay");
  p.scan_center_min = parse_quantity(c[0].get<std::string>(), Quantity::time, "protocol.scan_center[0]");
  p.scan_center_max = parse_quantity(c[1].get<std::string>(), Quantity::time, "protocol.scan_center[1]");
  p.scan_delay_min = parse_quantity(d[0].get<std::string>(), Quantity::time, "protocol.scan_delay[0]");
  p.scan_delay_max = parse_quantity(d[1].get<std::string>(), Quantity::time, "protocol.scan_delay[1]");
  p.scan_step = quantity(cfg, "protocol.scan_step", Quantity::time);
  p.scan_margin = quantity(cfg, "protocol.scan_margin", Quantity::time);
  p.scan_report_points = at(cfg, "protocol.scan_report_points").get<int>();
  p.scan_rtol = at(cfg, "protocol.scan_rtol").get<double>();
  p.scan_atol = at(cfg, "protocol.scan_atol").get<double>();
  p.dephasing = parse_dephasing_mode(at(cfg, "dissipation.mode").get<std::string>());
  p.ms1_model = parse_ms1_model(at(cfg, "model.ms1").get<std::string>());
  p.full_coupling = at(cfg, "model.full_coupling").get<bool>();
  p.solver = solver_settings(cfg);
  if (p.pump_center + p.delay > p.window) {
    throw ConfigError("pulses.delay", "Stokes centre falls after the end of the window");
  }
  return p;
}

EigReportParams eig_report_params(const RunConfig& cfg) {
  require_protocol(cfg, {"eig-report"});
  EigReportParams p;
  p.reg = register_config(cfg, 1, 2);
  p.field = {quantity(cfg, "fields.bx", Quantity::field), quantity(cfg, "fields.bz", Quantity::field)};
  return p;
}

SweepSpec sweep_spec(const RunConfig& cfg) {
  require_protocol(cfg, {"sweep"});
  SweepSpec s;
  s.protocol = at(cfg, "sweep.protocol").get<std::string>();
  for (const auto& a : at(cfg, "sweep.axes")) {
    SweepAxis axis;
    axis.key = a["key"].get<std::string>();
    for (const auto& v : a["values"]) axis.values.push_back(v);
    s.axes.push_back(std::move(axis));
  }
  return s;
}

RunConfig sweep_job_config(const RunConfig& sweep, std::span<const std::pair<std::string, Json>> assignment) {
  const auto spec = sweep_spec(sweep);
  Json base = sweep.effective;
  base.erase("sweep");
  base["protocol"]["name"] = spec.protocol;
  for (const auto& [key, value] : assignment) {
    if (key.rfind("protocol.name", 0) == 0 || key.rfind("sweep", 0) == 0) {
      throw ConfigError("sweep.axes", "cannot sweep '" + key + "'");
    }
    apply_override(base, key + "=" + value.dump());
  }
  try {
    return parse_config(base.dump(), spec.protocol);
  } catch (const ConfigError& e) {
    throw ConfigError("sweep.axes", std::string("sweep point invalid: ") + e.what());
  }
}

}  // namespace nvdfs
