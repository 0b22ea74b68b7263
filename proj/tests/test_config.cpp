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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "nvdfs/config.hpp"
#include "nvdfs/error.hpp"

using namespace nvdfs;

namespace {

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "<no error>";
}

bool same_solver(const SolverSettings& a, const SolverSettings& b) {
  return a.integrator.rtol == b.integrator.rtol && a.integrator.atol == b.integrator.atol &&
         a.integrator.max_step == b.integrator.max_step && a.integrator.min_step == b.integrator.min_step &&
         a.integrator.initial_step == b.integrator.initial_step && a.report_points == b.report_points;
}

bool same_pulses(const StirapSettings& a, const StirapSettings& b) {
  return a.omega0 == b.omega0 && a.sigma == b.sigma && a.window == b.window && a.boundary_ratio == b.boundary_ratio;
}

}  // namespace

TEST_CASE("quantities parse with units") {
  CHECK(parse_quantity("0.5 MHz", Quantity::frequency, "k") == units::mhz(0.5));
  CHECK(parse_quantity("500 kHz", Quantity::frequency, "k") == doctest::Approx(units::mhz(0.5)));
  CHECK(parse_quantity("3 rad/us", Quantity::frequency, "k") == 3.0);
  CHECK(parse_quantity("1 mT", Quantity::field, "k") == 10.0);
  CHECK(parse_quantity("2 ms", Quantity::time, "k") == 2000.0);
  CHECK(parse_quantity("7 \xC2\xB5s", Quantity::time, "k") == 7.0);
  CHECK(parse_quantity("1.07 kHz/G", Quantity::gyromagnetic, "k") == units::khz_per_gauss(1.07));
  CHECK(parse_quantity("180 deg", Quantity::angle, "k") == doctest::Approx(M_PI));
  CHECK(parse_quantity("-10 G/us", Quantity::field_rate, "k") == -10.0);
  CHECK(canonical_quantity("500 kHz", Quantity::frequency, "MHz", "k") == "0.5 MHz");
  CHECK(canonical_quantity("1 mT", Quantity::field, "G", "k") == "10 G");
  CHECK_THROWS_AS(parse_quantity("5", Quantity::time, "k"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("5 G", Quantity::time, "k"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("us", Quantity::time, "k"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("inf us", Quantity::time, "k"), ConfigError);
}

TEST_CASE("empty config reproduces the preparation parameters") {
  const auto cfg = parse_config("", "prepare");
  const auto p = preparation_params(cfg);
  const PreparationParams d;
  CHECK(p.reg == d.reg);
  CHECK(p.start == d.start);
  CHECK(p.bx_target == 100.0);
  CHECK(p.bz_target == 5.0);
  CHECK(p.bx_rate == 7.0);
  CHECK(p.bz_rate == -10.0);
  CHECK(p.pulses.omega0 == units::mhz(0.5));
  CHECK(p.pulses.sigma == 5.0);
  CHECK(p.pulses.window == 30.0);
  CHECK(same_pulses(p.pulses, d.pulses));
  CHECK(same_solver(p.solver, d.solver));
  CHECK(p.dephasing == d.dephasing);
  CHECK(p.ms1_model == d.ms1_model);
  CHECK(p.adiabatic_threshold == d.adiabatic_threshold);
  CHECK(cfg.effective["protocol"]["name"] == "prepare");
}

TEST_CASE("defaults of every protocol match the parameter structs") {
  {
    const auto p = logic_flip_params(parse_config("{}", "logic-flip"));
    const LogicFlipParams d;
    CHECK(p.reg == d.reg);
    CHECK(p.bx == d.bx);
    CHECK_FALSE(p.bz_start.has_value());
    CHECK_FALSE(p.bz_target.has_value());
    CHECK(p.bz_rate == d.bz_rate);
    CHECK(p.direction == d.direction);
    CHECK(same_pulses(p.pulses, d.pulses));
    CHECK(same_solver(p.solver, d.solver));
  }
  {
    const auto p = single_c13_params(parse_config("{}", "single-c13"));
    const SingleC13Params d;
    CHECK(p.reg.carbons == d.reg.carbons);
    CHECK(p.reg.constants == d.reg.constants);
    CHECK(p.field == d.field);
    CHECK(same_pulses(p.pulses, d.pulses));
  }
  {
    const auto p = intuitive_params(parse_config("{}", "intuitive"));
    const IntuitiveParams d;
    CHECK(p.reg == d.reg);
    CHECK(p.field == d.field);
    CHECK(p.omega0 == d.omega0);
    CHECK(p.sigma_p == d.sigma_p);
    CHECK(p.sigma_s == d.sigma_s);
    CHECK(p.pump_center == d.pump_center);
    CHECK(p.delay == d.delay);
    CHECK(p.scan == d.scan);
    CHECK(p.scan_center_min == d.scan_center_min);
    CHECK(p.scan_delay_max == d.scan_delay_max);
    CHECK(p.scan_step == d.scan_step);
    CHECK(p.scan_report_points == d.scan_report_points);
    CHECK(p.scan_rtol == d.scan_rtol);
  }
  {
    const auto p = dfs_params(parse_config("{}", "dfs-compare"));
    const DfsParams d;
    CHECK(p.reg == d.reg);
    CHECK(p.duration == d.duration);
    CHECK(p.preparation == d.preparation);
    CHECK(p.variants == d.variants);
    CHECK_FALSE(p.bz.has_value());
  }
  {
    const auto p = eig_report_params(parse_config("{}", "eig-report"));
    CHECK(p.field == MagneticField{100.0, 70.0});
  }
  {
    const auto s = sweep_spec(parse_config("{}", "sweep"));
    CHECK(s.protocol == "single-c13");
    CHECK(s.axes.empty());
  }
}

TEST_CASE("round trip is a fixed point") {
  for (const auto& name : protocol_names()) {
    const auto a = parse_config("{}", name);
    const auto b = parse_config(serialize_config(a));
    CHECK(a.effective == b.effective);
    CHECK(serialize_config(a) == serialize_config(b));
    CHECK(default_config(name) == a.effective);
  }
  const std::string text = R"({"system": {"T2e_star": "0.007 ms", "carbons": [{"A_zz": "12450 kHz"}, {"phi": "90 deg"}]},
                               "fields": {"bx": "10 mT"}, "pulses": {"omega0": "3 rad/us"}})";
  const auto a = parse_config(text, "prepare");
  CHECK(a.effective["system"]["T2e_star"] == "7 us");
  CHECK(a.effective["system"]["carbons"][0]["A_zz"] == "12.45 MHz");
  CHECK(a.effective["system"]["carbons"][0]["A_ani"] == "1.16 MHz");
  CHECK(a.effective["system"]["carbons"][1]["A_zz"] == "2.28 MHz");
  CHECK(a.effective["fields"]["bx"] == "100 G");
  const auto b = parse_config(serialize_config(a));
  CHECK(a.effective == b.effective);
  CHECK(preparation_params(b).reg.carbons[1].phi == doctest::Approx(M_PI / 2));
}

TEST_CASE("strict parsing reports the key path") {
  CHECK(key_of([] { parse_config(R"({"system": {"T2e_star": "-1 us"}})", "prepare"); }) == "system.T2e_star");
  CHECK(key_of([] { parse_config(R"({"system": {"T2e_star": 7}})", "prepare"); }) == "system.T2e_star");
  CHECK(message_of([] { parse_config(R"({"system": {"T2e_star": 7}})", "prepare"); }).find("missing unit") !=
        std::string::npos);
  CHECK(key_of([] { parse_config(R"({"system": {"T2e_star": "7 G"}})", "prepare"); }) == "system.T2e_star");
  CHECK(key_of([] { parse_config(R"({"system": {"T2e": "7 us"}})", "prepare"); }) == "system.T2e");
  CHECK(key_of([] { parse_config(R"({"extra": 1})", "prepare"); }) == "extra");
  CHECK(key_of([] { parse_config(R"({"pulses": {"delay": "3 us"}})", "prepare"); }) == "pulses.delay");
  CHECK(key_of([] { parse_config(R"({"system": {"carbons": [{"A_zz": "1 MHz", "B": "1 MHz"}]}})", "single-c13"); }) ==
        "system.carbons[0].B");
  CHECK(key_of([] { parse_config(R"({"system": {"d12": null}})", "prepare"); }) == "system.d12");
  CHECK(key_of([] { parse_config(R"({"dissipation": {"mode": "global"}})", "prepare"); }) == "dissipation.mode");
  CHECK(key_of([] { parse_config(R"({"output": {"report_points": 1}})", "prepare"); }) == "output.report_points");
  CHECK(key_of([] { parse_config(R"({"output": {"observables": ["pop_phi1"]}})", "prepare"); }) ==
        "output.observables[0]");
  CHECK(key_of([] { parse_config(R"({"fields": {"bz": "auto"}})", "prepare"); }) == "fields.bz");
  CHECK(key_of([] { parse_config(R"({"fields": {"bx_rate": "-7 G/us"}})", "prepare"); }) == "fields.bx_rate");
  CHECK(key_of([] { parse_config(R"({"pulses": {"window": "10 us"}})", "prepare"); }) == "pulses.window");
  CHECK(key_of([] { parse_config(R"({"protocol": {"name": "prepare"}})", "logic-flip"); }) == "protocol.name");
  CHECK(key_of([] { parse_config("{}", "teleport"); }) == "protocol.name");
  CHECK(key_of([] { parse_config("{}"); }) == "protocol.name");
  CHECK(key_of([] { parse_config("[1, 2]", "prepare"); }).empty());
  CHECK(key_of([] { parse_config("{\"system\": ", "prepare"); }).empty());
  CHECK(key_of([] { parse_config(R"({"system": {"carbons": [{"A_zz": "1 MHz"}]}})", "prepare"); }) ==
        "system.carbons");
  CHECK(key_of([] { parse_config(R"({"system": "x"})", "prepare"); }) == "system");
}

TEST_CASE("dotted overrides") {
  const std::vector<std::string> ov{"fields.bz=auto", "system.carbons.1.A_zz=3 MHz", "protocol.direction=one_to_zero",
                                    "model.full_coupling=true", "output.report_points=100"};
  const auto cfg = parse_config("{}", "logic-flip", ov);
  const auto p = logic_flip_params(cfg);
  CHECK(p.reg.carbons[1].a_zz == units::mhz(3.0));
  CHECK(p.direction == FlipDirection::one_to_zero);
  CHECK(p.full_coupling);
  CHECK(p.solver.report_points == 100);
  const std::vector<std::string> bad{"fields.bq=1 G"};
  CHECK(key_of([&] { parse_config("{}", "logic-flip", bad); }) == "fields.bq");
  const std::vector<std::string> name{"protocol.name=intuitive"};
  CHECK(parse_config("{}", {}, name).protocol == "intuitive");
}

TEST_CASE("published schema matches the key table") {
  std::ifstream in(NVDFS_SCHEMA_PATH);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(Json::parse(ss.str()) == config_schema());
  const auto schema = config_schema();
  for (const auto& key : config_keys()) {
    Json node = schema;
    std::string rest = key;
    while (!rest.empty()) {
      const auto dot = rest.find('.');
      std::string seg = rest.substr(0, dot);
      const bool array = seg.size() > 2 && seg.substr(seg.size() - 2) == "[]";
      if (array) seg.resize(seg.size() - 2);
      REQUIRE_MESSAGE(node["properties"].contains(seg), key);
      node = node["properties"][seg];
      if (array) node = node["items"];
      rest = dot == std::string::npos ? "" : rest.substr(dot + 1);
    }
    CHECK_MESSAGE(node.contains("description"), key);
  }
}

TEST_CASE("every default key is declared in the schema") {
  const auto keys = config_keys();
  std::function<void(const Json&, const std::string&)> walk = [&](const Json& j, const std::string& path) {
    if (path == "system.carbons") {
      for (const auto& [k, v] : j[0].items()) {
        const std::string full = path + "[]." + k;
        CHECK_MESSAGE(std::find(keys.begin(), keys.end(), full) != keys.end(), full);
      }
      return;
    }
    if (j.is_object() && path != "sweep.axes") {
      bool leaf = std::find(keys.begin(), keys.end(), path) != keys.end();
      if (!leaf) {
        for (const auto& [k, v] : j.items()) walk(v, path.empty() ? k : path + "." + k);
        return;
      }
    }
    CHECK_MESSAGE(std::find(keys.begin(), keys.end(), path) != keys.end(), path);
  };
  for (const auto& name : protocol_names()) walk(default_config(name), "");
}

TEST_CASE("run id ignores output settings only") {
  const auto a = parse_config("{}", "prepare");
  const std::vector<std::string> out{"output.directory=elsewhere", "output.format=csv"};
  const auto b = parse_config("{}", "prepare", out);
  const std::vector<std::string> phys{"pulses.sigma=5.5 us"};
  const auto c = parse_config("{}", "prepare", phys);
  CHECK(run_id(a) == run_id(b));
  CHECK(run_id(a) != run_id(c));
  CHECK(run_id(a).size() == 16);
  const auto o = output_settings(b);
  CHECK(o.directory == "elsewhere");
  CHECK(o.format == "csv");
}

TEST_CASE("sweep job configs") {
  const std::string text = R"({"sweep": {"protocol": "single-c13",
      "axes": [{"key": "pulses.omega0", "values": ["0.25 MHz", "0.5 MHz"]},
               {"key": "fields.bz", "values": ["10 G", "1 mT"]}]}})";
  const auto cfg = parse_config(text, "sweep");
  const auto spec = sweep_spec(cfg);
  REQUIRE(spec.axes.size() == 2);
  const std::vector<std::pair<std::string, Json>> point{{"pulses.omega0", "0.25 MHz"}, {"fields.bz", "1 mT"}};
  const auto job = sweep_job_config(cfg, point);
  CHECK(job.protocol == "single-c13");
  const auto p = single_c13_params(job);
  CHECK(p.pulses.omega0 == units::mhz(0.25));
  CHECK(p.field.bz == 10.0);
  CHECK(key_of([] {
          parse_config(R"({"sweep": {"axes": [{"key": "pulses.omega0", "values": ["1 G"]}]}})", "sweep");
        }) == "sweep.axes");
  CHECK(key_of([] { parse_config(R"({"sweep": {"axes": [{"key": "pulses.omega0", "values": []}]}})", "sweep"); }) ==
        "sweep.axes[0].values");
  CHECK(key_of([] { parse_config(R"({"sweep": {"protocol": "eig-report"}})", "sweep"); }) == "sweep.protocol");
  const auto lf = parse_config(R"({"sweep": {"protocol": "logic-flip"}, "protocol": {"direction": "one_to_zero"}})",
                               "sweep");
  CHECK(logic_flip_params(sweep_job_config(lf, {})).direction == FlipDirection::one_to_zero);
}

TEST_CASE("observable names per protocol") {
  CHECK(protocol_observables("prepare").front() == "fidelity");
  CHECK(protocol_observables("prepare").size() == 11);
  CHECK(protocol_observables("single-c13").size() == 6);
  CHECK(protocol_observables("stirap-discriminate").size() == 22);
  CHECK(protocol_observables("dfs-compare").front() == "dfs_independent");
  CHECK(protocol_observables("eig-report").empty());
}
