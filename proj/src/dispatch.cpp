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

#include "nvdfs/dispatch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "nvdfs/eigensolve.hpp"
#include "nvdfs/error.hpp"
#include "nvdfs/output.hpp"

namespace nvdfs {

namespace fs = std::filesystem;

namespace {

Table table_from(const Trajectory& tr, const std::string& prefix = {}) {
  Table t;
  t.times = tr.times;
  for (std::size_t k = 0; k < tr.observable_names.size(); ++k) {
    t.add(prefix + tr.observable_names[k], tr.observable_values[k]);
  }
  return t;
}

struct Outcome {
  std::vector<ProtocolResult> results;
  Table table;
};

Outcome run_trajectory_protocol(const RunConfig& cfg) {
  Outcome o;
  const auto& name = cfg.protocol;
  if (name == "prepare") {
    o.results.push_back(run_preparation(preparation_params(cfg)));
  } else if (name == "logic-flip") {
    o.results.push_back(run_logic_flip(logic_flip_params(cfg)));
  } else if (name == "single-c13") {
    o.results.push_back(run_single_c13(single_c13_params(cfg)));
  } else if (name == "intuitive") {
    o.results.push_back(run_intuitive_baseline(intuitive_params(cfg)));
  } else if (name == "stirap-discriminate") {
    auto d = run_stirap_vs_bstirap(logic_flip_params(cfg));
    if (d.stirap.trajectory.times != d.b_stirap.trajectory.times) {
      throw NumericalError("stirap-discriminate: the two paths were sampled on different grids");
    }
    o.table = table_from(d.stirap.trajectory, "stirap_");
    const auto b = table_from(d.b_stirap.trajectory, "b_stirap_");
    for (std::size_t k = 0; k < b.names.size(); ++k) o.table.add(b.names[k], b.columns[k]);
    o.results.push_back(std::move(d.stirap));
    o.results.push_back(std::move(d.b_stirap));
    return o;
  } else if (name == "dfs-compare") {
    o.results = run_dfs_comparison(dfs_params(cfg));
    o.table.times = o.results.front().trajectory.times;
    for (const auto& r : o.results) o.table.add(r.name, r.trajectory.observable("bloch_length"));
    return o;
  } else {
    throw ConfigError("protocol.name", "'" + name + "' has no trajectory");
  }
  o.table = table_from(o.results.front().trajectory);
  return o;
}

std::string basis_label(int index, int dim) {
  static const char* nuc[] = {"UU", "UD", "DU", "DD"};
  static const char* ms[] = {"p1", "0", "m1"};
  if (dim == 4) return nuc[index];
  return std::string("ms") + ms[index / 2] + (index % 2 == 0 ? "_U" : "_D");
}

std::string eig_csv(const Json& report) {
  const auto& states = report["states"];
  const int dim = static_cast<int>(states.front()["coefficients_re"].size());
  std::string text = "state,energy_MHz";
  const bool two = report["register"] == "two_carbon";
  if (two) text += ",alpha,beta,xi,norm_d,closed_form";
  for (int i = 0; i < dim; ++i) text += ",re_" + basis_label(i, dim) + ",im_" + basis_label(i, dim);
  text += "\n";
  for (const auto& s : states) {
    text += s["label"].get<std::string>() + "," + format_double(s["energy_MHz"].get<double>());
    if (two) {
      text += "," + format_double(s["alpha"].get<double>()) + "," + format_double(s["beta"].get<double>()) + "," +
              format_double(s["xi"].get<double>()) + "," + format_double(s["norm_d"].get<double>()) + "," +
              (s["closed_form"].get<bool>() ? "1" : "0");
    }
    for (int i = 0; i < dim; ++i) {
      text += "," + format_double(s["coefficients_re"][i].get<double>()) + "," +
              format_double(s["coefficients_im"][i].get<double>());
    }
    text += "\n";
  }
  return text;
}

Json state_json(const std::string& label, double energy, const StateVector& v) {
  Json re = Json::array();
  Json im = Json::array();
  for (int i = 0; i < v.dim(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return {{"label", label}, {"energy_MHz", units::to_mhz(energy)}, {"coefficients_re", re}, {"coefficients_im", im}};
}

double residual(const Operator& h, double e, const StateVector& v) {
  return (h * v.amplitudes() - e * v.amplitudes()).norm();
}

Json numerical_energies(const Operator& h) {
  const auto num = numerical_eig(h);
  Json out = Json::array();
  for (Eigen::Index i = 0; i < num.energies.size(); ++i) out.push_back(units::to_mhz(num.energies(i)));
  return out;
}

Json run_sweep(const RunConfig& cfg, const fs::path& dir, const DispatchOptions& opt);

Json write_run(const RunConfig& cfg, const fs::path& dir, const DispatchOptions& opt) {
  prepare_output_dir(dir);
  const auto out = output_settings(cfg);
  Json summary = {{"run_id", run_id(cfg)}, {"protocol", cfg.protocol}};
  std::vector<std::string> files;
  write_text(dir / "config.json", serialize_config(cfg));
  files.push_back("config.json");

  bool conserved = true;
  if (cfg.protocol == "eig-report") {
    const auto report = eigensystem_report(eig_report_params(cfg));
    write_text(dir / "eigensystem.json", report.dump(2) + "\n");
    write_text(dir / "eigensystem.csv", eig_csv(report));
    files.insert(files.end(), {"eigensystem.json", "eigensystem.csv"});
    summary["eigensystem"] = report;
  } else if (cfg.protocol == "sweep") {
    summary["sweep"] = run_sweep(cfg, dir, opt);
    files.insert(files.end(), {"sweep.csv", "sweep.json"});
  } else {
    auto outcome = run_trajectory_protocol(cfg);
    const Table table = select_columns(outcome.table, out.observables);
    if (out.format == "csv" || out.format == "both") {
      write_trajectory_csv(dir / "trajectory.csv", table);
      files.push_back("trajectory.csv");
    }
    if (out.format == "json" || out.format == "both") {
      write_trajectory_json(dir / "trajectory.json", table);
      files.push_back("trajectory.json");
    }
    for (auto& f : write_plot_data(dir, table)) files.push_back(std::move(f));
    if (outcome.results.size() == 1) {
      summary["final_fidelity"] = outcome.results.front().final_fidelity;
      summary["peak_intermediate_population"] = outcome.results.front().peak_intermediate_population;
    }
    Json results = Json::array();
    for (const auto& r : outcome.results) {
      results.push_back(result_summary(r));
      conserved = conserved && r.conservation.ok();
    }
    summary["results"] = results;
    summary["conservation_ok"] = conserved;
  }
  files.push_back("summary.json");
  summary["files"] = files;
  summary["config"] = cfg.effective;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  if (!conserved) throw NumericalError("conservation check failed; see summary.json");
  return summary;
}

std::string cell(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

Json run_sweep(const RunConfig& cfg, const fs::path& dir, const DispatchOptions& opt) {
  const auto spec = sweep_spec(cfg);
  std::vector<std::vector<std::pair<std::string, Json>>> jobs{{}};
  for (const auto& axis : spec.axes) {
    std::vector<std::vector<std::pair<std::string, Json>>> next;
    for (const auto& partial : jobs) {
      for (const auto& v : axis.values) {
        auto row = partial;
        row.emplace_back(axis.key, v);
        next.push_back(std::move(row));
      }
    }
    jobs = std::move(next);
  }

  std::vector<RunConfig> configs;
  for (const auto& j : jobs) configs.push_back(sweep_job_config(cfg, j));

  const std::size_t n = jobs.size();
  std::vector<Json> summaries(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      char name[32];
      std::snprintf(name, sizeof(name), "job_%03zu", i);
      try {
        summaries[i] = write_run(configs[i], dir / name, opt);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opt.workers, 1)), 1, n);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string csv = "job";
  for (const auto& a : spec.axes) csv += "," + csv_quote(a.key);
  csv += ",status,final_fidelity,peak_intermediate_population,total_time_us,error\n";
  Json rows = Json::array();
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "job_%03zu", i);
    Json row = {{"job", name}};
    Json point = Json::object();
    for (const auto& [k, v] : jobs[i]) point[k] = v;
    row["point"] = point;
    csv += name;
    for (const auto& [k, v] : jobs[i]) csv += "," + csv_quote(cell(v));
    if (errors[i]) {
      std::string msg;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        msg = e.what();
      }
      if (!first_error) first_error = errors[i];
      row["status"] = "error";
      row["error"] = msg;
      csv += ",error,,,," + csv_quote(msg) + "\n";
    } else {
      const auto& s = summaries[i];
      const auto& r = s["results"].front();
      row["status"] = "ok";
      row["final_fidelity"] = r["final_fidelity"];
      row["peak_intermediate_population"] = r["peak_intermediate_population"];
      row["total_time_us"] = r["timing"]["total_time_us"];
      row["run_id"] = s["run_id"];
      csv += ",ok," + format_double(r["final_fidelity"].get<double>()) + "," +
             format_double(r["peak_intermediate_population"].get<double>()) + "," +
             format_double(r["timing"]["total_time_us"].get<double>()) + ",\n";
    }
    rows.push_back(row);
  }
  Json out = {{"protocol", spec.protocol}, {"jobs", n}, {"rows", rows}};
  write_text(dir / "sweep.csv", csv);
  write_text(dir / "sweep.json", out.dump(2) + "\n");
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace

Json eigensystem_report(const EigReportParams& p) {
  p.reg.validate();
  const auto& b = p.field;
  Json report = {{"bx_G", b.bx}, {"bz_G", b.bz}};
  if (p.reg.carbon_count() == 2) {
    const double gc = p.reg.constants.gamma_c;
    const auto es = ms0_eigensystem(b, p.reg.d12, gc);
    const Operator h = h_ms0(b, p.reg);
    report["register"] = "two_carbon";
    report["manifold"] = "ms0";
    report["basis"] = {"UU", "UD", "DU", "DD"};
    report["q"] = es.q;
    report["r"] = es.r;
    report["theta_cubic_rad"] = es.theta_cubic;
    report["singlet_degeneracy_bz_G"] = singlet_degeneracy_bz(b.bx, p.reg.d12, gc);
    Json states = Json::array();
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      Json s = state_json("psi" + std::to_string(i + 1), es.energies[i], es.states[i]);
      s["alpha"] = es.alpha[i];
      s["beta"] = es.beta[i];
      s["xi"] = es.xi[i];
      s["norm_d"] = es.norm_d[i];
      s["closed_form"] = es.closed_form[i];
      worst = std::max(worst, residual(h, es.energies[i], es.states[i]));
      states.push_back(s);
    }
    report["states"] = states;
    report["max_residual_rad_per_us"] = worst;
    report["numerical_energies_MHz"] = numerical_energies(h);
  } else {
    const auto es = bipartite_eigensystem(b, p.reg);
    const Operator h = h_bipartite(b, p.reg);
    report["register"] = "single_carbon";
    report["manifold"] = "all";
    report["mixing_theta_rad"] = es.mixing_theta;
    report["hyperfine_ratio"] = es.hyperfine_ratio;
    report["weak_hyperfine"] = es.weak_hyperfine;
    Json states = Json::array();
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
      states.push_back(state_json("phi" + std::to_string(i + 1), es.energies[i], es.states[i]));
      worst = std::max(worst, residual(h, es.energies[i], es.states[i]));
    }
    report["states"] = states;
    report["max_residual_rad_per_us"] = worst;
    report["numerical_energies_MHz"] = numerical_energies(h);
  }
  return report;
}

DispatchResult dispatch(const RunConfig& cfg, const DispatchOptions& options) {
  if (!is_protocol(cfg.protocol)) throw ConfigError("protocol.name", "unknown subcommand '" + cfg.protocol + "'");
  DispatchResult r;
  r.directory = resolve_output_dir(options.out_dir, output_settings(cfg));
  r.summary = write_run(cfg, r.directory, options);
  return r;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

Json error_record(const std::exception& e) {
  std::string kind = "internal";
  switch (exit_code(e)) {
    case 2: kind = "config"; break;
    case 3: kind = "numerical"; break;
    case 4: kind = "io"; break;
    default: break;
  }
  Json rec = {{"error", kind}, {"message", e.what()}};
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) rec["key"] = c->key_path();
  rec["exit_code"] = exit_code(e);
  return rec;
}

}  // namespace nvdfs
