#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "config.hpp"
#include "hysup/arc_io.hpp"
#include "hysup/observer.hpp"
#include "hysup/solver.hpp"
#include "hysup/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hysup;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

json error_json(const std::string& field, const std::string& message) {
  return json{{"error", {{"field", field}, {"message", message}}}};
}

int fail(int code, const std::string& field, const std::string& message) {
  std::cout << error_json(field, message).dump(2) << "\n";
  return code;
}

struct RunOutput {
  HybridArc arc;
  SwitchingCensus census;
  json summary;
};

RunOutput run_spec(const cli::RunSpec& spec) {
  RunOutput out;
  const bool disturbed = !spec.disturbance.all_zero();
  auto built = build_scenario(spec.scenario, disturbed ? &spec.disturbance : nullptr);
  out.arc = solve(built.sup.def, built.x0, built.solver);
  out.census = switching_census(out.arc, built.sup.layout);

  const auto& last = out.arc.last_sample();
  json switches = json::array();
  for (const auto& e : out.census.events) {
    switches.push_back({{"t", e.t}, {"j", e.j}, {"from", e.from}, {"to", e.to}});
  }
  out.summary = {
      {"scenario", spec.scenario.name},
      {"termination", to_string(out.arc.termination)},
      {"final_t", last.t},
      {"final_j", out.arc.jump_count()},
      {"final_distance_A0", built.sup.dist_A0(built.sup.layout.xi_of(last.x))},
      {"switch_times", std::move(switches)},
      {"min_dwell", std::isfinite(out.census.min_dwell_t) ? json(out.census.min_dwell_t)
                                                          : json(nullptr)},
      {"samples", out.arc.sample_count()},
  };

  auto columns = built.sup.layout.column_names();
  if (disturbed) columns[built.sup.layout.n_p - 1] = "clock";
  out.summary["columns"] = columns;
  return out;
}

int cmd_simulate(const json& doc, const std::string& out_dir) {
  const auto spec = cli::parse_run_spec(doc);
  auto output = run_spec(spec);

  fs::create_directories(out_dir);
  const auto columns = output.summary["columns"].get<std::vector<std::string>>();
  write_text(fs::path(out_dir) / "trajectory.csv", arc_to_csv(output.arc, columns));
  write_text(fs::path(out_dir) / "summary.json", output.summary.dump(2) + "\n");
  write_text(fs::path(out_dir) / "domain.json", arc_to_json(output.arc).dump(2) + "\n");
  std::cout << output.summary.dump(2) << "\n";

  if (output.arc.termination == Termination::NoProgress) {
    return fail(1, "solver", "solver made no progress from the initial condition");
  }
  return 0;
}

int cmd_design(double eps0a, double eps0b, double eps1a, double eps1b, double tau_star,
               double alpha_bar, double k_radius, bool estimate, const std::string& grid_csv,
               std::uint64_t seed, const std::string& out_dir) {
  auto inputs = ex1::design_inputs(alpha_bar, eps0a, eps0b, eps1b, k_radius);
  inputs.validate();
  std::string provenance = "analytic";

  ex1::Example1Config cfg;
  cfg.alpha_bar = alpha_bar;
  auto ex = ex1::build(cfg);

  if (estimate) {
    // Estimate Delta1/Delta2 by simulation sweeps over the initial-condition
    // ball: run the local loop with its estimator until z0 reaches eps0a
    // (where the supervisor would switch away).
    auto loop0 = compose_closed_loop(ex.plant, ex.k0, 0);
    auto with_z = attach_observer(loop0, ex.obs0);
    with_z.jump_guard = [eps0a](std::span<const double> x) { return x[2] - eps0a; };
    with_z.jump_map = [](std::span<const double> x) {
      return std::vector<State>{State(x.begin(), x.end())};
    };
    double d1 = 0.0, d2 = 0.0;
    SolverConfig scfg;
    scfg.dt = 2e-3;
    scfg.max_t = 20.0;
    scfg.max_j = 1;
    for (int ring = 1; ring <= 4; ++ring) {
      for (int k = 0; k < 12; ++k) {
        const double r = k_radius * ring / 4.0;
        const double th = 2.0 * 3.14159265358979312 * k / 12.0;
        const State x0 = {r * std::cos(th), r * std::sin(th), 0.0};
        try {
          const auto arc = solve(with_z, x0, scfg);
          for (const auto& iv : arc.intervals) {
            for (const auto& s : iv.samples) {
              d1 = std::max(d1, s.x[2]);
              d2 = std::max(d2, std::hypot(s.x[0], s.x[1]));
            }
          }
        } catch (const NumericalBlowup&) {
          // Escaping samples lie outside the certified basin sweep.
        }
      }
    }
    inputs.Delta1 = std::min(d1, eps0a);
    inputs.Delta2 = d2;
    provenance = "simulated";
  }

  auto loop0 = compose_closed_loop(ex.plant, ex.k0, 0);
  Step2Config s2cfg;
  s2cfg.sample_budget = 120;
  s2cfg.sim_horizon = 15.0;
  s2cfg.solver.dt = 2e-3;
  s2cfg.seed = seed;
  const auto step2 = design_step2_check(
      loop0, [](std::span<const double> x) { return ex1::V0(x); },
      [alpha_bar](std::span<const double> x) { return ex1::V1(x, alpha_bar); }, ex1::gamma0,
      eps0a, eps0b, eps1b, 1.0, s2cfg);

  double tau_used = tau_star;
  if (!grid_csv.empty()) {
    std::vector<double> grid;
    std::stringstream ss(grid_csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) grid.push_back(std::strtod(cell.c_str(), nullptr));
    const auto found = find_dwell_time(inputs, eps1a, grid);
    if (found) tau_used = *found;
  }

  const auto final3 = design_step3_check(inputs, eps1a, tau_used);
  const json report = {
      {"eps0b", eps0b},       {"eps0a", eps0a},
      {"eps1b", eps1b},       {"eps1a", eps1a},
      {"tau_star", tau_used}, {"lhs_step3", final3.lhs},
      {"pass", final3.pass && step2.pass}, {"provenance", provenance},
  };
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "design_report.json", report.dump(2) + "\n");
  }
  std::cout << report.dump(2) << "\n";
  return report["pass"].get<bool>() ? 0 : 1;
}

int cmd_verify(std::vector<std::string> suites, const std::string& preset, std::uint64_t seed) {
  if (suites.empty()) suites = verify::suite_names();
  verify::SuiteOptions opts;
  opts.preset = preset;
  opts.seed = seed;

  bool all_pass = true;
  for (const auto& suite : suites) {
    const auto rows = verify::run_suite(suite, opts);
    for (const auto& row : rows) {
      all_pass = all_pass && row.pass;
      std::printf("[%s] %-24s %-70s value=%.6g %s\n", row.pass ? "PASS" : "FAIL", suite.c_str(),
                  row.name.c_str(), row.value, row.detail.c_str());
    }
  }
  return all_pass ? 0 : 1;
}

int cmd_sweep(const json& doc, const std::string& out_dir, int jobs, std::uint64_t seed) {
  const auto spec = cli::parse_run_spec(doc);
  if (!spec.sweep) return fail(2, "sweep", "sweep specification missing");
  const auto& sw = *spec.sweep;

  struct Row {
    std::string label;
    json result;
    std::string error;
  };

  std::vector<cli::RunSpec> runs;
  std::vector<std::string> labels;
  if (sw.kind == cli::SweepSpec::Kind::Delta) {
    for (double delta : sw.values) {
      cli::RunSpec r = spec;
      r.scenario.conv_tol = 0.0;  // fixed horizon under persistent noise
      r.disturbance = ex1_noise_profile(delta, seed + 1);
      runs.push_back(std::move(r));
      labels.push_back(format_double(delta));
    }
  } else if (sw.kind == cli::SweepSpec::Kind::Param) {
    for (double value : sw.values) {
      json derived = doc;
      derived.erase("sweep");
      cli::apply_overrides(derived, {sw.param_key + "=" + format_double(value)});
      runs.push_back(cli::parse_run_spec(derived));
      labels.push_back(format_double(value));
    }
  } else {
    for (int i = 0; i < sw.grid_n; ++i) {
      for (int k = 0; k < sw.grid_n; ++k) {
        const double x1 = sw.grid_n == 1 ? sw.x1_min
                                         : sw.x1_min + (sw.x1_max - sw.x1_min) * i / (sw.grid_n - 1.0);
        const double x2 = sw.grid_n == 1 ? sw.x2_min
                                         : sw.x2_min + (sw.x2_max - sw.x2_min) * k / (sw.grid_n - 1.0);
        cli::RunSpec r = spec;
        std::visit([&](auto& cfg) { cfg.xi0 = {x1, x2}; }, r.scenario.config);
        runs.push_back(std::move(r));
        labels.push_back(format_double(x1) + "," + format_double(x2));
      }
    }
  }

  std::vector<Row> rows(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      rows[i].label = labels[i];
      try {
        auto output = run_spec(runs[i]);
        rows[i].result = std::move(output.summary);
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::string head = sw.kind == cli::SweepSpec::Kind::Initial
                         ? "index,xi1,xi2"
                         : (sw.kind == cli::SweepSpec::Kind::Delta ? "index,delta"
                                                                   : "index," + sw.param_key);
  std::string csv = head + ",termination,final_t,final_j,count_0to1,count_1to0,min_dwell,"
                           "final_distance_A0\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += std::to_string(i) + "," + rows[i].label + ",";
    if (!rows[i].error.empty()) {
      csv += "error,,,,,,\n";
      continue;
    }
    const auto& r = rows[i].result;
    int c01 = 0, c10 = 0;
    for (const auto& e : r["switch_times"]) {
      (e["from"].get<int>() == 0 ? c01 : c10)++;
    }
    csv += r["termination"].get<std::string>() + "," + format_double(r["final_t"].get<double>()) +
           "," + std::to_string(r["final_j"].get<int>()) + "," + std::to_string(c01) + "," +
           std::to_string(c10) + "," +
           (r["min_dwell"].is_null() ? "inf" : format_double(r["min_dwell"].get<double>())) + "," +
           format_double(r["final_distance_A0"].get<double>()) + "\n";
  }

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_field(const std::string& out_path, int n, double xmin, double xmax, double ymin,
              double ymax) {
  ex2::Example2Config cfg;
  std::string csv = "x,y,phi1,phi2,d1,d2,O1,O2\n";
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double x = xmin + (xmax - xmin) * i / (n - 1.0);
      const double y = ymin + (ymax - ymin) * k / (n - 1.0);
      const State xi = {x, y};
      csv += format_double(x) + "," + format_double(y) + "," +
             format_double(ex2::potential_safe(xi, 1, cfg)) + "," +
             format_double(ex2::potential_safe(xi, 2, cfg)) + "," +
             format_double(ex2::clearance(xi, 1, cfg)) + "," +
             format_double(ex2::clearance(xi, 2, cfg)) + "," +
             (ex2::in_region_O1(xi) ? "1" : "0") + "," + (ex2::in_region_O2(xi) ? "1" : "0") +
             "\n";
    }
  }
  if (out_path == "-") {
    std::cout << csv;
  } else {
    write_text(out_path, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid supervisory control simulator"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = ".";
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd, bool with_preset = true) {
    cmd->add_option("--config", config_path, "scenario configuration file (JSON)");
    if (with_preset) cmd->add_option("--preset", preset, "named scenario preset");
    cmd->add_option("--param", params, "key=value overrides (bare keys go to params.*)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "seed for sampling and noise");
  };

  auto* simulate = app.add_subcommand("simulate", "run a scenario and emit trajectory files");
  add_common(simulate);

  auto* design = app.add_subcommand("design", "run the supervisor parameter design checks");
  double eps0a = 4.0 / 27.0, eps0b = 1.0 / 6.0, eps1a = 5e-5, eps1b = 0.015, tau_star = 15.0;
  double alpha_bar = 0.25, k_radius = 10.0;
  bool estimate = false;
  std::string grid_csv;
  design->add_option("--eps0a", eps0a, "local escape threshold");
  design->add_option("--eps0b", eps0b, "basin sublevel of V0");
  design->add_option("--eps1a", eps1a, "handoff threshold");
  design->add_option("--eps1b", eps1b, "handoff sublevel of V1");
  design->add_option("--tau-star", tau_star, "dwell time");
  design->add_option("--alpha-bar", alpha_bar, "plant drift constant");
  design->add_option("--k-radius", k_radius, "initial-condition ball radius");
  design->add_option("--grid", grid_csv, "comma-separated dwell-time grid to scan");
  design->add_flag("--estimate", estimate, "estimate Delta1/Delta2 by simulation sweeps");
  design->add_option("--out", out_dir, "output directory");
  design->add_option("--seed", seed, "sampling seed");

  auto* verify_cmd = app.add_subcommand("verify", "run the property suites");
  std::vector<std::string> suites;
  verify_cmd->add_option("--suite", suites, "suite names (default: all)");
  verify_cmd->add_option("--preset", preset, "restrict preset-driven suites");
  verify_cmd->add_option("--seed", seed, "sampling seed");

  auto* sweep = app.add_subcommand("sweep", "run a grid of scenarios");
  add_common(sweep);
  sweep->add_option("--jobs", jobs, "parallel workers");

  auto* field = app.add_subcommand("field", "dump the navigation potentials on a grid");
  std::string field_out = "-";
  int field_n = 61;
  double xmin = -2.0, xmax = 5.0, ymin = -3.0, ymax = 3.0;
  field->add_option("--out", field_out, "output file ('-' for stdout)");
  field->add_option("--n", field_n, "grid points per axis");
  field->add_option("--xmin", xmin);
  field->add_option("--xmax", xmax);
  field->add_option("--ymin", ymin);
  field->add_option("--ymax", ymax);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(simulate) || app.got_subcommand(sweep)) {
      json doc = config_path.empty() ? json::object() : cli::load_json_file(config_path);
      if (!preset.empty()) doc["preset"] = preset;
      cli::apply_overrides(doc, params);
      return app.got_subcommand(simulate) ? cmd_simulate(doc, out_dir)
                                          : cmd_sweep(doc, out_dir, std::max(1, jobs), seed);
    }
    if (app.got_subcommand(design)) {
      return cmd_design(eps0a, eps0b, eps1a, eps1b, tau_star, alpha_bar, k_radius, estimate,
                        grid_csv, seed, out_dir);
    }
    if (app.got_subcommand(verify_cmd)) {
      return cmd_verify(suites, preset, seed);
    }
    if (app.got_subcommand(field)) {
      return cmd_field(field_out, field_n, xmin, xmax, ymin, ymax);
    }
  } catch (const cli::ConfigError& e) {
    return fail(2, e.field, e.what());
  } catch (const InvalidConfig& e) {
    return fail(2, "config", e.what());
  } catch (const InvalidParams& e) {
    return fail(2, "params", e.what());
  } catch (const NumericalBlowup& e) {
    return fail(1, "solver", e.what());
  } catch (const std::exception& e) {
    return fail(1, "runtime", e.what());
  }
  return 0;
}
