#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli/csv.hpp"
#include "deadbeat/error.hpp"
#include "deadbeat/window_kernel.hpp"
#include "json.hpp"

namespace deadbeat::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_json(const std::string& path, const ordered_json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

ordered_json to_json(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

const char* type_name(SystemType type) {
  switch (type) {
    case SystemType::kReactor: return "reactor";
    case SystemType::kFrequency: return "frequency";
    case SystemType::kLti: return "lti";
    case SystemType::kScalar: return "scalar";
    case SystemType::kExample26: return "example26";
  }
  return "unknown";
}

SimConfig sim_config(const ScenarioConfig& cfg, double t_end) {
  SimConfig sim = cfg.sim;
  sim.t_end = t_end;
  return sim;
}

}  // namespace

void cmd_simulate(const ScenarioConfig& cfg, std::ostream& log) {
  if (!(cfg.sim.t_end > 0.0)) {
    throw ConfigError("sim.t_end", "is required and must be > 0 for simulate");
  }
  const SystemSpec spec = build_spec(cfg);
  const Trace clean = simulate_plant(spec, build_input(cfg), cfg.sim);
  const Trace trace = corrupt(clean, cfg.sensor);
  const EstimateTrace est = run_observer(spec, cfg.observer, trace, cfg.z0,
                                         cfg.w0);

  double max_err = 0.0;
  double max_rel = 0.0;
  for (std::size_t j = 0; j < est.size(); ++j) {
    if (est.grid.time(j) < cfg.observer.r - 1e-9 * cfg.observer.h) continue;
    const Vector& x = trace.x_true[j];
    const double err = (est.z[j] - x).cwiseAbs().maxCoeff();
    max_err = std::max(max_err, err);
    max_rel = std::max(max_rel, err / (1.0 + x.cwiseAbs().maxCoeff()));
  }
  std::size_t applied = 0;
  for (const auto& ev : est.events) {
    if (ev.outcome == ResetOutcome::kApplied) ++applied;
  }

  {
    auto out = open_output(cfg.output_prefix + "_trace.csv");
    write_trace_csv(out, trace);
  }
  {
    auto out = open_output(cfg.output_prefix + "_estimate.csv");
    write_estimate_csv(out, trace, est);
  }

  ordered_json summary;
  summary["command"] = "simulate";
  summary["system"] = type_name(cfg.type);
  summary["r"] = cfg.observer.r;
  summary["h"] = cfg.observer.h;
  summary["t_end"] = cfg.sim.t_end;
  summary["nodes"] = est.size();
  summary["resets_applied"] = applied;
  summary["degenerate_events"] = est.degenerate_events;
  summary["out_of_domain_resets"] = est.out_of_domain_resets;
  summary["max_post_r_error"] = max_err;
  summary["max_post_r_rel_error"] = max_rel;
  summary["final_estimate"] = to_json(est.z.back());
  summary["final_state"] = to_json(trace.x_true.back());
  if (cfg.type == SystemType::kFrequency) {
    const double z2 = est.z.back()(1);
    if (z2 < 0.0) {
      const double w = omega_hat(z2);
      summary["omega_hat"] = w;
      summary["omega_rel_error"] =
          std::abs(w - cfg.frequency.omega) / cfg.frequency.omega;
    } else {
      summary["omega_hat"] = nullptr;
    }
  }
  write_json(cfg.output_prefix + "_summary.json", summary);

  log << "simulate: " << est.size() << " nodes, " << applied
      << " resets, max post-r error " << format_number(max_err) << '\n';
  if (summary.contains("omega_hat") && !summary["omega_hat"].is_null()) {
    log << "omega_hat " << format_number(summary["omega_hat"].get<double>())
        << '\n';
  }
}

void cmd_sweep(const ScenarioConfig& cfg, SweepMode mode, std::ostream& log) {
  if (cfg.type != SystemType::kFrequency) {
    throw ConfigError("system.type", "sweep needs the frequency system");
  }
  FrequencyScenario scn = cfg.frequency;
  scn.r = cfg.observer.r;
  const double h = cfg.sim.h;

  SweepTable table;
  const char* mode_name = "phase";
  if (mode == SweepMode::kPhase) {
    const auto phases = phase_grid(cfg.sweep_phases);
    table = phase_sweep(scn, phases, h);
  } else {
    if (cfg.sweep_r_values.empty()) {
      throw ConfigError("sweep.r_values", "is required for horizon mode");
    }
    mode_name = "horizon";
    table = horizon_sweep(scn, cfg.sweep_r_values, h);
  }

  {
    auto out = open_output(cfg.output_prefix + "_sweep.csv");
    write_table_csv(out, {"sweep_value", "omega_hat", "rel_error"},
                    {table.sweep_value, table.omega_hat, table.rel_error});
  }
  ordered_json summary;
  summary["command"] = "sweep";
  summary["mode"] = mode_name;
  summary["h"] = h;
  summary["r"] = scn.r;
  summary["noise_amplitude"] = scn.noise_amplitude;
  summary["noise_frequency"] = scn.noise_frequency;
  summary["points"] = table.sweep_value.size();
  summary["max_rel_error"] = table.max_error;
  summary["argmax"] = table.argmax;
  write_json(cfg.output_prefix + "_sweep_summary.json", summary);

  log << "sweep (" << mode_name << "): " << table.sweep_value.size()
      << " points, max rel error " << format_number(table.max_error) << " at "
      << format_number(table.argmax) << '\n';
}

void cmd_observability(const ScenarioConfig& cfg, std::ostream& log) {
  const SystemSpec spec = build_spec(cfg);
  const double h = cfg.observer.h;
  const std::size_t M = cfg.observer.steps_per_window();
  const SimConfig sim = sim_config(cfg, cfg.observer.r);

  ordered_json report;
  report["command"] = "observability";
  report["system"] = type_name(cfg.type);
  report["r"] = cfg.observer.r;
  report["h"] = h;
  report["steps"] = M;

  Trace trace;
  if (cfg.type == SystemType::kExample26) {
    const Example26Spec ex = build_example26(cfg);
    const Grid grid{0.0, h, M + 1};
    const double y0 = cfg.sim.y0(0);
    IndistinguishingInput ii = indistinguishing_input(ex, cfg.sim.x0, y0, grid);
    const InputSignal input = interpolated_input(grid, ii.u);
    trace = simulate_plant(spec, input, sim);
    const Vector partner =
        indistinguishable_partner(ex, cfg.sim.x0, y0, cfg.example26.xi1);
    SimConfig other = sim;
    other.x0 = partner;
    const Trace twin = simulate_plant(spec, input, other);
    double diff = 0.0;
    for (std::size_t j = 0; j < trace.size(); ++j) {
      diff = std::max(diff, std::abs(trace.y_true[j](0) - twin.y_true[j](0)));
    }
    ordered_json part;
    part["x0"] = to_json(cfg.sim.x0);
    part["partner"] = to_json(partner);
    part["max_output_difference"] = diff;
    report["indistinguishable_pair"] = part;
  } else {
    trace = simulate_plant(spec, build_input(cfg), sim);
  }
  trace = corrupt(std::move(trace), cfg.sensor);

  const IoWindow window{trace.grid, trace.y_meas, trace.u};
  const WindowComputation wc = compute_window(spec, window);
  const GramSummary gs = gram(wc, trace.grid);
  const double rel = cfg.observer.rel_threshold > 0.0
                         ? cfg.observer.rel_threshold
                         : kDefaultRelThreshold;
  const ObservabilityCertificate cert = observability_certificate(gs, rel);

  report["eigenvalues"] = to_json(gs.eigenvalues);
  report["trace"] = gs.Q.trace();
  report["smallest_eigenvalue"] = cert.smallest_eigenvalue;
  report["threshold"] = cert.threshold;
  report["smallest_pivot"] = gs.smallest_pivot;
  report["condition_estimate"] = gs.condition_estimate;
  report["verdict"] = cert.strongly_observable ? "StronglyObservableOnWindow"
                                               : "Degenerate";
  if (cert.strongly_observable) {
    const Vector x0_hat = reconstruct_initial(gs, cfg.observer.pivot_floor);
    report["x0_hat"] = to_json(x0_hat);
    report["x0_error"] = (x0_hat - cfg.sim.x0).cwiseAbs().maxCoeff();
  } else {
    report["null_direction"] = to_json(cert.null_direction);
  }

  if (spec.k == 1) {
    std::vector<std::size_t> nodes = cfg.observability_nodes;
    if (nodes.empty()) {
      for (std::size_t i = 0; i < spec.n; ++i) {
        nodes.push_back(M - i * M / spec.n);
      }
    }
    if (nodes.size() != spec.n) {
      throw ConfigError("observability.nodes",
                        "needs exactly n = " + std::to_string(spec.n) +
                            " node indices");
    }
    for (std::size_t node : nodes) {
      if (node > M) {
        throw ConfigError("observability.nodes",
                          "node " + std::to_string(node) +
                              " lies outside the window (max " +
                              std::to_string(M) + ")");
      }
    }
    ordered_json det;
    det["nodes"] = nodes;
    det["value"] = determinant_condition(wc, nodes);
    report["determinant_condition"] = det;
  }
  write_json(cfg.output_prefix + "_observability.json", report);

  log << "observability: " << report["verdict"].get<std::string>()
      << ", smallest eigenvalue " << format_number(cert.smallest_eigenvalue)
      << " (threshold " << format_number(cert.threshold) << ")\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitValidation;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::kInvalidArgument:
      case ErrorKind::kDimensionMismatch:
      case ErrorKind::kLengthMismatch:
      case ErrorKind::kInvalidParams:
      case ErrorKind::kHypothesisFails:
        return kExitValidation;
      case ErrorKind::kGramDegenerate:
        return kExitDegenerate;
      default:
        return kExitRuntime;
    }
  }
  return kExitRuntime;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Hybrid dead-beat observer simulations", "deadbeat-obs"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  std::string config_path;
  std::optional<double> h;
  std::optional<std::string> out_prefix;
  std::string sweep_mode = "phase";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--h", h, "integration step override (s)");
    sub->add_option("--out-prefix", out_prefix, "output file prefix override");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "run plant and observer");
  add_common(simulate);
  CLI::App* sweep = app.add_subcommand("sweep", "frequency error sweeps");
  add_common(sweep);
  sweep->add_option("--mode", sweep_mode, "phase or horizon")
      ->check(CLI::IsMember({"phase", "horizon"}));
  CLI::App* observability =
      app.add_subcommand("observability", "Gram report on one window");
  add_common(observability);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const ScenarioConfig cfg = load_config(config_path, Overrides{h, out_prefix});
    if (simulate->parsed()) {
      cmd_simulate(cfg, std::cout);
    } else if (sweep->parsed()) {
      cmd_sweep(cfg,
                sweep_mode == "horizon" ? SweepMode::kHorizon : SweepMode::kPhase,
                std::cout);
    } else {
      cmd_observability(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace deadbeat::cli
