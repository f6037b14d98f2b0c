#include "crflow/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "crflow/checks.hpp"
#include "crflow/oracle.hpp"
#include "crflow/snapshot.hpp"

namespace crflow {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Termination reason) {
  switch (reason) {
    case Termination::Converged: return kExitConverged;
    case Termination::Timeout: return kExitTimeout;
    case Termination::Blowup: return kExitBlowup;
  }
  return kExitError;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

void write_convention_header(std::ostream& out, const RunConfig& config,
                             const ResolvedRun& run) {
  out << "# crflow time series\n";
  out << "# geometry: m=" << config.m << " N=" << config.N
      << " target=" << (config.target_kind == TargetKind::UnitSphere ? "sphere" : "torus")
      << " n=" << config.target_n << " seed=" << config.seed << "\n";
  out << "# conventions: Levi factor 2 (L(X_a,X_a)=2); energies use E = integral of e dV, "
         "so E = E_b + E_0\n";
  out << "# control: D=" << fmt(run.control.D) << " C1=" << fmt(run.control.C1)
      << " C2=" << fmt(run.control.C2) << " s=" << fmt(run.control.s)
      << " T0=" << fmt(comparison_bounds(run.control, 0.0).T0) << "\n";
  if (config.m == 1) {
    out << "# note: m=1 is a reduced-dimension testbed; the small-horizontal-energy "
           "convergence guarantee targets m >= 2\n";
  }
}

}  // namespace

void write_timeseries_csv(const std::string& path, const RunConfig& config,
                          const ResolvedRun& run, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_convention_header(out, config, run);
  out << "step,t,E,E_b,E_0,sup_e,sup_e_b,sup_e_0,sup_tau,sup_ut,dissipation_residual,"
         "bochner_min_residual,g_bound,vertical_control_ratio,mean_value_ratio\n";
  for (const EnergyReport& r : traj.reports) {
    out << r.step << ',' << fmt(r.t) << ',' << fmt(r.E) << ',' << fmt(r.E_b) << ','
        << fmt(r.E_0) << ',' << fmt(r.sup_e) << ',' << fmt(r.sup_e_b) << ',' << fmt(r.sup_e_0)
        << ',' << fmt(r.sup_tau) << ',' << fmt(r.sup_ut) << ','
        << fmt_opt(r.dissipation_residual) << ',' << fmt_opt(r.bochner_min_residual) << ','
        << fmt_opt(r.g_bound) << ',' << fmt_opt(r.vertical_control_ratio) << ','
        << fmt_opt(r.mean_value_ratio) << '\n';
  }
}

namespace {

json summary_json(const RunConfig& config, const ResolvedRun& run, const Trajectory& traj,
                  const TerminationReport& cls) {
  json j;
  j["termination"] = to_string(traj.reason);
  j["note"] = traj.note;
  j["steps"] = traj.reports.empty() ? 0 : traj.reports.back().step;
  j["t_final"] = traj.reports.empty() ? 0.0 : traj.reports.back().t;
  j["dt"] = traj.dt;
  j["rho_max_used"] = traj.rho_max_used;
  j["E_b_initial"] = run.E_b_h;
  j["sup_e_initial"] = run.sup_e_h;
  if (!traj.reports.empty()) {
    j["E_b_final"] = traj.reports.back().E_b;
    j["sup_tau_final"] = traj.reports.back().sup_tau;
  }
  j["rho"] = cls.rho;
  j["annotations"] = {
      {"density_bound_checked", cls.density_bound_checked},
      {"density_bound_held", cls.density_bound_held},
      {"bound_horizon_T0", cls.bound_horizon},
      {"tail_ut_decreasing", cls.tail_ut_decreasing},
      {"rho_below_x0", cls.rho_below_x0},
  };
  if (cls.x0) j["annotations"]["x0"] = *cls.x0;
  j["control"] = {{"D", run.control.D},
                  {"C1", run.control.C1},
                  {"C2", run.control.C2},
                  {"s", run.control.s}};
  j["conventions"] = {{"levi_factor", 2},
                      {"energy", "E = integral of e dV; E = E_b + E_0"},
                      {"C2_default", "4*kappa for curved targets, 1 otherwise"}};
  j["geometry"] = {{"m", config.m},
                   {"N", config.N},
                   {"testbed_dimension", config.m == 1}};
  j["summary"] = cls.summary;
  return j;
}

}  // namespace

namespace {

void write_run_artifacts(const RunConfig& config, const ResolvedRun& run, const Trajectory& traj,
                         const TerminationReport& cls) {
  fs::create_directories(config.out_dir);
  write_snapshot((fs::path(config.out_dir) / "initial.snap").string(), run.initial, 0.0);
  write_timeseries_csv((fs::path(config.out_dir) / "timeseries.csv").string(), config, run, traj);
  write_snapshot((fs::path(config.out_dir) / "final.snap").string(), traj.final_state,
                 traj.reports.empty() ? 0.0 : traj.reports.back().t);
  std::ofstream js((fs::path(config.out_dir) / "summary.json").string());
  js << summary_json(config, run, traj, cls).dump(2) << "\n";
}

}  // namespace

RunArtifacts execute_run(const RunConfig& config, std::ostream& log) {
  ResolvedRun run = resolve_run(config);
  Trajectory traj = run_flow(run.initial, run.flow, run.control);
  TerminationReport cls = classify_termination(traj, run.control);
  write_run_artifacts(config, run, traj, cls);
  log << to_string(traj.reason) << ": " << cls.summary << "\n";
  return RunArtifacts{std::move(traj), cls, config.out_dir};
}

int command_run(const RunConfig& config, std::ostream& log) {
  RunArtifacts art = execute_run(config, log);
  return exit_code_for(art.trajectory.reason);
}

SweepResult run_sweep(const RunConfig& base, const std::vector<double>& lambdas,
                      std::ostream& log, const std::string& out_dir) {
  SweepResult result;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    RunConfig cfg = base;
    cfg.initial.amplitude = lambdas[i];
    ResolvedRun run = resolve_run(cfg);
    Trajectory traj = run_flow(run.initial, run.flow, run.control);
    TerminationReport cls = classify_termination(traj, run.control);

    SweepRow row;
    row.lambda = lambdas[i];
    row.E_b_h = run.E_b_h;
    row.sup_e_h = run.sup_e_h;
    row.reason = traj.reason;
    row.final_sup_tau = traj.reports.empty() ? 0.0 : traj.reports.back().sup_tau;
    for (const EnergyReport& r : traj.reports) {
      if (r.vertical_control_ratio) {
        row.max_vertical_ratio = std::max(row.max_vertical_ratio, *r.vertical_control_ratio);
      }
    }
    row.classification = cls;
    row.reports = traj.reports;
    row.control = run.control;
    result.rows.push_back(std::move(row));

    if (!out_dir.empty()) {
      RunConfig sub = cfg;
      char name[32];
      std::snprintf(name, sizeof(name), "lambda_%03zu", i);
      sub.out_dir = (fs::path(out_dir) / name).string();
      write_run_artifacts(sub, run, traj, cls);
    }
    log << "lambda=" << lambdas[i] << " -> " << to_string(traj.reason)
        << " (E_b(h)=" << row.E_b_h << ", sup|tau|_final=" << row.final_sup_tau << ")\n";
  }

  bool prefix = true;
  for (const SweepRow& row : result.rows) {
    if (row.reason == Termination::Converged && prefix) {
      result.lambda_star = row.lambda;
      result.E_b_at_lambda_star = row.E_b_h;
    } else {
      prefix = false;
      if (result.first_nonconverged < 0.0 && row.reason != Termination::Converged) {
        result.first_nonconverged = row.lambda;
      }
    }
  }
  return result;
}

int command_sweep(const RunConfig& base, const std::vector<double>& lambdas,
                  std::ostream& log) {
  if (lambdas.empty()) {
    log << "error: empty lambda grid\n";
    return kExitError;
  }
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      log << "error: lambda grid must be strictly increasing\n";
      return kExitError;
    }
  }
  fs::create_directories(base.out_dir);
  SweepResult result = run_sweep(base, lambdas, log, base.out_dir);

  std::ofstream csv((fs::path(base.out_dir) / "sweep.csv").string(), std::ios::binary);
  csv << "lambda,E_b_h,sup_e_h,termination,final_sup_tau,max_vertical_control_ratio\n";
  for (const SweepRow& row : result.rows) {
    csv << fmt(row.lambda) << ',' << fmt(row.E_b_h) << ',' << fmt(row.sup_e_h) << ','
        << to_string(row.reason) << ',' << fmt(row.final_sup_tau) << ','
        << fmt(row.max_vertical_ratio) << '\n';
  }

  json j;
  j["lambda_star"] = result.lambda_star;
  j["E_b_at_lambda_star"] = result.E_b_at_lambda_star;
  j["first_nonconverged_lambda"] = result.first_nonconverged;
  j["rows"] = json::array();
  for (const SweepRow& row : result.rows) {
    j["rows"].push_back({{"lambda", row.lambda},
                         {"E_b_h", row.E_b_h},
                         {"sup_e_h", row.sup_e_h},
                         {"termination", to_string(row.reason)},
                         {"final_sup_tau", row.final_sup_tau},
                         {"max_vertical_control_ratio", row.max_vertical_ratio},
                         {"density_bound_held", row.classification.density_bound_held},
                         {"summary", row.classification.summary}});
  }
  std::ofstream js((fs::path(base.out_dir) / "sweep_summary.json").string());
  js << j.dump(2) << "\n";

  if (result.lambda_star >= 0.0) {
    log << "largest converged lambda* = " << result.lambda_star
        << " with E_b(h) = " << result.E_b_at_lambda_star << "\n";
  } else {
    log << "no converged prefix\n";
  }
  if (result.first_nonconverged >= 0.0) {
    log << "smallest non-converged lambda = " << result.first_nonconverged << "\n";
  }
  return 0;
}

int command_oracle(const RunConfig& config, double t, std::ostream& log) {
  if (config.target_kind != TargetKind::FlatTorus) {
    log << "error: the oracle covers flat-torus targets only\n";
    return kExitError;
  }
  if (config.initial.family != InitialFamily::TorusMode) {
    log << "error: the oracle covers t-independent torus_mode data only\n";
    return kExitError;
  }
  ResolvedRun run = resolve_run(config);
  std::vector<int> modes = config.initial.modes;
  if (modes.empty()) {
    modes.assign(static_cast<std::size_t>(2 * config.m), 0);
    modes[0] = 1;
  }
  ScalarField mode = spectral_oracle(modes, t, *run.grid);
  MapField u(*run.grid, run.target);
  std::vector<double> base = config.initial.base;
  if (base.empty()) base.assign(static_cast<std::size_t>(run.target.n_amb()), 0.0);
  for (std::int64_t p = 0; p < run.grid->n_points(); ++p) {
    double* up = u.at(p);
    for (int c = 0; c < u.n_comp; ++c) up[c] = base[c];
    up[0] += config.initial.amplitude * mode[p];
  }
  fs::create_directories(config.out_dir);
  const std::string path = (fs::path(config.out_dir) / "oracle.snap").string();
  write_snapshot(path, u, t);
  log << "oracle amplitude factor at t=" << t << ": " << fmt(spectral_decay(modes, t)) << "\n";
  log << "wrote " << path << "\n";
  return 0;
}

int command_check(CheckLevel level, std::ostream& log) {
  CheckList checks;
  if (level == CheckLevel::Quick) {
    run_quick_checks(checks);
  } else {
    run_full_checks(checks);
  }
  int failures = 0;
  for (const CheckResult& c : checks) {
    log << (c.pass ? "[ok]   " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) log << "  (" << c.detail << ")";
    log << "\n";
    if (!c.pass) ++failures;
  }
  log << checks.size() - failures << "/" << checks.size() << " checks passed\n";
  return failures == 0 ? 0 : kExitError;
}

}  // namespace crflow
