#include "crflow/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "crflow/analysis.hpp"

namespace crflow {

MapField tension_field(const MapField& u, ScalarField* e_b_out) {
  const NilmanifoldGrid& g = *u.grid;
  MapField tau(g, u.target);
  ScalarField e_b(g);
  MapField first = u, second = u;
  for (int a = 0; a < g.m(); ++a) {
    for (Frame fr : {Frame::X(a), Frame::Y(a)}) {
      first = apply_frame(u, fr);
      for (std::int64_t p = 0; p < g.n_points(); ++p) {
        double s = 0.0;
        const double* d = first.at(p);
        for (int c = 0; c < u.n_comp; ++c) s += d[c] * d[c];
        e_b[p] += 0.25 * s;
      }
      second = apply_frame(first, fr);
      for (std::size_t i = 0; i < tau.values.size(); ++i) tau.values[i] += 0.5 * second.values[i];
    }
  }
  if (u.target.kind == TargetKind::UnitSphere) {
    for (std::int64_t p = 0; p < g.n_points(); ++p) {
      const double c2 = 2.0 * e_b[p];
      double* t = tau.at(p);
      const double* up = u.at(p);
      for (int c = 0; c < u.n_comp; ++c) t[c] += c2 * up[c];
    }
  }
  if (e_b_out) *e_b_out = std::move(e_b);
  return tau;
}

MapField tension_field(const MapField& u) { return tension_field(u, nullptr); }

double cfl_timestep(const NilmanifoldGrid& grid, double cfl_factor) {
  return cfl_factor * grid.h() * grid.h() / cfl_stencil_bound(grid);
}

void FlowConfig::validate() const {
  if (!(cfl_factor > 0.0) || cfl_factor > 1.0)
    throw std::domain_error("flow: cfl_factor must lie in (0,1]");
  if (!(t_max > 0.0)) throw std::domain_error("flow: t_max must be > 0");
  if (!(tol_tau > 0.0)) throw std::domain_error("flow: tol_tau must be > 0");
  if (cadence < 1) throw std::domain_error("flow: cadence must be >= 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "CONVERGED";
    case Termination::Blowup: return "BLOWUP";
    case Termination::Timeout: return "TIMEOUT";
  }
  return "UNKNOWN";
}

bool step(FlowState& state, double dt, const MapField& tau) {
  for (std::size_t i = 0; i < state.u.values.size(); ++i) {
    state.u.values[i] += dt * tau.values[i];
  }
  if (state.u.target.kind == TargetKind::UnitSphere) state.u.project();
  state.t += dt;
  state.step_count += 1;
  return all_finite(state.u);
}

bool step(FlowState& state, double dt) { return step(state, dt, tension_field(state.u)); }

double Trajectory::rho() const {
  double r = 0.0;
  for (const auto& rep : reports) r = std::max(r, rep.sup_e);
  return r;
}

namespace {

struct SampleData {
  EnergyReport report;
  ScalarField e_field;
  double sup_tau = 0.0;
};

// Full monitor sample at the current state; tau is recomputed here (the
// driver also uses it for the convergence test).
SampleData sample_state(const FlowState& state, const ControlParams& params) {
  SampleData out;
  const MapField& u = state.u;
  EnergyDensities dens = energy_densities(u);
  MapField tau = tension_field(u);
  // realized flow velocity: tangential part of tau for sphere targets
  MapField ut = tau;
  if (u.target.kind == TargetKind::UnitSphere) {
    for (std::int64_t p = 0; p < u.grid->n_points(); ++p) {
      u.target.tangent_project(u.at(p), ut.at(p));
    }
  }
  ScalarField ut_sq(*u.grid);
  for (std::int64_t p = 0; p < u.grid->n_points(); ++p) {
    double s = 0.0;
    const double* v = ut.at(p);
    for (int c = 0; c < u.n_comp; ++c) s += v[c] * v[c];
    ut_sq[p] = s;
  }
  EnergyReport& r = out.report;
  r.step = state.step_count;
  r.t = state.t;
  r.E_b = integrate(dens.e_b);
  r.E_0 = integrate(dens.e_0);
  r.E = r.E_b + r.E_0;
  r.sup_e = sup_abs(dens.e);
  r.sup_e_b = sup_abs(dens.e_b);
  r.sup_e_0 = sup_abs(dens.e_0);
  r.sup_tau = sup_norm_pointwise(tau);
  r.sup_ut = sup_norm_pointwise(ut);
  r.ut_sq_integral = integrate(ut_sq);
  ComparisonBound cb = comparison_bounds(params, state.t);
  r.g_bound = cb.g;
  out.e_field = std::move(dens.e);
  out.sup_tau = r.sup_tau;
  return out;
}

}  // namespace

Trajectory run_flow(const MapField& initial, const FlowConfig& config,
                    const ControlParams& params, const FlowObserver& observer) {
  config.validate();
  Trajectory traj;
  traj.initial = initial;
  traj.dt = cfl_timestep(*initial.grid, config.cfl_factor);

  FlowState state{initial, 0.0, 0};
  double rho_running = 0.0;
  double e_b_initial = 0.0;
  ScalarField prev_e;
  double prev_e_t = 0.0;
  bool have_prev_e = false;

  auto emit = [&](const FlowState& st) -> SampleData {
    SampleData s = sample_state(st, params);
    rho_running = std::max(rho_running, s.report.sup_e);
    if (st.step_count == 0) e_b_initial = s.report.E_b;
    if (!traj.reports.empty()) {
      s.report.dissipation_residual =
          dissipation_residual(traj.reports.back(), s.report, e_b_initial);
    }
    if (have_prev_e) {
      BochnerResidual br =
          bochner_residual(prev_e, s.e_field, st.t - prev_e_t, params);
      s.report.bochner_min_residual = br.min_value;
    }
    prev_e = s.e_field;
    prev_e_t = st.t;
    have_prev_e = true;
    traj.reports.push_back(s.report);
    // window monitors need the report list including the new sample
    traj.reports.back().vertical_control_ratio =
        vertical_control_ratio(traj.reports, params.s, rho_running, e_b_initial);
    traj.reports.back().mean_value_ratio =
        mean_value_ratio(traj.reports, params.s, params.C1, params.C2, rho_running);
    if (observer) observer(st, traj.reports.back());
    return s;
  };

  SampleData current = emit(state);
  const double rho_max = config.rho_max > 0.0
                             ? config.rho_max
                             : 1e4 * std::max(current.report.sup_e, 1e-12);
  traj.rho_max_used = rho_max;

  while (true) {
    if (current.sup_tau < config.tol_tau) {
      traj.reason = Termination::Converged;
      traj.note = "sup|tau| below tolerance";
      break;
    }
    if (current.report.sup_e > rho_max) {
      traj.reason = Termination::Blowup;
      traj.note = "density threshold crossed at t = " + std::to_string(state.t);
      break;
    }
    if (state.t >= config.t_max) {
      traj.reason = Termination::Timeout;
      traj.note = "reached t_max";
      break;
    }
    // Advance one cadence window; the convergence test runs every step on
    // the tension field the step is about to apply.
    bool finite = true;
    bool converged = false;
    for (int k = 0; k < config.cadence && state.t < config.t_max; ++k) {
      MapField tau = tension_field(state.u);
      const double sup_tau = sup_norm_pointwise(tau);
      if (!std::isfinite(sup_tau)) {
        finite = false;
        break;
      }
      if (sup_tau < config.tol_tau) {
        converged = true;
        break;
      }
      if (!step(state, traj.dt, tau)) {
        finite = false;
        break;
      }
    }
    if (!finite) {
      traj.reason = Termination::Blowup;
      traj.note = "nonfinite values at step " + std::to_string(state.step_count);
      break;
    }
    current = emit(state);
    if (converged) {
      traj.reason = Termination::Converged;
      traj.note = "sup|tau| below tolerance";
      break;
    }
  }
  traj.final_state = state.u;
  return traj;
}

}  // namespace crflow
