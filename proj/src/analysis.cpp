#include "crflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crflow {

TotalEnergies total_energies(const MapField& u) {
  EnergyDensities dens = energy_densities(u);
  TotalEnergies out;
  out.E_b = integrate(dens.e_b);
  out.E_0 = integrate(dens.e_0);
  out.E = out.E_b + out.E_0;
  return out;
}

BochnerResidual bochner_residual(const ScalarField& e_prev, const ScalarField& e_next, double dt,
                                 const ControlParams& params) {
  ScalarField lap = sub_laplacian(e_next);
  BochnerResidual out{ScalarField(*e_next.grid), 0.0};
  bool first = true;
  for (std::int64_t p = 0; p < e_next.grid->n_points(); ++p) {
    const double e = e_next[p];
    const double r = lap[p] - (e - e_prev[p]) / dt + params.C1 * e + params.C2 * e * e;
    out.field[p] = r;
    if (first || r < out.min_value) {
      out.min_value = r;
      first = false;
    }
  }
  return out;
}

BochnerResidual bochner_residual(const MapField& u_prev, const MapField& u_next, double dt,
                                 const ControlParams& params) {
  return bochner_residual(energy_densities(u_prev).e, energy_densities(u_next).e, dt, params);
}

double bochner_tolerance(const ScalarField& e_prev, const ScalarField& e_next, double dt) {
  // c_B calibrated on the flat-torus single-mode runs of the check suite
  // (N = 16..64) with a > 3x margin.
  constexpr double c_B = 25.0;
  ScalarField lap = sub_laplacian(e_next);
  double scale = 1.0;
  for (std::int64_t p = 0; p < e_next.grid->n_points(); ++p) {
    scale = std::max(scale, std::abs(lap[p]));
    scale = std::max(scale, std::abs(e_next[p] - e_prev[p]) / dt);
  }
  const double h = e_next.grid->h();
  return c_B * (h * h + dt) * scale;
}

GradientCheck gradient_check(const MapField& u, const MapField& v, double delta) {
  GradientCheck out;
  auto displaced_energy = [&](double d) {
    MapField w = u;
    for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] += d * v.values[i];
    w.project();
    return total_energies(w).E_b;
  };
  out.fd_derivative = (displaced_energy(delta) - displaced_energy(-delta)) / (2.0 * delta);
  MapField tau = tension_field(u);
  out.pairing = -l2_inner(tau, v);
  const double denom = std::max({std::abs(out.pairing), std::abs(out.fd_derivative), 1e-14});
  out.rel_error = std::abs(out.fd_derivative - out.pairing) / denom;
  return out;
}

TerminationReport classify_termination(const Trajectory& traj, const ControlParams& params) {
  TerminationReport out;
  out.reason = traj.reason;
  out.rho = traj.rho();

  ComparisonBound cb = comparison_bounds(params, 0.0);
  out.bound_horizon = cb.T0;
  out.density_bound_checked = false;
  out.density_bound_held = true;
  for (const EnergyReport& r : traj.reports) {
    if (r.t >= cb.T0 * (1.0 - 1e-12)) continue;
    out.density_bound_checked = true;
    const double g = comparison_g(params, r.t);
    if (r.sup_e > g * (1.0 + 1e-9) + 1e-12) out.density_bound_held = false;
  }

  const std::size_t n = traj.reports.size();
  const std::size_t tail = std::min<std::size_t>(n, 5);
  out.tail_ut_decreasing = true;
  for (std::size_t i = n - tail + 1; i < n && tail >= 2; ++i) {
    if (traj.reports[i].sup_ut > traj.reports[i - 1].sup_ut * (1.0 + 1e-9) + 1e-15) {
      out.tail_ut_decreasing = false;
    }
  }

  if (params.s > 0.0 && params.s < params.s_max()) {
    ThresholdConstants th = threshold_constants(params);
    out.x0 = th.x0;
    out.rho_below_x0 = out.rho < th.x0;
  }

  std::ostringstream ss;
  ss << to_string(traj.reason) << "; rho = " << out.rho;
  if (out.density_bound_checked) {
    ss << "; density bound on [0,T0) " << (out.density_bound_held ? "held" : "violated");
  }
  if (out.x0) {
    ss << "; rho " << (out.rho_below_x0 ? "<" : ">=") << " x0 = " << *out.x0;
  }
  out.summary = ss.str();
  return out;
}

}  // namespace crflow
