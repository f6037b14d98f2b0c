#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crflow/control.hpp"
#include "crflow/field.hpp"
#include "crflow/operators.hpp"

namespace crflow {

/// Tension field of a map into the embedded target:
///   flat torus : tau(u) = Delta_b u
///   unit sphere: tau(u) = Delta_b u + 2 e_b(u) u
/// For the sphere the correction is the second fundamental form term with
/// |d_b u|^2 = 2 e_b(u); the result is tangent up to discretization error.
MapField tension_field(const MapField& u);
/// Variant that also exposes the horizontal density (reused by the flow loop).
MapField tension_field(const MapField& u, ScalarField* e_b_out);

/// Explicit-scheme time step: dt = cfl_factor * h^2 / S with S the
/// Gershgorin stencil audit of Delta_b (see cfl_stencil_bound).
double cfl_timestep(const NilmanifoldGrid& grid, double cfl_factor);

struct FlowConfig {
  double cfl_factor = 0.5;
  double t_max = 2.0;
  double tol_tau = 1e-4;      // convergence threshold on sup |tau(u)|
  double rho_max = -1.0;      // blow-up density threshold; <= 0 means
                              // auto: 1e4 * max(sup e(initial), 1e-12)
  int cadence = 10;           // steps between energy reports
  void validate() const;
};

enum class Termination { Converged, Blowup, Timeout };
std::string to_string(Termination t);

struct FlowState {
  MapField u;
  double t = 0.0;
  long step_count = 0;
};

/// Forward Euler with pointwise projection for sphere targets. Returns false
/// when nonfinite values appear (blow-up signal). The second form applies a
/// precomputed tension field (the driver reuses the field it just tested for
/// convergence).
bool step(FlowState& state, double dt);
bool step(FlowState& state, double dt, const MapField& tau);

struct Trajectory {
  std::vector<EnergyReport> reports;
  Termination reason = Termination::Timeout;
  std::string note;
  MapField initial;
  MapField final_state;
  double dt = 0.0;
  double rho_max_used = 0.0;
  /// Running sup over all sampled sup_e values.
  double rho() const;
};

using FlowObserver = std::function<void(const FlowState&, const EnergyReport&)>;

/// Drive the flow until sup|tau| < tol_tau (Converged), the density crosses
/// rho_max or values go nonfinite (Blowup), or t reaches t_max (Timeout).
/// Reports are emitted at the configured cadence plus the initial and final
/// steps. The control params feed the g bound, the Bochner residual and the
/// window monitors; the window length is params.s.
Trajectory run_flow(const MapField& initial, const FlowConfig& config,
                    const ControlParams& params, const FlowObserver& observer = {});

}  // namespace crflow
