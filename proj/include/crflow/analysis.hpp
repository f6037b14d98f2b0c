#pragma once

#include <optional>
#include <string>

#include "crflow/control.hpp"
#include "crflow/flow.hpp"
#include "crflow/operators.hpp"

namespace crflow {

struct TotalEnergies {
  double E = 0.0;
  double E_b = 0.0;
  double E_0 = 0.0;
};

/// Cell-weighted totals of the density fields. Convention: E = int e dV
/// (so that E = E_b + E_0 holds exactly), recorded in every output header.
TotalEnergies total_energies(const MapField& u);

/// Pointwise residual of the density inequality
///   (Delta_b - d/dt) e(u) >= -C1 e - C2 e^2:
///   r = Delta_b e_next - (e_next - e_prev)/dt + C1 e_next + C2 e_next^2,
/// with the time derivative from a backward difference at report cadence.
/// Nonnegative up to discretization error for solutions of the flow.
struct BochnerResidual {
  ScalarField field;
  double min_value = 0.0;
};
BochnerResidual bochner_residual(const ScalarField& e_prev, const ScalarField& e_next, double dt,
                                 const ControlParams& params);
/// Convenience form on two consecutive sampled map fields.
BochnerResidual bochner_residual(const MapField& u_prev, const MapField& u_next, double dt,
                                 const ControlParams& params);

/// Calibrated violation tolerance for the Bochner monitor: c_B (h^2 + dt)
/// times a derivative scale measured from the sampled fields.
double bochner_tolerance(const ScalarField& e_prev, const ScalarField& e_next, double dt);

/// Finite-difference gradient oracle: compares
///   [E_b(P(u + d v)) - E_b(P(u - d v))] / (2 d)   against   -sum <tau(u), v> w
/// for a tangent variation v (P = target projection). The frame stencils make
/// tau the exact discrete gradient of E_b, so the relative error is
/// O(delta^2) + rounding; a wrong density normalization shows up immediately.
struct GradientCheck {
  double fd_derivative = 0.0;
  double pairing = 0.0;   // -sum <tau, v> w
  double rel_error = 0.0;
};
GradientCheck gradient_check(const MapField& u, const MapField& v, double delta);

/// Post-run classification and bound annotations.
struct TerminationReport {
  Termination reason = Termination::Timeout;
  double rho = 0.0;              // max over sampled sup_e
  bool density_bound_checked = false;
  bool density_bound_held = false;  // sup_e(t) <= g(t) on sampled t < T0
  double bound_horizon = 0.0;     // T0 for the supplied params
  bool tail_ut_decreasing = false;
  std::optional<double> x0;       // density threshold, when s is admissible
  bool rho_below_x0 = false;
  std::string summary;
};
TerminationReport classify_termination(const Trajectory& traj, const ControlParams& params);

}  // namespace crflow
