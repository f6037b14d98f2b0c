#pragma once

#include <optional>
#include <vector>

namespace crflow {

/// Constants feeding the density bound calculus.
///   D : bound on the initial total energy density, e(h) <= D
///   C1: linear Bochner constant (0 for the flat model)
///   C2: quadratic Bochner constant (target-curvature dependent)
///   s : mean-value window length, required to satisfy s < 1/(D(4D+2)C2)
struct ControlParams {
  double D = 1.0;
  double C1 = 0.0;
  double C2 = 1.0;
  double s = 0.1;

  double s_max() const { return 1.0 / (D * (4.0 * D + 2.0) * C2); }
  /// Throws std::domain_error when an invariant fails.
  void validate() const;
};

/// Guaranteed-existence horizon and density comparison bound:
///   T0 = (1/C1) log(1 + C1/(D C2)),        g(t) = C1 D e^{C1 t} / (C1 + C2 D - C2 D e^{C1 t})
/// with the C1 -> 0 limits T0 = 1/(C2 D), g(t) = D / (1 - C2 D t). The bound
/// satisfies g(0) = D and g' = g (C1 + C2 g); it expires at t >= T0 (g is
/// then absent).
struct ComparisonBound {
  double T0 = 0.0;
  std::optional<double> g;  // density bound at the queried time, if t < T0
};
ComparisonBound comparison_bounds(const ControlParams& params, double t);

/// g(t) as a plain function of time (t < T0 required by the caller); used by
/// the residual and monotonicity checks.
double comparison_g(const ControlParams& params, double t);

/// max over sampled times of |dg/dt - g (C1 + C2 g)| with dg/dt from a
/// fourth-order central difference; checks the defining ODE of the bound.
double comparison_ode_residual(const ControlParams& params, int n_samples = 33);

/// Small-energy threshold quantities:
///   s_max  = 1/(D(4D+2)C2)
///   x0     = -1/2 + sqrt(1/4 + 1/(C2 s)),  the maximizer of
///   phi(x) = e^{-C2 s x} x/(1+x)
///   t0_2D  = the time with g(t0) = 2D
struct ThresholdConstants {
  double s_max = 0.0;
  double x0 = 0.0;
  double phi_x0 = 0.0;
  double t0_2D = 0.0;
};
ThresholdConstants threshold_constants(const ControlParams& params);

/// phi(x) = e^{-C2 s x} x / (1 + x).
double threshold_phi(const ControlParams& params, double x);

/// One time-sample of every monitored quantity. Optional entries are absent
/// when the monitor is not yet defined (needs history) or has expired.
struct EnergyReport {
  long step = 0;
  double t = 0.0;
  double E = 0.0;
  double E_b = 0.0;
  double E_0 = 0.0;
  double sup_e = 0.0;
  double sup_e_b = 0.0;
  double sup_e_0 = 0.0;
  double sup_tau = 0.0;
  double sup_ut = 0.0;
  std::optional<double> dissipation_residual;
  std::optional<double> bochner_min_residual;
  std::optional<double> g_bound;
  std::optional<double> vertical_control_ratio;
  std::optional<double> mean_value_ratio;
  // carried for the window monitors, not a CSV column
  double ut_sq_integral = 0.0;
};

/// 	|Delta E_b / Delta t + int |u_t|^2 dV| over the window (a, b), with the
/// dissipation integral taken at the window midpoint (trapezoid) and the
/// result normalized by max(E_b(initial), 1).
double dissipation_residual(const EnergyReport& a, const EnergyReport& b, double e_b_initial);

/// [int_{window} int_M e_0 dV dt] / [(1 + rho) E_b(initial)] over the last
/// `window` time units of the report history; absent when degenerate
/// (E_b(initial) = 0 with nonzero numerator).
std::optional<double> vertical_control_ratio(const std::vector<EnergyReport>& reports,
                                             double window, double rho, double e_b_initial);

/// Empirical mean-value constant for the subsolution
/// phi = e^{-(C1 + C2 rho) t} e(u):
///   sup_x phi(x, t) / int_{t-eps}^{t} int_M phi dV ds,
/// evaluated at the last report; absent when t < eps or the window integral
/// vanishes.
std::optional<double> mean_value_ratio(const std::vector<EnergyReport>& reports, double eps,
                                       double C1, double C2, double rho);

}  // namespace crflow
