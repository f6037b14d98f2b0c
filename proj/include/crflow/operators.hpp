#pragma once

#include "crflow/field.hpp"

namespace crflow {

/// Frame field selector: X_alpha, Y_alpha or the Reeb field.
struct Frame {
  enum class Kind { X, Y, Reeb };
  Kind kind = Kind::Reeb;
  int alpha = 0;

  static Frame X(int a) { return Frame{Kind::X, a}; }
  static Frame Y(int a) { return Frame{Kind::Y, a}; }
  static Frame reeb() { return Frame{Kind::Reeb, 0}; }
};

/// Centered second-order difference along a frame field, e.g.
///   (X_a f)(p) ~ [f(p+e_x) - f(p-e_x)]/2h + y^a(p) [f(p+e_t) - f(p-e_t)]/2h
/// with all neighbor fetches through the twisted-periodic wrap.
ScalarField apply_frame(const ScalarField& f, Frame frame);
MapField apply_frame(const MapField& f, Frame frame);

/// Sub-Laplacian for the g_theta-orthonormal frame {X_a/sqrt2, Y_a/sqrt2}:
///   Delta_b = (1/2) sum_a (X_a X_a + Y_a Y_a),
/// realized by applying the first-order frame stencils twice. The centered
/// stencils are exactly skew-adjoint for the cell-weighted inner product, so
/// this composition is the exact (negative) discrete gradient of the
/// horizontal energy; the consistency gate in the analysis module relies on
/// that.
ScalarField sub_laplacian(const ScalarField& f);
MapField sub_laplacian(const MapField& f);

/// sup_p max_a |(X_a Y_a - Y_a X_a + 2 xi) f|(p); the flat-model bracket
/// relation is [X_a, Y_a] = -2 xi, so this vanishes with the grid.
double commutator_defect(const ScalarField& f);

struct EnergyDensities {
  ScalarField e_b;  // horizontal: (1/4) sum_a (|X_a u|^2 + |Y_a u|^2)
  ScalarField e_0;  // vertical:   (1/2) |xi u|^2
  ScalarField e;    // total:      e_b + e_0
};
EnergyDensities energy_densities(const MapField& u);

/// Polarization of e_b: (1/2) sum_a (<X_a u, X_a v> + <Y_a u, Y_a v>), the
/// pairing for which  sum_p <Delta_b u, v> w = - sum_p <d_b u, d_b v> w
/// holds exactly.
ScalarField horizontal_pairing(const MapField& u, const MapField& v);

/// Cell-weighted integral over the manifold.
double integrate(const ScalarField& f);
/// Cell-weighted L2 pairing sum_p <u,v>(p) w.
double l2_inner(const MapField& u, const MapField& v);

/// Gershgorin audit for the explicit scheme: maximum over grid points of the
/// summed absolute stencil coefficients of Delta_b, scaled by h^2. Each
/// first-order frame leg has |coefficients| * h summing to 1 + |t-coefficient|
/// and the legs compose, so the audited bound is
///   S = max_p (1/2) sum_a [ (1 + x^a)^2 + (1 + y^a)^2 ].
double cfl_stencil_bound(const NilmanifoldGrid& grid);

/// Residual symmetries of the quotient used by the wrap-consistency tests.
/// t-translation by c cells commutes exactly with every stencil. The full
/// lattice loops in x^a / y^a act on indices as k -> k + 2 j_a and
/// k -> k - 2 i_a; X_a commutes exactly with the x^a loop (and Y_a with the
/// y^a loop), while the transverse frame picks up exactly the bracket shear:
///   Y_a (u o R_x) = ((Y_a + 2 xi) u) o R_x  to O(h^2), and symmetrically
///   X_a (u o R_y) = ((X_a - 2 xi) u) o R_y.
ScalarField relabel_t(const ScalarField& f, int cells);
MapField relabel_t(const MapField& f, int cells);
ScalarField relabel_loop_x(const ScalarField& f, int alpha);
ScalarField relabel_loop_y(const ScalarField& f, int alpha);
MapField relabel_loop_x(const MapField& f, int alpha);
MapField relabel_loop_y(const MapField& f, int alpha);

}  // namespace crflow
