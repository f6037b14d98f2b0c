#pragma once

#include <cmath>
#include <stdexcept>

namespace crflow {

enum class TargetKind { UnitSphere, FlatTorus };

/// Codomain geometry: the unit sphere S^n in R^{n+1} (sectional curvature
/// bound kappa = 1) or the flat torus R^n / Z^n stored in ambient R^n
/// (kappa = 0, projection is the identity).
struct TargetManifold {
  TargetKind kind = TargetKind::UnitSphere;
  int n = 2;

  static TargetManifold unit_sphere(int n) {
    if (n < 1) throw std::invalid_argument("sphere dimension must be >= 1");
    return TargetManifold{TargetKind::UnitSphere, n};
  }
  static TargetManifold flat_torus(int n) {
    if (n < 1) throw std::invalid_argument("torus dimension must be >= 1");
    return TargetManifold{TargetKind::FlatTorus, n};
  }

  int n_amb() const { return kind == TargetKind::UnitSphere ? n + 1 : n; }
  double kappa() const { return kind == TargetKind::UnitSphere ? 1.0 : 0.0; }

  /// Closest-point projection of one ambient vector (in place).
  void project_point(double* v) const {
    if (kind != TargetKind::UnitSphere) return;
    double s = 0.0;
    for (int c = 0; c < n_amb(); ++c) s += v[c] * v[c];
    const double r = std::sqrt(s);
    if (r == 0.0) throw std::domain_error("cannot project the zero vector to the sphere");
    for (int c = 0; c < n_amb(); ++c) v[c] /= r;
  }

  /// Projection of an ambient vector v onto the tangent space at u (in place).
  void tangent_project(const double* u, double* v) const {
    if (kind != TargetKind::UnitSphere) return;
    double d = 0.0;
    for (int c = 0; c < n_amb(); ++c) d += u[c] * v[c];
    for (int c = 0; c < n_amb(); ++c) v[c] -= d * u[c];
  }
};

}  // namespace crflow
