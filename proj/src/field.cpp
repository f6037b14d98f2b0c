#include "crflow/field.hpp"

#include <cmath>

namespace crflow {

double MapField::sphere_constraint_defect() const {
  if (target.kind != TargetKind::UnitSphere) return 0.0;
  double worst = 0.0;
  for (std::int64_t p = 0; p < grid->n_points(); ++p) {
    double s = 0.0;
    const double* u = at(p);
    for (int c = 0; c < n_comp; ++c) s += u[c] * u[c];
    const double d = std::abs(std::sqrt(s) - 1.0);
    if (d > worst) worst = d;
  }
  return worst;
}

double sup_abs(const ScalarField& f) {
  double worst = 0.0;
  for (double v : f.values) {
    const double a = std::abs(v);
    if (a > worst) worst = a;
  }
  return worst;
}

double sup_norm_pointwise(const MapField& u) {
  double worst = 0.0;
  for (std::int64_t p = 0; p < u.grid->n_points(); ++p) {
    double s = 0.0;
    const double* v = u.at(p);
    for (int c = 0; c < u.n_comp; ++c) s += v[c] * v[c];
    if (s > worst) worst = s;
  }
  return std::sqrt(worst);
}

bool all_finite(const MapField& u) {
  for (double v : u.values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace crflow
