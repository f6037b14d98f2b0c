#pragma once

#include <cstdint>
#include <vector>

#include "crflow/geometry.hpp"
#include "crflow/target.hpp"

namespace crflow {

/// One real value per grid point.
struct ScalarField {
  const NilmanifoldGrid* grid = nullptr;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const NilmanifoldGrid& g, double fill = 0.0)
      : grid(&g), values(static_cast<std::size_t>(g.n_points()), fill) {}

  double& operator[](std::int64_t p) { return values[static_cast<std::size_t>(p)]; }
  double operator[](std::int64_t p) const { return values[static_cast<std::size_t>(p)]; }
};

/// Map u: grid -> ambient space of the target. Storage is point-major with
/// the component index fastest-varying and the axes ordered
/// (x^1, y^1, ..., x^m, y^m, t), matching the snapshot file layout.
struct MapField {
  const NilmanifoldGrid* grid = nullptr;
  TargetManifold target;
  int n_comp = 0;
  std::vector<double> values;

  MapField() = default;
  MapField(const NilmanifoldGrid& g, const TargetManifold& tgt)
      : grid(&g),
        target(tgt),
        n_comp(tgt.n_amb()),
        values(static_cast<std::size_t>(g.n_points()) * tgt.n_amb(), 0.0) {}

  double* at(std::int64_t p) { return values.data() + static_cast<std::size_t>(p) * n_comp; }
  const double* at(std::int64_t p) const {
    return values.data() + static_cast<std::size_t>(p) * n_comp;
  }

  /// Pointwise closest-point projection onto the target.
  void project() {
    for (std::int64_t p = 0; p < grid->n_points(); ++p) target.project_point(at(p));
  }

  /// max_p | |u(p)| - 1 | on the sphere, 0 for the torus.
  double sphere_constraint_defect() const;
};

double sup_abs(const ScalarField& f);
/// sup over points of the ambient euclidean norm.
double sup_norm_pointwise(const MapField& u);
bool all_finite(const MapField& u);

}  // namespace crflow
