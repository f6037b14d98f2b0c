#pragma once

#include <vector>

#include "crflow/field.hpp"

namespace crflow {

/// Exact decay factor of a t-independent torus mode under the flow with the
/// orthonormal-frame normalization: e^{-2 pi^2 |k|^2 t}.
double spectral_decay(const std::vector<int>& modes, double t);

/// Exact solution of the linear flat-torus reduction for t-independent
/// single-mode data: e^{-2 pi^2 |k|^2 t} sin(2 pi k.x) as a scalar field.
/// Independent of the stepping path; used as the oracle for the flow.
ScalarField spectral_oracle(const std::vector<int>& modes, double t, const NilmanifoldGrid& grid);

}  // namespace crflow
