#include "crflow/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crflow {

double spectral_decay(const std::vector<int>& modes, double t) {
  double k2 = 0.0;
  for (int k : modes) k2 += static_cast<double>(k) * k;
  return std::exp(-2.0 * std::numbers::pi * std::numbers::pi * k2 * t);
}

ScalarField spectral_oracle(const std::vector<int>& modes, double t,
                            const NilmanifoldGrid& grid) {
  if (static_cast<int>(modes.size()) != 2 * grid.m()) {
    throw std::invalid_argument("oracle: modes must list 2m integers");
  }
  const double decay = spectral_decay(modes, t);
  ScalarField out(grid);
  for (std::int64_t p = 0; p < grid.n_points(); ++p) {
    double phase = 0.0;
    for (int ax = 0; ax < 2 * grid.m(); ++ax) phase += modes[ax] * grid.coord(p, ax);
    out[p] = decay * std::sin(2.0 * std::numbers::pi * phase);
  }
  return out;
}

}  // namespace crflow
