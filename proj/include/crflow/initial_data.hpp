#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crflow/field.hpp"
#include "crflow/operators.hpp"

namespace crflow {

enum class InitialFamily { Constant, TorusMode, Equator, BumpAveraged, SmoothedNoise };

InitialFamily parse_family(const std::string& name);
std::string to_string(InitialFamily f);

struct InitialDataSpec {
  InitialFamily family = InitialFamily::Constant;
  double amplitude = 0.0;
  std::vector<double> base;   // empty = default base point on the target
  std::vector<int> modes;     // 2m integers for the torus directions
  int smoothing_steps = 50;   // smoothed_noise only
};

/// Construct the initial map h. Every family produces a quotient-consistent,
/// target-valued field; torus_mode and equator are t-independent, the bump
/// and noise families carry genuine t-dependence.
MapField make_initial_map(const NilmanifoldGrid& grid, const TargetManifold& target,
                          const InitialDataSpec& spec, std::uint64_t seed);

/// Value and first/second cover derivatives of a scalar function at a chart
/// point; used as an analytic oracle for the discrete operators.
struct JetScalar {
  double value = 0.0;
  std::vector<double> grad;   // dim entries
  std::vector<double> hess;   // dim x dim, row-major (symmetric)
};

/// Lattice-symmetrized smooth bump: sum of a compactly supported product bump
/// over the deck translates that meet the fundamental domain. Smooth on the
/// quotient and genuinely t-dependent.
JetScalar lattice_bump_jet(const HeisenbergModel& model, const std::vector<double>& coords);
double lattice_bump(const HeisenbergModel& model, const std::vector<double>& coords);

/// Analytic frame derivative / sub-Laplacian of the lattice bump from its jet.
double lattice_bump_frame_derivative(const HeisenbergModel& model,
                                     const std::vector<double>& coords, Frame frame);
double lattice_bump_sub_laplacian(const HeisenbergModel& model,
                                  const std::vector<double>& coords);

/// 1D compactly supported bump on |r| < radius with value 1 at r = 0, plus
/// first and second derivatives.
void bump1d(double r, double radius, double* value, double* d1, double* d2);

/// Deterministic uniform doubles in [-1, 1); splitmix64 driven so that runs
/// with equal seeds are bit-identical.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {}
  double symmetric_uniform();

 private:
  std::uint64_t next();
  std::uint64_t state_;
};

}  // namespace crflow
