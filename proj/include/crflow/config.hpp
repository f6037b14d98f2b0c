#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "crflow/control.hpp"
#include "crflow/field.hpp"
#include "crflow/flow.hpp"
#include "crflow/initial_data.hpp"

namespace crflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed run configuration. Control entries left as NaN mean "auto":
///   D  -> measured sup e(h) of the constructed initial map
///   C2 -> 4 kappa when kappa > 0, else 1
///   s  -> min(s_max / 2, 1/4)
struct RunConfig {
  int m = 1;
  int N = 16;
  TargetKind target_kind = TargetKind::UnitSphere;
  int target_n = 2;
  FlowConfig flow;
  double ctrl_D = -1.0;   // <= 0: auto
  double ctrl_C1 = 0.0;
  double ctrl_C2 = -1.0;  // <= 0: auto
  double ctrl_s = -1.0;   // <= 0: auto
  InitialDataSpec initial;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

/// Parse the key=value / [section] format. Unknown keys, type mismatches and
/// invariant violations throw ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Everything a run needs, with the auto control entries resolved against the
/// constructed initial map.
struct ResolvedRun {
  std::shared_ptr<NilmanifoldGrid> grid;
  TargetManifold target;
  MapField initial;
  ControlParams control;
  FlowConfig flow;
  double sup_e_h = 0.0;
  double E_b_h = 0.0;
};
ResolvedRun resolve_run(const RunConfig& config);

}  // namespace crflow
