#pragma once

#include <string>
#include <vector>

#include "crflow/field.hpp"

namespace crflow {

/// Raw snapshot contents: ASCII header "CRFLOW1 <m> <N> <n_amb> <t>" plus a
/// newline, then little-endian IEEE-754 doubles, row-major over the axes
/// (x^1, y^1, ..., x^m, y^m, t) with the component index fastest-varying.
struct SnapshotData {
  int m = 0;
  int N = 0;
  int n_amb = 0;
  double t = 0.0;
  std::vector<double> values;
};

void write_snapshot(const std::string& path, const MapField& u, double t);
SnapshotData read_snapshot(const std::string& path);

/// Rebuild a map field from snapshot data (grid/target supplied by caller;
/// dimensions must match).
MapField snapshot_to_map(const SnapshotData& snap, const NilmanifoldGrid& grid,
                         const TargetManifold& target);

}  // namespace crflow
