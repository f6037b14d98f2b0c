#include "crflow/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crflow {

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

void write_snapshot(const std::string& path, const MapField& u, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
  char header[128];
  std::snprintf(header, sizeof(header), "CRFLOW1 %d %d %d %.17g\n", u.grid->m(), u.grid->N(),
                u.n_comp, t);
  out << header;
  out.write(reinterpret_cast<const char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("snapshot write failed: " + path);
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  SnapshotData snap;
  hs >> magic >> snap.m >> snap.N >> snap.n_amb >> snap.t;
  if (magic != "CRFLOW1" || !hs) {
    throw std::runtime_error("not a CRFLOW1 snapshot: " + path);
  }
  std::int64_t n_points = 1;
  for (int ax = 0; ax < 2 * snap.m + 1; ++ax) n_points *= snap.N;
  snap.values.resize(static_cast<std::size_t>(n_points) * snap.n_amb);
  in.read(reinterpret_cast<char*>(snap.values.data()),
          static_cast<std::streamsize>(snap.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("snapshot truncated: " + path);
  return snap;
}

MapField snapshot_to_map(const SnapshotData& snap, const NilmanifoldGrid& grid,
                         const TargetManifold& target) {
  if (snap.m != grid.m() || snap.N != grid.N() || snap.n_amb != target.n_amb()) {
    throw std::runtime_error("snapshot dimensions do not match the requested grid/target");
  }
  MapField u(grid, target);
  u.values = snap.values;
  return u;
}

}  // namespace crflow
