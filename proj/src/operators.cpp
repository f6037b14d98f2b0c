#include "crflow/operators.hpp"

#include <cmath>
#include <cstdlib>

namespace crflow {

namespace {

// Shared kernel: out = frame derivative of n_comp interleaved components.
void apply_frame_raw(const NilmanifoldGrid& g, const double* in, double* out, int n_comp,
                     Frame frame) {
  const double inv2h = 1.0 / (2.0 * g.h());
  const std::int64_t np = g.n_points();
  const int t = g.axis_t();
  if (frame.kind == Frame::Kind::Reeb) {
    for (std::int64_t p = 0; p < np; ++p) {
      const std::int64_t tp = g.neighbor(p, t, 1), tm = g.neighbor(p, t, 0);
      for (int c = 0; c < n_comp; ++c) {
        out[p * n_comp + c] = (in[tp * n_comp + c] - in[tm * n_comp + c]) * inv2h;
      }
    }
    return;
  }
  const int a = frame.alpha;
  const int ax = frame.kind == Frame::Kind::X ? HeisenbergModel::axis_x(a)
                                              : HeisenbergModel::axis_y(a);
  const int co_ax = frame.kind == Frame::Kind::X ? HeisenbergModel::axis_y(a)
                                                 : HeisenbergModel::axis_x(a);
  const double sign = frame.kind == Frame::Kind::X ? 1.0 : -1.0;
  for (std::int64_t p = 0; p < np; ++p) {
    const std::int64_t pp = g.neighbor(p, ax, 1), pm = g.neighbor(p, ax, 0);
    const std::int64_t tp = g.neighbor(p, t, 1), tm = g.neighbor(p, t, 0);
    const double coef = sign * g.coord(p, co_ax);
    for (int c = 0; c < n_comp; ++c) {
      out[p * n_comp + c] = (in[pp * n_comp + c] - in[pm * n_comp + c]) * inv2h +
                            coef * (in[tp * n_comp + c] - in[tm * n_comp + c]) * inv2h;
    }
  }
}

void accumulate_scaled(std::vector<double>& acc, const std::vector<double>& v, double s) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * v[i];
}

}  // namespace

ScalarField apply_frame(const ScalarField& f, Frame frame) {
  ScalarField out(*f.grid);
  apply_frame_raw(*f.grid, f.values.data(), out.values.data(), 1, frame);
  return out;
}

MapField apply_frame(const MapField& f, Frame frame) {
  MapField out(*f.grid, f.target);
  apply_frame_raw(*f.grid, f.values.data(), out.values.data(), f.n_comp, frame);
  return out;
}

namespace {

template <typename FieldT>
FieldT sub_laplacian_impl(const FieldT& f, int n_comp) {
  FieldT out = f;
  for (auto& v : out.values) v = 0.0;
  const int m = f.grid->m();
  FieldT work = f;
  for (int a = 0; a < m; ++a) {
    for (Frame fr : {Frame::X(a), Frame::Y(a)}) {
      apply_frame_raw(*f.grid, f.values.data(), work.values.data(), n_comp, fr);
      FieldT second = f;
      apply_frame_raw(*f.grid, work.values.data(), second.values.data(), n_comp, fr);
      accumulate_scaled(out.values, second.values, 0.5);
    }
  }
  return out;
}

}  // namespace

ScalarField sub_laplacian(const ScalarField& f) { return sub_laplacian_impl(f, 1); }
MapField sub_laplacian(const MapField& f) { return sub_laplacian_impl(f, f.n_comp); }

double commutator_defect(const ScalarField& f) {
  double worst = 0.0;
  const int m = f.grid->m();
  ScalarField two_xi = apply_frame(f, Frame::reeb());
  for (auto& v : two_xi.values) v *= 2.0;
  for (int a = 0; a < m; ++a) {
    ScalarField xy = apply_frame(apply_frame(f, Frame::Y(a)), Frame::X(a));
    ScalarField yx = apply_frame(apply_frame(f, Frame::X(a)), Frame::Y(a));
    for (std::int64_t p = 0; p < f.grid->n_points(); ++p) {
      const double d = std::abs(xy[p] - yx[p] + two_xi[p]);
      if (d > worst) worst = d;
    }
  }
  return worst;
}

EnergyDensities energy_densities(const MapField& u) {
  const NilmanifoldGrid& g = *u.grid;
  EnergyDensities out{ScalarField(g), ScalarField(g), ScalarField(g)};
  const int nc = u.n_comp;
  MapField deriv = u;
  auto add_sq = [&](ScalarField& dst, double scale) {
    for (std::int64_t p = 0; p < g.n_points(); ++p) {
      double s = 0.0;
      const double* d = deriv.at(p);
      for (int c = 0; c < nc; ++c) s += d[c] * d[c];
      dst[p] += scale * s;
    }
  };
  for (int a = 0; a < g.m(); ++a) {
    for (Frame fr : {Frame::X(a), Frame::Y(a)}) {
      apply_frame_raw(g, u.values.data(), deriv.values.data(), nc, fr);
      add_sq(out.e_b, 0.25);
    }
  }
  apply_frame_raw(g, u.values.data(), deriv.values.data(), nc, Frame::reeb());
  add_sq(out.e_0, 0.5);
  for (std::int64_t p = 0; p < g.n_points(); ++p) out.e[p] = out.e_b[p] + out.e_0[p];
  return out;
}

ScalarField horizontal_pairing(const MapField& u, const MapField& v) {
  const NilmanifoldGrid& g = *u.grid;
  ScalarField out(g);
  MapField du = u, dv = v;
  for (int a = 0; a < g.m(); ++a) {
    for (Frame fr : {Frame::X(a), Frame::Y(a)}) {
      apply_frame_raw(g, u.values.data(), du.values.data(), u.n_comp, fr);
      apply_frame_raw(g, v.values.data(), dv.values.data(), v.n_comp, fr);
      for (std::int64_t p = 0; p < g.n_points(); ++p) {
        double s = 0.0;
        const double* x = du.at(p);
        const double* y = dv.at(p);
        for (int c = 0; c < u.n_comp; ++c) s += x[c] * y[c];
        out[p] += 0.5 * s;
      }
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (std::int64_t p = 0; p < f.grid->n_points(); ++p) s += f[p];
  return s * f.grid->cell_weight();
}

double l2_inner(const MapField& u, const MapField& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * v.values[i];
  return s * u.grid->cell_weight();
}

double cfl_stencil_bound(const NilmanifoldGrid& grid) {
  double worst = 0.0;
  for (std::int64_t p = 0; p < grid.n_points(); ++p) {
    double s = 0.0;
    for (int a = 0; a < grid.m(); ++a) {
      const double x = std::abs(grid.coord(p, HeisenbergModel::axis_x(a)));
      const double y = std::abs(grid.coord(p, HeisenbergModel::axis_y(a)));
      s += 0.5 * ((1.0 + y) * (1.0 + y) + (1.0 + x) * (1.0 + x));
    }
    if (s > worst) worst = s;
  }
  return worst;
}

namespace {

template <typename FieldT>
FieldT relabel_impl(const FieldT& f, int n_comp, int shift_axis_kind, int alpha, int cells) {
  // shift_axis_kind: 0 = plain t shift, 1 = x loop (k += 2 j_a), 2 = y loop
  // (k -= 2 i_a).
  const NilmanifoldGrid& g = *f.grid;
  FieldT out = f;
  const int t = g.axis_t();
  const int N = g.N();
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    MultiIndex idx = g.unpack_index(p);
    int shift = cells;
    if (shift_axis_kind == 1) shift = 2 * idx[HeisenbergModel::axis_y(alpha)];
    if (shift_axis_kind == 2) shift = -2 * idx[HeisenbergModel::axis_x(alpha)];
    idx[t] = ((idx[t] + shift) % N + N) % N;
    const std::int64_t q = g.linear_index(idx);
    for (int c = 0; c < n_comp; ++c) {
      out.values[static_cast<std::size_t>(p) * n_comp + c] =
          f.values[static_cast<std::size_t>(q) * n_comp + c];
    }
  }
  return out;
}

}  // namespace

ScalarField relabel_t(const ScalarField& f, int cells) { return relabel_impl(f, 1, 0, 0, cells); }
MapField relabel_t(const MapField& f, int cells) {
  return relabel_impl(f, f.n_comp, 0, 0, cells);
}
ScalarField relabel_loop_x(const ScalarField& f, int alpha) {
  return relabel_impl(f, 1, 1, alpha, 0);
}
ScalarField relabel_loop_y(const ScalarField& f, int alpha) {
  return relabel_impl(f, 1, 2, alpha, 0);
}
MapField relabel_loop_x(const MapField& f, int alpha) {
  return relabel_impl(f, f.n_comp, 1, alpha, 0);
}
MapField relabel_loop_y(const MapField& f, int alpha) {
  return relabel_impl(f, f.n_comp, 2, alpha, 0);
}

}  // namespace crflow
