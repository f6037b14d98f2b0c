#include "crflow/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crflow/flow.hpp"

namespace crflow {

InitialFamily parse_family(const std::string& name) {
  if (name == "constant") return InitialFamily::Constant;
  if (name == "torus_mode") return InitialFamily::TorusMode;
  if (name == "equator") return InitialFamily::Equator;
  if (name == "bump_averaged") return InitialFamily::BumpAveraged;
  if (name == "smoothed_noise") return InitialFamily::SmoothedNoise;
  throw std::invalid_argument("unknown initial-data family: " + name);
}

std::string to_string(InitialFamily f) {
  switch (f) {
    case InitialFamily::Constant: return "constant";
    case InitialFamily::TorusMode: return "torus_mode";
    case InitialFamily::Equator: return "equator";
    case InitialFamily::BumpAveraged: return "bump_averaged";
    case InitialFamily::SmoothedNoise: return "smoothed_noise";
  }
  return "?";
}

std::uint64_t DetRng::next() {
  // splitmix64
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double DetRng::symmetric_uniform() {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;  // [0,1)
  return 2.0 * u - 1.0;
}

void bump1d(double r, double radius, double* value, double* d1, double* d2) {
  // (1 - s^2)^6: compactly supported with uniformly moderate derivatives, so
  // the second-order stencils reach their asymptotic rate on coarse grids
  // (the classical exp(-1/(1-s^2)) profile has edge derivatives that swamp
  // the sup-norm error at desk resolutions).
  const double s = r / radius;
  if (!(std::abs(s) < 1.0)) {
    *value = *d1 = *d2 = 0.0;
    return;
  }
  const double w = 1.0 - s * s;
  const double w4 = w * w * w * w;
  const double w5 = w4 * w;
  *value = w5 * w;
  *d1 = -12.0 * s * w5 / radius;
  *d2 = (-12.0 * w5 + 120.0 * s * s * w4) / (radius * radius);
}

namespace {

constexpr double kBumpRadius = 0.45;
constexpr double kBumpCenter = 0.5;

// Jet of the product bump at cover coordinates q (no symmetrization).
JetScalar product_bump_jet(int dim, const std::vector<double>& q) {
  JetScalar out;
  out.grad.assign(dim, 0.0);
  out.hess.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  std::vector<double> val(dim), d1(dim), d2(dim);
  for (int i = 0; i < dim; ++i) {
    bump1d(q[i] - kBumpCenter, kBumpRadius, &val[i], &d1[i], &d2[i]);
    if (val[i] == 0.0) return out;  // outside the support
  }
  double prod = 1.0;
  for (int i = 0; i < dim; ++i) prod *= val[i];
  out.value = prod;
  for (int i = 0; i < dim; ++i) {
    double gi = d1[i];
    for (int j = 0; j < dim; ++j) {
      if (j != i) gi *= val[j];
    }
    out.grad[i] = gi;
    for (int j = i; j < dim; ++j) {
      double hij;
      if (i == j) {
        hij = d2[i];
        for (int k = 0; k < dim; ++k) {
          if (k != i) hij *= val[k];
        }
      } else {
        hij = d1[i] * d1[j];
        for (int k = 0; k < dim; ++k) {
          if (k != i && k != j) hij *= val[k];
        }
      }
      out.hess[static_cast<std::size_t>(i) * dim + j] = hij;
      out.hess[static_cast<std::size_t>(j) * dim + i] = hij;
    }
  }
  return out;
}

}  // namespace

JetScalar lattice_bump_jet(const HeisenbergModel& model, const std::vector<double>& coords) {
  const int dim = model.dim();
  const int m = model.m;
  JetScalar acc;
  acc.grad.assign(dim, 0.0);
  acc.hess.assign(static_cast<std::size_t>(dim) * dim, 0.0);

  // Enumerate lattice elements gamma = (a, b, c) whose left translate of the
  // point can land inside the bump support; gamma . p has coordinates
  //   x^a + a^a, y^a + b^a, t + c + sum(b^a x^a - a^a y^a).
  const int c_range = 2 * m + 2;
  std::vector<int> a(m), b(m);
  std::vector<double> q(dim);
  const int n_ab = 3;  // offsets in {-1, 0, 1}
  int total_ab = 1;
  for (int i = 0; i < 2 * m; ++i) total_ab *= n_ab;
  for (int code = 0; code < total_ab; ++code) {
    int rem = code;
    for (int i = 0; i < m; ++i) {
      a[i] = rem % n_ab - 1;
      rem /= n_ab;
      b[i] = rem % n_ab - 1;
      rem /= n_ab;
    }
    double twist = 0.0;
    bool xy_inside = true;
    for (int i = 0; i < m; ++i) {
      q[HeisenbergModel::axis_x(i)] = coords[HeisenbergModel::axis_x(i)] + a[i];
      q[HeisenbergModel::axis_y(i)] = coords[HeisenbergModel::axis_y(i)] + b[i];
      twist += b[i] * coords[HeisenbergModel::axis_x(i)] - a[i] * coords[HeisenbergModel::axis_y(i)];
      if (std::abs(q[HeisenbergModel::axis_x(i)] - kBumpCenter) >= kBumpRadius) xy_inside = false;
      if (std::abs(q[HeisenbergModel::axis_y(i)] - kBumpCenter) >= kBumpRadius) xy_inside = false;
    }
    if (!xy_inside) continue;
    for (int c = -c_range; c <= c_range; ++c) {
      const int t_ax = model.axis_t();
      q[t_ax] = coords[t_ax] + c + twist;
      if (std::abs(q[t_ax] - kBumpCenter) >= kBumpRadius) continue;
      JetScalar j = product_bump_jet(dim, q);
      if (j.value == 0.0) continue;
      // chain rule through the affine translate: d t'/d x^b = b^b,
      // d t'/d y^b = -a^b, the block diagonal is the identity.
      acc.value += j.value;
      std::vector<double> g(dim, 0.0);
      for (int i = 0; i < m; ++i) {
        g[HeisenbergModel::axis_x(i)] = j.grad[HeisenbergModel::axis_x(i)] + b[i] * j.grad[t_ax];
        g[HeisenbergModel::axis_y(i)] = j.grad[HeisenbergModel::axis_y(i)] - a[i] * j.grad[t_ax];
      }
      g[t_ax] = j.grad[t_ax];
      for (int i = 0; i < dim; ++i) acc.grad[i] += g[i];
      // H' = J^T H J with J the affine Jacobian
      std::vector<double> JT(static_cast<std::size_t>(dim) * dim, 0.0);  // JT[i][k] = J[k][i]
      for (int i = 0; i < dim; ++i) JT[static_cast<std::size_t>(i) * dim + i] = 1.0;
      for (int i = 0; i < m; ++i) {
        JT[static_cast<std::size_t>(HeisenbergModel::axis_x(i)) * dim + t_ax] = b[i];
        JT[static_cast<std::size_t>(HeisenbergModel::axis_y(i)) * dim + t_ax] = -a[i];
      }
      for (int r = 0; r < dim; ++r) {
        for (int s = 0; s < dim; ++s) {
          double hrs = 0.0;
          for (int k = 0; k < dim; ++k) {
            if (JT[static_cast<std::size_t>(r) * dim + k] == 0.0) continue;
            double hk = 0.0;
            for (int l = 0; l < dim; ++l) {
              hk += j.hess[static_cast<std::size_t>(k) * dim + l] *
                    JT[static_cast<std::size_t>(s) * dim + l];
            }
            hrs += JT[static_cast<std::size_t>(r) * dim + k] * hk;
          }
          acc.hess[static_cast<std::size_t>(r) * dim + s] += hrs;
        }
      }
    }
  }
  return acc;
}

double lattice_bump(const HeisenbergModel& model, const std::vector<double>& coords) {
  return lattice_bump_jet(model, coords).value;
}

double lattice_bump_frame_derivative(const HeisenbergModel& model,
                                     const std::vector<double>& coords, Frame frame) {
  JetScalar j = lattice_bump_jet(model, coords);
  const int t = model.axis_t();
  switch (frame.kind) {
    case Frame::Kind::X:
      return j.grad[HeisenbergModel::axis_x(frame.alpha)] +
             coords[HeisenbergModel::axis_y(frame.alpha)] * j.grad[t];
    case Frame::Kind::Y:
      return j.grad[HeisenbergModel::axis_y(frame.alpha)] -
             coords[HeisenbergModel::axis_x(frame.alpha)] * j.grad[t];
    case Frame::Kind::Reeb:
      return j.grad[t];
  }
  return 0.0;
}

double lattice_bump_sub_laplacian(const HeisenbergModel& model,
                                  const std::vector<double>& coords) {
  JetScalar j = lattice_bump_jet(model, coords);
  const int t = model.axis_t();
  const int dim = model.dim();
  auto H = [&](int r, int s) { return j.hess[static_cast<std::size_t>(r) * dim + s]; };
  double acc = 0.0;
  for (int a = 0; a < model.m; ++a) {
    const int xa = HeisenbergModel::axis_x(a), ya = HeisenbergModel::axis_y(a);
    const double x = coords[xa], y = coords[ya];
    acc += H(xa, xa) + H(ya, ya) + (x * x + y * y) * H(t, t) + 2.0 * y * H(xa, t) -
           2.0 * x * H(ya, t);
  }
  return 0.5 * acc;
}

namespace {

std::vector<double> default_base(const TargetManifold& target) {
  std::vector<double> a(static_cast<std::size_t>(target.n_amb()), 0.0);
  if (target.kind == TargetKind::UnitSphere) a[0] = 1.0;
  return a;
}

// Two orthonormal directions orthogonal to a (one if the ambient dimension
// only allows one).
std::vector<std::vector<double>> tangent_frame(const std::vector<double>& a, int want) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> out;
  for (int i = 0; i < n && static_cast<int>(out.size()) < want; ++i) {
    std::vector<double> v(a.size(), 0.0);
    v[i] = 1.0;
    double d = 0.0;
    for (int c = 0; c < n; ++c) d += v[c] * a[c];
    for (int c = 0; c < n; ++c) v[c] -= d * a[c];
    for (const auto& w : out) {
      double dw = 0.0;
      for (int c = 0; c < n; ++c) dw += v[c] * w[c];
      for (int c = 0; c < n; ++c) v[c] -= dw * w[c];
    }
    double norm = 0.0;
    for (int c = 0; c < n; ++c) norm += v[c] * v[c];
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (int c = 0; c < n; ++c) v[c] /= norm;
    out.push_back(v);
  }
  return out;
}

double mode_phase(const NilmanifoldGrid& g, std::int64_t p, const std::vector<int>& modes) {
  double s = 0.0;
  for (int ax = 0; ax < 2 * g.m(); ++ax) s += modes[ax] * g.coord(p, ax);
  return 2.0 * std::numbers::pi * s;
}

}  // namespace

MapField make_initial_map(const NilmanifoldGrid& grid, const TargetManifold& target,
                          const InitialDataSpec& spec, std::uint64_t seed) {
  MapField u(grid, target);
  std::vector<double> a = spec.base.empty() ? default_base(target) : spec.base;
  if (static_cast<int>(a.size()) != target.n_amb()) {
    throw std::invalid_argument("initial: base point must have " +
                                std::to_string(target.n_amb()) + " components");
  }
  if (target.kind == TargetKind::UnitSphere) target.project_point(a.data());

  std::vector<int> modes = spec.modes;
  if (modes.empty()) {
    modes.assign(static_cast<std::size_t>(2 * grid.m()), 0);
    modes[0] = 1;
  }
  if (static_cast<int>(modes.size()) != 2 * grid.m()) {
    throw std::invalid_argument("initial: modes must list 2m integers");
  }

  const double lam = spec.amplitude;
  switch (spec.family) {
    case InitialFamily::Constant: {
      for (std::int64_t p = 0; p < grid.n_points(); ++p) {
        double* up = u.at(p);
        for (int c = 0; c < u.n_comp; ++c) up[c] = a[c];
      }
      break;
    }
    case InitialFamily::TorusMode: {
      if (target.kind == TargetKind::FlatTorus) {
        for (std::int64_t p = 0; p < grid.n_points(); ++p) {
          double* up = u.at(p);
          for (int c = 0; c < u.n_comp; ++c) up[c] = a[c];
          up[0] += lam * std::sin(mode_phase(grid, p, modes));
        }
      } else {
        auto dirs = tangent_frame(a, 2);
        for (std::int64_t p = 0; p < grid.n_points(); ++p) {
          const double ph = mode_phase(grid, p, modes);
          double* up = u.at(p);
          for (int c = 0; c < u.n_comp; ++c) {
            up[c] = a[c] + lam * std::cos(ph) * dirs[0][c];
            if (dirs.size() > 1) up[c] += lam * std::sin(ph) * dirs[1][c];
          }
        }
        u.project();
      }
      break;
    }
    case InitialFamily::Equator: {
      if (target.kind != TargetKind::UnitSphere) {
        throw std::invalid_argument("initial: the equator family needs a sphere target");
      }
      for (std::int64_t p = 0; p < grid.n_points(); ++p) {
        const double ph = 2.0 * std::numbers::pi * grid.coord(p, 0);
        double* up = u.at(p);
        for (int c = 0; c < u.n_comp; ++c) up[c] = 0.0;
        up[0] = std::cos(ph);
        up[1] = std::sin(ph);
      }
      break;
    }
    case InitialFamily::BumpAveraged: {
      auto dirs = tangent_frame(a, 1);
      for (std::int64_t p = 0; p < grid.n_points(); ++p) {
        const double f = lam * lattice_bump(grid.model(), grid.coords(p));
        double* up = u.at(p);
        if (target.kind == TargetKind::FlatTorus) {
          for (int c = 0; c < u.n_comp; ++c) up[c] = a[c];
          up[0] += f;
        } else {
          for (int c = 0; c < u.n_comp; ++c) up[c] = a[c] + f * dirs[0][c];
        }
      }
      if (target.kind == TargetKind::UnitSphere) u.project();
      break;
    }
    case InitialFamily::SmoothedNoise: {
      DetRng rng(seed);
      for (std::int64_t p = 0; p < grid.n_points(); ++p) {
        double* up = u.at(p);
        for (int c = 0; c < u.n_comp; ++c) up[c] = a[c] + lam * rng.symmetric_uniform();
      }
      // Drive by the linear flat-torus flow; the stencils respect the
      // quotient, so the smoothed field does too.
      const double dt = cfl_timestep(grid, 0.5);
      for (int k = 0; k < spec.smoothing_steps; ++k) {
        MapField lap = sub_laplacian(u);
        for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] += dt * lap.values[i];
      }
      if (target.kind == TargetKind::UnitSphere) u.project();
      break;
    }
  }
  return u;
}

}  // namespace crflow
