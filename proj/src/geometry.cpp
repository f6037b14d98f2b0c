#include "crflow/geometry.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace crflow {

std::vector<double> HeisenbergModel::theta_coefficients(const std::vector<double>& coords) const {
  std::vector<double> th(dim(), 0.0);
  for (int a = 0; a < m; ++a) {
    th[axis_x(a)] = -coords[axis_y(a)];  // -y^a dx^a
    th[axis_y(a)] = coords[axis_x(a)];   // +x^a dy^a
  }
  th[axis_t()] = 1.0;
  return th;
}

std::vector<double> HeisenbergModel::frame_x(int alpha, const std::vector<double>& coords) const {
  std::vector<double> v(dim(), 0.0);
  v[axis_x(alpha)] = 1.0;
  v[axis_t()] = coords[axis_y(alpha)];
  return v;
}

std::vector<double> HeisenbergModel::frame_y(int alpha, const std::vector<double>& coords) const {
  std::vector<double> v(dim(), 0.0);
  v[axis_y(alpha)] = 1.0;
  v[axis_t()] = -coords[axis_x(alpha)];
  return v;
}

std::vector<double> HeisenbergModel::frame_reeb() const {
  std::vector<double> v(dim(), 0.0);
  v[axis_t()] = 1.0;
  return v;
}

double HeisenbergModel::dtheta(const std::vector<double>& u, const std::vector<double>& v) const {
  // dtheta = 2 sum_a dx^a ^ dy^a
  double s = 0.0;
  for (int a = 0; a < m; ++a) {
    s += 2.0 * (u[axis_x(a)] * v[axis_y(a)] - u[axis_y(a)] * v[axis_x(a)]);
  }
  return s;
}

std::vector<double> HeisenbergModel::levi_matrix(const std::vector<double>& coords) const {
  const int n = 2 * m;
  std::vector<std::vector<double>> frame(n);
  for (int a = 0; a < m; ++a) {
    frame[a] = frame_x(a, coords);
    frame[m + a] = frame_y(a, coords);
  }
  auto J = [&](int i) {
    // J X_a = Y_a, J Y_a = -X_a
    std::vector<double> w;
    if (i < m) {
      w = frame[m + i];
    } else {
      w = frame[i - m];
      for (auto& c : w) c = -c;
    }
    return w;
  };
  std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      L[static_cast<std::size_t>(i) * n + j] = dtheta(frame[i], J(j));
    }
  }
  return L;
}

NilmanifoldGrid::NilmanifoldGrid(int m, int N) {
  if (m < 1 || m > 2) {
    throw std::invalid_argument("m out of supported range {1,2}: got " + std::to_string(m));
  }
  if (N < 4) {
    throw std::invalid_argument("resolution too small: N must be >= 4, got " + std::to_string(N));
  }
  model_.m = m;
  N_ = N;
  h_ = 1.0 / N;
  const int d = dim();
  n_points_ = 1;
  for (int a = 0; a < d; ++a) n_points_ *= N;

  // dV = theta ^ (dtheta)^m = 2^m m! dx^1 dy^1 ... dt
  double factor = 1.0;
  for (int a = 1; a <= m; ++a) factor *= 2.0 * a;
  double hw = 1.0;
  for (int a = 0; a < d; ++a) hw *= h_;
  cell_weight_ = factor * hw;

  for (int ax = 0; ax < d; ++ax) {
    coord_idx_[ax].resize(static_cast<std::size_t>(n_points_));
    nbr_[ax][0].resize(static_cast<std::size_t>(n_points_));
    nbr_[ax][1].resize(static_cast<std::size_t>(n_points_));
  }
  for (std::int64_t p = 0; p < n_points_; ++p) {
    MultiIndex idx = unpack_index(p);
    for (int ax = 0; ax < d; ++ax) {
      coord_idx_[ax][static_cast<std::size_t>(p)] = idx[ax];
      nbr_[ax][0][static_cast<std::size_t>(p)] = linear_index(wrap_index(idx, ax, -1));
      nbr_[ax][1][static_cast<std::size_t>(p)] = linear_index(wrap_index(idx, ax, +1));
    }
  }
}

double NilmanifoldGrid::total_volume() const {
  double s = 0.0;
  for (std::int64_t p = 0; p < n_points_; ++p) s += cell_weight_;
  return s;
}

std::int64_t NilmanifoldGrid::linear_index(const MultiIndex& idx) const {
  std::int64_t p = 0;
  for (int ax = 0; ax < dim(); ++ax) p = p * N_ + idx[ax];
  return p;
}

MultiIndex NilmanifoldGrid::unpack_index(std::int64_t p) const {
  MultiIndex idx{};
  for (int ax = dim() - 1; ax >= 0; --ax) {
    idx[ax] = static_cast<int>(p % N_);
    p /= N_;
  }
  return idx;
}

MultiIndex NilmanifoldGrid::wrap_index(MultiIndex idx, int axis, int dir) const {
  assert(dir == 1 || dir == -1);
  const int t = axis_t();
  auto modN = [this](int k) { return ((k % N_) + N_) % N_; };
  if (axis == t) {
    idx[t] = modN(idx[t] + dir);
    return idx;
  }
  const int alpha = axis / 2;
  const bool is_x = (axis % 2 == 0);
  const int stepped = idx[axis] + dir;
  if (stepped >= 0 && stepped < N_) {
    idx[axis] = stepped;
    return idx;
  }
  // Boundary crossing: apply the lattice identification. The frame fields
  // X_a = d/dx^a + y^a d/dt, Y_a = d/dy^a - x^a d/dt descend to the quotient
  // exactly when the x-generator identifies u(x+1, y, t-y) = u(x,y,t) and the
  // y-generator identifies u(x, y+1, t+x) = u(x,y,t); in index arithmetic a
  // +x crossing shifts k by +j_a and a +y crossing shifts k by -i_a.
  int tshift;
  if (is_x) {
    tshift = dir * idx[HeisenbergModel::axis_y(alpha)];
  } else {
    tshift = -dir * idx[HeisenbergModel::axis_x(alpha)];
  }
  idx[axis] = modN(stepped);
  idx[t] = modN(idx[t] + tshift);
  return idx;
}

std::vector<double> NilmanifoldGrid::coords(std::int64_t p) const {
  std::vector<double> c(dim());
  for (int ax = 0; ax < dim(); ++ax) c[ax] = coord(p, ax);
  return c;
}

NilmanifoldGrid build_grid(int m, int N) { return NilmanifoldGrid(m, N); }

std::vector<double> frame_coefficients_x(const NilmanifoldGrid& grid, std::int64_t p, int alpha) {
  return grid.model().frame_x(alpha, grid.coords(p));
}

std::vector<double> frame_coefficients_y(const NilmanifoldGrid& grid, std::int64_t p, int alpha) {
  return grid.model().frame_y(alpha, grid.coords(p));
}

std::vector<double> frame_coefficients_reeb(const NilmanifoldGrid& grid) {
  return grid.model().frame_reeb();
}

}  // namespace crflow
