#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace crflow {

inline constexpr int kMaxAxes = 5;

/// Grid multi-index; only the first 2m+1 entries are meaningful.
using MultiIndex = std::array<int, kMaxAxes>;

/// Flat Heisenberg model H^m in coordinates (x^1, y^1, ..., x^m, y^m, t)
/// with contact form
///     theta = dt + sum_a (x^a dy^a - y^a dx^a),
/// horizontal frame X_a = d/dx^a + y^a d/dt, Y_a = d/dy^a - x^a d/dt and
/// Reeb field xi = d/dt. In this model dtheta = 2 sum_a dx^a ^ dy^a, the
/// pseudo-Hermitian torsion vanishes and so does the Webster curvature.
struct HeisenbergModel {
  int m = 1;

  int dim() const { return 2 * m + 1; }
  static int axis_x(int alpha) { return 2 * alpha; }
  static int axis_y(int alpha) { return 2 * alpha + 1; }
  int axis_t() const { return 2 * m; }

  /// theta in the coordinate coframe (dx^1, dy^1, ..., dt) at a chart point.
  std::vector<double> theta_coefficients(const std::vector<double>& coords) const;

  /// Chart coefficients of the frame fields at a point.
  std::vector<double> frame_x(int alpha, const std::vector<double>& coords) const;
  std::vector<double> frame_y(int alpha, const std::vector<double>& coords) const;
  std::vector<double> frame_reeb() const;

  /// Levi form L(U,V) = dtheta(U, JV) on (X_1..X_m, Y_1..Y_m), returned as a
  /// dense 2m x 2m row-major matrix. Flat model: exactly 2*Id.
  std::vector<double> levi_matrix(const std::vector<double>& coords) const;

  /// dtheta evaluated on two chart coefficient vectors.
  double dtheta(const std::vector<double>& u, const std::vector<double>& v) const;
};

/// Uniform grid on the compact quotient of H^m by the integer lattice,
/// N points per axis on the fundamental domain [0,1)^{2m+1}.
///
/// The lattice acts on the left; stepping across an x^a or y^a face lands on
/// the identified sheet with the t index shifted by the co-coordinate:
///   crossing +x^a: k -> k + j_a,   crossing +y^a: k -> k - i_a   (mod N),
/// and inverse shifts in the - direction. The t axis is plainly periodic.
class NilmanifoldGrid {
 public:
  NilmanifoldGrid(int m, int N);

  int m() const { return model_.m; }
  int N() const { return N_; }
  int dim() const { return model_.dim(); }
  double h() const { return h_; }
  double cell_weight() const { return cell_weight_; }
  std::int64_t n_points() const { return n_points_; }
  const HeisenbergModel& model() const { return model_; }
  int axis_t() const { return model_.axis_t(); }

  /// Volume form total: sum of cell weights, equals 2^m m! up to rounding.
  double total_volume() const;

  std::int64_t linear_index(const MultiIndex& idx) const;
  MultiIndex unpack_index(std::int64_t p) const;

  /// One twisted-periodic step along an axis (dir = +1 or -1).
  MultiIndex wrap_index(MultiIndex idx, int axis, int dir) const;

  /// Table-backed neighbor lookup, dir01 = 0 for -1, 1 for +1.
  std::int64_t neighbor(std::int64_t p, int axis, int dir01) const {
    return nbr_[axis][dir01][static_cast<std::size_t>(p)];
  }

  int coord_index(std::int64_t p, int axis) const {
    return coord_idx_[axis][static_cast<std::size_t>(p)];
  }
  double coord(std::int64_t p, int axis) const { return h_ * coord_index(p, axis); }
  std::vector<double> coords(std::int64_t p) const;

 private:
  HeisenbergModel model_;
  int N_ = 0;
  double h_ = 0.0;
  double cell_weight_ = 0.0;
  std::int64_t n_points_ = 0;
  std::vector<std::int64_t> nbr_[kMaxAxes][2];
  std::vector<std::int32_t> coord_idx_[kMaxAxes];
};

/// Build the discretized nilmanifold. Throws std::invalid_argument for
/// m outside {1,2} or N < 4.
NilmanifoldGrid build_grid(int m, int N);

/// Spec'd operation form of frame coefficient lookup at a grid point.
std::vector<double> frame_coefficients_x(const NilmanifoldGrid& grid, std::int64_t p, int alpha);
std::vector<double> frame_coefficients_y(const NilmanifoldGrid& grid, std::int64_t p, int alpha);
std::vector<double> frame_coefficients_reeb(const NilmanifoldGrid& grid);

}  // namespace crflow
