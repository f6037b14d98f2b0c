#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crflow/geometry.hpp"
#include "crflow/initial_data.hpp"

using namespace crflow;

TEST_CASE("build_grid basics and volume normalization") {
  NilmanifoldGrid g = build_grid(1, 8);
  CHECK(g.n_points() == 512);
  CHECK(g.h() == 0.125);
  CHECK(g.cell_weight() == 0.00390625);  // 2 h^3
  CHECK(g.total_volume() == doctest::Approx(2.0).epsilon(1e-14));

  NilmanifoldGrid g2 = build_grid(2, 6);
  CHECK(g2.n_points() == 6 * 6 * 6 * 6 * 6);
  CHECK(g2.cell_weight() == doctest::Approx(8.0 / std::pow(6.0, 5)).epsilon(1e-15));
  CHECK(g2.total_volume() == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("build_grid rejects bad parameters") {
  CHECK_THROWS_AS(build_grid(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(3, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0, 8), std::invalid_argument);
}

TEST_CASE("wrap_index: interior step and twisted crossings (m=1, N=8)") {
  NilmanifoldGrid g(1, 8);
  MultiIndex idx{3, 3, 5};
  MultiIndex plus_x = g.wrap_index(idx, 0, +1);
  CHECK(plus_x == MultiIndex{4, 3, 5});

  // Crossing the +x face lands on the x=0 sheet with the t index shifted by
  // +j; crossing +y shifts by -i. (The signs make the frame fields
  // X = d/dx + y d/dt, Y = d/dy - x d/dt descend to the quotient.)
  MultiIndex bx = g.wrap_index(MultiIndex{7, 3, 5}, 0, +1);
  CHECK(bx == MultiIndex{0, 3, 0});  // k + j = 8 = 0 mod 8
  MultiIndex by = g.wrap_index(MultiIndex{2, 7, 5}, 1, +1);
  CHECK(by == MultiIndex{2, 0, 3});  // k - i = 3

  // t axis is plainly periodic
  CHECK(g.wrap_index(MultiIndex{2, 2, 7}, 2, +1) == MultiIndex{2, 2, 0});
}

TEST_CASE("wrap_index loops are involutive and close up") {
  DetRng rng(42);
  for (int m : {1, 2}) {
    NilmanifoldGrid g(m, 6);
    for (int trial = 0; trial < 100; ++trial) {
      MultiIndex idx{};
      for (int ax = 0; ax < g.dim(); ++ax) {
        idx[ax] = static_cast<int>((rng.symmetric_uniform() + 1.0) * 0.5 * g.N()) % g.N();
      }
      for (int ax = 0; ax < g.dim(); ++ax) {
        CHECK(g.wrap_index(g.wrap_index(idx, ax, +1), ax, -1) == idx);
        CHECK(g.wrap_index(g.wrap_index(idx, ax, -1), ax, +1) == idx);
        MultiIndex loop = idx;
        for (int k = 0; k < g.N(); ++k) loop = g.wrap_index(loop, ax, +1);
        for (int k = 0; k < g.N(); ++k) loop = g.wrap_index(loop, ax, -1);
        CHECK(loop == idx);
      }
      MultiIndex tl = idx;
      for (int k = 0; k < g.N(); ++k) tl = g.wrap_index(tl, g.axis_t(), +1);
      CHECK(tl == idx);
    }
  }
}

TEST_CASE("neighbor tables agree with wrap_index") {
  NilmanifoldGrid g(1, 6);
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    MultiIndex idx = g.unpack_index(p);
    for (int ax = 0; ax < g.dim(); ++ax) {
      CHECK(g.neighbor(p, ax, 1) == g.linear_index(g.wrap_index(idx, ax, +1)));
      CHECK(g.neighbor(p, ax, 0) == g.linear_index(g.wrap_index(idx, ax, -1)));
    }
  }
}

TEST_CASE("frame coefficients and contact form identities") {
  NilmanifoldGrid g(1, 8);
  const HeisenbergModel& model = g.model();

  // (x, y) = (0, 0): X is exactly d/dx
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    const auto coords = g.coords(p);
    const auto X = frame_coefficients_x(g, p, 0);
    const auto Y = frame_coefficients_y(g, p, 0);
    CHECK(X[0] == 1.0);
    CHECK(X[2] == coords[1]);  // t coefficient is the y chart value
    CHECK(Y[1] == 1.0);
    CHECK(Y[2] == -coords[0]);

    // theta(X) = theta(Y) = 0 and theta(xi) = 1, exactly per point
    const auto th = model.theta_coefficients(coords);
    double tx = 0.0, ty = 0.0, tr = 0.0;
    const auto xi = frame_coefficients_reeb(g);
    for (int i = 0; i < g.dim(); ++i) {
      tx += th[i] * X[i];
      ty += th[i] * Y[i];
      tr += th[i] * xi[i];
    }
    CHECK(tx == 0.0);
    CHECK(ty == 0.0);
    CHECK(tr == 1.0);
  }

  // spot value from the chart: y = 0.5 gives X = d/dx + 0.5 d/dt
  MultiIndex idx{0, 4, 0};
  const auto X = frame_coefficients_x(g, g.linear_index(idx), 0);
  CHECK(X[2] == 0.5);
}

TEST_CASE("Levi form is exactly twice the identity") {
  for (int m : {1, 2}) {
    NilmanifoldGrid g(m, 4);
    for (std::int64_t p = 0; p < g.n_points(); p += 7) {
      const auto L = g.model().levi_matrix(g.coords(p));
      const int n = 2 * m;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          CHECK(L[static_cast<std::size_t>(i) * n + j] == (i == j ? 2.0 : 0.0));
        }
      }
    }
  }
}
