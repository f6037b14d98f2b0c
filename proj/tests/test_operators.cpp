#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crflow/initial_data.hpp"
#include "crflow/operators.hpp"

using namespace crflow;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField sine_field(const NilmanifoldGrid& g, int axis, int k = 1) {
  ScalarField f(g);
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    f[p] = std::sin(2.0 * kPi * k * g.coord(p, axis));
  }
  return f;
}

ScalarField bump_field(const NilmanifoldGrid& g) {
  ScalarField f(g);
  for (std::int64_t p = 0; p < g.n_points(); ++p) f[p] = lattice_bump(g.model(), g.coords(p));
  return f;
}

ScalarField noise_field(const NilmanifoldGrid& g, std::uint64_t seed) {
  ScalarField f(g);
  DetRng rng(seed);
  for (auto& v : f.values) v = rng.symmetric_uniform();
  return f;
}

}  // namespace

TEST_CASE("frame derivatives kill constants") {
  NilmanifoldGrid g(1, 8);
  ScalarField c(g, 3.25);
  for (Frame fr : {Frame::X(0), Frame::Y(0), Frame::reeb()}) {
    CHECK(sup_abs(apply_frame(c, fr)) == 0.0);
  }
  CHECK(sup_abs(sub_laplacian(c)) == 0.0);
  CHECK(commutator_defect(c) == 0.0);
}

TEST_CASE("X on sin(2 pi x) converges at second order; xi exact zero") {
  double errs[3];
  int i = 0;
  for (int N : {8, 16, 32}) {
    NilmanifoldGrid g(1, N);
    ScalarField f = sine_field(g, 0);
    ScalarField Xf = apply_frame(f, Frame::X(0));
    double worst = 0.0;
    for (std::int64_t p = 0; p < g.n_points(); ++p) {
      worst = std::max(worst, std::abs(Xf[p] - 2.0 * kPi * std::cos(2.0 * kPi * g.coord(p, 0))));
    }
    errs[i++] = worst;
    CHECK(sup_abs(apply_frame(f, Frame::reeb())) == 0.0);
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("centered differences are exact on linear data at interior points") {
  NilmanifoldGrid g(1, 8);
  ScalarField f(g);
  for (std::int64_t p = 0; p < g.n_points(); ++p) f[p] = 2.0 * g.coord(p, 0);
  ScalarField df = apply_frame(f, Frame::X(0));
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    const int i = g.coord_index(p, 0);
    if (i == 0 || i == g.N() - 1) continue;  // the wrap sees the sawtooth jump
    CHECK(df[p] == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("sub-Laplacian: mode eigenvalue and t-independent reduction") {
  NilmanifoldGrid g(1, 16);
  ScalarField f = sine_field(g, 0);
  ScalarField lap = sub_laplacian(f);
  // single mode is an exact eigenvector of the discrete operator
  const double mu = std::sin(2.0 * kPi * g.h()) / g.h();
  const double lambda_h = 0.5 * mu * mu;
  for (std::int64_t p = 0; p < g.n_points(); p += 11) {
    CHECK(lap[p] == doctest::Approx(-lambda_h * f[p]).epsilon(1e-12));
  }
  CHECK(lambda_h == doctest::Approx(2.0 * kPi * kPi).epsilon(0.06));

  // t-independent fields: Delta_b collapses to half the ordinary torus
  // Laplacian. Compare against an independently indexed plain-periodic
  // stencil that never touches the twisted wrap code.
  ScalarField mixed(g);
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    mixed[p] = std::sin(2.0 * kPi * g.coord(p, 0)) * std::cos(2.0 * kPi * g.coord(p, 1)) +
               0.3 * std::cos(4.0 * kPi * g.coord(p, 1));
  }
  ScalarField a = sub_laplacian(mixed);
  const int N = g.N();
  auto value = [&](int i, int j) {
    // t-independent: read the k = 0 sheet
    MultiIndex idx{((i % N) + N) % N, ((j % N) + N) % N, 0};
    return mixed[g.linear_index(idx)];
  };
  const double inv4h2 = 1.0 / (4.0 * g.h() * g.h());
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    const int i = g.coord_index(p, 0), j = g.coord_index(p, 1);
    const double torus_lap = (value(i + 2, j) - 2.0 * value(i, j) + value(i - 2, j) +
                              value(i, j + 2) - 2.0 * value(i, j) + value(i, j - 2)) *
                             inv4h2;
    CHECK(a[p] == doctest::Approx(0.5 * torus_lap).epsilon(1e-12));
  }
}

TEST_CASE("sub-Laplacian converges on genuinely t-dependent data") {
  double errs[2];
  int i = 0;
  for (int N : {12, 24}) {
    NilmanifoldGrid g(1, N);
    ScalarField f = bump_field(g);
    ScalarField lap = sub_laplacian(f);
    double worst = 0.0;
    for (std::int64_t p = 0; p < g.n_points(); ++p) {
      worst = std::max(worst, std::abs(lap[p] - lattice_bump_sub_laplacian(g.model(), g.coords(p))));
    }
    errs[i++] = worst;
  }
  CHECK(errs[1] < 0.35 * errs[0]);
}

TEST_CASE("commutator defect: exact on t-independent modes, shrinking on bumps") {
  NilmanifoldGrid g8(1, 8);
  CHECK(commutator_defect(sine_field(g8, 0)) < 1e-10);
  CHECK(commutator_defect(sine_field(g8, 1)) < 1e-10);

  double defects[2];
  int i = 0;
  for (int N : {8, 16}) {
    NilmanifoldGrid g(1, N);
    defects[i++] = commutator_defect(bump_field(g));
  }
  CHECK(defects[1] < 0.75 * defects[0]);
}

TEST_CASE("energy densities: equator map values and pointwise ordering") {
  NilmanifoldGrid g(1, 16);
  TargetManifold s2 = TargetManifold::unit_sphere(2);
  InitialDataSpec spec;
  spec.family = InitialFamily::Equator;
  MapField eq = make_initial_map(g, s2, spec, 1);
  EnergyDensities dens = energy_densities(eq);
  const double mu = std::sin(2.0 * kPi * g.h()) / g.h();
  for (std::int64_t p = 0; p < g.n_points(); p += 13) {
    CHECK(dens.e_b[p] == doctest::Approx(0.25 * mu * mu).epsilon(1e-12));
    CHECK(dens.e_0[p] == 0.0);
  }
  CHECK(sup_abs(dens.e_b) == doctest::Approx(kPi * kPi).epsilon(0.06));

  // e >= e_b >= 0 and e >= e_0 >= 0 pointwise on arbitrary data
  MapField u(g, s2);
  DetRng rng(9);
  for (auto& v : u.values) v = rng.symmetric_uniform();
  EnergyDensities d2 = energy_densities(u);
  for (std::int64_t p = 0; p < g.n_points(); ++p) {
    CHECK(d2.e_b[p] >= 0.0);
    CHECK(d2.e_0[p] >= 0.0);
    CHECK(d2.e[p] >= d2.e_b[p]);
    CHECK(d2.e[p] >= d2.e_0[p]);
  }
}

TEST_CASE("t-independent maps have exactly zero vertical density") {
  NilmanifoldGrid g(1, 8);
  TargetManifold torus = TargetManifold::flat_torus(2);
  InitialDataSpec spec;
  spec.family = InitialFamily::TorusMode;
  spec.amplitude = 0.7;
  spec.modes = {2, 1};
  MapField u = make_initial_map(g, torus, spec, 1);
  EnergyDensities dens = energy_densities(u);
  CHECK(sup_abs(dens.e_0) == 0.0);
}

TEST_CASE("integration by parts is exact for the frame stencils") {
  for (int m : {1, 2}) {
    NilmanifoldGrid g(m, m == 1 ? 6 : 4);
    TargetManifold tgt = TargetManifold::flat_torus(2);
    MapField u(g, tgt), v(g, tgt);
    DetRng rng(100 + m);
    for (auto& x : u.values) x = rng.symmetric_uniform();
    for (auto& x : v.values) x = rng.symmetric_uniform();
    const double lhs = l2_inner(sub_laplacian(u), v);
    const double rhs = -integrate(horizontal_pairing(u, v));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("operators commute with quotient relabelings") {
  NilmanifoldGrid g(1, 8);
  // exactly, for t translations, on arbitrary fields
  ScalarField f = noise_field(g, 77);
  for (int c : {1, 3, 5}) {
    ScalarField a = sub_laplacian(relabel_t(f, c));
    ScalarField b = relabel_t(sub_laplacian(f), c);
    for (std::int64_t p = 0; p < g.n_points(); ++p) CHECK(a[p] == b[p]);
    ScalarField ax = apply_frame(relabel_t(f, c), Frame::X(0));
    ScalarField bx = relabel_t(apply_frame(f, Frame::X(0)), c);
    for (std::int64_t p = 0; p < g.n_points(); ++p) CHECK(ax[p] == bx[p]);
  }

  // The x lattice loop commutes exactly with X (and the y loop with Y) on
  // arbitrary fields: their fetches only mix axes whose wrap shifts commute.
  {
    ScalarField lhs = apply_frame(relabel_loop_x(f, 0), Frame::X(0));
    ScalarField rhs = relabel_loop_x(apply_frame(f, Frame::X(0)), 0);
    for (std::int64_t p = 0; p < g.n_points(); ++p) CHECK(lhs[p] == rhs[p]);
    ScalarField lhy = apply_frame(relabel_loop_y(f, 0), Frame::Y(0));
    ScalarField rhy = relabel_loop_y(apply_frame(f, Frame::Y(0)), 0);
    for (std::int64_t p = 0; p < g.n_points(); ++p) CHECK(lhy[p] == rhy[p]);
  }

  // Crossing the x loop shears Y by exactly the bracket term:
  //   Y (u o R_x) = ((Y + 2 xi) u) o R_x, discretely to O(h^2).
  double defects[2];
  int i = 0;
  for (int N : {12, 24}) {
    NilmanifoldGrid gg(1, N);
    ScalarField bf = bump_field(gg);
    double worst = 0.0;
    {
      ScalarField lhs = apply_frame(relabel_loop_x(bf, 0), Frame::Y(0));
      ScalarField sheared = apply_frame(bf, Frame::Y(0));
      ScalarField xi = apply_frame(bf, Frame::reeb());
      for (auto& v : xi.values) v *= 2.0;
      for (std::size_t k = 0; k < sheared.values.size(); ++k) sheared.values[k] += xi.values[k];
      ScalarField rhs = relabel_loop_x(sheared, 0);
      for (std::int64_t p = 0; p < gg.n_points(); ++p) {
        worst = std::max(worst, std::abs(lhs[p] - rhs[p]));
      }
    }
    {
      // and the y loop shears X by the opposite sign
      ScalarField lhs = apply_frame(relabel_loop_y(bf, 0), Frame::X(0));
      ScalarField sheared = apply_frame(bf, Frame::X(0));
      ScalarField xi = apply_frame(bf, Frame::reeb());
      for (auto& v : xi.values) v *= 2.0;
      for (std::size_t k = 0; k < sheared.values.size(); ++k) sheared.values[k] -= xi.values[k];
      ScalarField rhs = relabel_loop_y(sheared, 0);
      for (std::int64_t p = 0; p < gg.n_points(); ++p) {
        worst = std::max(worst, std::abs(lhs[p] - rhs[p]));
      }
    }
    defects[i++] = worst;
  }
  CHECK(defects[1] < 0.5 * defects[0]);
}

TEST_CASE("cross-alpha frame brackets vanish (m=2)") {
  NilmanifoldGrid g(2, 6);
  ScalarField f(g);
  for (std::int64_t p = 0; p < g.n_points(); ++p) f[p] = lattice_bump(g.model(), g.coords(p));
  // [X_1, Y_2] = [X_1, X_2] = 0: the composed stencils agree to rounding
  // because their wrap shifts commute exactly.
  auto defect = [&](Frame a, Frame b) {
    ScalarField ab = apply_frame(apply_frame(f, b), a);
    ScalarField ba = apply_frame(apply_frame(f, a), b);
    double worst = 0.0;
    for (std::int64_t p = 0; p < g.n_points(); ++p) {
      worst = std::max(worst, std::abs(ab[p] - ba[p]));
    }
    return worst;
  };
  const double scale = 1.0 / (g.h() * g.h());
  CHECK(defect(Frame::X(0), Frame::Y(1)) < 1e-12 * scale);
  CHECK(defect(Frame::X(0), Frame::X(1)) < 1e-12 * scale);
  CHECK(defect(Frame::Y(0), Frame::Y(1)) < 1e-12 * scale);
}

TEST_CASE("CFL stencil audit matches the closed form and scales as h^2") {
  NilmanifoldGrid g16(1, 16), g32(1, 32);
  CHECK(cfl_stencil_bound(g16) == (31.0 / 16.0) * (31.0 / 16.0));
  const double s32 = (63.0 / 32.0) * (63.0 / 32.0);
  CHECK(cfl_stencil_bound(g32) == s32);
  NilmanifoldGrid g2(2, 8);
  // two alpha blocks, each (1/2)[(1+x)^2 + (1+y)^2] at the far corner
  CHECK(cfl_stencil_bound(g2) == 2.0 * (15.0 / 8.0) * (15.0 / 8.0));
}

TEST_CASE("bump oracle: analytic 1d derivatives match finite differences") {
  const double R = 0.45;
  for (double r : {-0.3, -0.11, 0.0, 0.2, 0.37}) {
    double v, d1, d2;
    bump1d(r, R, &v, &d1, &d2);
    const double eps = 1e-5;
    double vp, vm, tmp1, tmp2;
    bump1d(r + eps, R, &vp, &tmp1, &tmp2);
    bump1d(r - eps, R, &vm, &tmp1, &tmp2);
    CHECK(d1 == doctest::Approx((vp - vm) / (2 * eps)).epsilon(1e-6));
    CHECK(d2 == doctest::Approx((vp - 2 * v + vm) / (eps * eps)).epsilon(1e-4));
  }
}
