#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crflow/commands.hpp"
#include "crflow/config.hpp"
#include "crflow/initial_data.hpp"
#include "crflow/snapshot.hpp"

using namespace crflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "crflow_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("parse_config: minimal config takes documented defaults") {
  RunConfig cfg = parse_config(
      "[geometry]\nm = 1\nN = 8\n"
      "[target]\nkind = sphere\nn = 2\n"
      "[initial]\nfamily = constant\n");
  CHECK(cfg.m == 1);
  CHECK(cfg.N == 8);
  CHECK(cfg.target_kind == TargetKind::UnitSphere);
  CHECK(cfg.flow.cfl_factor == 0.5);
  CHECK(cfg.flow.tol_tau == 1e-4);
  CHECK(cfg.flow.cadence == 10);
  CHECK(cfg.seed == 1);
  CHECK(cfg.out_dir == "out");

  ResolvedRun run = resolve_run(cfg);
  CHECK(run.control.D == 1e-9);  // constant map: measured sup e floored
  CHECK(run.control.C2 == 4.0);  // sphere default 4 kappa
  CHECK(run.control.C1 == 0.0);
}

TEST_CASE("parse_config: comments, sections, value lists") {
  RunConfig cfg = parse_config(
      "# full example\n"
      "[geometry]\nm=1\nN=12\n"
      "[target]\nkind=torus\nn=2\n"
      "[flow]\ncfl_factor=0.25\nt_max=1.5\ntol_tau=1e-6\nrho_max=100\ncadence=5\n"
      "[control]\nD=2.0\nC1=0.0\nC2=1.5\ns=auto\n"
      "[initial]\nfamily=torus_mode\namplitude=0.3\nmodes=1,2\nbase=0.5,0.25\nseed=99\n"
      "[output]\ndir=run_here\n");
  CHECK(cfg.target_kind == TargetKind::FlatTorus);
  CHECK(cfg.flow.rho_max == 100.0);
  CHECK(cfg.initial.modes == std::vector<int>{1, 2});
  CHECK(cfg.initial.base == std::vector<double>{0.5, 0.25});
  CHECK(cfg.seed == 99);
  CHECK(cfg.out_dir == "run_here");
  ResolvedRun run = resolve_run(cfg);
  CHECK(run.control.D == 2.0);
  // min(s_max/2, 1/4) with s_max = 1/(D(4D+2)C2) = 1/30
  CHECK(run.control.s == doctest::Approx(1.0 / 60.0).epsilon(1e-15));
}

TEST_CASE("parse_config error paths name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config("[geometry]\nm = 3\n"),
                       doctest::Contains("m out of supported range"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[geometry]\nwidth = 3\n"),
                       doctest::Contains("geometry.width"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[geometry]\nN = four\n"), doctest::Contains("geometry.N"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[geometry]\nm = 1\nN = 3\n"),
                       doctest::Contains("resolution too small"), ConfigError);

  // s above the admissible window names the bound
  RunConfig cfg = parse_config(
      "[geometry]\nm=1\nN=8\n[target]\nkind=sphere\nn=2\n"
      "[control]\nD=1.0\nC2=1.0\ns=0.2\n"
      "[initial]\nfamily=equator\n");
  CHECK_THROWS_WITH_AS(resolve_run(cfg), doctest::Contains("s must satisfy"), ConfigError);
}

TEST_CASE("snapshot: header contents and bit-exact round trip") {
  auto dir = temp_dir("snap");
  NilmanifoldGrid g(1, 6);
  TargetManifold tgt = TargetManifold::unit_sphere(2);
  MapField u(g, tgt);
  DetRng rng(17);
  for (auto& v : u.values) v = rng.symmetric_uniform();

  const std::string p1 = (dir / "one.snap").string();
  write_snapshot(p1, u, 0.375);
  SnapshotData snap = read_snapshot(p1);
  CHECK(snap.m == 1);
  CHECK(snap.N == 6);
  CHECK(snap.n_amb == 3);
  CHECK(snap.t == 0.375);
  CHECK(snap.values == u.values);

  const std::string p2 = (dir / "two.snap").string();
  write_snapshot(p2, snapshot_to_map(snap, g, tgt), snap.t);
  CHECK(slurp(p1) == slurp(p2));

  CHECK_THROWS(read_snapshot((dir / "missing.snap").string()));
}

TEST_CASE("command_run writes artifacts; identical seeds give identical CSVs") {
  auto dir = temp_dir("run");
  RunConfig cfg = parse_config(
      "[geometry]\nm=1\nN=8\n"
      "[target]\nkind=sphere\nn=2\n"
      "[flow]\nt_max=0.05\ncadence=5\n"
      "[initial]\nfamily=smoothed_noise\namplitude=0.2\nsmoothing_steps=20\nseed=42\n");
  cfg.out_dir = (dir / "a").string();
  std::ostringstream log;
  const int code_a = command_run(cfg, log);
  cfg.out_dir = (dir / "b").string();
  const int code_b = command_run(cfg, log);
  CHECK(code_a == code_b);

  const std::string csv_a = slurp(dir / "a" / "timeseries.csv");
  const std::string csv_b = slurp(dir / "b" / "timeseries.csv");
  CHECK(!csv_a.empty());
  CHECK(csv_a == csv_b);
  CHECK(csv_a.find("step,t,E,E_b,E_0,sup_e,sup_e_b,sup_e_0,sup_tau,sup_ut,"
                   "dissipation_residual,bochner_min_residual,g_bound,"
                   "vertical_control_ratio,mean_value_ratio") != std::string::npos);
  CHECK(fs::exists(dir / "a" / "initial.snap"));
  CHECK(fs::exists(dir / "a" / "final.snap"));
  CHECK(fs::exists(dir / "a" / "summary.json"));

  // a different seed changes the data
  RunConfig other = cfg;
  other.seed = 43;
  other.out_dir = (dir / "c").string();
  command_run(other, log);
  CHECK(slurp(dir / "c" / "timeseries.csv") != csv_a);
}

TEST_CASE("command_run: constant map converges with a zero-energy series") {
  auto dir = temp_dir("const_run");
  RunConfig cfg = parse_config(
      "[geometry]\nm=1\nN=8\n[target]\nkind=sphere\nn=2\n[initial]\nfamily=constant\n");
  cfg.out_dir = dir.string();
  std::ostringstream log;
  CHECK(command_run(cfg, log) == kExitConverged);
  const std::string csv = slurp(dir / "timeseries.csv");
  CHECK(csv.find("\n0,0,0,0,0,") != std::string::npos);
}

TEST_CASE("initial data families are target-valued and wrap-consistent") {
  NilmanifoldGrid g(1, 8);
  TargetManifold s2 = TargetManifold::unit_sphere(2);
  for (auto family : {InitialFamily::Constant, InitialFamily::TorusMode, InitialFamily::Equator,
                      InitialFamily::BumpAveraged, InitialFamily::SmoothedNoise}) {
    InitialDataSpec spec;
    spec.family = family;
    spec.amplitude = 0.4;
    spec.smoothing_steps = 25;
    MapField u = make_initial_map(g, s2, spec, 7);
    CHECK(u.sphere_constraint_defect() < 1e-13);
    CHECK(all_finite(u));
  }

  // bump data has genuine t-dependence, torus_mode does not
  InitialDataSpec bump;
  bump.family = InitialFamily::BumpAveraged;
  bump.amplitude = 0.5;
  MapField ub = make_initial_map(g, s2, bump, 7);
  CHECK(sup_abs(energy_densities(ub).e_0) > 1e-4);

  // amplitude scaling of E_b is quadratic in the small-amplitude limit
  TargetManifold torus = TargetManifold::flat_torus(1);
  InitialDataSpec tm;
  tm.family = InitialFamily::TorusMode;
  tm.modes = {1, 0};
  tm.amplitude = 1e-2;
  const double r1 = total_energies(make_initial_map(g, torus, tm, 1)).E_b / (1e-2 * 1e-2);
  tm.amplitude = 1e-3;
  const double r2 = total_energies(make_initial_map(g, torus, tm, 1)).E_b / (1e-3 * 1e-3);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-6));
  CHECK(r1 > 0.0);

  CHECK_THROWS(make_initial_map(g, torus, InitialDataSpec{InitialFamily::Equator, 1.0, {}, {}, 0},
                                1));
}

TEST_CASE("command_run: the equator map is reported stationary") {
  auto dir = temp_dir("equator_run");
  RunConfig cfg = parse_config(
      "[geometry]\nm=1\nN=16\n[target]\nkind=sphere\nn=2\n"
      "[flow]\nt_max=0.05\n[initial]\nfamily=equator\n");
  cfg.out_dir = dir.string();
  std::ostringstream log;
  CHECK(command_run(cfg, log) == kExitConverged);
  const std::string csv = slurp(dir / "timeseries.csv");
  // one report: a discrete pseudoharmonic point converges immediately
  CHECK(csv.find("\n0,0,") != std::string::npos);
}

TEST_CASE("command_sweep table and lambda_star report") {
  auto dir = temp_dir("sweep");
  RunConfig cfg = parse_config(
      "[geometry]\nm=1\nN=8\n[target]\nkind=sphere\nn=2\n"
      "[flow]\nt_max=1.0\ntol_tau=1e-3\ncadence=10\n"
      "[initial]\nfamily=torus_mode\namplitude=0.1\nmodes=1,0\n");
  cfg.out_dir = dir.string();
  std::ostringstream log;
  CHECK(command_sweep(cfg, {0.0, 0.05}, log) == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.find("lambda,E_b_h,sup_e_h,termination,final_sup_tau,max_vertical_control_ratio") !=
        std::string::npos);
  CHECK(csv.find("CONVERGED") != std::string::npos);
  CHECK(fs::exists(dir / "lambda_000" / "timeseries.csv"));
  CHECK(fs::exists(dir / "sweep_summary.json"));
  CHECK(log.str().find("lambda*") != std::string::npos);
}
