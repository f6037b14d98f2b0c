#include "crflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crflow/analysis.hpp"

namespace crflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_int(key, trim(item))));
  return out;
}

bool is_auto(const std::string& v) { return v == "auto"; }

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section header: " + line);
      section = line.substr(1, line.size() - 2);
      if (section != "geometry" && section != "target" && section != "flow" &&
          section != "control" && section != "initial" && section != "output") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (section == "geometry") {
      if (key == "m") cfg.m = static_cast<int>(parse_int(qual, value));
      else if (key == "N") cfg.N = static_cast<int>(parse_int(qual, value));
      else throw ConfigError("config: unknown key '" + qual + "'");
    } else if (section == "target") {
      if (key == "kind") {
        if (value == "sphere") cfg.target_kind = TargetKind::UnitSphere;
        else if (value == "torus") cfg.target_kind = TargetKind::FlatTorus;
        else throw ConfigError("config: target.kind must be sphere or torus, got '" + value + "'");
      } else if (key == "n") {
        cfg.target_n = static_cast<int>(parse_int(qual, value));
      } else {
        throw ConfigError("config: unknown key '" + qual + "'");
      }
    } else if (section == "flow") {
      if (key == "cfl_factor") cfg.flow.cfl_factor = parse_double(qual, value);
      else if (key == "t_max") cfg.flow.t_max = parse_double(qual, value);
      else if (key == "tol_tau") cfg.flow.tol_tau = parse_double(qual, value);
      else if (key == "rho_max") cfg.flow.rho_max = is_auto(value) ? -1.0 : parse_double(qual, value);
      else if (key == "cadence") cfg.flow.cadence = static_cast<int>(parse_int(qual, value));
      else throw ConfigError("config: unknown key '" + qual + "'");
    } else if (section == "control") {
      if (key == "D") cfg.ctrl_D = is_auto(value) ? -1.0 : parse_double(qual, value);
      else if (key == "C1") cfg.ctrl_C1 = parse_double(qual, value);
      else if (key == "C2") cfg.ctrl_C2 = is_auto(value) ? -1.0 : parse_double(qual, value);
      else if (key == "s") cfg.ctrl_s = is_auto(value) ? -1.0 : parse_double(qual, value);
      else throw ConfigError("config: unknown key '" + qual + "'");
    } else if (section == "initial") {
      if (key == "family") cfg.initial.family = parse_family(value);
      else if (key == "amplitude") cfg.initial.amplitude = parse_double(qual, value);
      else if (key == "base") cfg.initial.base = is_auto(value) ? std::vector<double>{}
                                                                : parse_double_list(qual, value);
      else if (key == "modes") cfg.initial.modes = parse_int_list(qual, value);
      else if (key == "smoothing_steps") cfg.initial.smoothing_steps =
          static_cast<int>(parse_int(qual, value));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(qual, value));
      else throw ConfigError("config: unknown key '" + qual + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else throw ConfigError("config: unknown key '" + qual + "'");
    } else {
      throw ConfigError("config: key '" + key + "' appears before any [section]");
    }
  }

  // structural invariants that do not need the initial map
  if (cfg.m < 1 || cfg.m > 2) throw ConfigError("config: geometry.m out of supported range {1,2}");
  if (cfg.N < 4) throw ConfigError("config: geometry.N must be >= 4 (resolution too small)");
  if (cfg.target_n < 1) throw ConfigError("config: target.n must be >= 1");
  try {
    cfg.flow.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.initial.amplitude < 0.0) throw ConfigError("config: initial.amplitude must be >= 0");
  if (cfg.initial.smoothing_steps < 0) {
    throw ConfigError("config: initial.smoothing_steps must be >= 0");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ResolvedRun resolve_run(const RunConfig& config) {
  ResolvedRun out;
  out.grid = std::make_shared<NilmanifoldGrid>(config.m, config.N);
  out.target = config.target_kind == TargetKind::UnitSphere
                   ? TargetManifold::unit_sphere(config.target_n)
                   : TargetManifold::flat_torus(config.target_n);
  out.initial = make_initial_map(*out.grid, out.target, config.initial, config.seed);
  EnergyDensities dens = energy_densities(out.initial);
  out.sup_e_h = sup_abs(dens.e);
  out.E_b_h = integrate(dens.e_b);
  out.flow = config.flow;

  ControlParams& c = out.control;
  c.D = config.ctrl_D > 0.0 ? config.ctrl_D : std::max(out.sup_e_h, 1e-9);
  c.C1 = config.ctrl_C1;
  c.C2 = config.ctrl_C2 > 0.0 ? config.ctrl_C2
                              : (out.target.kappa() > 0.0 ? 4.0 * out.target.kappa() : 1.0);
  c.s = config.ctrl_s > 0.0 ? config.ctrl_s : std::min(0.5 * c.s_max(), 0.25);
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: [control] ") + e.what());
  }
  return out;
}

}  // namespace crflow
