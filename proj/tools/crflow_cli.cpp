#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crflow/commands.hpp"

namespace {

// "A:B:K" -> K evenly spaced values from A to B inclusive.
std::vector<double> parse_lambda_grid(const std::string& text) {
  std::istringstream ss(text);
  std::string a, b, k;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, k)) {
    throw CLI::ValidationError("--lambda", "expected A:B:K");
  }
  const double lo = std::stod(a), hi = std::stod(b);
  const int count = std::stoi(k);
  if (count < 1) throw CLI::ValidationError("--lambda", "K must be >= 1");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crflow: pseudoharmonic heat flow simulator on Heisenberg nilmanifolds"};
  app.require_subcommand(1);

  std::string config_path, out_dir, lambda_spec, level = "quick";
  double oracle_t = 0.0;

  CLI::App* run = app.add_subcommand("run", "integrate the flow for one configuration");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--out", out_dir, "output directory (overrides [output] dir)");

  CLI::App* sweep = app.add_subcommand("sweep", "rerun the flow over an amplitude grid");
  sweep->add_option("--config", config_path, "config file path")->required();
  sweep->add_option("--lambda", lambda_spec, "amplitude grid A:B:K")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides [output] dir)");

  CLI::App* check = app.add_subcommand("check", "run the verification suite");
  check->add_option("--level", level, "quick|full")->check(CLI::IsMember({"quick", "full"}));

  CLI::App* oracle = app.add_subcommand("oracle", "exact linear-reduction solution at time t");
  oracle->add_option("--config", config_path, "config file path")->required();
  oracle->add_option("--t", oracle_t, "evaluation time")->required();
  oracle->add_option("--out", out_dir, "output directory (overrides [output] dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || sweep->parsed() || oracle->parsed()) {
      crflow::RunConfig cfg = crflow::load_config_file(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (run->parsed()) return crflow::command_run(cfg, std::cout);
      if (oracle->parsed()) return crflow::command_oracle(cfg, oracle_t, std::cout);
      return crflow::command_sweep(cfg, parse_lambda_grid(lambda_spec), std::cout);
    }
    const auto lvl = level == "full" ? crflow::CheckLevel::Full : crflow::CheckLevel::Quick;
    return crflow::command_check(lvl, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return crflow::kExitError;
  }
}
