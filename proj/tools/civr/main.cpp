#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace civr::cli;

int main(int argc, char** argv) {
  CLI::App app{"Complex-trajectory semiclassical propagation of coherent-state wavepackets"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "civr_out";
  std::vector<std::string> overrides;
  unsigned workers = 1;
  double q1 = 0.0, p1 = 0.0;
  std::optional<double> q1_opt, p1_opt;
  std::size_t stride = 10;

  auto common = [&](CLI::App* sub, bool with_workers) {
    sub->add_option("-c,--config", config_path, "INI config file, or a manifest.json to rerun")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("-s,--set", overrides, "override a config value: section.key=value");
    if (with_workers) sub->add_option("-j,--workers", workers, "worker threads (0 = all cores)")->capture_default_str();
  };

  auto* propagate = app.add_subcommand("propagate", "propagator, wavefunction and contribution map per time");
  common(propagate, true);
  auto* compare = app.add_subcommand("compare", "propagate and compare with the split-operator reference");
  common(compare, true);
  auto* scan = app.add_subcommand("scan-width", "fidelity as a function of the smoothing width a");
  common(scan, true);
  auto* traj = app.add_subcommand("trajectories", "time series of one complex trajectory");
  common(traj, false);
  traj->add_option("--q1", q1_opt, "launch companion q1 (default q0)");
  traj->add_option("--p1", p1_opt, "launch companion p1 (default p0)");
  traj->add_option("--stride", stride, "write every n-th step")->capture_default_str();
  auto* eigen = app.add_subcommand("eigen", "lowest three energies by imaginary-time relaxation");
  common(eigen, false);
  auto* show = app.add_subcommand("show-config", "print the effective config");
  common(show, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? parse_config("", "<defaults>", overrides) : load_config(config_path, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*propagate) return cmd_propagate(cfg, out_dir, workers, std::cout);
    if (*compare) return cmd_compare(cfg, out_dir, workers, std::cout);
    if (*scan) return cmd_scan_width(cfg, out_dir, workers, std::cout);
    if (*traj) {
      q1 = q1_opt.value_or(cfg.q0);
      p1 = p1_opt.value_or(cfg.p0);
      return cmd_trajectories(cfg, out_dir, q1, p1, stride, std::cout);
    }
    if (*eigen) return cmd_eigen(cfg, eigen->count("--out") ? out_dir : "", std::cout);
    if (*show) {
      std::cout << to_ini(cfg);
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}
