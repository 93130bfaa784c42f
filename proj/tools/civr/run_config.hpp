#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "civr/oracles.hpp"
#include "civr/propagator.hpp"

namespace civr::cli {

/// Configuration problem tied to a source line (line 0: no single line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

struct ScanRange {
  double a_min = 0.5;
  double a_max = 2.5;
  std::size_t steps = 9;

  std::vector<double> values() const;
};

/// Everything that affects a run. Defaults reproduce the quartic benchmark:
/// z0 = (0, -2), T = 1.0 (a = 1.5, c = 2.5) and T = 8.5 (a = 0.4, c = 1.0).
struct RunConfig {
  QuarticSpec system;
  double q0 = 0.0;
  double p0 = -2.0;

  std::vector<double> times{1.0, 8.5};
  std::vector<double> a{1.5, 0.4};  // one value, or one per time
  std::vector<double> c{2.5, 1.0};  // one value, or one per time
  CivrMode mode = CivrMode::smooth;
  double epsilon = 0.25;
  Quadrature quadrature = Quadrature::riemann;
  double dt = 1e-3;

  PhaseGrid launch_grid{{-3.0, 3.0, 30}, {-4.0, 4.0, 40}};
  PhaseGrid target_grid{{-4.0, 4.0, 40}, {-6.0, 6.0, 60}};
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n_x = 2048;

  double reference_dt = 1e-3;
  ScanRange scan;

  bool renormalize = true;
  bool dump_trajectories = false;
  double max_invalid_fraction = 0.05;

  CoherentLabel z0() const { return system.scaling.scale(q0, p0); }
  double a_at(std::size_t i) const { return a.size() == 1 ? a[0] : a.at(i); }
  double c_at(std::size_t i) const { return c.size() == 1 ? c[0] : c.at(i); }
  CivrParams civr_for(std::size_t i) const;
  XGrid x_grid() const { return XGrid::periodic(x_min, x_max, n_x); }
  SplitOpConfig reference_for(double T) const;
};

/// Parses INI-style text: `[section]` headers, `key = value` lines, `#` or `;`
/// comments. `overrides` are `section.key=value` strings applied on top.
/// Throws ConfigError naming the offending line.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>",
                       const std::vector<std::string>& overrides = {});

/// Reads an INI file, or the embedded config of a run manifest (*.json).
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical INI text; parse_config(to_ini(c)) == c exactly.
std::string to_ini(const RunConfig& cfg);

const char* to_string(CivrMode m);
const char* to_string(Quadrature q);

}  // namespace civr::cli
