#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dichotomy/summation.hpp"

namespace dichotomy::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_contract = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_not_hyperbolic = 4;

struct RunConfig {
  std::string command;  // analyze, green, project, solve, bounds, torus, scan
  std::string input;
  std::string output;   // empty: stdout
  std::string forcing;  // solve: GridFunction CSV; empty: bump times ones
  std::string torus;    // torus: TorusFunction JSON; empty: constant ones
  double alpha = 0.5;
  double rho = 0.0;
  double p = 1.0;
  double trunc_S = 200.0;
  double grid_h = 0.025;
  double fejer_N = 8000.0;
  double tolerance = 1e-3;
  std::uint64_t seed = 1;
  std::vector<double> times;  // green: empty means +-0.25 k, k = 1..16
  double horizon = 160.0;
  double r_min = 0.5;
  double r_max = 1.5;
  int radii = 11;
  int angles = 64;
  long long n_max = 100000;
  double solve_h = 0.01;

  QuadratureParams quadrature() const;
};

// Flags, then the JSON config named by --config for anything not given as a
// flag. Unknown config keys raise ConfigError.
RunConfig parse_arguments(int argc, const char* const* argv);

// Executes one command. Errors map to the exit codes above.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// parse_arguments + run with usage errors mapped to exit_contract.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dichotomy::cli
