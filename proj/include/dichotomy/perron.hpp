#pragma once

#include <vector>

#include "dichotomy/green.hpp"
#include "dichotomy/grid_function.hpp"

namespace dichotomy {

// Indices into the shared grid, tau <= theta.
struct ResidualPair {
  Eigen::Index tau = 0;
  Eigen::Index theta = 0;
};

struct ResidualEntry {
  double theta = 0.0;
  double tau = 0.0;
  double residual = 0.0;
};

struct MildSolution {
  GridFunction u;
  GridFunction g;
  std::vector<ResidualEntry> residuals;
  double max_residual = 0.0;
};

struct MildConfig {
  QuadratureParams quadrature;  // for the hyperbolicity check
  double pad_decay_lengths = 40.0;
  int pair_count = 16;          // base points; each gets every lag below
  std::vector<double> lags{0.25, 0.5, 1.0};
};

// Pairs (tau, tau + lag) with both ends in the middle 80% of the grid.
std::vector<ResidualPair> interior_pairs(const GridFunction& grid, int count, const std::vector<double>& lags);

// u = M_0 g. Refuses with NotHyperbolic when the spectrum meets iR.
MildSolution solve_mild(const Generator& gen, const GridFunction& g, const MildConfig& cfg = {});

// |u(theta) - T_{theta - tau} u(tau) - int_tau^theta T_{theta - s} g(s) ds| per pair,
// the integral by the composite trapezoid rule on the grid.
std::vector<ResidualEntry> mild_residual_table(const Generator& gen, const GridFunction& u, const GridFunction& g,
                                               const std::vector<ResidualPair>& pairs);
double mild_residual(const Generator& gen, const GridFunction& u, const GridFunction& g,
                     const std::vector<ResidualPair>& pairs);

}  // namespace dichotomy
