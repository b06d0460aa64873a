#pragma once

#include <functional>
#include <vector>

#include "dichotomy/generator.hpp"

namespace dichotomy {

struct LadderStep {
  double S;
  double h;
  double N;
};

struct QuadratureParams {
  double S = 200.0;    // truncation of the peeled |s| >= 1 integrals
  double h = 0.025;    // finest Fejer grid spacing
  double N = 8000.0;   // largest Fejer parameter
  double tolerance = 1e-3;
  std::vector<LadderStep> ladder;  // empty: {(N/8, 4h), (N/4, 2h), (N/2, 2h), (N, h)}

  std::vector<LadderStep> steps() const;
  void validate() const;
};

struct CesaroResult {
  Vec value;
  bool converged = false;
  double residual = 0.0;  // norm of the last ladder difference
  std::vector<Vec> ladder_values;
};

// (1/2pi) int_{-N}^{N} f(s) e^{ist} (1 - |s|/N) ds, composite trapezoid on
// the samples s (uniform, spacing h, covering [-N, N]).
Vec fejer_weighted_integral(const std::vector<double>& s, const std::vector<Vec>& f, double t, double N, double h);

using Integrand = std::function<Vec(double s)>;

// Fejer integrals along the ladder for each time. Converged when the last two
// ladder values differ by at most tolerance * (|last| + scale).
std::vector<CesaroResult> cesaro_ladder(const Integrand& f, Eigen::Index dim, const std::vector<double>& times,
                                        const QuadratureParams& params, double scale = 0.0);
CesaroResult cesaro_ladder(const Integrand& f, Eigen::Index dim, double t, const QuadratureParams& params,
                           double scale = 0.0);

// F_t(x) = e^{rho t} (1/2pi) (C,1) int R(rho + is) x e^{ist} ds.
std::vector<CesaroResult> laplace_inversion(const Generator& g, const Vec& x, const std::vector<double>& times,
                                            double rho, const QuadratureParams& params);
CesaroResult laplace_inversion(const Generator& g, const Vec& x, double t, double rho, const QuadratureParams& params);

}  // namespace dichotomy
