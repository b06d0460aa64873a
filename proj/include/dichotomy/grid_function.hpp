#pragma once

#include <cmath>
#include <limits>

#include "dichotomy/types.hpp"

namespace dichotomy {

// Uniform samples of an n-vector valued function; column j is the value at
// start + j h.
struct GridFunction {
  double start = 0.0;
  double h = 1.0;
  Mat samples;

  Eigen::Index dim() const { return samples.rows(); }
  Eigen::Index size() const { return samples.cols(); }
  double node(Eigen::Index j) const { return start + static_cast<double>(j) * h; }
  void validate() const;
};

GridFunction zero_grid(Eigen::Index n, double start, double h, Eigen::Index m);

enum class Direction { forward, inverse };

// Forward: F(s_k) = h sum_j f(t_j) e^{-i s_k t_j} on s_k = (k - floor(m/2)) * 2pi/(m h).
// Inverse: f(t_j) = (ds/2pi) sum_k F(s_k) e^{i s_k t_j} on t_j = origin + j * 2pi/(m ds);
// origin defaults to -floor(m/2) * 2pi/(m ds).
GridFunction transform(const GridFunction& f, Direction dir,
                       double origin = std::numeric_limits<double>::quiet_NaN());

// Riemann-sum L_p norm of the pointwise Euclidean norm; p = inf for the max.
double lp_norm(const GridFunction& f, double p);

// sup_sigma sigma * |{t : |f(t)| >= sigma}| on the step function of the samples.
double weak_l1_quasinorm(const GridFunction& f);

}  // namespace dichotomy
