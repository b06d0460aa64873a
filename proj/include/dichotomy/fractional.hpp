#pragma once

#include <cmath>
#include <limits>

#include "dichotomy/generator.hpp"

namespace dichotomy {

struct FractionalConfig {
  double alpha = 0.5;
  double omega = std::numeric_limits<double>::quiet_NaN();  // NaN: default_shift()
  double theta = pi / 8.0;
  double ray_length = 0.0;  // 0: max(50, 10 |A - omega|)
  int nodes_per_ray = 400;
  double refine_tolerance = 1e-9;  // relative change allowed when panels are doubled
};

enum class PowerSign { negative, positive };
enum class PowerMethod { contour, oracle };

struct FractionalPower {
  Mat value;
  double omega = 0.0;
  double ray_length = 0.0;
  double tail_bound = 0.0;       // norm of the first omitted tail-series term
  double refinement_change = 0.0;  // relative change under panel doubling
};

// max(s + 3, 3) with s the largest real part on the Schur diagonal.
double default_shift(const Generator& g);

// mu^{-a} with the cut on the positive reals, arg mu in (0, 2pi).
cplx power_cut_positive(cplx mu, double a);

// A_omega^{-alpha} = (1/2pi i) int_gamma mu^{-alpha} R(mu + omega) dmu, gamma the
// boundary of the sector {|arg(mu + 1)| < theta} traversed so that the
// spectrum of A - omega lies on its left. Positive sign inverts the result.
FractionalPower fractional_power_report(const Generator& g, const FractionalConfig& cfg, PowerSign sign,
                                        PowerMethod method = PowerMethod::contour);
Mat fractional_power(const Generator& g, const FractionalConfig& cfg, PowerSign sign,
                     PowerMethod method = PowerMethod::contour);

// |A_omega^{alpha} x|; alpha = 0 returns |x|.
double alpha_norm(const Generator& g, const Vec& x, const FractionalConfig& cfg);

}  // namespace dichotomy
