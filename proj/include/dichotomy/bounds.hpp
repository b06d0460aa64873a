#pragma once

#include <limits>
#include <vector>

#include "dichotomy/fractional.hpp"
#include "dichotomy/multiplier.hpp"

namespace dichotomy {

// Rectangle of lambda values; NaN bounds default to +-(|A|_2 + 1).
struct ScanGrid {
  double re_min = std::numeric_limits<double>::quiet_NaN();
  double re_max = std::numeric_limits<double>::quiet_NaN();
  double im_min = std::numeric_limits<double>::quiet_NaN();
  double im_max = std::numeric_limits<double>::quiet_NaN();
  double spacing = 0.1;
};

struct ScanResult {
  double s_alpha = 0.0;
  double spacing = 0.0;
  std::vector<cplx> poles;  // Newton-refined blow-up points inside the rectangle
  int nodes = 0;
  int skipped = 0;          // nodes sitting on the spectrum
  double weighted_sup_right = 0.0;  // sup of |R|/(1 + |Im|^alpha) strictly right of s_alpha
};

// s_alpha = inf{s : sup_{Re lambda > s} |R(lambda)|/(1 + |Im lambda|^alpha) < inf},
// sampled: the largest real part of a point where the weighted norm exceeds
// 1e8. Grid local maxima of |R| are refined by Newton's method on
// det(lambda - A), z <- z - 1/tr R(z), before the threshold test.
ScanResult s_alpha_scan(const Generator& g, double alpha, const ScanGrid& grid = {});

struct StripCheck {
  double a = 0.0;
  double b = 0.0;
  bool meets_spectrum = false;
  double weighted_sup = 0.0;  // sup |R(lambda)| / (1 + |lambda|^alpha)
  double composed_sup = 0.0;  // sup |R(lambda) A_omega^{-alpha}|
  bool weighted_bounded = true;
  bool composed_bounded = true;
};

struct GrowthLemmaReport {
  std::vector<StripCheck> strips;
  bool verdicts_agree = true;
};

// Both growth conditions on vertical strips: open strips between distinct
// eigenvalue real parts (and beyond the extreme ones), and thin strips around
// each real part sampled close to the eigenvalues.
GrowthLemmaReport growth_lemma_check(const Generator& g, const FractionalConfig& cfg);

// Slope of log |T_t A_omega^{-alpha}| fitted over t in [H/2, H].
double omega_alpha_decay(const Generator& g, const FractionalConfig& cfg, double horizon = 160.0, int samples = 81);

struct BisectionConfig {
  double lo = std::numeric_limits<double>::quiet_NaN();  // NaN: s_alpha_scan + 1e-6
  double hi = std::numeric_limits<double>::quiet_NaN();  // NaN: lo + 2
  double tolerance = 0.01;
  double threshold = 1e4;
  ProbeFamily family{1, 8.0, 8192, 1, false};
};

struct MultiplierBisection {
  double omega = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
  std::vector<std::pair<double, double>> trace;  // (omega, norm lower bound)
};

// Infimum of omega > s_alpha for which R(i. + omega) A_w^{-alpha} is an L_p
// multiplier, by bisection on the sampled norm bound against the threshold.
MultiplierBisection omega_alpha_multiplier(const Generator& g, const FractionalConfig& cfg, double p,
                                           const BisectionConfig& bis = {}, const ScanGrid& grid = {});

struct BoundsConfig {
  FractionalConfig fractional;
  double p = 1.0;
  ScanGrid grid;
  double horizon = 160.0;
  BisectionConfig bisection;
};

struct BoundsReport {
  double alpha = 0.0;
  double s0 = 0.0;  // spectral abscissa from the eigendecomposition
  double s_alpha = 0.0;
  double omega_alpha_decay = 0.0;
  double omega_alpha_multiplier = 0.0;
  ScanResult scan;
  MultiplierBisection bisection;
  GrowthLemmaReport growth;
};

BoundsReport compute_bounds(const Generator& g, const BoundsConfig& cfg);

}  // namespace dichotomy
