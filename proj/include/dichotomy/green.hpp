#pragma once

#include <string>
#include <vector>

#include "dichotomy/summation.hpp"

namespace dichotomy {

struct DichotomyConstants {
  double K = 0.0;
  double omega = 0.0;
  double forward_rate = 0.0;   // fitted decay of |T_t P|
  double backward_rate = 0.0;  // fitted decay of |T_{-t}(I - P)|
};

struct HyperbolicityReport {
  bool is_hyperbolic = false;
  double gap = 0.0;          // oracle min |Re lambda|
  Mat projection;            // empty when the spectrum meets the axis
  DichotomyConstants constants;
  std::string provenance;    // "cesaro", "spectral-oracle" or "both"
  double discrepancy = -1.0; // |P - P_eig|_F, negative when the oracle is unavailable
  double idempotency = 0.0;  // |P^2 - P|_F
  double commutation = 0.0;  // |P T_1 - T_1 P|_F
  bool cesaro_converged = false;
  double cesaro_residual = 0.0;
  std::string note;
};

struct GreenSamples {
  std::vector<double> times;
  std::vector<Mat> values;
  double K = 0.0;
  double omega = 0.0;
};

struct MatrixCesaro {
  Mat value;
  bool converged = false;
  double residual = 0.0;
};

struct GreenResidualReport {
  std::vector<double> times;
  std::vector<double> residuals;       // |G(t) - T_t P| or |G(t) + T_t (I - P)|
  std::vector<double> semigroup_norms; // |T_t|
  double max_forward = 0.0;
  double max_backward = 0.0;
  double max_relative = 0.0;           // max residual / |T_t|
};

enum class GreenMethod { cesaro, regularized };

// Throws SpectrumHit if an eigenvalue lies on the imaginary axis within tolerance.
void require_axis_free(const Generator& g);

// (1/2pi)(C,1) int R(is) x e^{ist} ds along the ladder.
CesaroResult green_apply(const Generator& g, double t, const Vec& x, const QuadratureParams& params);
std::vector<CesaroResult> green_apply(const Generator& g, const std::vector<double>& times, const Vec& x,
                                      const QuadratureParams& params);

// The same Cesaro limit for the whole operator, computed in the Schur basis.
std::vector<MatrixCesaro> green_operator_cesaro(const Generator& g, const std::vector<double>& times,
                                                const QuadratureParams& params);

// Peeled, absolutely convergent form of the Cesaro limit:
//   (1/2pi) int_{|s|<=1} R(is)x e^{ist} ds - (Ax/pi) int_1^inf cos(st)/s^2 ds
//   - (1/2pi) int_{|s|>=1} R(is)A^2 x e^{ist}/s^2 ds + x (sgn(t)/2 - Si(t)/pi).
Vec green_regularized(const Generator& g, double t, const Vec& x, const QuadratureParams& params);
Mat green_regularized_operator(const Generator& g, double t, const QuadratureParams& params);

// P = I/2 + G(0), compared against the spectral oracle.
HyperbolicityReport splitting_projection(const Generator& g, const QuadratureParams& params);

DichotomyConstants dichotomy_constants(const Generator& g, const Mat& P, double horizon, double step);

GreenResidualReport verify_green_identities(const Generator& g, const Mat& P, const std::vector<double>& times,
                                            const QuadratureParams& params,
                                            GreenMethod method = GreenMethod::cesaro);

// G(t) on a time list (t = 0 rejected) with a decay fit |G(t)| <= K e^{-omega |t|}.
GreenSamples green_samples(const Generator& g, const std::vector<double>& times, const QuadratureParams& params);

}  // namespace dichotomy
