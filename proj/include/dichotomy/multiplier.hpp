#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dichotomy/generator.hpp"
#include "dichotomy/grid_function.hpp"

namespace dichotomy {

struct MultiplierConfig {
  double rho = 0.0;
  double rho0 = std::numeric_limits<double>::quiet_NaN();  // NaN: 0.9 * gap
  // Zero padding appended before the transform, in decay lengths of the kernel.
  double pad_decay_lengths = 40.0;
};

// Largest real part strictly left of the line and smallest strictly right,
// from the Schur diagonal. Throws SpectrumHit if the line meets the spectrum.
double line_clearance(const Generator& g, double shift);

// M_rho f = [R(i. + rho) f^]^v. The band |rho| < rho0 < gap is enforced.
GridFunction apply_multiplier(const Generator& g, const MultiplierConfig& cfg, const GridFunction& f);

// Symbol s -> R(is + shift) B, no band restriction; B empty means identity.
GridFunction apply_symbol(const Generator& g, double shift, const Mat& B, const GridFunction& f,
                          double pad_decay_lengths = 40.0);

struct ProbeFamily {
  std::uint64_t seed = 1;
  double h = 0.25;
  Eigen::Index m = 16384;
  int random_vectors = 2;
  bool narrow_profiles = true;  // blocks and narrow Gaussians; false keeps only the wide ones
};

struct NormEstimate {
  double lower_bound = 0.0;
  std::string best_probe;
  int probes = 0;
};

// max ||M f||_p / ||f||_p over blocks, Gaussians and modulated Gaussians
// tensored with eigenvectors (Schur vectors when not diagonalizable) and
// seeded random unit vectors.
NormEstimate estimate_multiplier_norm(const Generator& g, const MultiplierConfig& cfg, double p,
                                      const ProbeFamily& family = {});
NormEstimate estimate_symbol_norm(const Generator& g, double shift, const Mat& B, double p,
                                  const ProbeFamily& family = {});

struct KvlReport {
  cplx value;
  double phi_check_l1 = 0.0;  // ||inverse transform of Phi||_1
  double ratio = 0.0;         // |value| / (|x| |x*| ||Phi check||_1)
};

// <r_rho, Phi> = int <x*, R(is + rho) x> Phi(s) ds, Phi sampled on a grid in s.
KvlReport kvl_functional(const Generator& g, double rho, const Vec& x, const Vec& xs, const GridFunction& phi);

struct KernelGrid {
  double h = 0.01;
  double length = 0.0;  // 0: chosen from the decay rate
  double t_max = 2.0;
};

struct KernelResiduals {
  double res1 = 0.0;
  double res2 = 0.0;
  double res3 = 0.0;
};

// r^v_rho(t, x, x*) on the grid t_j = -L/2 + j h, from the inverse transform
// of s -> <x*, R(is + rho) x>. The 1/s and 1/s^2 parts of the symbol are
// inverted in closed form so the sampled remainder decays like 1/s^3.
GridFunction kernel_samples(const Generator& g, double rho, const Vec& x, const Vec& xs, const KernelGrid& grid);

KernelResiduals kernel_identity_checks(const Generator& g, const Vec& x, const Vec& xs, double tau, double rho,
                                       const KernelGrid& grid = {});

}  // namespace dichotomy
