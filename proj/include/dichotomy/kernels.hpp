#pragma once

#include <functional>
#include <vector>

#include "dichotomy/types.hpp"

namespace dichotomy::kernels {

// Fills `out` (rows x cols, preallocated) with the integrand at frequency s.
// Must be safe to call concurrently.
using SampleFn = std::function<void(double s, Mat& out)>;

struct FejerGrid {
  double N;  // weight (1 - |s|/N) on [-N, N]
  double h;  // spacing; 2N/h is an integer
  Eigen::Index rows;
  Eigen::Index cols;
};

// (1/2pi) sum_j h (1 - |s_j|/N) F(s_j) e^{i s_j t} for every t, over the
// uniform grid s_j = -N + j h. Endpoint weights vanish, so the composite
// trapezoid reduces to the interior sum.
namespace serial {
std::vector<Mat> fejer_transform(const SampleFn& f, const FejerGrid& grid, const std::vector<double>& times);
std::vector<Vec> map_vectors(Eigen::Index count, const std::function<Vec(Eigen::Index)>& fn);
std::vector<double> map_scalars(Eigen::Index count, const std::function<double(Eigen::Index)>& fn);
}  // namespace serial

// Same contracts. Reductions run over fixed-size chunks combined in chunk
// order, so results do not depend on the thread count.
namespace parallel {
std::vector<Mat> fejer_transform(const SampleFn& f, const FejerGrid& grid, const std::vector<double>& times);
std::vector<Vec> map_vectors(Eigen::Index count, const std::function<Vec(Eigen::Index)>& fn);
std::vector<double> map_scalars(Eigen::Index count, const std::function<double(Eigen::Index)>& fn);
}  // namespace parallel

inline constexpr Eigen::Index chunk_size = 4096;

// Number of interior grid points; throws InputError if 2N/h is not integral.
Eigen::Index fejer_points(const FejerGrid& grid);

}  // namespace dichotomy::kernels
