#include "dichotomy/grid_function.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "dichotomy/errors.hpp"

namespace dichotomy {

namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

// In-place DFT of each row of an n x m column-major matrix.
void dft_rows(Mat& data, int sign) {
  const int n = static_cast<int>(data.rows());
  const int m = static_cast<int>(data.cols());
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft(1, &m, n, ptr, nullptr, n, 1, ptr, nullptr, n, 1, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW could not build a transform plan");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void GridFunction::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("grid spacing must be positive and finite");
  if (samples.cols() < 2) throw InputError("grid functions need at least two samples");
  if (!std::isfinite(start)) throw InputError("grid start must be finite");
  if (!samples.allFinite()) throw InputError("grid function has a non-finite sample");
}

GridFunction zero_grid(Eigen::Index n, double start, double h, Eigen::Index m) {
  return GridFunction{start, h, Mat::Zero(n, m)};
}

GridFunction transform(const GridFunction& f, Direction dir, double origin) {
  f.validate();
  const Eigen::Index m = f.size();
  const Eigen::Index half = m / 2;
  const double dual = 2.0 * pi / (static_cast<double>(m) * f.h);
  Mat data = f.samples;
  GridFunction out;
  out.h = dual;
  if (dir == Direction::forward) {
    // s_k = b + k ds, t_j = a + j h: e^{-i s_k t_j} = e^{-i s_k a} e^{-i b j h} e^{-2 pi i k j / m}.
    const double b = -static_cast<double>(half) * dual;
    for (Eigen::Index j = 0; j < m; ++j) data.col(j) *= std::exp(-I_unit * (b * f.h * static_cast<double>(j)));
    dft_rows(data, FFTW_FORWARD);
    for (Eigen::Index k = 0; k < m; ++k) data.col(k) *= f.h * std::exp(-I_unit * ((b + k * dual) * f.start));
    out.start = b;
  } else {
    const double a = std::isnan(origin) ? -static_cast<double>(half) * dual : origin;
    const double b = f.start;
    for (Eigen::Index k = 0; k < m; ++k) data.col(k) *= std::exp(I_unit * ((b + k * f.h) * a));
    dft_rows(data, FFTW_BACKWARD);
    for (Eigen::Index j = 0; j < m; ++j)
      data.col(j) *= (f.h / (2.0 * pi)) * std::exp(I_unit * (b * dual * static_cast<double>(j)));
    out.start = a;
  }
  out.samples = std::move(data);
  return out;
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw InputError("L_p norms need p >= 1");
  const Eigen::VectorXd nv = f.samples.colwise().norm().transpose();
  if (std::isinf(p)) return nv.size() ? nv.maxCoeff() : 0.0;
  if (p == 1.0) return f.h * nv.sum();
  if (p == 2.0) return std::sqrt(f.h * nv.squaredNorm());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < nv.size(); ++j) acc += std::pow(nv(j), p);
  return std::pow(f.h * acc, 1.0 / p);
}

double weak_l1_quasinorm(const GridFunction& f) {
  std::vector<double> nv(f.size());
  for (Eigen::Index j = 0; j < f.size(); ++j) nv[j] = f.samples.col(j).norm();
  std::sort(nv.begin(), nv.end(), std::greater<double>());
  double best = 0.0;
  for (std::size_t k = 0; k < nv.size(); ++k) best = std::max(best, nv[k] * static_cast<double>(k + 1) * f.h);
  return best;
}

}  // namespace dichotomy
