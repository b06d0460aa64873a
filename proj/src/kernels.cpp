#include "dichotomy/kernels.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>

#include "dichotomy/errors.hpp"

namespace dichotomy::kernels {

Eigen::Index fejer_points(const FejerGrid& grid) {
  if (!(grid.N > 0.0) || !(grid.h > 0.0)) throw InputError("Fejer grid needs N > 0 and h > 0");
  const double ratio = 2.0 * grid.N / grid.h;
  const double r = std::round(ratio);
  if (std::abs(ratio - r) > 1e-8 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "grid spacing h = " << grid.h << " does not divide [-N, N] with N = " << grid.N;
    throw InputError(os.str());
  }
  return static_cast<Eigen::Index>(r);  // samples j = 0..r, endpoints carry zero weight
}

namespace {

inline double node(const FejerGrid& g, Eigen::Index j, Eigen::Index m) {
  // Symmetric construction keeps s_j = -s_{m-j} exactly.
  return g.N * (2.0 * static_cast<double>(j) - static_cast<double>(m)) / static_cast<double>(m);
}

void accumulate_range(const SampleFn& f, const FejerGrid& g, Eigen::Index m, Eigen::Index j0,
                      Eigen::Index j1, const std::vector<double>& times, std::vector<Mat>& acc) {
  Mat sample(g.rows, g.cols);
  const Eigen::Index len = g.rows * g.cols;
  for (Eigen::Index j = j0; j < j1; ++j) {
    if (j == 0 || j == m) continue;
    const double s = node(g, j, m);
    const double w = g.h * (1.0 - std::abs(s) / g.N);
    f(s, sample);
    const cplx* src = sample.data();
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double ph = s * times[k];
      const cplx c = w * cplx(std::cos(ph), std::sin(ph));
      cplx* dst = acc[k].data();
      for (Eigen::Index i = 0; i < len; ++i) dst[i] += c * src[i];
    }
  }
}

std::vector<Mat> zeros(const FejerGrid& g, std::size_t count) {
  return std::vector<Mat>(count, Mat::Zero(g.rows, g.cols));
}

}  // namespace

namespace serial {

std::vector<Mat> fejer_transform(const SampleFn& f, const FejerGrid& grid, const std::vector<double>& times) {
  const Eigen::Index m = fejer_points(grid);
  std::vector<Mat> acc = zeros(grid, times.size());
  accumulate_range(f, grid, m, 0, m + 1, times, acc);
  for (auto& a : acc) a /= 2.0 * pi;
  return acc;
}

std::vector<Vec> map_vectors(Eigen::Index count, const std::function<Vec(Eigen::Index)>& fn) {
  std::vector<Vec> out(count);
  for (Eigen::Index k = 0; k < count; ++k) out[k] = fn(k);
  return out;
}

std::vector<double> map_scalars(Eigen::Index count, const std::function<double(Eigen::Index)>& fn) {
  std::vector<double> out(count);
  for (Eigen::Index k = 0; k < count; ++k) out[k] = fn(k);
  return out;
}

}  // namespace serial

namespace parallel {

namespace {

// Exceptions must not escape an OpenMP region; keep the first one and
// rethrow it on the calling thread.
class ErrorSlot {
 public:
  template <class F>
  void run(F&& f) {
    if (failed_.load(std::memory_order_relaxed)) return;
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!first_) first_ = std::current_exception();
      failed_.store(true);
    }
  }
  void rethrow() {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr first_;
  std::atomic<bool> failed_{false};
};

}  // namespace

std::vector<Mat> fejer_transform(const SampleFn& f, const FejerGrid& grid, const std::vector<double>& times) {
  const Eigen::Index m = fejer_points(grid);
  const Eigen::Index total = m + 1;
  const Eigen::Index nchunks = (total + chunk_size - 1) / chunk_size;
  std::vector<std::vector<Mat>> partial(nchunks);
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index c = 0; c < nchunks; ++c) {
    err.run([&] {
      partial[c] = zeros(grid, times.size());
      const Eigen::Index j0 = c * chunk_size;
      const Eigen::Index j1 = std::min(total, j0 + chunk_size);
      accumulate_range(f, grid, m, j0, j1, times, partial[c]);
    });
  }
  err.rethrow();
  std::vector<Mat> acc = zeros(grid, times.size());
  for (Eigen::Index c = 0; c < nchunks; ++c)
    for (std::size_t k = 0; k < times.size(); ++k) acc[k] += partial[c][k];
  for (auto& a : acc) a /= 2.0 * pi;
  return acc;
}

std::vector<Vec> map_vectors(Eigen::Index count, const std::function<Vec(Eigen::Index)>& fn) {
  std::vector<Vec> out(count);
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 64)
  for (Eigen::Index k = 0; k < count; ++k) err.run([&] { out[k] = fn(k); });
  err.rethrow();
  return out;
}

std::vector<double> map_scalars(Eigen::Index count, const std::function<double(Eigen::Index)>& fn) {
  std::vector<double> out(count);
  ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index k = 0; k < count; ++k) err.run([&] { out[k] = fn(k); });
  err.rethrow();
  return out;
}

}  // namespace parallel

}  // namespace dichotomy::kernels
