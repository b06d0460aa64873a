#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"
#include "support/oracles.hpp"

using namespace dichotomy;

TEST_CASE("serial and parallel Fejer transforms agree") {
  const kernels::SampleFn f = [](double s, Mat& out) {
    out(0, 0) = 1.0 / cplx(1.0, s);
    out(1, 0) = std::exp(-s * s);
    out(0, 1) = cplx(std::cos(s), 0.1 * s);
    out(1, 1) = 1.0 / cplx(2.0, -s);
  };
  const kernels::FejerGrid grid{200.0, 0.01, 2, 2};
  const std::vector<double> times{-1.0, 0.0, 0.5, 2.0};
  const auto a = kernels::serial::fejer_transform(f, grid, times);
  const auto b = kernels::parallel::fejer_transform(f, grid, times);
  REQUIRE(a.size() == times.size());
  // Chunked reduction reorders the sum; repeated parallel runs are bitwise stable.
  const auto c = kernels::parallel::fejer_transform(f, grid, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK((a[k] - b[k]).norm() <= 1e-12 * a[k].norm());
    CHECK((b[k] - c[k]).norm() == 0.0);
  }
}

TEST_CASE("Fejer transform of 1/(1+is) approaches e^{-t}") {
  const kernels::SampleFn f = [](double s, Mat& out) { out(0, 0) = 1.0 / cplx(1.0, s); };
  const auto v = kernels::parallel::fejer_transform(f, {400.0, 0.01, 1, 1}, {1.0});
  CHECK(std::abs(v[0](0, 0) - std::exp(-1.0)) < 1e-3);
}

TEST_CASE("map helpers preserve order") {
  const auto fn = [](Eigen::Index i) { return Vec::Constant(3, cplx(double(i), -double(i))); };
  const auto a = kernels::serial::map_vectors(10000, fn);
  const auto b = kernels::parallel::map_vectors(10000, fn);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
  const auto sa = kernels::serial::map_scalars(777, [](Eigen::Index i) { return std::sqrt(double(i)); });
  const auto sb = kernels::parallel::map_scalars(777, [](Eigen::Index i) { return std::sqrt(double(i)); });
  CHECK(sa == sb);
}

TEST_CASE("exceptions thrown inside parallel loops reach the caller") {
  CHECK_THROWS_AS(kernels::parallel::map_scalars(100,
                                                 [](Eigen::Index i) -> double {
                                                   if (i == 57) throw InputError("bad index");
                                                   return 0.0;
                                                 }),
                  InputError);
}

TEST_CASE("fejer_points validates the grid") {
  CHECK(kernels::fejer_points({1.0, 0.5, 1, 1}) == 4);
  CHECK_THROWS_AS(kernels::fejer_points({1.0, 0.3, 1, 1}), InputError);
}
