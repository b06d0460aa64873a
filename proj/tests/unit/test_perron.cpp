#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dichotomy/errors.hpp"
#include "dichotomy/perron.hpp"
#include "support/oracles.hpp"

using namespace dichotomy;

namespace {

Mat diag(std::initializer_list<double> d) {
  Mat m = Mat::Zero(d.size(), d.size());
  int i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

GridFunction bump_forcing(const Vec& v, double c, double w, double h = 0.005) {
  const Eigen::Index m = static_cast<Eigen::Index>(std::llround(20.0 / h));
  GridFunction g{-10.0, h, Mat(v.size(), m)};
  for (Eigen::Index j = 0; j < m; ++j) g.samples.col(j) = oracle::bump(g.node(j), c, w) * v;
  return g;
}

double sup_norm(const GridFunction& f) { return f.samples.colwise().norm().maxCoeff(); }

}  // namespace

TEST_CASE("scalar mild solution is the causal convolution") {
  GridFunction g{-20.0, 0.01, Mat(1, 4000)};
  for (Eigen::Index j = 0; j < g.size(); ++j) g.samples(0, j) = std::exp(-g.node(j) * g.node(j) / 2);
  const MildSolution s = solve_mild(Generator(diag({-1})), g);
  double err = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double t = g.node(j);
    err = std::max(err, std::abs(s.u.samples(0, j) - std::exp(0.5 - t) * std::sqrt(pi / 2) *
                                                          std::erfc((1.0 - t) / std::sqrt(2.0))));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("zero forcing gives the zero solution") {
  const GridFunction g{-5.0, 0.01, Mat::Zero(2, 1000)};
  const MildSolution s = solve_mild(Generator(diag({-1, 2})), g);
  CHECK(s.u.samples.norm() == 0.0);
  CHECK(s.max_residual == 0.0);
}

TEST_CASE("residual table for diag(-1, 2)") {
  const Generator gen(diag({-1, 2}));
  const GridFunction g = bump_forcing(Vec::Ones(2), 0.0, 1.0);
  const MildSolution s = solve_mild(gen, g);
  CHECK_FALSE(s.residuals.empty());
  CHECK(s.max_residual <= 5e-4 * sup_norm(g));
  for (const ResidualEntry& e : s.residuals) {
    CHECK(e.theta >= e.tau);
    CHECK(e.tau >= -8.0 - 1e-12);
    CHECK(e.theta <= 8.0 + 1e-12);
  }

  // Adding a windowed unstable mode leaves the solution branch.
  GridFunction bad = s.u;
  for (Eigen::Index j = 0; j < bad.size(); ++j) {
    const double t = bad.node(j);
    bad.samples(1, j) += std::exp(2 * t) * std::exp(-t * t);
  }
  const auto pairs = interior_pairs(g, 16, {0.25, 0.5, 1.0});
  CHECK(mild_residual(gen, bad, g, pairs) >= 0.1);
  CHECK(mild_residual(gen, s.u, g, pairs) == doctest::Approx(s.max_residual));

  const GridFunction z{-10.0, 0.005, Mat::Zero(2, 4000)};
  CHECK(mild_residual(gen, z, z, pairs) == 0.0);
}

TEST_CASE("misaligned grids and non-hyperbolic generators") {
  const Generator gen(diag({-1, 2}));
  const GridFunction g = bump_forcing(Vec::Ones(2), 0.0, 1.0);
  GridFunction shifted = g;
  shifted.start += 0.001;
  const auto pairs = interior_pairs(g, 4, {0.5});
  CHECK_THROWS_AS(mild_residual(gen, shifted, g, pairs), InputError);
  GridFunction coarse = g;
  coarse.h = 0.01;
  CHECK_THROWS_AS(mild_residual(gen, coarse, g, pairs), InputError);

  Mat rot(2, 2);
  rot << 0, 1, -1, 0;
  CHECK_THROWS_AS(solve_mild(Generator(rot), g), NotHyperbolic);
}

TEST_CASE("interior pairs") {
  const GridFunction g{0.0, 0.01, Mat::Zero(1, 1001)};
  const auto pairs = interior_pairs(g, 16, {0.25, 0.5, 1.0});
  CHECK(pairs.size() == 48u);
  for (const ResidualPair& p : pairs) {
    CHECK(p.tau <= p.theta);
    CHECK(g.node(p.tau) >= 1.0 - 1e-12);
    CHECK(g.node(p.theta) <= 9.0 + 1e-12);
  }
}

TEST_CASE("linearity, translation covariance and uniqueness") {
  std::mt19937_64 rng(71);
  const Mat A = oracle::hyperbolic_corpus(1, 73, 4).front();
  const Generator gen(A);
  const Vec v1 = oracle::random_unit(rng, 4), v2 = oracle::random_unit(rng, 4);
  const GridFunction g1 = bump_forcing(v1, -1.0, 1.0, 0.01), g2 = bump_forcing(v2, 1.5, 0.5, 0.01);
  GridFunction g12 = g1;
  g12.samples += g2.samples;
  const MildSolution s1 = solve_mild(gen, g1), s2 = solve_mild(gen, g2), s12 = solve_mild(gen, g12);
  CHECK((s12.u.samples - s1.u.samples - s2.u.samples).norm() <= 1e-8 * s12.u.samples.norm());

  GridFunction shifted = g1;
  shifted.samples.rightCols(g1.size() - 1) = g1.samples.leftCols(g1.size() - 1);
  shifted.samples.col(0).setZero();
  const MildSolution ss = solve_mild(gen, shifted);
  double diff = 0.0;
  for (Eigen::Index j = 1; j < g1.size(); ++j) diff = std::max(diff, (ss.u.samples.col(j) - s1.u.samples.col(j - 1)).norm());
  CHECK(diff <= 1e-6 * sup_norm(s1.u));

  // An independently built decaying solution with small residual agrees with solve_mild.
  GridFunction alt = s1.u;
  for (Eigen::Index j = 0; j < alt.size(); ++j) alt.samples.col(j) = oracle::bump_convolution(A, alt.node(j), -1.0, 1.0, v1);
  const double tol = 5e-4 * sup_norm(g1);
  CHECK(mild_residual(gen, alt, g1, interior_pairs(g1, 16, {0.25, 0.5, 1.0})) <= tol);
  CHECK(sup_norm(GridFunction{alt.start, alt.h, alt.samples - s1.u.samples}) <= 10 * tol);
}
