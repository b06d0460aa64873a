#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dichotomy/errors.hpp"
#include "dichotomy/fractional.hpp"
#include "dichotomy/generator.hpp"
#include "support/oracles.hpp"

using namespace dichotomy;

namespace {

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Mat rotation() {
  Mat m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

}  // namespace

TEST_CASE("load_generator accepts square finite input") {
  const Generator g = load_generator({{cplx(-1.0)}});
  CHECK(g.dim() == 1);
  CHECK_FALSE(g.has_spectral_cache());
  CHECK(load_generator({{0.0, 1.0}, {-1.0, 0.0}}).dim() == 2);
}

TEST_CASE("load_generator rejects bad shapes and entries") {
  CHECK_THROWS_AS(load_generator({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}), DimensionError);
  CHECK_THROWS_AS(load_generator({{1.0, 2.0}, {3.0}}), DimensionError);
  CHECK_THROWS_AS(load_generator({{cplx(std::nan(""), 0.0)}}), ParseError);
  CHECK_THROWS_AS(load_generator({{cplx(0.0, INFINITY)}}), ParseError);
}

TEST_CASE("spectral_analysis on small examples") {
  const Generator g(diag2(-1, 2));
  const SpectralData& sd = spectral_analysis(g);
  CHECK(g.has_spectral_cache());
  CHECK(sd.eigenvalues(0).real() == doctest::Approx(2.0));
  CHECK(sd.eigenvalues(1).real() == doctest::Approx(-1.0));
  CHECK(sd.gap == doctest::Approx(1.0));
  CHECK(sd.abscissa == doctest::Approx(2.0));

  const Generator r(rotation());
  const SpectralData& rot = spectral_analysis(r);
  CHECK(rot.gap == 0.0);
  CHECK(std::abs(rot.eigenvalues(0).imag()) == doctest::Approx(1.0));
}

TEST_CASE("spectral gap matches characteristic polynomial roots") {
  for (const Mat& A : oracle::hyperbolic_corpus(5, 11)) {
    const Generator g(A);
    const SpectralData& sd = spectral_analysis(g);
    double d = 1e300;
    for (cplx z : oracle::char_poly_roots(A)) d = std::min(d, std::abs(z.real()));
    CHECK(std::abs(sd.gap - d) <= 1e-8);
    CHECK(sd.gap > 0.5);
    // Reconstruction from the cached eigenpairs.
    Mat D = sd.eigenvalues.asDiagonal();
    CHECK((A * sd.basis - sd.basis * D).norm() <= 1e-9 * A.norm() * sd.basis_condition);
  }
}

TEST_CASE("semigroup_apply") {
  const Generator g(diag2(-1, 2));
  CHECK((semigroup_apply(g, 0.0) - Mat::Identity(2, 2)).norm() == 0.0);
  const Mat T1 = semigroup_apply(g, 1.0);
  CHECK(std::abs(T1(0, 0) - std::exp(-1.0)) < 1e-14);
  CHECK(std::abs(T1(1, 1) - std::exp(2.0)) < 1e-12);

  std::mt19937_64 rng(3);
  const Mat A = oracle::random_matrix(rng, 6, 2.0);
  const oracle::Eig e = oracle::eig(A);
  CHECK((semigroup_apply(Generator(A), 0.3) - oracle::expm(A, 0.3)).norm() <= 1e-9 * e.cond);

  CHECK_THROWS_AS(semigroup_apply(g, 1000.0), OverflowError);
}

TEST_CASE("semigroup law") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    Mat A = oracle::random_matrix(rng, 8, 2.5);
    if (oracle::norm2(A) > 5.0) A *= 5.0 / oracle::norm2(A);
    const Generator g(A);
    for (double s : {0.1, 0.5, 1.0})
      for (double t : {0.1, 0.5, 1.0}) {
        const Mat Ts = semigroup_apply(g, s), Tt = semigroup_apply(g, t);
        CHECK(oracle::norm2(semigroup_apply(g, s + t) - Ts * Tt) <=
              1e-8 * (1 + oracle::norm2(Ts)) * (1 + oracle::norm2(Tt)));
      }
  }
}

TEST_CASE("resolvent") {
  const Mat R = resolvent(Generator(Mat::Constant(1, 1, -1.0)), cplx(0.0, 0.7));
  CHECK(std::abs(R(0, 0) - 1.0 / cplx(1.0, 0.7)) < 1e-15);
  CHECK_THROWS_AS(resolvent(Generator(rotation()), cplx(0.0, 1.0)), SpectrumHit);

  std::mt19937_64 rng(7);
  const Mat A = oracle::random_matrix(rng, 6, 2.0);
  const Generator g(A);
  const cplx lam(3.0, 2.0);
  const Mat I = Mat::Identity(6, 6);
  CHECK(((lam * I - A) * resolvent(g, lam) - I).norm() < 1e-9);

  const cplx mu(-0.4, 1.3);
  const Mat Rl = resolvent(g, lam), Rm = resolvent(g, mu);
  CHECK((Rl - Rm - (mu - lam) * Rl * Rm).norm() <= 1e-8 * (Rl.norm() + Rm.norm()));
}

TEST_CASE("ResolventSampler agrees with the dense resolvent") {
  std::mt19937_64 rng(9);
  const Mat A = oracle::random_matrix(rng, 5, 2.0);
  const Generator g(A);
  const ResolventSampler rs(g);
  const Vec x = oracle::random_unit(rng, 5);
  const cplx lam(0.2, -1.7);
  CHECK((rs.apply(lam, x) - (lam * Mat::Identity(5, 5) - A).inverse() * x).norm() < 1e-12);
}

TEST_CASE("spectral_projection") {
  const Mat P = spectral_projection(Generator(diag2(-1, 2)));
  CHECK((P - diag2(1, 0)).norm() < 1e-14);
  CHECK((spectral_projection(Generator(-Mat::Identity(3, 3))) - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK_THROWS_AS(spectral_projection(Generator(rotation())), NotHyperbolic);

  for (const Mat& A : oracle::hyperbolic_corpus(3, 13)) {
    const Generator g(A);
    const Mat Ps = spectral_projection(g);
    CHECK((Ps - oracle::contour_riesz(A)).norm() <= 1e-7);
    CHECK((Ps * Ps - Ps).norm() <= 1e-9);
    CHECK((Ps * A - A * Ps).norm() <= 1e-9 * oracle::norm2(A));
    for (double t : {-2.0, -1.0, 1.0, 2.0}) {
      const Mat T = semigroup_apply(g, t);
      CHECK(oracle::norm2(Ps * T - T * Ps) <= 1e-8 * oracle::norm2(T));
    }
  }
}

TEST_CASE("fractional_power with integer exponent reproduces -R(omega)") {
  std::mt19937_64 rng(17);
  const Mat A = oracle::random_matrix(rng, 4, 2.0);
  const Generator g(A);
  FractionalConfig cfg;
  cfg.alpha = 1.0;
  const FractionalPower fp = fractional_power_report(g, cfg, PowerSign::negative);
  const Mat expect = -resolvent(g, cplx(fp.omega, 0.0));
  CHECK((fp.value - expect).norm() <= 1e-8 * expect.norm());
}

TEST_CASE("fractional_power scalar square root") {
  const Generator g(Mat::Constant(1, 1, -1.0));
  FractionalConfig cfg;
  cfg.alpha = 0.5;
  cfg.omega = 4.0;
  const Mat v = fractional_power(g, cfg, PowerSign::negative);
  const cplx expect = std::pow(cplx(-5.0, 0.0), -0.5);  // principal branch: -i / sqrt(5)
  CHECK(std::abs(expect - cplx(0.0, -1.0 / std::sqrt(5.0))) < 1e-15);
  CHECK(std::abs(v(0, 0) - expect) < 1e-7);
  const Mat vp = fractional_power(g, cfg, PowerSign::positive);
  CHECK(std::abs(vp(0, 0) * v(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("fractional powers compose and match the eigen oracle") {
  for (const Mat& A : oracle::hyperbolic_corpus(3, 19, 5)) {
    const Generator g(A);
    FractionalConfig half;
    half.alpha = 0.5;
    FractionalConfig one;
    one.alpha = 1.0;
    const Mat h = fractional_power(g, half, PowerSign::negative);
    const Mat full = fractional_power(g, one, PowerSign::negative);
    CHECK((h * h - full).norm() <= 1e-7 * full.norm());

    // Independent reference: eigenvalues of A - omega raised with the same cut.
    const double omega = default_shift(g);
    const Mat ref = oracle::from_eig(oracle::eig(A), [&](cplx l) {
      cplx mu = l - omega;
      double arg = std::arg(mu);
      if (arg <= 0.0) arg += 2.0 * oracle::pi;
      return std::exp(-0.5 * (std::log(std::abs(mu)) + cplx(0.0, arg)));
    });
    CHECK((h - ref).norm() <= 1e-6 * ref.norm());
    const Mat orc = fractional_power(g, half, PowerSign::negative, PowerMethod::oracle);
    CHECK((h - orc).norm() <= 1e-6 * orc.norm());
  }
}

TEST_CASE("fractional_power configuration errors") {
  const Generator g(Mat::Constant(1, 1, 2.0));
  FractionalConfig cfg;
  cfg.omega = 2.5;  // not above s(A) + 1
  CHECK_THROWS_AS(fractional_power(g, cfg, PowerSign::negative), ConfigError);
  cfg.omega = 5.0;
  cfg.theta = 1.0;  // above pi/6
  CHECK_THROWS_AS(fractional_power(g, cfg, PowerSign::negative), ConfigError);
  cfg.theta = 0.3;
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(fractional_power(g, cfg, PowerSign::negative), ConfigError);
}

TEST_CASE("fractional_power detects a contour collision") {
  // Eigenvalues of A - omega lie left of the vertex -1; a ray point is
  // only reachable as a margin violation.
  FractionalConfig cfg;
  cfg.omega = 4.0;
  const cplx on_ray = -1.0 + 2.0 * std::exp(cplx(0.0, -cfg.theta));
  CHECK_THROWS_AS(fractional_power(Generator(Mat::Constant(1, 1, on_ray + cfg.omega)), cfg, PowerSign::negative),
                  ConfigError);
  cfg.omega = 2.0 + 1e-9;  // eigenvalue of A - omega at -1 - 1e-9, next to the vertex
  CHECK_THROWS_AS(fractional_power(Generator(Mat::Constant(1, 1, 1.0)), cfg, PowerSign::negative), ContourCollision);
  cfg.omega = 2.5;
  CHECK_NOTHROW(fractional_power(Generator(Mat::Constant(1, 1, 1.0)), cfg, PowerSign::negative));
}

TEST_CASE("alpha_norm") {
  const Generator g(Mat::Constant(1, 1, -1.0));
  FractionalConfig cfg;
  cfg.omega = 4.0;
  cfg.alpha = 0.0;
  CHECK(alpha_norm(g, Vec::Constant(1, cplx(3.0, 4.0)), cfg) == doctest::Approx(5.0));
  cfg.alpha = 1.0;
  CHECK(alpha_norm(g, Vec::Ones(1), cfg) == doctest::Approx(5.0).epsilon(1e-8));

  std::mt19937_64 rng(23);
  for (const Mat& A : oracle::normal_corpus(3, 29, 5)) {
    const Generator gn(A);
    FractionalConfig c0, c1, ch;
    c0.alpha = 0.0;
    c1.alpha = 1.0;
    ch.alpha = 0.5;
    const Vec x = oracle::random_unit(rng, 5);
    const double lhs = alpha_norm(gn, x, ch);
    const double rhs = std::sqrt(alpha_norm(gn, x, c0) * alpha_norm(gn, x, c1));
    CHECK(lhs <= rhs * (1.0 + 1e-8));
  }
}

TEST_CASE("Laplace representation of the resolvent") {
  std::mt19937_64 rng(31);
  const Mat A = oracle::random_matrix(rng, 4, 2.0);
  const Generator g(A);
  const double s = oracle::abscissa(A);
  const cplx lam(s + 0.5, 0.8);
  const double Tmax = 40.0 / (lam.real() - s);
  std::vector<double> gx, gw;
  oracle::gauss_legendre(16, gx, gw);
  Mat acc = Mat::Zero(4, 4);
  const int panels = 800;
  for (int p = 0; p < panels; ++p) {
    const double a = Tmax * p / panels, b = Tmax * (p + 1) / panels;
    for (std::size_t k = 0; k < gx.size(); ++k) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
      acc += 0.5 * (b - a) * gw[k] * std::exp(-lam * t) * semigroup_apply(g, t);
    }
  }
  const Mat R = resolvent(g, lam);
  CHECK(oracle::norm2(acc - R) <= 1e-6 * oracle::norm2(R));
}
