#include "dichotomy/generator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "dichotomy/errors.hpp"

namespace dichotomy {

struct Generator::Cache {
  std::once_flag spectral_once;
  SpectralData spectral;
  bool spectral_ready = false;
  std::once_flag schur_once;
  SchurForm schur;
};

Generator::Generator(Mat a) : a_(std::move(a)), cache_(std::make_shared<Cache>()) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) {
    std::ostringstream os;
    os << "generator must be a non-empty square matrix, got " << a_.rows() << "x" << a_.cols();
    throw DimensionError(os.str());
  }
  if (!a_.allFinite()) throw ParseError("generator has a NaN or Inf entry");
  norm_ = a_.norm();
}

namespace {

SpectralData compute_spectral(const Mat& a, double norm) {
  Eigen::ComplexEigenSolver<Mat> es(a, true);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver did not converge on the generator");
  }
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Vec& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (ev(i).real() != ev(j).real()) return ev(i).real() > ev(j).real();
    return ev(i).imag() > ev(j).imag();
  });

  SpectralData sd;
  sd.eigenvalues.resize(n);
  sd.basis.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sd.eigenvalues(k) = ev(order[k]);
    Vec v = es.eigenvectors().col(order[k]);
    sd.basis.col(k) = v / v.norm();
  }
  Eigen::JacobiSVD<Mat> svd(sd.basis);
  const auto& sv = svd.singularValues();
  const double smin = sv(n - 1);
  sd.basis_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  sd.diagonalizable = sd.basis_condition <= 1e8;
  sd.abscissa = sd.eigenvalues(0).real();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) gap = std::min(gap, std::abs(sd.eigenvalues(k).real()));
  if (gap <= 1e-12 * std::max(1.0, norm)) gap = 0.0;
  sd.gap = gap;
  return sd;
}

}  // namespace

const SpectralData& Generator::spectral() const {
  std::call_once(cache_->spectral_once, [this] {
    cache_->spectral = compute_spectral(a_, norm_);
    cache_->spectral_ready = true;
  });
  return cache_->spectral;
}

bool Generator::has_spectral_cache() const { return cache_->spectral_ready; }

const SchurForm& Generator::schur() const {
  std::call_once(cache_->schur_once, [this] {
    Eigen::ComplexSchur<Mat> cs(a_, true);
    if (cs.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
    cache_->schur.Q = cs.matrixU();
    cache_->schur.T = cs.matrixT();
  });
  return cache_->schur;
}

Generator load_generator(const std::vector<std::vector<cplx>>& rows) {
  const std::size_t n = rows.size();
  for (const auto& r : rows) {
    if (r.size() != n) {
      std::ostringstream os;
      os << "generator rows must have length " << n << ", found a row of length " << r.size();
      throw DimensionError(os.str());
    }
  }
  if (n == 0) throw DimensionError("generator must have at least one row");
  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rows[i][j];
  return Generator(std::move(a));
}

const SpectralData& spectral_analysis(const Generator& g) { return g.spectral(); }

Mat semigroup_apply(const Generator& g, double t) {
  const Eigen::Index n = g.dim();
  if (!std::isfinite(t)) throw InputError("semigroup time must be finite");
  if (t == 0.0) return Mat::Identity(n, n);
  const Vec ev = g.schur_eigenvalues();
  double growth = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) growth = std::max(growth, t * ev(k).real());
  if (growth > 700.0) {
    std::ostringstream os;
    os << "e^{tA} overflows at t = " << t << " (growth exponent " << growth << ")";
    throw OverflowError(os.str());
  }
  Mat ta = t * g.matrix();
  Mat e = ta.exp();
  if (!e.allFinite()) {
    std::ostringstream os;
    os << "e^{tA} produced non-finite entries at t = " << t;
    throw OverflowError(os.str());
  }
  return e;
}

ResolventSampler::ResolventSampler(const Generator& g)
    : schur_(&g.schur()), eig_(g.schur_eigenvalues()), tol_(g.eigen_tolerance()) {}

bool ResolventSampler::hits(cplx lambda) const {
  for (Eigen::Index k = 0; k < eig_.size(); ++k)
    if (std::abs(lambda - eig_(k)) <= tol_) return true;
  return false;
}

void ResolventSampler::check(cplx lambda) const {
  for (Eigen::Index k = 0; k < eig_.size(); ++k) {
    if (std::abs(lambda - eig_(k)) <= tol_) {
      std::ostringstream os;
      os.precision(17);
      os << "resolvent requested at lambda = " << lambda.real() << (lambda.imag() < 0 ? "" : "+")
         << lambda.imag() << "i, within " << tol_ << " of the eigenvalue " << eig_(k).real()
         << (eig_(k).imag() < 0 ? "" : "+") << eig_(k).imag() << "i";
      throw SpectrumHit(os.str());
    }
  }
}

void ResolventSampler::solve_in_place(cplx lambda, Vec& y) const {
  const Mat& T = schur_->T;
  const Eigen::Index n = T.rows();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    cplx acc = y(i);
    for (Eigen::Index j = i + 1; j < n; ++j) acc += T(i, j) * y(j);
    y(i) = acc / (lambda - T(i, i));
  }
}

Vec ResolventSampler::apply(cplx lambda, const Vec& x) const {
  check(lambda);
  Vec y = schur_->Q.adjoint() * x;
  solve_in_place(lambda, y);
  return schur_->Q * y;
}

Mat ResolventSampler::apply(cplx lambda, const Mat& x) const {
  check(lambda);
  Mat y = schur_->Q.adjoint() * x;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    Vec col = y.col(c);
    solve_in_place(lambda, col);
    y.col(c) = col;
  }
  return schur_->Q * y;
}

Mat resolvent(const Generator& g, cplx lambda) {
  ResolventSampler rs(g);
  return rs.apply(lambda, Mat::Identity(g.dim(), g.dim()).eval());
}

Mat spectral_projection(const Generator& g) {
  const SpectralData& sd = g.spectral();
  if (sd.gap == 0.0) throw NotHyperbolic("spectral projection needs an eigenvalue-free imaginary axis (gap = 0)");
  if (!sd.diagonalizable) {
    std::ostringstream os;
    os << "eigenbasis too ill-conditioned for the spectral oracle (kappa = " << sd.basis_condition << ")";
    throw NumericalError(os.str());
  }
  const Eigen::Index n = g.dim();
  Vec mask(n);
  for (Eigen::Index k = 0; k < n; ++k) mask(k) = sd.eigenvalues(k).real() < 0.0 ? 1.0 : 0.0;
  Mat vinv = sd.basis.partialPivLu().inverse();
  return sd.basis * mask.asDiagonal() * vinv;
}

}  // namespace dichotomy
