#pragma once

#include <memory>
#include <vector>

#include "dichotomy/types.hpp"

namespace dichotomy {

struct SpectralData {
  Vec eigenvalues;          // sorted by real part, descending
  Mat basis;                // unit-norm eigenvector columns
  double basis_condition = 1.0;
  double abscissa = 0.0;    // s(A)
  double gap = 0.0;         // min |Re lambda|, snapped to zero on the axis
  bool diagonalizable = true;
};

struct SchurForm {
  Mat Q;  // unitary
  Mat T;  // upper triangular, A = Q T Q*
};

// Immutable generator. Copies share a write-once cache of the spectral and
// Schur data, so concurrent readers are safe once the cache is populated.
class Generator {
 public:
  explicit Generator(Mat a);

  Eigen::Index dim() const { return a_.rows(); }
  const Mat& matrix() const { return a_; }
  double norm() const { return norm_; }  // Frobenius

  const SpectralData& spectral() const;
  bool has_spectral_cache() const;
  const SchurForm& schur() const;

  // Eigenvalues from the Schur diagonal; no eigenvectors involved.
  Vec schur_eigenvalues() const { return schur().T.diagonal(); }
  double eigen_tolerance() const { return 1e-10 * (1.0 + norm_); }

 private:
  struct Cache;
  Mat a_;
  double norm_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

Generator load_generator(const std::vector<std::vector<cplx>>& rows);
const SpectralData& spectral_analysis(const Generator& g);

Mat semigroup_apply(const Generator& g, double t);
Mat resolvent(const Generator& g, cplx lambda);

// Riesz projection onto the stable eigenvalues, built from the eigenbasis.
Mat spectral_projection(const Generator& g);

// Resolvent solves through the cached Schur form: O(n^2) per vector.
class ResolventSampler {
 public:
  explicit ResolventSampler(const Generator& g);

  // Throws SpectrumHit if lambda is within tolerance of an eigenvalue.
  void check(cplx lambda) const;
  bool hits(cplx lambda) const;

  Vec apply(cplx lambda, const Vec& x) const;
  Mat apply(cplx lambda, const Mat& x) const;

  // Operates on vectors already expressed in the Schur basis (y = Q* x).
  void solve_in_place(cplx lambda, Vec& y) const;

  const Mat& Q() const { return schur_->Q; }
  const Mat& T() const { return schur_->T; }
  Eigen::Index dim() const { return schur_->T.rows(); }

 private:
  const SchurForm* schur_;
  Vec eig_;
  double tol_;
};

}  // namespace dichotomy
