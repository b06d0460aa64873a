#include "dichotomy/torus.hpp"

#include <algorithm>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"
#include "dichotomy/quadrature.hpp"

namespace dichotomy {

Vec TorusFunction::evaluate(double theta) const {
  Vec out = Vec::Zero(dim());
  for (Eigen::Index k = -M; k <= M; ++k) out += coeffs.col(k + M) * std::exp(I_unit * (static_cast<double>(k) * theta));
  return out;
}

Mat TorusFunction::sample(Eigen::Index m) const {
  Mat out(dim(), m);
  for (Eigen::Index j = 0; j < m; ++j) out.col(j) = evaluate(2.0 * pi * static_cast<double>(j) / static_cast<double>(m));
  return out;
}

void TorusFunction::validate() const {
  if (M < 0) throw InputError("torus truncation M must be non-negative");
  if (coeffs.cols() != 2 * M + 1) throw DimensionError("torus function needs 2M + 1 coefficient columns");
  if (coeffs.rows() < 1) throw DimensionError("torus function has no components");
  if (!coeffs.allFinite()) throw InputError("torus function has a non-finite coefficient");
}

TorusFunction TorusFunction::from_samples(const Mat& samples, Eigen::Index M) {
  const Eigen::Index m = samples.cols();
  if (m <= 2 * M) throw InputError("need more than 2M samples to recover 2M + 1 coefficients");
  TorusFunction f{M, Mat::Zero(samples.rows(), 2 * M + 1)};
  for (Eigen::Index k = -M; k <= M; ++k) {
    Vec acc = Vec::Zero(samples.rows());
    for (Eigen::Index j = 0; j < m; ++j)
      acc += samples.col(j) * std::exp(-I_unit * (2.0 * pi * static_cast<double>(k * j) / static_cast<double>(m)));
    f.coeffs.col(k + M) = acc / static_cast<double>(m);
  }
  return f;
}

void require_lattice_free(const Generator& g, Eigen::Index M) {
  const ResolventSampler rs(g);
  for (Eigen::Index k = -M; k <= M; ++k) {
    if (rs.hits(cplx(0.0, static_cast<double>(k)))) {
      std::ostringstream os;
      os << "lattice point " << k << "i is an eigenvalue; the discrete multiplier needs iZ in the resolvent set";
      throw SpectrumHit(os.str());
    }
  }
}

TorusFunction discrete_multiplier(const Generator& g, const TorusFunction& f) {
  f.validate();
  if (f.dim() != g.dim()) throw DimensionError("torus function dimension does not match the generator");
  require_lattice_free(g, f.M);
  const ResolventSampler rs(g);
  TorusFunction out{f.M, Mat(f.dim(), 2 * f.M + 1)};
  for (Eigen::Index k = -f.M; k <= f.M; ++k)
    out.coeffs.col(k + f.M) = rs.apply(cplx(0.0, static_cast<double>(k)), Vec(f.coeffs.col(k + f.M)));
  return out;
}

TorusFunction period_map(const Generator& g, const TorusFunction& f) {
  f.validate();
  if (f.dim() != g.dim()) throw DimensionError("torus function dimension does not match the generator");
  const Mat D = Mat::Identity(g.dim(), g.dim()) - semigroup_apply(g, 2.0 * pi);
  return TorusFunction{f.M, D * f.coeffs};
}

Mat semigroup_convolution_torus(const Generator& g, const TorusFunction& f, Eigen::Index m,
                                const TorusQuadrature& quad) {
  f.validate();
  if (f.dim() != g.dim()) throw DimensionError("torus function dimension does not match the generator");
  if (m < 1 || quad.panels < 1 || quad.order < 1) throw InputError("torus quadrature needs positive sizes");
  const auto rule = composite_gauss(uniform_edges(0.0, 2.0 * pi, 2.0 * pi / quad.panels), quad.order);
  std::vector<Mat> Ts(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) Ts[q] = rule.weights[q] * semigroup_apply(g, rule.nodes[q]);
  const auto cols = kernels::parallel::map_vectors(m, [&](Eigen::Index j) {
    const double theta = 2.0 * pi * static_cast<double>(j) / static_cast<double>(m);
    Vec acc = Vec::Zero(f.dim());
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += Ts[q] * f.evaluate(theta - rule.nodes[q]);
    return acc;
  });
  Mat out(f.dim(), m);
  for (Eigen::Index j = 0; j < m; ++j) out.col(j) = cols[j];
  return out;
}

double check_klt_identity(const Generator& g, const TorusFunction& f, Eigen::Index m, const TorusQuadrature& quad) {
  if (m <= 0) m = 4 * f.M + 8;
  const Mat K = semigroup_convolution_torus(g, f, m, quad);
  const Mat LT = discrete_multiplier(g, period_map(g, f)).sample(m);
  return (K - LT).colwise().norm().maxCoeff();
}

double torus_lp_norm(const TorusFunction& f, double p, Eigen::Index m) {
  if (!(p >= 1.0)) throw InputError("L_p norms need p >= 1");
  const Eigen::VectorXd nv = f.sample(m).colwise().norm().transpose();
  if (std::isinf(p)) return nv.maxCoeff();
  const double h = 2.0 * pi / static_cast<double>(m);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) acc += std::pow(nv(j), p);
  return std::pow(h * acc, 1.0 / p);
}

ResolventSumReport cesaro_resolvent_sum(const Generator& g, const Vec& x, Eigen::Index N_max, double tolerance) {
  if (x.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  if (N_max < 8) throw InputError("the Fejer ladder needs N_max >= 8");
  require_lattice_free(g, N_max);
  const ResolventSampler rs(g);
  const Mat& A = g.matrix();
  const Vec A2x = A * (A * x);

  // Pair sums y_k + y_{-k} of the raw and peeled terms.
  const auto pairs = kernels::parallel::map_vectors(N_max, [&](Eigen::Index i) {
    const double k = static_cast<double>(i + 1);
    Vec out(2 * x.size());
    out.head(x.size()) = rs.apply(cplx(0.0, k), x) + rs.apply(cplx(0.0, -k), x);
    out.tail(x.size()) = rs.apply(cplx(0.0, k), A2x) + rs.apply(cplx(0.0, -k), A2x);
    return out;
  });
  const Vec r0 = rs.apply(cplx(0.0, 0.0), x);

  ResolventSumReport rep;
  const std::vector<Eigen::Index> ladder{N_max / 8, N_max / 4, N_max / 2, N_max};
  for (Eigen::Index N : ladder) {
    Vec acc = Vec::Zero(x.size());
    for (Eigen::Index i = N - 1; i >= 0; --i)
      acc += (1.0 - static_cast<double>(i + 1) / static_cast<double>(N)) * pairs[i].head(x.size());
    rep.sum.ladder_values.push_back((r0 + acc) / (2.0 * pi));
  }
  rep.fejer_value = rep.sum.ladder_values.back();
  const Vec& last = rep.sum.ladder_values.back();
  rep.sum.residual = (last - rep.sum.ladder_values[ladder.size() - 2]).norm();
  rep.sum.converged = rep.sum.residual <= tolerance * (last.norm() + x.norm());

  Vec peeled = Vec::Zero(x.size());
  for (Eigen::Index i = N_max - 1; i >= 0; --i) {
    const double k = static_cast<double>(i + 1);
    peeled += pairs[i].tail(x.size()) / (k * k);
  }
  const double K = static_cast<double>(N_max);
  const Vec tail = A * A2x * (2.0 / (3.0 * K * K * K));
  rep.sum.value = (r0 - A * x * (pi * pi / 3.0) - peeled + tail) / (2.0 * pi);
  rep.peel_terms = N_max;

  // S commutes with T_{2pi}, so (I/2 + S)(I - T_{2pi}) x = (I - T_{2pi})(x/2 + S x).
  const Mat D = Mat::Identity(g.dim(), g.dim()) - semigroup_apply(g, 2.0 * pi);
  rep.identity_residual = (D * (0.5 * x + rep.sum.value) - x).norm();
  return rep;
}

namespace {

// Newton on log det(z - T): z <- z - 1 / tr((z - T)^{-1}).
bool newton_eigenvalue(const Mat& T, cplx& z) {
  const Eigen::Index n = T.rows();
  const Mat Id = Mat::Identity(n, n);
  for (int it = 0; it < 200; ++it) {
    Eigen::PartialPivLU<Mat> lu(z * Id - T);
    const Mat Rz = lu.inverse();
    const cplx tr = Rz.trace();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag())) return true;
    if (std::abs(tr) == 0.0) return false;
    const cplx step = 1.0 / tr;
    z -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return true;
  }
  return true;
}

}  // namespace

AnnulusReport annulus_scan(const Generator& g, double r_min, double r_max, int n_radii, int n_angles) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || n_radii < 1 || n_angles < 1)
    throw InputError("annulus scan needs 0 < r_min <= r_max and positive lattice sizes");
  const Mat T = semigroup_apply(g, 2.0 * pi);
  const Eigen::Index n = T.rows();
  const Mat Id = Mat::Identity(n, n);
  AnnulusReport rep;
  rep.table.resize(static_cast<std::size_t>(n_radii) * n_angles);
  const auto norms = kernels::parallel::map_scalars(static_cast<Eigen::Index>(rep.table.size()), [&](Eigen::Index idx) {
    const int i = static_cast<int>(idx / n_angles);
    const int j = static_cast<int>(idx % n_angles);
    const double r = n_radii == 1 ? r_min : r_min + (r_max - r_min) * i / (n_radii - 1);
    const double phi = 2.0 * pi * (j + 0.5) / n_angles;
    const double smin = sigma_min(Mat(std::polar(r, phi) * Id - T));
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / smin;
  });
  for (std::size_t idx = 0; idx < rep.table.size(); ++idx) {
    const int i = static_cast<int>(idx / n_angles);
    const int j = static_cast<int>(idx % n_angles);
    AnnulusPoint& pt = rep.table[idx];
    pt.radius = n_radii == 1 ? r_min : r_min + (r_max - r_min) * i / (n_radii - 1);
    pt.angle = 2.0 * pi * (j + 0.5) / n_angles;
    pt.z = std::polar(pt.radius, pt.angle);
    pt.norm = norms[idx];
    if (std::isinf(pt.norm)) {
      std::ostringstream os;
      os << "z = " << pt.z << " makes z - T_{2pi} exactly singular";
      throw SpectrumHit(os.str());
    }
    rep.sup_norm = std::max(rep.sup_norm, pt.norm);
    if (pt.norm > blow_up_threshold) rep.blow_up = true;
  }

  // Refine from lattice local maxima of |U_z| (periodic in angle).
  auto at = [&](int i, int j) { return rep.table[static_cast<std::size_t>(i) * n_angles + ((j + n_angles) % n_angles)].norm; };
  for (int i = 0; i < n_radii; ++i) {
    for (int j = 0; j < n_angles; ++j) {
      const double v = at(i, j);
      bool is_max = v >= at(i, j - 1) && v >= at(i, j + 1);
      if (i > 0) is_max = is_max && v >= at(i - 1, j);
      if (i + 1 < n_radii) is_max = is_max && v >= at(i + 1, j);
      if (!is_max) continue;
      cplx z = rep.table[static_cast<std::size_t>(i) * n_angles + j].z;
      if (!newton_eigenvalue(T, z)) continue;
      const double smin = sigma_min(Mat(z * Id - T));
      if (smin > 0.0 && 1.0 / smin <= blow_up_threshold) continue;
      const double rz = std::abs(z);
      if (rz < r_min || rz > r_max) continue;
      const bool seen = std::any_of(rep.blow_up_points.begin(), rep.blow_up_points.end(),
                                    [&](cplx w) { return std::abs(w - z) <= 1e-6 * (1.0 + rz); });
      if (!seen) rep.blow_up_points.push_back(z);
      rep.blow_up = true;
    }
  }
  return rep;
}

}  // namespace dichotomy
