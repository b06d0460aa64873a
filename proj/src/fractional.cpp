#include "dichotomy/fractional.hpp"

#include <algorithm>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "dichotomy/quadrature.hpp"

namespace dichotomy {

namespace {

constexpr int kGaussOrder = 10;

double resolved_omega(const Generator& g, const FractionalConfig& cfg) {
  return std::isnan(cfg.omega) ? default_shift(g) : cfg.omega;
}

void validate(const Generator& g, const FractionalConfig& cfg, double omega) {
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw ConfigError("fractional exponent alpha must be >= 0");
  if (!(cfg.theta > 0.0 && cfg.theta < pi / 6.0)) throw ConfigError("contour angle theta must lie in (0, pi/6)");
  if (cfg.nodes_per_ray < kGaussOrder) throw ConfigError("nodes per ray must be at least 10");
  if (cfg.ray_length < 0.0) throw ConfigError("ray length must be positive");
  const Vec ev = g.schur_eigenvalues();
  double s = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) s = std::max(s, ev(k).real());
  if (!(omega > s + 1.0)) {
    std::ostringstream os;
    os << "shift omega = " << omega << " must exceed s(A) + 1 = " << s + 1.0;
    throw ConfigError(os.str());
  }
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const cplx d = ev(k) - omega + 1.0;
    for (double sg : {1.0, -1.0}) {
      const cplx dir = std::polar(1.0, sg * cfg.theta);
      const double tproj = std::max(0.0, (d * std::conj(dir)).real());
      if (std::abs(d - tproj * dir) < 1e-8) {
        std::ostringstream os;
        os << "contour passes within 1e-8 of the eigenvalue " << ev(k) - omega << " of A - omega";
        throw ContourCollision(os.str());
      }
    }
  }
}

Mat contour_sum(const ResolventSampler& rs, double omega, double alpha, double theta, double L, int panels) {
  const Eigen::Index n = rs.dim();
  std::vector<double> edges(panels + 1);
  for (int j = 0; j <= panels; ++j) {
    const double u = static_cast<double>(j) / panels;
    edges[j] = L * u * u;
  }
  const QuadRule q = composite_gauss(edges, kGaussOrder);
  const cplx e_up = std::polar(1.0, theta);
  const cplx e_down = std::polar(1.0, -theta);
  const Mat id = Mat::Identity(n, n);
  Mat acc = Mat::Zero(n, n);
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double t = q.nodes[k];
    const cplx mu1 = -1.0 + t * e_up;
    const cplx mu2 = -1.0 + t * e_down;
    const cplx c1 = q.weights[k] * power_cut_positive(mu1, alpha) * e_up;
    const cplx c2 = q.weights[k] * power_cut_positive(mu2, alpha) * e_down;
    acc += c1 * rs.apply(mu1 + omega, id) - c2 * rs.apply(mu2 + omega, id);
  }
  return acc;
}

}  // namespace

double default_shift(const Generator& g) {
  const Vec ev = g.schur_eigenvalues();
  double s = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) s = std::max(s, ev(k).real());
  return std::max(s + 3.0, 3.0);
}

cplx power_cut_positive(cplx mu, double a) {
  double arg = std::arg(mu);
  if (arg <= 0.0) arg += 2.0 * pi;
  return std::exp(-a * cplx(std::log(std::abs(mu)), arg));
}

FractionalPower fractional_power_report(const Generator& g, const FractionalConfig& cfg, PowerSign sign,
                                        PowerMethod method) {
  const double omega = resolved_omega(g, cfg);
  validate(g, cfg, omega);
  const Eigen::Index n = g.dim();
  FractionalPower out;
  out.omega = omega;
  const Mat a_w = g.matrix() - omega * Mat::Identity(n, n);

  if (cfg.alpha == 0.0) {
    out.value = Mat::Identity(n, n);
    return out;
  }

  if (method == PowerMethod::oracle) {
    const SpectralData& sd = g.spectral();
    if (!sd.diagonalizable) {
      std::ostringstream os;
      os << "eigendecomposition route refuses a near-defective generator (kappa = " << sd.basis_condition << ")";
      throw NumericalError(os.str());
    }
    const double expo = sign == PowerSign::negative ? cfg.alpha : -cfg.alpha;
    Vec d(n);
    for (Eigen::Index k = 0; k < n; ++k) d(k) = power_cut_positive(sd.eigenvalues(k) - omega, expo);
    out.value = sd.basis * d.asDiagonal() * sd.basis.partialPivLu().inverse();
    return out;
  }

  const double L = cfg.ray_length > 0.0 ? cfg.ray_length : std::max(50.0, 10.0 * norm2(a_w));
  out.ray_length = L;
  const ResolventSampler rs(g);
  const int panels = cfg.nodes_per_ray / kGaussOrder;
  Mat body = contour_sum(rs, omega, cfg.alpha, cfg.theta, L, panels);
  Mat fine = contour_sum(rs, omega, cfg.alpha, cfg.theta, L, 2 * panels);

  // Beyond |mu| ~ L the Neumann series R(mu + omega) = sum_k A_w^k mu^{-k-1}
  // integrates term by term.
  const cplx mu_up = -1.0 + L * std::polar(1.0, cfg.theta);
  const cplx mu_down = -1.0 + L * std::polar(1.0, -cfg.theta);
  Mat tail = Mat::Zero(n, n);
  Mat power = Mat::Identity(n, n);
  double last = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double e = cfg.alpha + k;
    const cplx coef = (power_cut_positive(mu_up, e) - power_cut_positive(mu_down, e)) / e;
    const Mat term = coef * power;
    tail += term;
    last = term.norm();
    if (last < 1e-18 * std::max(1.0, tail.norm()) && k > 2) break;
    power = power * a_w;
  }
  out.tail_bound = last / (2.0 * pi);

  const cplx scale = 1.0 / (2.0 * pi * I_unit);
  Mat coarse_total = scale * (body + tail);
  Mat fine_total = scale * (fine + tail);
  out.refinement_change = (fine_total - coarse_total).norm() / std::max(1e-300, fine_total.norm());
  if (!(out.refinement_change <= cfg.refine_tolerance)) {
    std::ostringstream os;
    os << "fractional-power contour quadrature did not settle: relative change " << out.refinement_change
       << " under panel doubling exceeds " << cfg.refine_tolerance;
    throw AccuracyError(os.str());
  }
  out.value = fine_total;
  if (sign == PowerSign::positive) out.value = out.value.partialPivLu().inverse();
  return out;
}

Mat fractional_power(const Generator& g, const FractionalConfig& cfg, PowerSign sign, PowerMethod method) {
  return fractional_power_report(g, cfg, sign, method).value;
}

double alpha_norm(const Generator& g, const Vec& x, const FractionalConfig& cfg) {
  if (x.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  if (cfg.alpha == 0.0) return x.norm();
  return (fractional_power(g, cfg, PowerSign::positive) * x).norm();
}

}  // namespace dichotomy
