#include "dichotomy/green.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"
#include "dichotomy/quadrature.hpp"

namespace dichotomy {

namespace {

constexpr int kOrder = 10;
constexpr int kMaxPanels = 20000;

double axis_distance(const Generator& g) {
  const Vec ev = g.schur_eigenvalues();
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) d = std::min(d, std::abs(ev(k).real()));
  return d;
}

// Column j of (lambda - T)^{-1} for upper triangular T.
void triangular_resolvent(const Mat& T, cplx lambda, Mat& out) {
  const Eigen::Index n = T.rows();
  out.setZero();
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = 1.0 / (lambda - T(j, j));
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      cplx acc = 0.0;
      for (Eigen::Index k = i + 1; k <= j; ++k) acc += T(i, k) * out(k, j);
      out(i, j) = acc / (lambda - T(i, i));
    }
  }
}

// sum_k w_k f(x_k) with node evaluations in parallel and an ordered sum.
Mat integrate(const QuadRule& q, Eigen::Index rows, Eigen::Index cols, const std::function<Mat(double)>& f) {
  const auto parts = kernels::parallel::map_vectors(static_cast<Eigen::Index>(q.nodes.size()), [&](Eigen::Index k) {
    Mat m = q.weights[k] * f(q.nodes[k]);
    return Vec(Eigen::Map<const Vec>(m.data(), m.size()));
  });
  Vec acc = Vec::Zero(rows * cols);
  for (const Vec& p : parts) acc += p;
  return Eigen::Map<const Mat>(acc.data(), rows, cols);
}

Mat regularized(const Generator& g, double t, const Mat& X, const QuadratureParams& params) {
  require_axis_free(g);
  const ResolventSampler rs(g);
  const Mat& A = g.matrix();
  const Mat AX = A * X;
  const Mat A2X = A * AX;
  const Eigen::Index rows = X.rows(), cols = X.cols();
  const double S = params.S;

  double width = std::min(0.5, std::max(axis_distance(g), 1e-3));
  if (t != 0.0) width = std::min(width, 1.0 / std::abs(t));
  width = std::max(width, (S - 1.0) / kMaxPanels);

  // |s| <= 1
  const QuadRule inner = composite_gauss(uniform_edges(-1.0, 1.0, width), kOrder);
  Mat result = integrate(inner, rows, cols, [&](double s) {
    return Mat(std::exp(I_unit * (s * t)) * rs.apply(cplx(0.0, s), X));
  }) / (2.0 * pi);

  result -= AX * (cos_over_s2_tail(t) / pi);

  std::vector<double> edges = uniform_edges(1.0, S, width);
  if (t == 0.0) {
    // u = 1/s maps [1, inf) onto (0, 1]; the integrand R(i/u) A^2 x is smooth at u = 0.
    std::vector<double> uedges;
    uedges.push_back(0.0);
    for (auto it = edges.rbegin(); it != edges.rend(); ++it) uedges.push_back(1.0 / *it);
    const QuadRule q = composite_gauss(uedges, kOrder);
    result -= integrate(q, rows, cols, [&](double u) {
      return Mat(rs.apply(cplx(0.0, 1.0 / u), A2X) + rs.apply(cplx(0.0, -1.0 / u), A2X));
    }) / (2.0 * pi);
  } else {
    const QuadRule q = composite_gauss(edges, kOrder);
    result -= integrate(q, rows, cols, [&](double s) {
      const cplx e = std::exp(I_unit * (s * t));
      return Mat((e * rs.apply(cplx(0.0, s), A2X) + std::conj(e) * rs.apply(cplx(0.0, -s), A2X)) / (s * s));
    }) / (2.0 * pi);
    // |s| > S, leading term R(is) ~ 1/(is).
    result -= A2X * (sin_over_s3_tail(S * t) / (pi * S * S));
  }

  const double sgn = t > 0.0 ? 0.5 : (t < 0.0 ? -0.5 : 0.0);
  result += X * (sgn - sine_integral(t) / pi);
  return result;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace

void require_axis_free(const Generator& g) {
  const Vec ev = g.schur_eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k).real()) <= g.eigen_tolerance()) {
      std::ostringstream os;
      os.precision(17);
      os << "the resolvent integrand R(is) is undefined: eigenvalue " << ev(k).real() << (ev(k).imag() < 0 ? "" : "+")
         << ev(k).imag() << "i lies on the imaginary axis";
      throw SpectrumHit(os.str());
    }
  }
}

CesaroResult green_apply(const Generator& g, double t, const Vec& x, const QuadratureParams& params) {
  return green_apply(g, std::vector<double>{t}, x, params).front();
}

std::vector<CesaroResult> green_apply(const Generator& g, const std::vector<double>& times, const Vec& x,
                                      const QuadratureParams& params) {
  if (x.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  require_axis_free(g);
  const ResolventSampler rs(g);
  Integrand f = [&](double s) { return rs.apply(cplx(0.0, s), x); };
  return cesaro_ladder(f, g.dim(), times, params, x.norm());
}

std::vector<MatrixCesaro> green_operator_cesaro(const Generator& g, const std::vector<double>& times,
                                                const QuadratureParams& params) {
  params.validate();
  require_axis_free(g);
  const SchurForm& sf = g.schur();
  const Eigen::Index n = g.dim();
  kernels::SampleFn fill = [&](double s, Mat& out) { triangular_resolvent(sf.T, cplx(0.0, s), out); };
  std::vector<std::vector<Mat>> ladder(times.size());
  for (const LadderStep& st : params.steps()) {
    auto vals = kernels::parallel::fejer_transform(fill, {st.N, st.h, n, n}, times);
    for (std::size_t k = 0; k < times.size(); ++k) ladder[k].push_back(sf.Q * vals[k] * sf.Q.adjoint());
  }
  std::vector<MatrixCesaro> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].value = ladder[k].back();
    if (ladder[k].size() < 2) {
      out[k].converged = true;
      continue;
    }
    out[k].residual = (ladder[k].back() - ladder[k][ladder[k].size() - 2]).norm();
    out[k].converged =
        std::isfinite(out[k].residual) && out[k].residual <= params.tolerance * (out[k].value.norm() + 1.0);
  }
  return out;
}

Vec green_regularized(const Generator& g, double t, const Vec& x, const QuadratureParams& params) {
  if (x.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  if (x.isZero(0.0)) return Vec::Zero(x.size());
  return regularized(g, t, Mat(x), params).col(0);
}

Mat green_regularized_operator(const Generator& g, double t, const QuadratureParams& params) {
  return regularized(g, t, Mat::Identity(g.dim(), g.dim()), params);
}

HyperbolicityReport splitting_projection(const Generator& g, const QuadratureParams& params) {
  params.validate();
  HyperbolicityReport rep;
  const Eigen::Index n = g.dim();
  const SpectralData& sd = g.spectral();
  rep.gap = sd.gap;
  rep.provenance = "cesaro";

  if (axis_distance(g) <= g.eigen_tolerance()) {
    rep.note = "spectrum-hit: an eigenvalue lies on the imaginary axis, the resolvent integral is undefined";
    return rep;
  }

  rep.projection = 0.5 * Mat::Identity(n, n) + green_regularized_operator(g, 0.0, params);
  const Mat& P = rep.projection;
  rep.idempotency = (P * P - P).norm();

  const Vec probe = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  const CesaroResult ces = green_apply(g, 0.0, probe, params);
  rep.cesaro_converged = ces.converged;
  rep.cesaro_residual = ces.residual;

  try {
    const Mat T1 = semigroup_apply(g, 1.0);
    rep.commutation = (P * T1 - T1 * P).norm();
  } catch (const OverflowError&) {
    rep.commutation = std::numeric_limits<double>::infinity();
  }

  if (sd.gap > 0.0 && sd.diagonalizable) {
    rep.discrepancy = (P - spectral_projection(g)).norm();
    rep.provenance = "both";
  }

  rep.is_hyperbolic = sd.gap > 1e-6 * (1.0 + g.norm()) && rep.cesaro_converged && rep.idempotency <= 1e-4;
  if (!rep.is_hyperbolic) {
    std::ostringstream os;
    if (!(sd.gap > 1e-6 * (1.0 + g.norm()))) os << "gap " << sd.gap << " below threshold; ";
    if (!rep.cesaro_converged) os << "Cesaro ladder did not converge; ";
    if (!(rep.idempotency <= 1e-4)) os << "projection not idempotent; ";
    rep.note = os.str();
  } else {
    rep.constants = dichotomy_constants(g, P, 10.0, 0.1);
  }
  return rep;
}

DichotomyConstants dichotomy_constants(const Generator& g, const Mat& P, double horizon, double step) {
  const Eigen::Index n = g.dim();
  if (P.rows() != n || P.cols() != n) throw DimensionError("projection size does not match the generator");
  if (!(horizon > 0.0) || !(step > 0.0) || step > horizon) throw InputError("need 0 < step <= horizon");
  const double pn = norm2(P);
  if ((P * P - P).norm() > 1e-6 * (1.0 + pn * pn)) throw InputError("dichotomy constants need an idempotent P");

  const Mat Id = Mat::Identity(n, n);
  const Mat Q = Id - P;
  const int steps = static_cast<int>(std::round(horizon / step));
  const double floor_norm = 1e-13;

  struct Side {
    bool active = false;
    std::vector<double> t, logn;
    LineFit fit;
  };
  auto trace = [&](const Mat& proj, double dir) {
    Side side;
    if (norm2(proj) <= 1e-10) return side;
    // Reapplying the projection each step keeps rounding from leaking into
    // the complementary, possibly growing, part.
    const Mat Tstep = semigroup_apply(g, dir * step);
    Mat X = proj;
    for (int k = 1; k <= steps; ++k) {
      X = proj * (Tstep * X);
      const double nk = norm2(X);
      if (nk < floor_norm) break;
      side.t.push_back(k * step);
      side.logn.push_back(std::log(nk));
    }
    if (side.t.size() >= 2) {
      side.active = true;
      side.fit = least_squares(side.t, side.logn);
    }
    return side;
  };

  const Side fwd = trace(P, 1.0);
  const Side bwd = trace(Q, -1.0);
  DichotomyConstants c;
  c.forward_rate = fwd.active ? -fwd.fit.slope : std::numeric_limits<double>::infinity();
  c.backward_rate = bwd.active ? -bwd.fit.slope : std::numeric_limits<double>::infinity();
  c.omega = std::min(c.forward_rate, c.backward_rate);
  if (!std::isfinite(c.omega)) c.omega = 1.0 / step;  // both sides vanish before the first step

  double logK = -std::numeric_limits<double>::infinity();
  for (const Side* s : {&fwd, &bwd}) {
    if (!s->active) continue;
    logK = std::max(logK, s->fit.intercept);
    for (std::size_t i = 0; i < s->t.size(); ++i) logK = std::max(logK, s->logn[i] + c.omega * s->t[i]);
  }
  double K = std::isfinite(logK) ? std::exp(logK) : 0.0;
  K = std::max({K, norm2(P), norm2(Q)});
  c.K = K;
  return c;
}

GreenResidualReport verify_green_identities(const Generator& g, const Mat& P, const std::vector<double>& times,
                                            const QuadratureParams& params, GreenMethod method) {
  const Eigen::Index n = g.dim();
  const Mat Id = Mat::Identity(n, n);
  std::vector<Mat> values(times.size());
  if (method == GreenMethod::cesaro) {
    const auto ces = green_operator_cesaro(g, times, params);
    for (std::size_t k = 0; k < times.size(); ++k) values[k] = ces[k].value;
  } else {
    for (std::size_t k = 0; k < times.size(); ++k) values[k] = green_regularized_operator(g, times[k], params);
  }
  GreenResidualReport rep;
  rep.times = times;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t == 0.0) throw InputError("Green identities are stated for t != 0");
    const Mat Tt = semigroup_apply(g, t);
    const double r = t > 0.0 ? (values[k] - Tt * P).norm() : (values[k] + Tt * (Id - P)).norm();
    const double tn = norm2(Tt);
    rep.residuals.push_back(r);
    rep.semigroup_norms.push_back(tn);
    if (t > 0.0) rep.max_forward = std::max(rep.max_forward, r);
    else rep.max_backward = std::max(rep.max_backward, r);
    rep.max_relative = std::max(rep.max_relative, r / tn);
  }
  return rep;
}

GreenSamples green_samples(const Generator& g, const std::vector<double>& times, const QuadratureParams& params) {
  GreenSamples gs;
  gs.times = times;
  std::sort(gs.times.begin(), gs.times.end());
  std::vector<double> at, logn;
  for (double t : gs.times) {
    if (t == 0.0) throw InputError("G(0) is not sampled; it is reported through the projection");
    gs.values.push_back(green_regularized_operator(g, t, params));
    const double nv = norm2(gs.values.back());
    if (nv > 1e-300) {
      at.push_back(std::abs(t));
      logn.push_back(std::log(nv));
    }
  }
  if (at.size() >= 2) {
    const LineFit f = least_squares(at, logn);
    gs.omega = -f.slope;
    double logK = f.intercept;
    for (std::size_t i = 0; i < at.size(); ++i) logK = std::max(logK, logn[i] + gs.omega * at[i]);
    gs.K = std::exp(logK);
  }
  return gs;
}

}  // namespace dichotomy
