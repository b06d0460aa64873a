#include "dichotomy/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"
#include "dichotomy/torus.hpp"

namespace dichotomy {

namespace {

struct Rect {
  double re_min, re_max, im_min, im_max, spacing;
};

Rect resolve(const Generator& g, const ScanGrid& grid) {
  const double r = norm2(g.matrix()) + 1.0;
  Rect out{std::isnan(grid.re_min) ? -r : grid.re_min, std::isnan(grid.re_max) ? r : grid.re_max,
           std::isnan(grid.im_min) ? -r : grid.im_min, std::isnan(grid.im_max) ? r : grid.im_max, grid.spacing};
  if (!(out.spacing > 0.0) || !(out.re_max > out.re_min) || !(out.im_max > out.im_min))
    throw InputError("scan rectangle needs positive spacing and non-empty ranges");
  return out;
}

// |(z - A)^{-1}|, infinite when z - A is exactly singular.
double resolvent_norm(const Mat& A, cplx z) {
  const Mat M = z * Mat::Identity(A.rows(), A.cols()) - A;
  const double s = sigma_min(M);
  return s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity();
}

// Same norm from the Schur factor: |(z - T)^{-1}| is the root of the largest
// eigenvalue of X* X, X = (z - T)^{-1}, which is far cheaper than an SVD.
double resolvent_norm_schur(const Mat& T, cplx z) {
  const Eigen::Index n = T.rows();
  Mat M = -T;
  M.diagonal().array() += z;
  for (Eigen::Index i = 0; i < n; ++i)
    if (M(i, i) == cplx(0.0, 0.0)) return std::numeric_limits<double>::infinity();
  const Mat X = M.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  const Mat H = X.adjoint() * X;
  const double top = Eigen::SelfAdjointEigenSolver<Mat>(H, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return std::isfinite(top) ? std::sqrt(top) : std::numeric_limits<double>::infinity();
}

// Newton on log det(z - A). Returns false when the iteration stalls.
bool refine_pole(const Mat& A, cplx& z) {
  const Mat Id = Mat::Identity(A.rows(), A.cols());
  for (int it = 0; it < 200; ++it) {
    Eigen::PartialPivLU<Mat> lu(z * Id - A);
    const cplx tr = lu.inverse().trace();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag())) return true;
    if (std::abs(tr) == 0.0) return false;
    const cplx step = 1.0 / tr;
    z -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return true;
  }
  return true;
}

double weight(cplx lambda, double alpha, bool imaginary_only) {
  const double r = imaginary_only ? std::abs(lambda.imag()) : std::abs(lambda);
  return 1.0 + std::pow(r, alpha);
}

Mat power_or_identity(const Generator& g, const FractionalConfig& cfg) {
  if (cfg.alpha == 0.0) return Mat::Identity(g.dim(), g.dim());
  return fractional_power(g, cfg, PowerSign::negative);
}

}  // namespace

ScanResult s_alpha_scan(const Generator& g, double alpha, const ScanGrid& grid) {
  if (!(alpha >= 0.0)) throw InputError("alpha must be >= 0");
  const Rect rc = resolve(g, grid);
  const Mat& A = g.matrix();
  const Mat& T = g.schur().T;
  const int nr = static_cast<int>(std::floor((rc.re_max - rc.re_min) / rc.spacing + 1e-9)) + 1;
  const int ni = static_cast<int>(std::floor((rc.im_max - rc.im_min) / rc.spacing + 1e-9)) + 1;
  auto node = [&](int i, int j) { return cplx(rc.re_min + i * rc.spacing, rc.im_min + j * rc.spacing); };

  const auto norms = kernels::parallel::map_scalars(static_cast<Eigen::Index>(nr) * ni, [&](Eigen::Index idx) {
    return resolvent_norm_schur(T, node(static_cast<int>(idx / ni), static_cast<int>(idx % ni)));
  });
  auto at = [&](int i, int j) { return norms[static_cast<std::size_t>(i) * ni + j]; };

  ScanResult res;
  res.spacing = rc.spacing;
  res.nodes = nr * ni;
  std::vector<cplx> blow;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < ni; ++j) {
      const double v = at(i, j);
      if (std::isinf(v)) ++res.skipped;
      if (v / weight(node(i, j), alpha, true) > blow_up_threshold) blow.push_back(node(i, j));
      bool is_max = true;
      if (i > 0) is_max = is_max && v >= at(i - 1, j);
      if (i + 1 < nr) is_max = is_max && v >= at(i + 1, j);
      if (j > 0) is_max = is_max && v >= at(i, j - 1);
      if (j + 1 < ni) is_max = is_max && v >= at(i, j + 1);
      if (!is_max) continue;
      cplx z = node(i, j);
      if (!refine_pole(A, z)) continue;
      if (z.real() < rc.re_min || z.real() > rc.re_max || z.imag() < rc.im_min || z.imag() > rc.im_max) continue;
      if (resolvent_norm(A, z) / weight(z, alpha, true) <= blow_up_threshold) continue;
      const bool seen = std::any_of(res.poles.begin(), res.poles.end(),
                                    [&](cplx w) { return std::abs(w - z) <= 1e-6 * (1.0 + std::abs(z)); });
      if (!seen) res.poles.push_back(z);
    }
  }
  blow.insert(blow.end(), res.poles.begin(), res.poles.end());
  res.s_alpha = rc.re_min;
  for (cplx z : blow) res.s_alpha = std::max(res.s_alpha, z.real());
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ni; ++j)
      if (node(i, j).real() > res.s_alpha + rc.spacing)
        res.weighted_sup_right = std::max(res.weighted_sup_right, at(i, j) / weight(node(i, j), alpha, true));
  return res;
}

GrowthLemmaReport growth_lemma_check(const Generator& g, const FractionalConfig& cfg) {
  const Mat& A = g.matrix();
  const Mat P = power_or_identity(g, cfg);
  const Vec ev = g.schur_eigenvalues();
  std::vector<double> re;
  for (Eigen::Index k = 0; k < ev.size(); ++k) re.push_back(ev(k).real());
  std::sort(re.begin(), re.end());
  re.erase(std::unique(re.begin(), re.end(), [](double a, double b) { return std::abs(a - b) <= 1e-6; }), re.end());
  const double Y = norm2(A) + 2.0;

  // Interior sample of the strip a < Re < b: a regular grid up to |Im| = Y
  // plus a few far points up the strip.
  auto strip_points = [&](double a, double b) {
    std::vector<cplx> pts;
    const int J = 4;
    std::vector<double> ims;
    for (double y = -Y; y <= Y + 1e-12; y += 0.1) ims.push_back(y);
    for (double far : {10.0, 100.0, 1000.0}) {
      ims.push_back(far * Y);
      ims.push_back(-far * Y);
    }
    for (int j = 0; j < J; ++j) {
      const double x = a + (b - a) * (j + 0.5) / J;
      for (double y : ims) pts.push_back(cplx(x, y));
    }
    return pts;
  };

  auto evaluate = [&](StripCheck& sc, const std::vector<cplx>& pts) {
    const auto vals = kernels::parallel::map_scalars(2 * static_cast<Eigen::Index>(pts.size()), [&](Eigen::Index idx) {
      const cplx z = pts[idx / 2];
      const Mat M = z * Mat::Identity(A.rows(), A.cols()) - A;
      const double smin = sigma_min(M);
      if (smin == 0.0) return std::numeric_limits<double>::infinity();
      if (idx % 2 == 0) return 1.0 / smin / weight(z, cfg.alpha, false);
      return norm2(Mat(Eigen::PartialPivLU<Mat>(M).solve(P)));
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sc.weighted_sup = std::max(sc.weighted_sup, vals[2 * i]);
      sc.composed_sup = std::max(sc.composed_sup, vals[2 * i + 1]);
    }
    sc.weighted_bounded = sc.weighted_sup <= blow_up_threshold;
    sc.composed_bounded = sc.composed_sup <= blow_up_threshold;
  };

  GrowthLemmaReport rep;
  std::vector<std::pair<double, double>> free_strips;
  free_strips.push_back({re.back(), re.back() + 2.0});
  free_strips.push_back({re.front() - 2.0, re.front()});
  for (std::size_t i = 0; i + 1 < re.size(); ++i) free_strips.push_back({re[i], re[i + 1]});
  for (const auto& [a, b] : free_strips) {
    StripCheck sc{a, b};
    evaluate(sc, strip_points(a, b));
    rep.strips.push_back(sc);
  }
  for (double r : re) {
    StripCheck sc{r - 0.05, r + 0.05, true};
    std::vector<cplx> pts = strip_points(sc.a, sc.b);
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      if (std::abs(ev(k).real() - r) > 1e-6) continue;
      cplx z = ev(k) + cplx(1e-3, 1e-3);
      refine_pole(A, z);
      for (double eps : {1e-3, 1e-6, 1e-9, 1e-12})
        for (int q = 0; q < 4; ++q) pts.push_back(z + eps * (1.0 + std::abs(z)) * std::polar(1.0, pi * (q + 0.5) / 2.0));
    }
    evaluate(sc, pts);
    rep.strips.push_back(sc);
  }
  for (const auto& sc : rep.strips)
    if (sc.weighted_bounded != sc.composed_bounded) rep.verdicts_agree = false;
  return rep;
}

double omega_alpha_decay(const Generator& g, const FractionalConfig& cfg, double horizon, int samples) {
  if (!(horizon > 0.0) || samples < 2) throw InputError("decay fit needs a positive horizon and two samples");
  const Mat P = power_or_identity(g, cfg);
  // T_t P by repeated steps of T_dt, renormalized so long horizons do not overflow.
  const int steps = 2 * (samples - 1);
  const double dt = horizon / steps;
  const Mat E = semigroup_apply(g, dt);
  Mat M = P;
  double log_scale = 0.0;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int j = 1; j <= steps; ++j) {
    M = E * M;
    const double nrm = norm2(M);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("semigroup orbit vanished or overflowed");
    log_scale += std::log(nrm);
    M /= nrm;
    if (j < samples - 1) continue;
    const double t = dt * j;
    st += t;
    sy += log_scale;
    stt += t * t;
    sty += t * log_scale;
  }
  const double n = samples;
  return (n * sty - st * sy) / (n * stt - st * st);
}

MultiplierBisection omega_alpha_multiplier(const Generator& g, const FractionalConfig& cfg, double p,
                                           const BisectionConfig& bis, const ScanGrid& grid) {
  if (!(bis.tolerance > 0.0)) throw InputError("bisection tolerance must be positive");
  const Mat P = power_or_identity(g, cfg);
  MultiplierBisection out;
  out.lo = std::isnan(bis.lo) ? s_alpha_scan(g, cfg.alpha, grid).s_alpha + 1e-6 : bis.lo;
  out.hi = std::isnan(bis.hi) ? out.lo + 2.0 : bis.hi;
  if (!(out.hi > out.lo)) throw InputError("bisection range must satisfy lo < hi");
  auto is_multiplier = [&](double omega) {
    const double bound = estimate_symbol_norm(g, omega, P, p, bis.family).lower_bound;
    out.trace.push_back({omega, bound});
    ++out.evaluations;
    return bound <= bis.threshold;
  };
  if (is_multiplier(out.lo)) {
    out.omega = out.lo;
    return out;
  }
  if (!is_multiplier(out.hi)) {
    std::ostringstream os;
    os << "no transition in [" << out.lo << ", " << out.hi << "]: the sampled multiplier bound at the upper end is "
       << out.trace.back().second << " > " << bis.threshold;
    throw BracketingError(os.str());
  }
  double lo = out.lo, hi = out.hi;
  while (hi - lo > bis.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (is_multiplier(mid) ? hi : lo) = mid;
  }
  out.omega = hi;
  return out;
}

BoundsReport compute_bounds(const Generator& g, const BoundsConfig& cfg) {
  BoundsReport rep;
  rep.alpha = cfg.fractional.alpha;
  rep.s0 = g.spectral().abscissa;
  rep.scan = s_alpha_scan(g, cfg.fractional.alpha, cfg.grid);
  rep.s_alpha = rep.scan.s_alpha;
  rep.omega_alpha_decay = omega_alpha_decay(g, cfg.fractional, cfg.horizon);
  BisectionConfig bis = cfg.bisection;
  if (std::isnan(bis.lo)) bis.lo = rep.s_alpha + 1e-6;
  rep.bisection = omega_alpha_multiplier(g, cfg.fractional, cfg.p, bis, cfg.grid);
  rep.omega_alpha_multiplier = rep.bisection.omega;
  rep.growth = growth_lemma_check(g, cfg.fractional);
  return rep;
}

}  // namespace dichotomy
