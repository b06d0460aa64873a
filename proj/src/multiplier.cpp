#include "dichotomy/multiplier.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"

namespace dichotomy {

namespace {

constexpr Eigen::Index kMaxPaddedLength = Eigen::Index(1) << 23;

// Columns k of F replaced by R(i s_k + shift) B F_k.
void multiply_symbol(const ResolventSampler& rs, double shift, const Mat& B, GridFunction& F) {
  const Eigen::Index m = F.size();
  const auto cols = kernels::parallel::map_vectors(m, [&](Eigen::Index k) {
    const cplx lambda(shift, F.node(k));
    rs.check(lambda);
    Vec y = B.size() ? Vec(B * F.samples.col(k)) : Vec(F.samples.col(k));
    return rs.apply(lambda, y);
  });
  for (Eigen::Index k = 0; k < m; ++k) F.samples.col(k) = cols[k];
}

Vec unit_random(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

}  // namespace

double line_clearance(const Generator& g, double shift) {
  const Vec ev = g.schur_eigenvalues();
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double dk = std::abs(ev(k).real() - shift);
    if (dk <= g.eigen_tolerance()) {
      std::ostringstream os;
      os.precision(17);
      os << "symbol R(is + " << shift << ") is singular at s = " << ev(k).imag() << ": eigenvalue " << ev(k).real()
         << (ev(k).imag() < 0 ? "" : "+") << ev(k).imag() << "i lies on the line";
      throw SpectrumHit(os.str());
    }
    d = std::min(d, dk);
  }
  return d;
}

GridFunction apply_symbol(const Generator& g, double shift, const Mat& B, const GridFunction& f,
                          double pad_decay_lengths) {
  f.validate();
  if (f.dim() != g.dim()) throw DimensionError("grid function dimension does not match the generator");
  const double d = line_clearance(g, shift);
  const Eigen::Index m = f.size();
  Eigen::Index pad = 0;
  if (pad_decay_lengths > 0.0) {
    const double want = std::ceil(pad_decay_lengths / (d * f.h));
    pad = static_cast<Eigen::Index>(std::min<double>(want, static_cast<double>(kMaxPaddedLength - m)));
    pad = std::max<Eigen::Index>(pad, 0);
  }
  GridFunction padded{f.start, f.h, Mat::Zero(f.dim(), m + pad)};
  padded.samples.leftCols(m) = f.samples;
  GridFunction F = transform(padded, Direction::forward);
  const ResolventSampler rs(g);
  multiply_symbol(rs, shift, B, F);
  GridFunction u = transform(F, Direction::inverse, f.start);
  u.h = f.h;
  u.samples.conservativeResize(Eigen::NoChange, m);
  return u;
}

namespace {

// Reports the eigenvalue whose real part the band fails to avoid.
[[noreturn]] void band_violation(const Generator& g, double rho, double rho0, double gap) {
  const Vec ev = g.schur_eigenvalues();
  Eigen::Index worst = 0;
  for (Eigen::Index k = 1; k < ev.size(); ++k)
    if (std::abs(ev(k).real()) < std::abs(ev(worst).real())) worst = k;
  std::ostringstream os;
  os << "multiplier band |rho| = " << std::abs(rho) << " < rho0 = " << rho0 << " < gap = " << gap
     << " is violated; the line Re lambda = rho is not separated from the eigenvalue " << ev(worst);
  throw SpectrumHit(os.str());
}

}  // namespace

GridFunction apply_multiplier(const Generator& g, const MultiplierConfig& cfg, const GridFunction& f) {
  const double gap = g.spectral().gap;
  const double rho0 = std::isnan(cfg.rho0) ? 0.9 * gap : cfg.rho0;
  if (!(std::abs(cfg.rho) < rho0) || !(rho0 < gap) || gap == 0.0) band_violation(g, cfg.rho, rho0, gap);
  return apply_symbol(g, cfg.rho, Mat(), f, cfg.pad_decay_lengths);
}

NormEstimate estimate_symbol_norm(const Generator& g, double shift, const Mat& B, double p, const ProbeFamily& family) {
  if (!(p >= 1.0)) throw InputError("L_p norms need p >= 1");
  if (family.m < 16 || !(family.h > 0.0)) throw InputError("probe grid too small");
  line_clearance(g, shift);
  const Eigen::Index n = g.dim();
  const Eigen::Index m = family.m;
  const double h = family.h;
  const double L = static_cast<double>(m) * h;
  const double t0 = -static_cast<double>(m / 2) * h;

  std::vector<Vec> vecs;
  std::vector<std::string> vnames;
  const SpectralData& sd = g.spectral();
  for (Eigen::Index k = 0; k < n; ++k) {
    vecs.push_back(sd.diagonalizable ? Vec(sd.basis.col(k)) : Vec(g.schur().Q.col(k)));
    vnames.push_back((sd.diagonalizable ? "eigvec" : "schurvec") + std::to_string(k));
  }
  std::mt19937_64 rng(family.seed);
  for (int r = 0; r < family.random_vectors; ++r) {
    vecs.push_back(unit_random(n, rng));
    vnames.push_back("random" + std::to_string(r));
  }

  struct Profile {
    std::string name;
    Mat values;  // 1 x m
  };
  std::vector<Profile> profiles;
  auto add_profile = [&](const std::string& name, const std::function<cplx(double)>& fn) {
    Mat v(1, m);
    for (Eigen::Index j = 0; j < m; ++j) v(0, j) = fn(t0 + static_cast<double>(j) * h);
    profiles.push_back({name, v});
  };
  // Every profile is resolved by the grid: edges are smoothed over 2h, so the
  // discrete operator tracks the continuous one on the family.
  const double edge = 2.0 * h;
  if (family.narrow_profiles) {
    for (double w : {1.0, L / 64.0}) {
      add_profile("block" + std::to_string(w), [w, edge](double t) {
        return 0.5 * (std::erf((t + 0.5 * w) / (std::sqrt(2.0) * edge)) - std::erf((t - 0.5 * w) / (std::sqrt(2.0) * edge)));
      });
    }
    for (double sigma : {edge, std::max(1.0, edge)})
      add_profile("gauss" + std::to_string(sigma), [sigma](double t) { return std::exp(-0.5 * t * t / (sigma * sigma)); });
  }
  add_profile("gauss" + std::to_string(L / 32.0), [L](double t) { return std::exp(-0.5 * t * t / (L * L / 1024.0)); });
  const double sigma_wide = L / 16.0;
  add_profile("gauss_wide", [sigma_wide](double t) { return std::exp(-0.5 * t * t / (sigma_wide * sigma_wide)); });
  const std::size_t wide = profiles.size() - 1;

  std::vector<Mat> profile_hat;
  std::vector<double> profile_norm;
  for (const auto& pr : profiles) {
    GridFunction gf{t0, h, pr.values};
    profile_hat.push_back(transform(gf, Direction::forward).samples);
    profile_norm.push_back(lp_norm(gf, p));
  }

  const ResolventSampler rs(g);
  const double ds = 2.0 * pi / L;
  const double s0 = -static_cast<double>(m / 2) * ds;
  NormEstimate est;
  // Samples of s -> Q* R(i(s + b) + shift) B v on the dual grid, one matrix per
  // vector. The Schur basis is unitary, so column norms (and every L_p norm
  // below) are the same as for R(i(s + b) + shift) B v itself.
  const Mat& Q = rs.Q();
  auto symbol_on = [&](const std::vector<std::size_t>& pick, double b) {
    const Eigen::Index c = static_cast<Eigen::Index>(pick.size());
    Mat Y0(n, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      const Vec& v = vecs[pick[static_cast<std::size_t>(j)]];
      Y0.col(j) = Q.adjoint() * (B.size() ? Vec(B * v) : v);
    }
    const auto ys = kernels::parallel::map_vectors(m, [&](Eigen::Index k) {
      const cplx lambda(shift, b + s0 + static_cast<double>(k) * ds);
      rs.check(lambda);
      Vec out(n * c);
      for (Eigen::Index j = 0; j < c; ++j) {
        Vec y = Y0.col(j);
        rs.solve_in_place(lambda, y);
        out.segment(j * n, n) = y;
      }
      return out;
    });
    std::vector<Mat> Ys(pick.size(), Mat(n, m));
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index j = 0; j < c; ++j) Ys[static_cast<std::size_t>(j)].col(k) = ys[k].segment(j * n, n);
    return Ys;
  };
  auto probe = [&](const Mat& Y, std::size_t pidx, double vn, const std::string& name) {
    GridFunction F{s0, ds, Mat(n, m)};
    for (Eigen::Index k = 0; k < m; ++k) F.samples.col(k) = profile_hat[pidx](0, k) * Y.col(k);
    const GridFunction u = transform(F, Direction::inverse, t0);
    const double ratio = lp_norm(u, p) / (profile_norm[pidx] * vn);
    ++est.probes;
    if (ratio > est.lower_bound) {
      est.lower_bound = ratio;
      est.best_probe = name;
    }
  };

  std::vector<std::size_t> all(vecs.size());
  for (std::size_t v = 0; v < vecs.size(); ++v) all[v] = v;
  const std::vector<Mat> base = symbol_on(all, 0.0);
  for (std::size_t v = 0; v < vecs.size(); ++v)
    for (std::size_t pidx = 0; pidx < profiles.size(); ++pidx)
      probe(base[v], pidx, vecs[v].norm(), profiles[pidx].name + "x" + vnames[v]);

  // Gaussians modulated by e^{ibt}, b = Im lambda_k. Modulation commutes with
  // the multiplier up to the symbol shift s -> s + b and preserves L_p norms,
  // so these run at baseband on the shifted symbol and never alias. Each
  // frequency is paired with its own eigen (Schur) vector and the random ones.
  const Vec ev = g.schur_eigenvalues();
  std::vector<double> done;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double b = sd.diagonalizable ? sd.eigenvalues(k).imag() : ev(k).imag();
    if (b == 0.0) continue;
    std::vector<std::size_t> pick{static_cast<std::size_t>(k)};
    for (std::size_t r = n; r < vecs.size(); ++r) pick.push_back(r);
    const bool repeat = std::any_of(done.begin(), done.end(), [b](double d) { return std::abs(d - b) < 1e-12; });
    if (repeat) pick.resize(1);
    done.push_back(b);
    const std::vector<Mat> Ys = symbol_on(pick, b);
    for (std::size_t j = 0; j < pick.size(); ++j)
      probe(Ys[j], wide, vecs[pick[j]].norm(), "modgauss" + std::to_string(b) + "x" + vnames[pick[j]]);
  }
  return est;
}

NormEstimate estimate_multiplier_norm(const Generator& g, const MultiplierConfig& cfg, double p,
                                      const ProbeFamily& family) {
  return estimate_symbol_norm(g, cfg.rho, Mat(), p, family);
}

KvlReport kvl_functional(const Generator& g, double rho, const Vec& x, const Vec& xs, const GridFunction& phi) {
  phi.validate();
  if (phi.dim() != 1) throw DimensionError("Phi must be scalar valued");
  if (x.size() != g.dim() || xs.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  line_clearance(g, rho);
  const ResolventSampler rs(g);
  const Eigen::Index m = phi.size();
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double w = (j == 0 || j == m - 1) ? 0.5 * phi.h : phi.h;
    if (phi.samples(0, j) == 0.0) continue;
    acc += w * xs.dot(rs.apply(cplx(rho, phi.node(j)), x)) * phi.samples(0, j);
  }
  KvlReport rep;
  rep.value = acc;
  const GridFunction check = transform(phi, Direction::inverse);
  rep.phi_check_l1 = lp_norm(check, 1.0);
  const double den = x.norm() * xs.norm() * rep.phi_check_l1;
  rep.ratio = den > 0.0 ? std::abs(acc) / den : 0.0;
  return rep;
}

GridFunction kernel_samples(const Generator& g, double rho, const Vec& x, const Vec& xs, const KernelGrid& grid) {
  if (x.size() != g.dim() || xs.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  if (!(grid.h > 0.0)) throw InputError("kernel grid spacing must be positive");
  const double d = line_clearance(g, rho);
  double L = grid.length > 0.0 ? grid.length : std::max(40.0 / std::min(d, 1.0), 8.0 * grid.t_max);
  Eigen::Index m = static_cast<Eigen::Index>(std::ceil(L / grid.h));
  if (m % 2) ++m;
  const double h = grid.h;
  const double t0 = -static_cast<double>(m / 2) * h;
  const double ds = 2.0 * pi / (static_cast<double>(m) * h);
  const double s0 = -static_cast<double>(m / 2) * ds;

  const Mat Bm = g.matrix() - rho * Mat::Identity(g.dim(), g.dim());
  const cplx c1 = xs.dot(x);
  const cplx c2 = xs.dot(Bm * x) + c1;
  const ResolventSampler rs(g);
  const auto vals = kernels::parallel::map_scalars(2 * m, [&](Eigen::Index idx) {
    const Eigen::Index k = idx / 2;
    const double s = s0 + static_cast<double>(k) * ds;
    const cplx one = 1.0 + I_unit * s;
    const cplx q = xs.dot(rs.apply(cplx(rho, s), x)) - c1 / one - c2 / (one * one);
    return idx % 2 == 0 ? q.real() : q.imag();
  });
  GridFunction Fq{s0, ds, Mat(1, m)};
  for (Eigen::Index k = 0; k < m; ++k) Fq.samples(0, k) = cplx(vals[2 * k], vals[2 * k + 1]);
  GridFunction r = transform(Fq, Direction::inverse, t0);
  r.h = h;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = t0 + static_cast<double>(j) * h;
    if (t > 0.0) r.samples(0, j) += (c1 + c2 * t) * std::exp(-t);
    else if (t == 0.0) r.samples(0, j) += 0.5 * c1;
  }
  return r;
}

KernelResiduals kernel_identity_checks(const Generator& g, const Vec& x, const Vec& xs, double tau, double rho,
                                       const KernelGrid& grid) {
  if (!(tau > 0.0)) throw InputError("kernel identities need tau > 0");
  const double steps = tau / grid.h;
  const Eigen::Index shift = static_cast<Eigen::Index>(std::round(steps));
  if (std::abs(steps - static_cast<double>(shift)) > 1e-9 * std::max(1.0, steps))
    throw InputError("tau must be a multiple of the kernel grid spacing");
  // The shifted kernel equals e^{-rho t} times the unshifted one only inside the strip.
  const double gap = g.spectral().gap;
  if (!(std::abs(rho) < gap)) band_violation(g, rho, gap, gap);

  KernelGrid kg = grid;
  if (kg.length <= 0.0) {
    const double d = std::min(line_clearance(g, 0.0), line_clearance(g, rho));
    kg.length = std::max(40.0 / std::min(d, 1.0), 8.0 * grid.t_max) + tau;
  }
  const Mat Ttau = semigroup_apply(g, tau);
  const GridFunction r0 = kernel_samples(g, 0.0, x, xs, kg);
  const GridFunction r0_tx = kernel_samples(g, 0.0, Ttau * x, xs, kg);
  const GridFunction r0_tsx = kernel_samples(g, 0.0, x, Ttau.adjoint() * xs, kg);
  const GridFunction rr = kernel_samples(g, rho, x, xs, kg);

  const double h = kg.h;
  const Eigen::Index m = r0.size();
  KernelResiduals res;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = r0.node(j);
    if (std::abs(t) > grid.t_max) continue;
    res.res2 = std::max(res.res2, std::abs(r0_tx.samples(0, j) - r0_tsx.samples(0, j)));
    const bool near0 = std::abs(t) < 2.0 * h;
    const bool near_tau = std::abs(t - tau) < 2.0 * h;
    if (!near0) res.res3 = std::max(res.res3, std::abs(r0.samples(0, j) - std::exp(rho * t) * rr.samples(0, j)));
    if (near0 || near_tau || j - shift < 0) continue;
    cplx ind = 0.0;
    if (t >= 0.0 && t <= tau) ind = xs.dot(semigroup_apply(g, t) * x);
    const cplx lhs = r0_tx.samples(0, j - shift);
    res.res1 = std::max(res.res1, std::abs(lhs - r0.samples(0, j) + ind));
  }
  return res;
}

}  // namespace dichotomy
