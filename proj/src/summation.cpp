#include "dichotomy/summation.hpp"

#include <cmath>
#include <sstream>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"

namespace dichotomy {

std::vector<LadderStep> QuadratureParams::steps() const {
  if (!ladder.empty()) return ladder;
  return {{N / 8, 4 * h, N / 8}, {N / 4, 2 * h, N / 4}, {N / 2, 2 * h, N / 2}, {N, h, N}};
}

void QuadratureParams::validate() const {
  if (!(S > 1.0)) throw ConfigError("truncation S must exceed 1");
  if (!(tolerance > 0.0)) throw ConfigError("ladder tolerance must be positive");
  const auto st = steps();
  if (st.empty()) throw ConfigError("Cesaro ladder is empty");
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (!(st[i].h > 0.0) || !(st[i].N > 0.0)) throw ConfigError("ladder steps need h > 0 and N > 0");
    if (st[i].N > st[i].S * (1.0 + 1e-12)) throw ConfigError("ladder step has N > S");
    if (i > 0 && (st[i].N < st[i - 1].N || st[i].S < st[i - 1].S))
      throw ConfigError("ladder must be non-decreasing in S and N");
    kernels::fejer_points({st[i].N, st[i].h, 1, 1});
  }
}

Vec fejer_weighted_integral(const std::vector<double>& s, const std::vector<Vec>& f, double t, double N, double h) {
  if (s.size() != f.size()) throw InputError("sample abscissae and values differ in length");
  if (s.size() < 2) throw InputError("Fejer integral needs at least two samples");
  const Eigen::Index m = kernels::fejer_points({N, h, 1, 1});
  if (static_cast<Eigen::Index>(s.size()) != m + 1) {
    std::ostringstream os;
    os << "expected " << m + 1 << " samples covering [-N, N], got " << s.size();
    throw InputError(os.str());
  }
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double expect = -N + static_cast<double>(j) * h;
    if (std::abs(s[j] - expect) > 1e-9 * std::max(1.0, N)) throw InputError("Fejer samples are not on a uniform grid");
  }
  Vec acc = Vec::Zero(f.front().size());
  for (std::size_t j = 1; j + 1 < s.size(); ++j) {
    const double w = h * (1.0 - std::abs(s[j]) / N);
    acc += (w * std::exp(I_unit * (s[j] * t))) * f[j];
  }
  return acc / (2.0 * pi);
}

std::vector<CesaroResult> cesaro_ladder(const Integrand& f, Eigen::Index dim, const std::vector<double>& times,
                                        const QuadratureParams& params, double scale) {
  params.validate();
  std::vector<CesaroResult> out(times.size());
  kernels::SampleFn fill = [&](double s, Mat& m) { m.col(0) = f(s); };
  for (const LadderStep& st : params.steps()) {
    auto vals = kernels::parallel::fejer_transform(fill, {st.N, st.h, dim, 1}, times);
    for (std::size_t k = 0; k < times.size(); ++k) out[k].ladder_values.push_back(vals[k].col(0));
  }
  for (auto& r : out) {
    r.value = r.ladder_values.back();
    if (r.ladder_values.size() < 2) {
      r.residual = 0.0;
      r.converged = true;
      continue;
    }
    r.residual = (r.ladder_values.back() - r.ladder_values[r.ladder_values.size() - 2]).norm();
    r.converged = std::isfinite(r.residual) && r.residual <= params.tolerance * (r.value.norm() + scale);
  }
  return out;
}

CesaroResult cesaro_ladder(const Integrand& f, Eigen::Index dim, double t, const QuadratureParams& params,
                           double scale) {
  return cesaro_ladder(f, dim, std::vector<double>{t}, params, scale).front();
}

std::vector<CesaroResult> laplace_inversion(const Generator& g, const Vec& x, const std::vector<double>& times,
                                            double rho, const QuadratureParams& params) {
  if (x.size() != g.dim()) throw DimensionError("vector length does not match the generator");
  const Vec ev = g.schur_eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k).real() - rho) <= g.eigen_tolerance()) {
      std::ostringstream os;
      os << "inversion line Re lambda = " << rho << " meets the eigenvalue " << ev(k);
      throw SpectrumHit(os.str());
    }
    if (ev(k).real() > rho) {
      std::ostringstream os;
      os << "inversion line Re lambda = " << rho << " must lie right of the spectrum (eigenvalue " << ev(k) << ")";
      throw InputError(os.str());
    }
  }
  ResolventSampler rs(g);
  Integrand f = [&](double s) { return rs.apply(cplx(rho, s), x); };
  auto res = cesaro_ladder(f, g.dim(), times, params, x.norm());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double e = std::exp(rho * times[k]);
    res[k].value *= e;
    res[k].residual *= e;
    for (auto& v : res[k].ladder_values) v *= e;
  }
  return res;
}

CesaroResult laplace_inversion(const Generator& g, const Vec& x, double t, double rho, const QuadratureParams& params) {
  return laplace_inversion(g, x, std::vector<double>{t}, rho, params).front();
}

}  // namespace dichotomy
