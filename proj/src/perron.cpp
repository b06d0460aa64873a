#include "dichotomy/perron.hpp"

#include <algorithm>
#include <cmath>

#include "dichotomy/errors.hpp"
#include "dichotomy/kernels.hpp"
#include "dichotomy/multiplier.hpp"

namespace dichotomy {

std::vector<ResidualPair> interior_pairs(const GridFunction& grid, int count, const std::vector<double>& lags) {
  const Eigen::Index m = grid.size();
  const Eigen::Index lo = static_cast<Eigen::Index>(std::ceil(0.1 * static_cast<double>(m - 1)));
  const Eigen::Index hi = static_cast<Eigen::Index>(std::floor(0.9 * static_cast<double>(m - 1)));
  std::vector<ResidualPair> pairs;
  if (count < 1 || hi <= lo) return pairs;
  Eigen::Index max_lag = 0;
  for (double lag : lags) max_lag = std::max(max_lag, static_cast<Eigen::Index>(std::llround(lag / grid.h)));
  const Eigen::Index span = hi - lo - max_lag;
  if (span < 0) throw InputError("grid too short for the requested residual lags");
  for (int c = 0; c < count; ++c) {
    const Eigen::Index tau = lo + (count == 1 ? 0 : span * c / (count - 1));
    for (double lag : lags) {
      const Eigen::Index d = static_cast<Eigen::Index>(std::llround(lag / grid.h));
      pairs.push_back({tau, tau + d});
    }
  }
  return pairs;
}

MildSolution solve_mild(const Generator& gen, const GridFunction& g, const MildConfig& cfg) {
  g.validate();
  if (g.dim() != gen.dim()) throw DimensionError("forcing dimension does not match the generator");
  const HyperbolicityReport hyp = splitting_projection(gen, cfg.quadrature);
  if (!hyp.is_hyperbolic)
    throw NotHyperbolic("the mild equation has a unique bounded solution only when iR lies in the resolvent set; " +
                        hyp.note);
  MildSolution sol;
  sol.g = g;
  MultiplierConfig mc;
  mc.pad_decay_lengths = cfg.pad_decay_lengths;
  sol.u = apply_multiplier(gen, mc, g);
  sol.residuals = mild_residual_table(gen, sol.u, g, interior_pairs(g, cfg.pair_count, cfg.lags));
  for (const auto& e : sol.residuals) sol.max_residual = std::max(sol.max_residual, e.residual);
  return sol;
}

std::vector<ResidualEntry> mild_residual_table(const Generator& gen, const GridFunction& u, const GridFunction& g,
                                               const std::vector<ResidualPair>& pairs) {
  u.validate();
  g.validate();
  if (u.size() != g.size() || u.dim() != g.dim() || std::abs(u.h - g.h) > 1e-12 * g.h ||
      std::abs(u.start - g.start) > 1e-9 * g.h)
    throw InputError("u and g must be sampled on the same grid");
  if (u.dim() != gen.dim()) throw DimensionError("grid function dimension does not match the generator");
  Eigen::Index max_lag = 0;
  for (const auto& p : pairs) {
    if (p.tau < 0 || p.theta >= u.size() || p.theta < p.tau) throw InputError("residual pairs need tau <= theta on the grid");
    max_lag = std::max(max_lag, p.theta - p.tau);
  }
  std::vector<Mat> T(max_lag + 1);
  for (Eigen::Index k = 0; k <= max_lag; ++k) T[k] = semigroup_apply(gen, static_cast<double>(k) * g.h);

  const auto res = kernels::parallel::map_scalars(static_cast<Eigen::Index>(pairs.size()), [&](Eigen::Index i) {
    const auto& p = pairs[i];
    const Eigen::Index d = p.theta - p.tau;
    Vec r = u.samples.col(p.theta) - T[d] * u.samples.col(p.tau);
    if (d > 0) {
      Vec integral = 0.5 * (T[0] * g.samples.col(p.theta) + T[d] * g.samples.col(p.tau));
      for (Eigen::Index j = p.tau + 1; j < p.theta; ++j) integral += T[p.theta - j] * g.samples.col(j);
      r -= g.h * integral;
    }
    return r.norm();
  });
  std::vector<ResidualEntry> table;
  table.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    table.push_back({u.node(pairs[i].theta), u.node(pairs[i].tau), res[i]});
  return table;
}

double mild_residual(const Generator& gen, const GridFunction& u, const GridFunction& g,
                     const std::vector<ResidualPair>& pairs) {
  double worst = 0.0;
  for (const auto& e : mild_residual_table(gen, u, g, pairs)) worst = std::max(worst, e.residual);
  return worst;
}

}  // namespace dichotomy
