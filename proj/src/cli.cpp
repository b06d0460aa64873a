#include "dichotomy/cli.hpp"

#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "dichotomy/bounds.hpp"
#include "dichotomy/errors.hpp"
#include "dichotomy/io.hpp"
#include "dichotomy/perron.hpp"

namespace dichotomy::cli {

using io::json;

QuadratureParams RunConfig::quadrature() const {
  QuadratureParams q;
  q.S = trunc_S;
  q.h = grid_h;
  q.N = fejer_N;
  q.tolerance = tolerance;
  return q;
}

namespace {

const std::vector<std::string> kCommands{"analyze", "green", "project", "solve", "bounds", "torus", "scan"};

template <class T>
std::function<void(const json&)> setter(T& target, const std::string& key) {
  return [&target, key](const json& v) {
    try {
      target = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key \"" + key + "\" has the wrong type: " + e.what());
    }
  };
}

void apply_config(RunConfig& cfg, const std::string& path, const CLI::App& app) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " does not parse: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
  std::map<std::string, std::function<void(const json&)>> keys{
      {"command", setter(cfg.command, "command")}, {"input", setter(cfg.input, "input")},
      {"output", setter(cfg.output, "output")},    {"forcing", setter(cfg.forcing, "forcing")},
      {"torus", setter(cfg.torus, "torus")},       {"alpha", setter(cfg.alpha, "alpha")},
      {"rho", setter(cfg.rho, "rho")},             {"p", setter(cfg.p, "p")},
      {"trunc-S", setter(cfg.trunc_S, "trunc-S")}, {"grid-h", setter(cfg.grid_h, "grid-h")},
      {"fejer-N", setter(cfg.fejer_N, "fejer-N")}, {"tolerance", setter(cfg.tolerance, "tolerance")},
      {"seed", setter(cfg.seed, "seed")},          {"times", setter(cfg.times, "times")},
      {"horizon", setter(cfg.horizon, "horizon")}, {"r-min", setter(cfg.r_min, "r-min")},
      {"r-max", setter(cfg.r_max, "r-max")},       {"radii", setter(cfg.radii, "radii")},
      {"angles", setter(cfg.angles, "angles")},    {"N-max", setter(cfg.n_max, "N-max")},
      {"solve-h", setter(cfg.solve_h, "solve-h")},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown config key \"" + key + "\"");
    const bool flag_given = key == "command" ? !cfg.command.empty() : app.count("--" + key) > 0;
    if (!flag_given) it->second(value);
  }
}

json complex_list(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json::array({v(i).real(), v(i).imag()}));
  return out;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) out << text;
  else io::write_file_atomic(cfg.output, text);
}

void emit_summary(const RunConfig& cfg, const json& j, std::ostream& err) {
  if (cfg.output.empty()) err << io::canonical_json(j);
  else io::write_file_atomic(cfg.output + ".json", io::canonical_json(j));
}

Generator load(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InputError("--input is required: the generator A as matrix JSON");
  return Generator(io::parse_matrix_json(io::read_file(cfg.input)));
}

json hyperbolicity_json(const Generator& g, const HyperbolicityReport& rep) {
  const SpectralData& sd = g.spectral();
  json j{{"n", g.dim()},
         {"gap", rep.gap},
         {"abscissa", sd.abscissa},
         {"eigenvalues", complex_list(sd.eigenvalues)},
         {"diagonalizable", sd.diagonalizable},
         {"basis_condition", sd.basis_condition},
         {"is_hyperbolic", rep.is_hyperbolic},
         {"provenance", rep.provenance},
         {"discrepancy", rep.discrepancy},
         {"idempotency", rep.idempotency},
         {"commutation", rep.commutation},
         {"cesaro_converged", rep.cesaro_converged},
         {"cesaro_residual", rep.cesaro_residual},
         {"note", rep.note}};
  j["projection"] = rep.projection.size() ? io::matrix_to_json(rep.projection) : json(nullptr);
  if (rep.is_hyperbolic)
    j["constants"] = json{{"K", rep.constants.K},
                          {"omega", rep.constants.omega},
                          {"forward_rate", rep.constants.forward_rate},
                          {"backward_rate", rep.constants.backward_rate}};
  else
    j["constants"] = nullptr;
  return j;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const Generator g = load(cfg);
  const HyperbolicityReport rep = splitting_projection(g, cfg.quadrature());
  json j = hyperbolicity_json(g, rep);
  if (rep.is_hyperbolic) {
    double sup = 0.0;
    for (double t : {-4.0, -1.0, -0.25, 0.25, 1.0, 4.0}) sup = std::max(sup, norm2(green_regularized_operator(g, t, cfg.quadrature())));
    j["green_sup_sampled"] = sup;
  }
  emit(cfg, io::canonical_json(j), out);
  return exit_ok;
}

int cmd_green(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Generator g = load(cfg);
  std::vector<double> times = cfg.times;
  if (times.empty())
    for (int k = 1; k <= 16; ++k) {
      times.push_back(-0.25 * k);
      times.push_back(0.25 * k);
    }
  const QuadratureParams q = cfg.quadrature();
  const GreenSamples gs = green_samples(g, times, q);
  const Vec x = Vec::Ones(g.dim()) / std::sqrt(static_cast<double>(g.dim()));
  const auto ces = green_apply(g, gs.times, x, q);
  bool converged = true;
  double worst = 0.0;
  json failed = json::array();
  for (std::size_t k = 0; k < ces.size(); ++k) {
    worst = std::max(worst, ces[k].residual);
    if (!ces[k].converged) {
      converged = false;
      failed.push_back(gs.times[k]);
    }
  }
  emit(cfg, io::green_samples_csv(gs), out);
  emit_summary(cfg,
               json{{"K", gs.K},
                    {"omega", gs.omega},
                    {"cesaro_converged", converged},
                    {"cesaro_max_residual", worst},
                    {"nonconverged_times", failed}},
               err);
  if (!converged)
    throw NumericalError("the Cesaro ladder for the Green's function integral did not settle at " +
                         std::to_string(failed.size()) + " sampled times; G(t) is not certified");
  return exit_ok;
}

int cmd_project(const RunConfig& cfg, std::ostream& out) {
  const Generator g = load(cfg);
  const HyperbolicityReport rep = splitting_projection(g, cfg.quadrature());
  if (!rep.is_hyperbolic) throw NotHyperbolic("no splitting projection: the semigroup is not hyperbolic (" + rep.note + ")");
  emit(cfg,
       io::canonical_json(json{{"projection", io::matrix_to_json(rep.projection)},
                               {"discrepancy", rep.discrepancy},
                               {"idempotency", rep.idempotency},
                               {"commutation", rep.commutation},
                               {"provenance", rep.provenance}}),
       out);
  return exit_ok;
}

GridFunction default_forcing(Eigen::Index n, double h) {
  const Eigen::Index m = static_cast<Eigen::Index>(std::llround(20.0 / h)) + 1;
  GridFunction f{-10.0, h, Mat::Zero(n, m)};
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = f.node(j);
    if (std::abs(t) < 1.0) f.samples.col(j).setConstant(std::exp(1.0 - 1.0 / (1.0 - t * t)));
  }
  return f;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Generator g = load(cfg);
  const GridFunction f =
      cfg.forcing.empty() ? default_forcing(g.dim(), cfg.solve_h) : io::parse_grid_function_csv(io::read_file(cfg.forcing));
  MildConfig mc;
  mc.quadrature = cfg.quadrature();
  const MildSolution sol = solve_mild(g, f, mc);
  json table = json::array();
  for (const auto& e : sol.residuals) table.push_back(json{{"theta", e.theta}, {"tau", e.tau}, {"residual", e.residual}});
  emit(cfg, io::grid_function_csv(sol.u), out);
  emit_summary(cfg, json{{"max_residual", sol.max_residual}, {"g_sup", lp_norm(f, INFINITY)}, {"residuals", table}}, err);
  return exit_ok;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  const Generator g = load(cfg);
  BoundsConfig bc;
  bc.fractional.alpha = cfg.alpha;
  bc.p = cfg.p;
  bc.horizon = cfg.horizon;
  bc.bisection.family.seed = cfg.seed;
  const BoundsReport rep = compute_bounds(g, bc);
  json strips = json::array();
  for (const auto& s : rep.growth.strips)
    strips.push_back(json{{"a", s.a},
                          {"b", s.b},
                          {"meets_spectrum", s.meets_spectrum},
                          {"weighted_sup", s.weighted_sup},
                          {"composed_sup", s.composed_sup},
                          {"weighted_bounded", s.weighted_bounded},
                          {"composed_bounded", s.composed_bounded}});
  json trace = json::array();
  for (const auto& [w, b] : rep.bisection.trace) trace.push_back(json::array({w, b}));
  Vec poles(static_cast<Eigen::Index>(rep.scan.poles.size()));
  for (std::size_t i = 0; i < rep.scan.poles.size(); ++i) poles(static_cast<Eigen::Index>(i)) = rep.scan.poles[i];
  emit(cfg,
       io::canonical_json(json{{"alpha", rep.alpha},
                               {"p", cfg.p},
                               {"s0", rep.s0},
                               {"s_alpha", rep.s_alpha},
                               {"omega_alpha_decay", rep.omega_alpha_decay},
                               {"omega_alpha_multiplier", rep.omega_alpha_multiplier},
                               {"scan", json{{"spacing", rep.scan.spacing},
                                             {"nodes", rep.scan.nodes},
                                             {"skipped", rep.scan.skipped},
                                             {"poles", complex_list(poles)}}},
                               {"bisection", json{{"lo", rep.bisection.lo}, {"hi", rep.bisection.hi}, {"trace", trace}}},
                               {"growth_lemma", json{{"verdicts_agree", rep.growth.verdicts_agree}, {"strips", strips}}}}),
       out);
  return exit_ok;
}

int cmd_torus(const RunConfig& cfg, std::ostream& out) {
  const Generator g = load(cfg);
  const TorusFunction f = cfg.torus.empty() ? TorusFunction{0, Mat::Ones(g.dim(), 1)} : io::parse_torus_json(io::read_file(cfg.torus));
  if (f.dim() != g.dim()) throw DimensionError("torus function dimension does not match the generator");
  const double klt = check_klt_identity(g, f);
  const Vec x = Vec::Ones(g.dim());
  const ResolventSumReport sum = cesaro_resolvent_sum(g, x, cfg.n_max, cfg.tolerance);
  emit(cfg,
       io::canonical_json(json{{"klt_residual", klt},
                               {"f_sup", torus_lp_norm(f, INFINITY, 4 * f.M + 8)},
                               {"resolvent_sum", json{{"x", complex_list(x)},
                                                      {"value", complex_list(sum.sum.value)},
                                                      {"fejer_value", complex_list(sum.fejer_value)},
                                                      {"converged", sum.sum.converged},
                                                      {"ladder_residual", sum.sum.residual},
                                                      {"identity_residual", sum.identity_residual},
                                                      {"N_max", cfg.n_max}}}}),
       out);
  return exit_ok;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Generator g = load(cfg);
  const AnnulusReport rep = annulus_scan(g, cfg.r_min, cfg.r_max, cfg.radii, cfg.angles);
  Vec pts(static_cast<Eigen::Index>(rep.blow_up_points.size()));
  for (std::size_t i = 0; i < rep.blow_up_points.size(); ++i) pts(static_cast<Eigen::Index>(i)) = rep.blow_up_points[i];
  emit(cfg, io::annulus_csv(rep), out);
  emit_summary(cfg, json{{"sup_norm", rep.sup_norm}, {"blow_up", rep.blow_up}, {"blow_up_points", complex_list(pts)}}, err);
  return exit_ok;
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::contract: return exit_contract;
    case ErrorCategory::numerical: return exit_numerical;
    case ErrorCategory::not_hyperbolic: return exit_not_hyperbolic;
  }
  return exit_numerical;
}

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::contract: return "contract violation";
    case ErrorCategory::numerical: return "numerical failure";
    case ErrorCategory::not_hyperbolic: return "not hyperbolic";
  }
  return "error";
}

}  // namespace

RunConfig parse_arguments(int argc, const char* const* argv) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"Exponential dichotomy analysis of a matrix generator"};
  app.add_option("command", cfg.command, "analyze | green | project | solve | bounds | torus | scan")
      ->check(CLI::IsMember(kCommands));
  app.add_option("--input", cfg.input, "generator matrix JSON");
  app.add_option("--output", cfg.output, "output path (default stdout)");
  app.add_option("--forcing", cfg.forcing, "forcing GridFunction CSV for solve");
  app.add_option("--torus", cfg.torus, "TorusFunction JSON for torus");
  app.add_option("--alpha", cfg.alpha, "fractional exponent");
  app.add_option("--rho", cfg.rho, "vertical line shift");
  app.add_option("--p", cfg.p, "Lebesgue exponent");
  app.add_option("--trunc-S", cfg.trunc_S, "truncation of the peeled integrals");
  app.add_option("--grid-h", cfg.grid_h, "finest Fejer grid spacing");
  app.add_option("--fejer-N", cfg.fejer_N, "largest Fejer parameter");
  app.add_option("--seed", cfg.seed, "seed for probe families");
  app.add_option("--tolerance", cfg.tolerance, "Cesaro ladder tolerance");
  app.add_option("--times", cfg.times, "Green sample times")->delimiter(',');
  app.add_option("--horizon", cfg.horizon, "decay fit horizon");
  app.add_option("--r-min", cfg.r_min, "inner annulus radius");
  app.add_option("--r-max", cfg.r_max, "outer annulus radius");
  app.add_option("--radii", cfg.radii, "annulus radii count");
  app.add_option("--angles", cfg.angles, "annulus angle count");
  app.add_option("--N-max", cfg.n_max, "largest Fejer index of the resolvent sum");
  app.add_option("--solve-h", cfg.solve_h, "spacing of the default forcing grid");
  app.add_option("--config", config_path, "JSON config mirroring the flags");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("command line: ") + e.what());
  }
  if (!config_path.empty()) apply_config(cfg, config_path, app);
  if (cfg.command.empty()) throw ConfigError("a command is required: " + app.help());
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
    throw ConfigError("unknown command \"" + cfg.command + "\"");
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.quadrature().validate();
    if (cfg.command == "analyze") return cmd_analyze(cfg, out);
    if (cfg.command == "green") return cmd_green(cfg, out, err);
    if (cfg.command == "project") return cmd_project(cfg, out);
    if (cfg.command == "solve") return cmd_solve(cfg, out, err);
    if (cfg.command == "bounds") return cmd_bounds(cfg, out);
    if (cfg.command == "torus") return cmd_torus(cfg, out);
    if (cfg.command == "scan") return cmd_scan(cfg, out, err);
    throw ConfigError("unknown command \"" + cfg.command + "\"");
  } catch (const Error& e) {
    err << "error (" << category_name(e.category()) << "): " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error (numerical failure): " << e.what() << '\n';
    return exit_numerical;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_arguments(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << "usage: dichotomy <analyze|green|project|solve|bounds|torus|scan> --input A.json [options]\n"
           "options: --output --forcing --torus --alpha --rho --p --trunc-S --grid-h --fejer-N --seed\n"
           "         --tolerance --times --horizon --r-min --r-max --radii --angles --N-max --solve-h --config\n";
    return exit_ok;
  } catch (const Error& e) {
    err << "error (" << category_name(e.category()) << "): " << e.what() << '\n';
    return exit_code(e.category());
  }
  return run(cfg, out, err);
}

}  // namespace dichotomy::cli
