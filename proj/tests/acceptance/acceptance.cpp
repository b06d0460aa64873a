// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "dichotomy/bounds.hpp"
#include "dichotomy/errors.hpp"
#include "dichotomy/green.hpp"
#include "dichotomy/io.hpp"
#include "dichotomy/multiplier.hpp"
#include "dichotomy/perron.hpp"
#include "dichotomy/summation.hpp"
#include "dichotomy/torus.hpp"
#include "support/oracles.hpp"

using namespace dichotomy;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t corpus_seed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<Mat>& corpus() {
  static const std::vector<Mat> c = oracle::hyperbolic_corpus(20, corpus_seed);
  return c;
}

const std::vector<Mat>& normal_corpus() {
  static const std::vector<Mat> c = oracle::normal_corpus(6, corpus_seed + 1);
  return c;
}

double sup_norm(const GridFunction& f) { return f.samples.colwise().norm().maxCoeff(); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DICHOTOMY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const QuadratureParams q;

  criterion(1, "projection equivalence", [&] {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0, idem = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < corpus().size(); ++i) {
      const Mat& A = corpus()[i];
      const Generator g(A);
      const HyperbolicityReport rep = splitting_projection(g, q);
      const Mat& P = rep.projection;
      ok = ok && rep.is_hyperbolic;
      const double d = (P - oracle::projection(A)).norm();
      const double e = (P * P - P).norm() / (1.0 + P.squaredNorm());
      worst = std::max(worst, d);
      idem = std::max(idem, e);
      ok = ok && d <= 1e-3 && e <= 1e-6;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok = ok && secs <= 30.0;
    return Outcome{ok, fmt("max |P - P_eig|_F = %.2e", worst) + fmt(", max idempotency = %.2e", idem) +
                           fmt(", %.1f s", secs)};
  });

  criterion(2, "Green identities", [&] {
    double worst = 0.0;
    const std::vector<double> times{-2.0, -1.0, -0.25, 0.25, 1.0, 2.0};
    for (std::size_t i = 0; i < corpus().size(); ++i) {
      const Mat& A = corpus()[i];
      const Generator g(A);
      const Mat P = oracle::projection(A);
      const auto G = green_operator_cesaro(g, times, q);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const Mat T = oracle::expm(A, t);
        const Mat target = t > 0 ? Mat(T * P) : Mat(-T * (Mat::Identity(8, 8) - P));
        worst = std::max(worst, oracle::norm2(G[k].value - target) / oracle::norm2(T));
      }
    }
    return Outcome{worst <= 5e-3, fmt("max relative residual = %.2e", worst)};
  });

  criterion(3, "Laplace inversion", [&] {
    std::mt19937_64 rng(corpus_seed + 2);
    double w_pos = 0.0, w_zero = 0.0, w_neg = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Mat A = oracle::random_matrix(rng, 6, 2.0);
      const Vec x = oracle::random_unit(rng, 6) * std::exp(std::normal_distribution<double>()(rng));
      const double rho = oracle::abscissa(A) + 1.0;
      const auto F = laplace_inversion(Generator(A), x, {-1.0, 0.0, 0.5, 1.0}, rho, q);
      for (int k : {2, 3}) {
        const Vec Tx = oracle::expm(A, k == 2 ? 0.5 : 1.0) * x;
        w_pos = std::max(w_pos, (F[k].value - Tx).norm() / (1.0 + Tx.norm()));
      }
      w_zero = std::max(w_zero, (F[1].value - 0.5 * x).norm() / x.norm());
      w_neg = std::max(w_neg, F[0].value.norm() / x.norm());
    }
    return Outcome{w_pos <= 1e-3 && w_zero <= 5e-3 && w_neg <= 5e-3,
                   fmt("t > 0: %.2e", w_pos) + fmt(", t = 0: %.2e", w_zero) + fmt(", t = -1: %.2e", w_neg)};
  });

  criterion(4, "kernel identities", [&] {
    std::mt19937_64 rng(corpus_seed + 3);
    KernelResiduals worst;
    for (const Mat& A : normal_corpus()) {
      const double d = oracle::gap(A);
      for (double frac : {-0.9, -0.45, 0.0, 0.45, 0.9}) {
        const KernelResiduals r = kernel_identity_checks(Generator(A), oracle::random_unit(rng, A.rows()),
                                                         oracle::random_unit(rng, A.rows()), 0.5, frac * d);
        worst.res1 = std::max(worst.res1, r.res1);
        worst.res2 = std::max(worst.res2, r.res2);
        worst.res3 = std::max(worst.res3, r.res3);
      }
    }
    return Outcome{worst.res1 <= 1e-3 && worst.res2 <= 1e-3 && worst.res3 <= 1e-3,
                   fmt("res1 = %.2e", worst.res1) + fmt(", res2 = %.2e", worst.res2) + fmt(", res3 = %.2e", worst.res3)};
  });

  criterion(5, "multiplier equals convolution", [&] {
    std::mt19937_64 rng(corpus_seed + 4);
    std::uniform_real_distribution<double> centre(-3.0, 3.0), width(0.3, 2.0);
    double worst = 0.0;
    for (const Mat& A : corpus()) {
      const Generator g(A);
      const oracle::Eig e = oracle::eig(A);
      for (int probe = 0; probe < 10; ++probe) {
        const Vec v = oracle::random_unit(rng, 8);
        const double c = centre(rng), w = width(rng);
        GridFunction f{-10.0, 0.01, Mat(8, 2000)};
        for (Eigen::Index j = 0; j < f.size(); ++j) f.samples.col(j) = oracle::bump(f.node(j), c, w) * v;
        const GridFunction u = apply_multiplier(g, {}, f);
        double err = 0.0;
        for (Eigen::Index j = probe % 5; j < u.size(); j += 5)
          err = std::max(err, (u.samples.col(j) - oracle::bump_convolution(e, u.node(j), c, w, v)).norm());
        worst = std::max(worst, err / oracle::bump_mass(w));
      }
    }
    return Outcome{worst <= 5e-4, fmt("max |M_0 f - G*f|_inf / |f|_1 = %.2e", worst)};
  });

  criterion(6, "Perron solver", [&] {
    double worst = 0.0, detect = 0.0;
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = 2.0;
    std::vector<Mat> cases{D};
    for (int i = 0; i < 3; ++i) cases.push_back(corpus()[i]);
    std::mt19937_64 rng(corpus_seed + 5);
    for (const Mat& A : cases) {
      const Generator gen(A);
      const Vec v = A.rows() == 2 ? Vec(Vec::Ones(2)) : oracle::random_unit(rng, A.rows());
      GridFunction g{-10.0, 0.005, Mat(A.rows(), 4000)};
      for (Eigen::Index j = 0; j < g.size(); ++j) g.samples.col(j) = oracle::bump(g.node(j), 0.0, 1.0) * v;
      const MildSolution s = solve_mild(gen, g);
      worst = std::max(worst, s.max_residual / sup_norm(g));
    }
    {
      const Generator gen(D);
      GridFunction g{-10.0, 0.005, Mat(2, 4000)};
      for (Eigen::Index j = 0; j < g.size(); ++j) g.samples.col(j) = oracle::bump(g.node(j), 0.0, 1.0) * Vec::Ones(2);
      GridFunction bad = solve_mild(gen, g).u;
      for (Eigen::Index j = 0; j < bad.size(); ++j) {
        const double t = bad.node(j);
        bad.samples(1, j) += std::exp(2 * t) * std::exp(-t * t);
      }
      detect = mild_residual(gen, bad, g, interior_pairs(g, 16, {0.25, 0.5, 1.0}));
    }
    return Outcome{worst <= 5e-4 && detect >= 0.1,
                   fmt("max residual / |g|_inf = %.2e", worst) + fmt(", wrong branch residual = %.3g", detect)};
  });

  criterion(7, "discrete identities", [&] {
    std::mt19937_64 rng(corpus_seed + 6);
    double klt = 0.0, ident = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Mat& A = corpus()[i];
      const Generator g(A);
      TorusFunction f{8, Mat(8, 17)};
      for (Eigen::Index k = -8; k <= 8; ++k) f.coeffs.col(k + 8) = oracle::random_unit(rng, 8) / (1.0 + std::abs(k));
      klt = std::max(klt, check_klt_identity(g, f) / torus_lp_norm(f, 2.0, 64));
      const Vec x = oracle::random_unit(rng, 8);
      ident = std::max(ident, cesaro_resolvent_sum(g, x).identity_residual / x.norm());
    }
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = 2.0;
    ident = std::max(ident, cesaro_resolvent_sum(Generator(D), Vec::Ones(2)).identity_residual / std::sqrt(2.0));
    const ResolventSumReport s = cesaro_resolvent_sum(Generator(Mat::Constant(1, 1, -1.0)), Vec::Ones(1));
    const double scalar = std::abs(s.sum.value(0) - (1.0 / (1.0 - std::exp(-2 * oracle::pi)) - 0.5));
    return Outcome{klt <= 1e-5 && ident <= 1e-3 && scalar <= 1e-3 && s.sum.converged,
                   fmt("KLT / |f| = %.2e", klt) + fmt(", sum identity = %.2e", ident) + fmt(", scalar S error = %.2e", scalar)};
  });

  criterion(8, "fractional powers", [&] {
    double rel = 0.0, one = 0.0;
    bool agree = true;
    for (const Mat& A : corpus()) {
      const Generator g(A);
      for (double a : {0.25, 0.5, 0.75}) {
        FractionalConfig cfg;
        cfg.alpha = a;
        const Mat c = fractional_power(g, cfg, PowerSign::negative, PowerMethod::contour);
        const Mat o = fractional_power(g, cfg, PowerSign::negative, PowerMethod::oracle);
        rel = std::max(rel, (c - o).norm() / o.norm());
      }
      FractionalConfig cfg;
      cfg.alpha = 1.0;
      const FractionalPower fp = fractional_power_report(g, cfg, PowerSign::negative);
      const Mat expect = -(fp.omega * Mat::Identity(8, 8) - A).inverse();
      one = std::max(one, (fp.value - expect).norm() / expect.norm());
      cfg.alpha = 0.5;
      agree = agree && growth_lemma_check(g, cfg).verdicts_agree;
    }
    return Outcome{rel <= 1e-6 && one <= 1e-8 && agree,
                   fmt("contour vs eigen = %.2e", rel) + fmt(", alpha = 1 vs -R = %.2e", one) +
                       (agree ? ", growth verdicts agree" : ", growth verdicts disagree")};
  });

  criterion(9, "bounds collapse", [&] {
    const auto start = std::chrono::steady_clock::now();
    double mult = 0.0, decay = 0.0, order = 0.0;
    for (const Mat& A : corpus()) {
      const Generator g(A);
      const double s = oracle::abscissa(A);
      for (double a : {0.0, 0.5, 1.0}) {
        FractionalConfig cfg;
        cfg.alpha = a;
        const ScanResult scan = s_alpha_scan(g, a);
        BisectionConfig bis;
        bis.lo = scan.s_alpha + 1e-6;
        const double wm = omega_alpha_multiplier(g, cfg, 1.0, bis).omega;
        const double wd = omega_alpha_decay(g, cfg);
        mult = std::max(mult, std::abs(wm - s));
        decay = std::max(decay, std::abs(wd - s));
        order = std::max({order, scan.s_alpha - wm, scan.s_alpha - wd});
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return Outcome{mult <= 0.1 && decay <= 0.1 && order <= 0.05 && secs <= 180.0,
                   fmt("max |w_mult - s| = %.3f", mult) + fmt(", max |w_decay - s| = %.3f", decay) +
                       fmt(", max (s_alpha - w) = %.3f", order) + fmt(", %.1f s", secs)};
  });

  criterion(10, "negative controls", [&] {
    const fs::path dir = fs::temp_directory_path() / ("dichotomy_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;
    int idx = 0;
    for (const Mat& A : oracle::axis_corpus(corpus_seed + 7)) {
      const fs::path in = dir / ("axis" + std::to_string(idx) + ".json");
      io::write_file_atomic(in.string(), io::canonical_json(io::matrix_to_json(A)));
      const fs::path rep = dir / ("analyze" + std::to_string(idx) + ".json");
      const int a = run_cli("analyze --input " + in.string() + " --output " + rep.string());
      const bool verdict = a == 0 && !io::json::parse(slurp(rep)).at("is_hyperbolic").get<bool>();
      const int gcode = run_cli("green --input " + in.string() + " --output " + (dir / "green.csv").string());
      const int scode = run_cli("solve --input " + in.string() + " --output " + (dir / "solve.csv").string());
      const fs::path scan = dir / ("scan" + std::to_string(idx) + ".csv");
      const int ccode = run_cli("scan --input " + in.string() + " --output " + scan.string());
      const bool blow = ccode == 0 && io::json::parse(slurp(scan.string() + ".json")).at("blow_up").get<bool>();
      const bool row = verdict && (gcode == 2 || gcode == 3) && scode == 4 && blow;
      ok = ok && row;
      detail += (idx ? "; " : "") + std::string("#") + std::to_string(idx) + " analyze " + (verdict ? "ok" : "bad") +
                " green=" + std::to_string(gcode) + " solve=" + std::to_string(scode) + (blow ? " blow-up" : " no blow-up");
      ++idx;
    }
    fs::remove_all(dir);
    return Outcome{ok, detail};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
