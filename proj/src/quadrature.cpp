#include "dichotomy/quadrature.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "dichotomy/errors.hpp"
#include "dichotomy/types.hpp"

namespace dichotomy {

namespace {

QuadRule build_gauss_legendre(int n) {
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw InputError("Gauss-Legendre order must be positive");
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

QuadRule composite_gauss(const std::vector<double>& edges, int order) {
  const QuadRule& base = gauss_legendre(order);
  QuadRule r;
  if (edges.size() < 2) return r;
  r.nodes.reserve((edges.size() - 1) * order);
  r.weights.reserve((edges.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int k = 0; k < order; ++k) {
      r.nodes.push_back(mid + half * base.nodes[k]);
      r.weights.push_back(half * base.weights[k]);
    }
  }
  return r;
}

std::vector<double> uniform_edges(double a, double b, double width) {
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
  std::vector<double> e(panels + 1);
  for (int i = 0; i <= panels; ++i) e[i] = a + (b - a) * i / panels;
  return e;
}

double sine_integral(double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  double si;
  if (ax <= 4.0) {
    // Alternating series; terms stay below 4^k/k! so cancellation is mild.
    double term = ax;
    double sum = ax;
    const double x2 = ax * ax;
    for (int k = 1; k < 60; ++k) {
      term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    si = sum;
  } else {
    // Continued fraction for E1(i x), modified Lentz.
    const double tiny = 1e-300;
    std::complex<double> b(1.0, ax);
    std::complex<double> c = 1.0 / tiny;
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 2; i < 1000; ++i) {
      const double a = -static_cast<double>((i - 1) * (i - 1));
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const std::complex<double> del = c * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
    }
    h *= std::complex<double>(std::cos(ax), -std::sin(ax));
    si = 0.5 * pi + h.imag();
  }
  return x < 0.0 ? -si : si;
}

double cos_over_s2_tail(double t) {
  const double at = std::abs(t);
  return std::cos(at) - at * (0.5 * pi - sine_integral(at));
}

double sin_over_s3_tail(double t) {
  return 0.5 * std::sin(t) + 0.5 * t * cos_over_s2_tail(t);
}

}  // namespace dichotomy
