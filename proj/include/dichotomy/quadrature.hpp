#pragma once

#include <vector>

namespace dichotomy {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1], nodes ascending.
const QuadRule& gauss_legendre(int n);

// Composite Gauss-Legendre over consecutive panels [edges[i], edges[i+1]].
QuadRule composite_gauss(const std::vector<double>& edges, int order);

// Uniform panels of width at most `width` covering [a, b].
std::vector<double> uniform_edges(double a, double b, double width);

// Si(x) = int_0^x sin(s)/s ds, absolute error below 1e-14 on the real line.
double sine_integral(double x);

// int_1^inf cos(s t)/s^2 ds = cos t - |t| (pi/2 - Si(|t|)).
double cos_over_s2_tail(double t);

// int_1^inf sin(s t)/s^3 ds.
double sin_over_s3_tail(double t);

}  // namespace dichotomy
