#pragma once

#include <Eigen/Dense>
#include <functional>

#include "gmdiff/normal.hpp"

namespace gmdiff {

/// Nodes and weights of a Gaussian quadrature rule.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre rule on [-1, 1] (weight 1, weights sum to 2).
QuadratureRule gauss_legendre(int n);

/// Gauss-Hermite rule for weight exp(-x^2) on R (weights sum to sqrt(pi)).
QuadratureRule gauss_hermite(int n);

/// \int_a^b f(x) dx with a Gauss-Legendre rule.
template <class F>
double integrate(const QuadratureRule& gl, double a, double b, F&& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < gl.size(); ++i) acc += gl.weights[i] * f(mid + half * gl.nodes[i]);
  return half * acc;
}

/// E[f(X)] for X ~ N(mean, sd^2) with a Gauss-Hermite rule.
template <class F>
double gauss_expect(const QuadratureRule& gh, double mean, double sd, F&& f) {
  double acc = 0.0;
  for (int i = 0; i < gh.size(); ++i) acc += gh.weights[i] * f(mean + kSqrt2 * sd * gh.nodes[i]);
  return kInvSqrtPi * acc;
}

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

}  // namespace gmdiff
