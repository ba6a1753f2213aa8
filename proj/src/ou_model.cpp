#include "gmdiff/ou_model.hpp"

#include <stdexcept>

namespace gmdiff {

ProblemInstance::ProblemInstance(double rho_, double M_, int T_)
    : rho(rho_), sigma_sq(1.0 - rho_ * rho_), M(M_), T(T_) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("ProblemInstance: rho must be in (0, 1)");
  if (!(M > 0.0)) throw std::invalid_argument("ProblemInstance: M must be > 0");
  if (T < 1) throw std::invalid_argument("ProblemInstance: T must be >= 1");
}

Gaussian1D forward_kernel(const ProblemInstance& inst, double x_t) {
  return {inst.rho * x_t, inst.sigma_sq};
}

Gaussian1D forward_marginal(const ProblemInstance& inst, int t, double c) {
  if (t < 0 || t > inst.T) throw std::invalid_argument("forward_marginal: t out of range");
  return {std::pow(inst.rho, t) * c, 1.0};
}

double feature(const ProblemInstance& inst, int t, double c, double x_t) {
  return inst.rho * x_t + inst.sigma_sq * std::pow(inst.rho, t - 1) * c;
}

Gaussian1D true_reverse_kernel(const ProblemInstance& inst, int t, double c, double x_t) {
  if (t < 1 || t > inst.T) throw std::invalid_argument("true_reverse_kernel: t out of range");
  return {feature(inst, t, c, x_t), inst.sigma_sq};
}

Gaussian1D feature_law(const ProblemInstance& inst, int t, double c) {
  if (t < 1 || t > inst.T) throw std::invalid_argument("feature_law: t out of range");
  return {std::pow(inst.rho, t - 1) * c, inst.rho * inst.rho};
}

double terminal_mismatch_at(const ProblemInstance& inst, double c) {
  return 0.5 * std::pow(inst.rho, 2 * inst.T) * c * c;
}

double terminal_mismatch(const ProblemInstance& inst) {
  return std::pow(inst.rho, 2 * inst.T) * inst.M * inst.M / 6.0;
}

OscillationBounds oscillation_bounds(const ProblemInstance& inst, int s, double x, double x_next) {
  if (s < 0 || s > inst.T - 1) throw std::invalid_argument("oscillation_bounds: s out of range");
  OscillationBounds w;
  w.a = 0.5 * (std::abs(x) + std::pow(inst.rho, s) * inst.M + 0.25);
  w.b = (inst.rho * std::abs(x_next - inst.rho * x) + 0.25 * inst.rho * inst.rho) /
        (2.0 * inst.sigma_sq);
  return w;
}

double expected_witness_b(const ProblemInstance& inst) {
  return inst.rho / (2.0 * inst.sigma()) * std::sqrt(2.0 / M_PI) +
         inst.rho * inst.rho / (8.0 * inst.sigma_sq);
}

double log_variation_bound(const ProblemInstance& inst, double y, double z) {
  return (std::abs(y - z) + 0.25) / (2.0 * inst.sigma_sq);
}

double expected_log_variation(const ProblemInstance& inst) {
  return 1.0 / (2.0 * inst.sigma()) * std::sqrt(2.0 / M_PI) + 1.0 / (8.0 * inst.sigma_sq);
}

FeatureLawMoments feature_law_moments(const ProblemInstance& inst, int t) {
  if (t < 1 || t > inst.T) throw std::invalid_argument("feature_law_moments: t out of range");
  FeatureLawMoments m;
  const double s = inst.sigma();
  const double mu = std::pow(inst.rho, t - 1) * inst.M;  // largest conditional mean
  const double r2 = inst.rho * inst.rho;
  m.e_abs_y_minus_z = s * std::sqrt(2.0 / M_PI);
  m.e_sq_y_minus_z = inst.sigma_sq;
  m.e_y_sq = std::pow(inst.rho, 2 * (t - 1)) * inst.M * inst.M / 3.0 + 1.0;
  m.e_z_4 = mu * mu * mu * mu + 6.0 * r2 * mu * mu + 3.0 * r2 * r2;
  return m;
}

double fourth_moment_y_bound(const ProblemInstance& inst, int t) {
  const double mu = std::pow(inst.rho, t - 1) * inst.M;
  return mu * mu * mu * mu + 6.0 * mu * mu + 3.0;
}

double context_average(const ProblemInstance& inst, const std::function<double(double)>& f) {
  static const QuadratureRule gl = gauss_legendre(64);
  double acc = 0.0;
  for (int i = 0; i < gl.size(); ++i) acc += gl.weights[i] * f(inst.M * gl.nodes[i]);
  return 0.5 * acc;  // GL weights sum to 2; uniform density is 1/(2M)
}

}  // namespace gmdiff
