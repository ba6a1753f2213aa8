#pragma once

#include <functional>

#include "gmdiff/normal.hpp"
#include "gmdiff/quadrature.hpp"

namespace gmdiff {

/// Gaussian target N(c, 1) with context C ~ Unif[-M, M], noised by
/// time-homogeneous OU steps x -> rho x + sqrt(1 - rho^2) eps over a horizon
/// of T steps, initialized in reverse from nu = N(0, 1). Every forward and
/// reverse object of this problem has a closed form; this struct carries the
/// parameters and the operations below evaluate the closed forms.
struct ProblemInstance {
  double rho;
  double sigma_sq;  // OU noise variance, always 1 - rho^2
  double M;         // context half-width
  int T;            // diffusion horizon

  ProblemInstance(double rho_, double M_, int T_);

  double sigma() const { return std::sqrt(sigma_sq); }
};

/// Moments of the step-t joint feature law F_t of (Y, Z) = (X_{t-1}, Z_t).
/// e_z_4 is the uniform-in-context bound on E[Z_t^4].
struct FeatureLawMoments {
  double e_abs_y_minus_z;
  double e_sq_y_minus_z;
  double e_y_sq;
  double e_z_4;
};

/// Marginal and conditioning-variable oscillation witnesses a_{s-1}(x),
/// b_s(x, x_next) for the local log-variation assumption.
struct OscillationBounds {
  double a;
  double b;
};

/// One OU step: q_t(. | x_t) = N(rho x_t, sigma^2).
Gaussian1D forward_kernel(const ProblemInstance& inst, double x_t);

/// Forward marginal X_t | C = c ~ N(rho^t c, 1), 0 <= t <= T.
Gaussian1D forward_marginal(const ProblemInstance& inst, int t, double c);

/// Sufficient feature z = rho x_t + sigma^2 rho^{t-1} c, 1 <= t <= T.
double feature(const ProblemInstance& inst, int t, double c, double x_t);

/// True reverse kernel r_t*(. | c, x_t) = N(feature, sigma^2), 1 <= t <= T.
Gaussian1D true_reverse_kernel(const ProblemInstance& inst, int t, double c, double x_t);

/// Conditional feature law Z_t | C = c ~ N(rho^{t-1} c, rho^2).
Gaussian1D feature_law(const ProblemInstance& inst, int t, double c);

/// Pointwise terminal mismatch Comp(c) = rho^{2T} c^2 / 2.
double terminal_mismatch_at(const ProblemInstance& inst, double c);

/// Context-averaged terminal mismatch rho^{2T} M^2 / 6.
double terminal_mismatch(const ProblemInstance& inst);

/// Oscillation witnesses at step s (0 <= s <= T-1).
OscillationBounds oscillation_bounds(const ProblemInstance& inst, int s, double x, double x_next);

/// Closed form for E_Q[b_s] = rho/(2 sigma) sqrt(2/pi) + rho^2/(8 sigma^2).
double expected_witness_b(const ProblemInstance& inst);

/// Local log-variation of the feature-space reverse density over a unit cube:
/// (|y - z| + 1/4) / (2 sigma^2).
double log_variation_bound(const ProblemInstance& inst, double y, double z);

/// Its expectation under F_t: 1/(2 sigma) sqrt(2/pi) + 1/(8 sigma^2).
double expected_log_variation(const ProblemInstance& inst);

FeatureLawMoments feature_law_moments(const ProblemInstance& inst, int t);

/// Uniform-in-context bound on E[X_{t-1}^4]: (rho^{t-1} M)^4 + 6 (rho^{t-1} M)^2 + 3.
double fourth_moment_y_bound(const ProblemInstance& inst, int t);

/// (1/2M) \int_{-M}^{M} f(c) dc by 64-node Gauss-Legendre. Every expectation
/// over the context in this project goes through here.
double context_average(const ProblemInstance& inst, const std::function<double(double)>& f);

}  // namespace gmdiff
