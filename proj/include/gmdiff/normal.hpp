#pragma once

#include <cmath>
#include <stdexcept>

namespace gmdiff {

inline constexpr double kLog2Pi = 1.8378770664093454836;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrtPi = 0.56418958354775628695;

/// Standard normal density.
inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

/// Standard normal CDF \Phi.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Standard normal survival function \bar\Phi = 1 - \Phi.
inline double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

/// log \bar\Phi(x), finite for every finite x. Uses erfc up to 8 standard
/// deviations and the Mills-ratio continued fraction beyond, where erfc
/// alone would lose precision or underflow.
double log_norm_sf(double x);

/// log(\Phi(beta) - \Phi(alpha)) for alpha < beta, finite for all finite
/// inputs. Deep-tail intervals are handled in log space so that cell
/// probabilities arbitrarily far from the mean keep full relative accuracy.
double log_norm_interval(double alpha, double beta);

/// Scalar Gaussian with validated variance.
struct Gaussian1D {
  double mean = 0.0;
  double var = 1.0;

  Gaussian1D() = default;
  Gaussian1D(double mean_, double var_) : mean(mean_), var(var_) {
    if (!(var > 0.0)) throw std::invalid_argument("Gaussian1D: var must be > 0");
  }

  double sd() const { return std::sqrt(var); }
  double pdf(double x) const { return norm_pdf((x - mean) / sd()) / sd(); }
  double log_pdf(double x) const {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var)) - 0.5 * d * d / var;
  }
  double cdf(double x) const { return norm_cdf((x - mean) / sd()); }
  double sf(double x) const { return norm_sf((x - mean) / sd()); }

  /// KL(this || other) in nats.
  double kl_to(const Gaussian1D& other) const {
    const double d = mean - other.mean;
    return 0.5 * (std::log(other.var / var) + (var + d * d) / other.var - 1.0);
  }
};

}  // namespace gmdiff
