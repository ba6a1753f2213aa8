#include "gmdiff/normal.hpp"

namespace gmdiff {

namespace {

// log(1 - e^u) for u < 0.
double log1mexp(double u) {
  static const double kLn2 = 0.69314718055994530942;
  if (u > -kLn2) return std::log(-std::expm1(u));
  return std::log1p(-std::exp(u));
}

// Mills ratio \bar\Phi(x) / \phi(x) via the Laplace continued fraction
// 1/(x + 1/(x + 2/(x + 3/(...)))), evaluated bottom-up. Converges to
// machine precision for x >= 8 well before 64 levels.
double mills_ratio_cf(double x) {
  double r = x;
  for (int k = 64; k >= 1; --k) r = x + static_cast<double>(k) / r;
  return 1.0 / r;
}

// log(\bar\Phi(a) - \bar\Phi(b)) for 8 <= a < b.
double log_sf_diff(double a, double b) {
  const double la = log_norm_sf(a);
  const double lb = log_norm_sf(b);
  return la + log1mexp(lb - la);
}

}  // namespace

double log_norm_sf(double x) {
  if (x < -8.0) return std::log1p(-norm_sf(-x));
  if (x <= 8.0) return std::log(0.5 * std::erfc(x / kSqrt2));
  return -0.5 * x * x - 0.5 * kLog2Pi + std::log(mills_ratio_cf(x));
}

double log_norm_interval(double alpha, double beta) {
  if (!(alpha < beta)) throw std::invalid_argument("log_norm_interval: need alpha < beta");
  // Canonicalize to midpoint <= 0 so mirrored intervals produce identical bits.
  if (alpha + beta > 0.0) return log_norm_interval(-beta, -alpha);
  if (beta <= -8.0) return log_sf_diff(-beta, -alpha);
  // Moderate range. Pick the erf/erfc combination that avoids cancellation
  // against the dominant term; the straddling case adds opposite-sign erfs.
  double p;
  if (beta <= 0.0) {
    p = 0.5 * (std::erfc(-beta / kSqrt2) - std::erfc(-alpha / kSqrt2));
  } else {
    p = 0.5 * (std::erf(beta / kSqrt2) - std::erf(alpha / kSqrt2));
  }
  return std::log(p);
}

}  // namespace gmdiff
