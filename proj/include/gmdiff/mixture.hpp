#pragma once

#include <Eigen/Dense>
#include <functional>

#include "gmdiff/ou_model.hpp"
#include "gmdiff/rng.hpp"

namespace gmdiff {

/// Step partition of the response axis at resolution n: interior cells
/// [-L + (j-1)h, -L + jh), j = 1..n, tiling [-L, L) exactly, plus the
/// remainder cell, with the scale schedule
///   h = n^{-6/7}, delta = n^{-2/7}, sigma_interior = n^{-4/7},
///   L = n^{1/7}/2, R = n^{1/7}/4, sigma_tail = sqrt(2/pi).
struct PartitionSpec {
  int n = 0;
  double h = 0.0;
  double half_width = 0.0;      // L, fine-region half-width
  double delta = 0.0;           // oscillation scale
  double sigma_interior = 0.0;  // interior component scale
  double sigma_tail = 0.0;      // remainder component scale, sqrt(2/pi)
  double window = 0.0;          // R, feature-window half-width
  Eigen::VectorXd centers;      // n cell midpoints

  double cell_left(int j) const { return -half_width + (j - 1) * h; }   // j in 1..n
  double cell_right(int j) const { return -half_width + j * h; }
};

PartitionSpec build_partition(int n);

/// A logit family z -> (u_1, ..., u_n): either the exact log-odds or an
/// approximation with measured sup-error eta on the feature window.
struct LogitSource {
  enum class Kind { exact, neural };
  Kind kind = Kind::exact;
  double eta = 0.0;
  std::function<Eigen::VectorXd(double)> eval;
};

/// Exact log-odds source (eta = 0).
LogitSource exact_logit_source(const ProblemInstance& inst, const PartitionSpec& spec);

/// Exact log-odds evaluated at the window-clipped feature. This is the
/// reference family the stability certificate compares a neural source
/// against: both factor through the same clipping, so the measured sup-gap
/// on the window bounds the logit gap at every feature value.
LogitSource clipped_exact_logit_source(const ProblemInstance& inst, const PartitionSpec& spec);

/// Cell probabilities (G_0, G_1, ..., G_n) of the reverse density N(z, sigma^2);
/// index 0 is the remainder cell. Entries are positive and sum to 1.
Eigen::VectorXd cell_probabilities(const ProblemInstance& inst, const PartitionSpec& spec,
                                   double z);

/// Exact log-odds Lambda_j(z) = log G_j(z) - log G_0(z), finite for every
/// real z (computed fully in log space).
Eigen::VectorXd exact_log_odds(const ProblemInstance& inst, const PartitionSpec& spec, double z);

/// d/dz Lambda_j(z), used to measure the C^1 log-odds complexity.
Eigen::VectorXd exact_log_odds_derivative(const ProblemInstance& inst, const PartitionSpec& spec,
                                          double z);

/// Baseline softmax: weights (a_0, a_1, ..., a_m) with a_j = e^{u_j} / (1 + sum_k e^{u_k})
/// and baseline a_0 = 1 / (1 + sum_k e^{u_k}), max-shift stabilized.
Eigen::VectorXd baseline_softmax(const Eigen::VectorXd& logits);

/// Log of the baseline-softmax weights, same layout.
Eigen::VectorXd baseline_log_softmax(const Eigen::VectorXd& logits);

/// Window clip Pi(z) = max(-R, min(z, R)).
double clip_feature(const PartitionSpec& spec, double z);

/// Resolution threshold n_* = max{6, ceil((8 rho^{t-1} M)^7)} above which the
/// window and boundary tail envelopes are valid.
long resolution_threshold(const ProblemInstance& inst, int t);

struct WindowTail {
  double exact;  // P(|Z_t| > R_n)
  double bound;  // 2 exp(-n^{2/7} / (128 rho^2))
  long n_star;
};

/// Feature-window tail mass, exactly (context quadrature over Gaussian CDFs)
/// and its exponential envelope; exact <= bound whenever n >= n_star.
WindowTail window_tail_probability(const ProblemInstance& inst, int t, const PartitionSpec& spec);

/// Baseline-softmax Gaussian mixture over the partition: n interior
/// components N(mu_j, sigma_interior^2) plus the tail component
/// N(0, sigma_tail^2), weighted by the softmax of the logit source.
struct MixtureDensity {
  PartitionSpec spec;
  LogitSource logits;

  /// Set for exact-logit mixtures: the component index can then be drawn by
  /// locating the cell of one N(cell_draw_mean(z), cell_draw_sd) variate,
  /// whose cell law is exactly softmax(exact log-odds) = (G_0, ..., G_n).
  /// That keeps sampling O(1) per draw instead of O(n).
  std::function<double(double)> cell_draw_mean;
  double cell_draw_sd = 0.0;

  Eigen::VectorXd weights(double z) const;      // n+1, index 0 = tail
  Eigen::VectorXd log_weights(double z) const;  // n+1, index 0 = tail
  double log_density(double z, double y) const;
  double density(double z, double y) const { return std::exp(log_density(z, y)); }
  double cdf(double z, double x) const;

  /// Draw one response: component index from the softmax weights, then a
  /// Gaussian variate from that component.
  double sample(double z, RngStream& rng) const;
};

MixtureDensity m0_mixture(const ProblemInstance& inst, const PartitionSpec& spec);
MixtureDensity clipped_m0_mixture(const ProblemInstance& inst, const PartitionSpec& spec);
MixtureDensity neural_mixture(const PartitionSpec& spec, LogitSource net);

/// Mixture log-density with the weights bound to one feature value; reuses
/// an internal buffer so repeated response evaluations stay allocation-free.
class MixtureLogDensity {
 public:
  MixtureLogDensity(const MixtureDensity& mix, double z);
  double operator()(double y) const;

 private:
  Eigen::ArrayXd centers_;
  Eigen::ArrayXd interior_base_;  // log w_j - log(sigma_int sqrt(2 pi))
  double tail_base_;
  double inv_two_var_int_;
  double inv_two_var_tail_;
  mutable Eigen::ArrayXd buf_;
};

}  // namespace gmdiff
