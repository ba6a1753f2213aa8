#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gmdiff/mixture.hpp"

namespace gmdiff {

/// Training configuration for the logit surrogate. The optimizer is
/// full-batch gradient descent with momentum and a geometric step decay
/// from learning_rate down to learning_rate * decay at the final step;
/// no adaptive per-parameter state, so runs are reproducible bit-for-bit.
struct MlpConfig {
  std::vector<int> hidden_widths{128, 128};
  int output_dim = 0;  // one logit per interior cell
  std::uint64_t seed = 1;
  int steps = 5000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double decay = 0.01;
  int grid_points = 2048;  // training grid on [-R, R]
};

/// Closed-form network size/error budget of the constructive ReLU
/// approximation; a reporting tool, not an architecture constraint.
struct SizeBudget {
  long n_param = 0;
  long l_param = 0;
  long width_bound = 0;
  long depth_bound = 0;
  double eta_bound = 0.0;
};

/// width <= m 17 s^{d+1} 3^d d (N+2) log2(8N), depth <= 18 s^2 (L+2) log2(4L) + 2d,
/// eta <= 85 (s+1)^d 8^s lambda_max N^{-2s/d} L^{-2s/d}.
SizeBudget size_calculator(long m, long s, long d, long n_param, long l_param, double lambda_max);

/// Budget N = L = ceil((5440 T c_lambda)^{1/4} n^{9/28}) that drives the
/// stepwise neural error below 1/(4 T n).
std::pair<long, long> example_budget(long n, long t_horizon, double c_lambda);

/// Fully connected ReLU network, scalar input, one output per interior cell.
struct LogitNet {
  std::vector<Eigen::MatrixXd> weights;  // layer l maps dims[l] -> dims[l+1]
  std::vector<Eigen::VectorXd> biases;

  std::vector<int> dims() const;
  long parameter_count() const;
  Eigen::VectorXd operator()(double z) const;
  /// Batch forward; column k is the output for input xs[k].
  Eigen::MatrixXd forward(const Eigen::RowVectorXd& xs) const;
};

/// Seeded init: weights uniform in [-a, a] with a = sqrt(6/(fan_in + fan_out)),
/// biases zero. dims = {1, hidden..., output}.
LogitNet init_logit_net(const std::vector<int>& dims, std::uint64_t seed);

/// Mean squared error over all grid points and outputs, plus parameter
/// gradients (same shapes as weights/biases).
double mlp_loss_and_grad(const LogitNet& net, const Eigen::RowVectorXd& xs,
                         const Eigen::MatrixXd& targets, std::vector<Eigen::MatrixXd>& grad_w,
                         std::vector<Eigen::VectorXd>& grad_b);

struct TrainedLogits {
  LogitNet net;
  LogitSource source;  // eval = net composed with clip_feature, eta measured
  double final_loss = 0.0;
};

/// Train the surrogate against the exact log-odds on the feature window and
/// certify it post hoc with measure_sup_gap. Throws on non-finite loss.
TrainedLogits train_logit_net(const ProblemInstance& inst, const PartitionSpec& spec,
                              const MlpConfig& cfg);

/// Wrap a network as a LogitSource (eval = net after clip_feature).
LogitSource logit_source_from_net(const LogitNet& net, const PartitionSpec& spec, double eta);

/// Sup gap max_j max_z |net_j(z) - Lambda_j(z)| over 4096 equispaced z in
/// (-R, R) plus both endpoints.
double measure_sup_gap(const LogitSource& source, const ProblemInstance& inst,
                       const PartitionSpec& spec, int grid_points = 4096);

/// Measured C^1 complexity of the exact log-odds on the window, in the
/// rescaled variable: max_j max(sup |Lambda_j|, 2R sup |Lambda_j'|).
double measured_lambda_max(const ProblemInstance& inst, const PartitionSpec& spec,
                           int grid_points = 2048);

/// max over the sweep of measured_lambda_max(n) / n^{2/7}; empirical stand-in
/// for the growth constant of the log-odds complexity.
double estimate_c_lambda(const ProblemInstance& inst, const std::vector<long>& n_sweep);

/// Checkpoint layout (text): line 1 "gmdiff-mlp 1", line 2 layer dims, line 3
/// seed tag, line 4 parameter count, then one parameter per line (%.17g),
/// per layer weights row-major followed by biases.
void save_checkpoint(const LogitNet& net, std::uint64_t seed, const std::string& path);
LogitNet load_checkpoint(const std::string& path, std::uint64_t* seed_out = nullptr);

}  // namespace gmdiff
