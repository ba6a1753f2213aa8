#include "gmdiff/neural.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gmdiff/rng.hpp"

namespace gmdiff {

namespace {

long floor_guarded(double x) {
  return static_cast<long>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x))));
}

long ceil_guarded(double x) {
  return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

}  // namespace

SizeBudget size_calculator(long m, long s, long d, long n_param, long l_param,
                           double lambda_max) {
  if (m < 1 || s < 1 || d < 1 || n_param < 1 || l_param < 1 || lambda_max < 0.0)
    throw std::invalid_argument("size_calculator: invalid arguments");
  SizeBudget b;
  b.n_param = n_param;
  b.l_param = l_param;
  const double width = static_cast<double>(m) * 17.0 * std::pow(s, d + 1) * std::pow(3.0, d) *
                       static_cast<double>(d) * static_cast<double>(n_param + 2) *
                       std::log2(8.0 * static_cast<double>(n_param));
  const double depth =
      18.0 * static_cast<double>(s * s) * static_cast<double>(l_param + 2) *
          std::log2(4.0 * static_cast<double>(l_param)) +
      2.0 * static_cast<double>(d);
  b.width_bound = floor_guarded(width);
  b.depth_bound = floor_guarded(depth);
  const double exponent = -2.0 * static_cast<double>(s) / static_cast<double>(d);
  b.eta_bound = 85.0 * std::pow(s + 1.0, d) * std::pow(8.0, s) * lambda_max *
                std::pow(static_cast<double>(n_param), exponent) *
                std::pow(static_cast<double>(l_param), exponent);
  return b;
}

std::pair<long, long> example_budget(long n, long t_horizon, double c_lambda) {
  if (n < 1 || t_horizon < 1 || c_lambda <= 0.0)
    throw std::invalid_argument("example_budget: invalid arguments");
  const double v = std::pow(5440.0 * static_cast<double>(t_horizon) * c_lambda, 0.25) *
                   std::pow(static_cast<double>(n), 9.0 / 28.0);
  const long budget = ceil_guarded(v);
  return {budget, budget};
}

std::vector<int> LogitNet::dims() const {
  std::vector<int> d;
  d.push_back(static_cast<int>(weights.front().cols()));
  for (const auto& w : weights) d.push_back(static_cast<int>(w.rows()));
  return d;
}

long LogitNet::parameter_count() const {
  long count = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    count += weights[l].size() + biases[l].size();
  return count;
}

Eigen::VectorXd LogitNet::operator()(double z) const {
  Eigen::VectorXd a(1);
  a[0] = z;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = (weights[l] * a + biases[l]).eval();
    if (l + 1 < weights.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd LogitNet::forward(const Eigen::RowVectorXd& xs) const {
  Eigen::MatrixXd a = xs;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    a = ((weights[l] * a).colwise() + biases[l]).eval();
    if (l + 1 < weights.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

LogitNet init_logit_net(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("init_logit_net: need input and output dims");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("init_logit_net: all widths must be >= 1");
  LogitNet net;
  RngStream rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-a, a);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

double mlp_loss_and_grad(const LogitNet& net, const Eigen::RowVectorXd& xs,
                         const Eigen::MatrixXd& targets, std::vector<Eigen::MatrixXd>& grad_w,
                         std::vector<Eigen::VectorXd>& grad_b) {
  const std::size_t layer_count = net.weights.size();
  std::vector<Eigen::MatrixXd> activations(layer_count + 1);
  std::vector<Eigen::MatrixXd> preacts(layer_count);
  activations[0] = xs;
  for (std::size_t l = 0; l < layer_count; ++l) {
    preacts[l] = (net.weights[l] * activations[l]).colwise() + net.biases[l];
    activations[l + 1] =
        (l + 1 < layer_count) ? preacts[l].cwiseMax(0.0).eval() : preacts[l];
  }

  const double scale = 1.0 / static_cast<double>(targets.size());
  const Eigen::MatrixXd diff = activations[layer_count] - targets;
  const double loss = diff.squaredNorm() * scale;

  grad_w.resize(layer_count);
  grad_b.resize(layer_count);
  Eigen::MatrixXd delta = 2.0 * scale * diff;
  for (std::size_t l = layer_count; l-- > 0;) {
    grad_w[l] = delta * activations[l].transpose();
    grad_b[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (net.weights[l].transpose() * delta).eval();
      // ReLU subgradient: zero at nonpositive preactivations.
      delta = delta.cwiseProduct((preacts[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

LogitSource logit_source_from_net(const LogitNet& net, const PartitionSpec& spec, double eta) {
  LogitSource src;
  src.kind = LogitSource::Kind::neural;
  src.eta = eta;
  src.eval = [net, spec](double z) { return net(clip_feature(spec, z)); };
  return src;
}

double measure_sup_gap(const LogitSource& source, const ProblemInstance& inst,
                       const PartitionSpec& spec, int grid_points) {
  const double r = spec.window;
  double gap = 0.0;
  auto probe = [&](double z) {
    const Eigen::VectorXd diff = source.eval(z) - exact_log_odds(inst, spec, z);
    gap = std::max(gap, diff.cwiseAbs().maxCoeff());
  };
  for (int i = 0; i < grid_points; ++i) probe(-r + (i + 0.5) * 2.0 * r / grid_points);
  probe(-r);
  probe(r);
  return gap;
}

TrainedLogits train_logit_net(const ProblemInstance& inst, const PartitionSpec& spec,
                              const MlpConfig& cfg) {
  if (cfg.output_dim != spec.n)
    throw std::invalid_argument("train_logit_net: output_dim must equal partition n");
  std::vector<int> dims;
  dims.push_back(1);
  for (int w : cfg.hidden_widths) dims.push_back(w);
  dims.push_back(cfg.output_dim);

  const int grid = cfg.grid_points;
  Eigen::RowVectorXd xs(grid);
  for (int i = 0; i < grid; ++i)
    xs[i] = -spec.window + 2.0 * spec.window * i / (grid - 1);
  Eigen::MatrixXd targets(spec.n, grid);
  for (int i = 0; i < grid; ++i) targets.col(i) = exact_log_odds(inst, spec, xs[i]);

  TrainedLogits out;
  out.net = init_logit_net(dims, cfg.seed);

  std::vector<Eigen::MatrixXd> grad_w, vel_w;
  std::vector<Eigen::VectorXd> grad_b, vel_b;
  for (std::size_t l = 0; l < out.net.weights.size(); ++l) {
    vel_w.push_back(Eigen::MatrixXd::Zero(out.net.weights[l].rows(), out.net.weights[l].cols()));
    vel_b.push_back(Eigen::VectorXd::Zero(out.net.biases[l].size()));
  }

  double loss = 0.0;
  for (int step = 0; step < cfg.steps; ++step) {
    loss = mlp_loss_and_grad(out.net, xs, targets, grad_w, grad_b);
    if (!std::isfinite(loss)) throw std::runtime_error("train_logit_net: non-finite loss");
    const double frac = cfg.steps > 1 ? static_cast<double>(step) / (cfg.steps - 1) : 0.0;
    const double lr = cfg.learning_rate * std::pow(cfg.decay, frac);
    for (std::size_t l = 0; l < out.net.weights.size(); ++l) {
      vel_w[l] = cfg.momentum * vel_w[l] - lr * grad_w[l];
      vel_b[l] = cfg.momentum * vel_b[l] - lr * grad_b[l];
      out.net.weights[l] += vel_w[l];
      out.net.biases[l] += vel_b[l];
    }
  }
  out.final_loss = loss;

  LogitSource probe = logit_source_from_net(out.net, spec, 0.0);
  const double eta = measure_sup_gap(probe, inst, spec);
  out.source = logit_source_from_net(out.net, spec, eta);
  return out;
}

double measured_lambda_max(const ProblemInstance& inst, const PartitionSpec& spec,
                           int grid_points) {
  double sup_value = 0.0;
  double sup_deriv = 0.0;
  for (int i = 0; i <= grid_points; ++i) {
    const double z = -spec.window + 2.0 * spec.window * i / grid_points;
    sup_value = std::max(sup_value, exact_log_odds(inst, spec, z).cwiseAbs().maxCoeff());
    sup_deriv =
        std::max(sup_deriv, exact_log_odds_derivative(inst, spec, z).cwiseAbs().maxCoeff());
  }
  return std::max(sup_value, 2.0 * spec.window * sup_deriv);
}

double estimate_c_lambda(const ProblemInstance& inst, const std::vector<long>& n_sweep) {
  if (n_sweep.empty()) throw std::invalid_argument("estimate_c_lambda: empty sweep");
  double c = 0.0;
  for (long n : n_sweep) {
    const PartitionSpec spec = build_partition(static_cast<int>(n));
    c = std::max(c, measured_lambda_max(inst, spec) /
                        std::pow(static_cast<double>(n), 2.0 / 7.0));
  }
  return c;
}

void save_checkpoint(const LogitNet& net, std::uint64_t seed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "gmdiff-mlp 1\n";
  const std::vector<int> dims = net.dims();
  for (std::size_t i = 0; i < dims.size(); ++i) out << (i ? " " : "") << dims[i];
  out << "\n" << seed << "\n" << net.parameter_count() << "\n";
  char buf[40];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (int r = 0; r < net.weights[l].rows(); ++r)
      for (int c = 0; c < net.weights[l].cols(); ++c) emit(net.weights[l](r, c));
    for (int r = 0; r < net.biases[l].size(); ++r) emit(net.biases[l][r]);
  }
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

LogitNet load_checkpoint(const std::string& path, std::uint64_t* seed_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "gmdiff-mlp" || version != 1)
    throw std::runtime_error("load_checkpoint: bad header in " + path);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream dims_in(line);
  std::vector<int> dims;
  int d = 0;
  while (dims_in >> d) dims.push_back(d);
  std::uint64_t seed = 0;
  long count = 0;
  in >> seed >> count;
  if (seed_out) *seed_out = seed;

  LogitNet net;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    net.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    net.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  long read = 0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (int r = 0; r < net.weights[l].rows(); ++r)
      for (int c = 0; c < net.weights[l].cols(); ++c, ++read) in >> net.weights[l](r, c);
    for (int r = 0; r < net.biases[l].size(); ++r, ++read) in >> net.biases[l][r];
  }
  if (!in || read != count) throw std::runtime_error("load_checkpoint: truncated " + path);
  return net;
}

}  // namespace gmdiff
