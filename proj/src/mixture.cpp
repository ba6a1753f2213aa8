#include "gmdiff/mixture.hpp"

#include <stdexcept>

namespace gmdiff {

namespace {

double logsumexp2(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log G_0(z): remainder-cell probability of N(z, sigma^2) outside [-L, L).
double log_remainder_prob(const PartitionSpec& spec, double sigma, double z) {
  const double lo = log_norm_sf((spec.half_width + z) / sigma);
  const double hi = log_norm_sf((spec.half_width - z) / sigma);
  return logsumexp2(lo, hi);
}

// Guarded ceil: exact-integer boundaries (dyadic n, unit budgets) must not
// round up from float noise.
long ceil_guarded(double x) {
  return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

}  // namespace

PartitionSpec build_partition(int n) {
  if (n < 1) throw std::invalid_argument("build_partition: n must be >= 1");
  PartitionSpec spec;
  spec.n = n;
  const double dn = static_cast<double>(n);
  spec.h = std::pow(dn, -6.0 / 7.0);
  spec.delta = std::pow(dn, -2.0 / 7.0);
  spec.sigma_interior = std::pow(dn, -4.0 / 7.0);
  spec.half_width = 0.5 * dn * spec.h;  // = n^{1/7}/2, keeps n*h = 2L exact
  spec.window = 0.5 * spec.half_width;
  spec.sigma_tail = std::sqrt(2.0 / M_PI);
  spec.centers.resize(n);
  for (int j = 1; j <= n; ++j) spec.centers[j - 1] = -spec.half_width + (j - 0.5) * spec.h;
  return spec;
}

Eigen::VectorXd cell_probabilities(const ProblemInstance& inst, const PartitionSpec& spec,
                                   double z) {
  const double sigma = inst.sigma();
  Eigen::VectorXd g(spec.n + 1);
  g[0] = norm_sf((spec.half_width + z) / sigma) + norm_sf((spec.half_width - z) / sigma);
  for (int j = 1; j <= spec.n; ++j) {
    g[j] = std::exp(
        log_norm_interval((spec.cell_left(j) - z) / sigma, (spec.cell_right(j) - z) / sigma));
  }
  return g;
}

Eigen::VectorXd exact_log_odds(const ProblemInstance& inst, const PartitionSpec& spec, double z) {
  const double sigma = inst.sigma();
  const double lg0 = log_remainder_prob(spec, sigma, z);
  Eigen::VectorXd logits(spec.n);
  for (int j = 1; j <= spec.n; ++j) {
    logits[j - 1] =
        log_norm_interval((spec.cell_left(j) - z) / sigma, (spec.cell_right(j) - z) / sigma) - lg0;
  }
  return logits;
}

Eigen::VectorXd exact_log_odds_derivative(const ProblemInstance& inst, const PartitionSpec& spec,
                                          double z) {
  const double sigma = inst.sigma();
  const double lg0 = log_remainder_prob(spec, sigma, z);
  // d/dz log G_0 in ratio space: the density/probability quotients stay
  // representable even where both underflow individually.
  const double lphi_hi = -0.5 * kLog2Pi - 0.5 * std::pow((spec.half_width - z) / sigma, 2);
  const double lphi_lo = -0.5 * kLog2Pi - 0.5 * std::pow((spec.half_width + z) / sigma, 2);
  const double dlg0 = (std::exp(lphi_hi - lg0) - std::exp(lphi_lo - lg0)) / sigma;
  Eigen::VectorXd deriv(spec.n);
  for (int j = 1; j <= spec.n; ++j) {
    const double a = (spec.cell_left(j) - z) / sigma;
    const double b = (spec.cell_right(j) - z) / sigma;
    const double lg = log_norm_interval(a, b);
    const double la = -0.5 * kLog2Pi - 0.5 * a * a;
    const double lb = -0.5 * kLog2Pi - 0.5 * b * b;
    const double dlg = (std::exp(la - lg) - std::exp(lb - lg)) / sigma;
    deriv[j - 1] = dlg - dlg0;
  }
  return deriv;
}

Eigen::VectorXd baseline_softmax(const Eigen::VectorXd& logits) {
  const int m = static_cast<int>(logits.size());
  double shift = 0.0;  // implicit zero logit for the baseline
  for (int j = 0; j < m; ++j) shift = std::max(shift, logits[j]);
  double denom = std::exp(-shift);
  Eigen::VectorXd w(m + 1);
  w[0] = std::exp(-shift);
  for (int j = 0; j < m; ++j) {
    w[j + 1] = std::exp(logits[j] - shift);
    denom += w[j + 1];
  }
  return w / denom;
}

Eigen::VectorXd baseline_log_softmax(const Eigen::VectorXd& logits) {
  const int m = static_cast<int>(logits.size());
  double shift = 0.0;
  for (int j = 0; j < m; ++j) shift = std::max(shift, logits[j]);
  double denom = std::exp(-shift);
  for (int j = 0; j < m; ++j) denom += std::exp(logits[j] - shift);
  const double log_denom = shift + std::log(denom);
  Eigen::VectorXd lw(m + 1);
  lw[0] = -log_denom;
  for (int j = 0; j < m; ++j) lw[j + 1] = logits[j] - log_denom;
  return lw;
}

double clip_feature(const PartitionSpec& spec, double z) {
  return std::max(-spec.window, std::min(z, spec.window));
}

long resolution_threshold(const ProblemInstance& inst, int t) {
  const double base = 8.0 * std::pow(inst.rho, t - 1) * inst.M;
  return std::max<long>(6, ceil_guarded(std::pow(base, 7.0)));
}

WindowTail window_tail_probability(const ProblemInstance& inst, int t,
                                   const PartitionSpec& spec) {
  WindowTail wt;
  const double r = spec.window;
  wt.exact = context_average(inst, [&](double c) {
    const Gaussian1D law = feature_law(inst, t, c);
    return law.sf(r) + law.cdf(-r);
  });
  const double n27 = std::pow(static_cast<double>(spec.n), 2.0 / 7.0);
  wt.bound = 2.0 * std::exp(-n27 / (128.0 * inst.rho * inst.rho));
  wt.n_star = resolution_threshold(inst, t);
  return wt;
}

LogitSource exact_logit_source(const ProblemInstance& inst, const PartitionSpec& spec) {
  LogitSource src;
  src.kind = LogitSource::Kind::exact;
  src.eta = 0.0;
  src.eval = [inst, spec](double z) { return exact_log_odds(inst, spec, z); };
  return src;
}

LogitSource clipped_exact_logit_source(const ProblemInstance& inst, const PartitionSpec& spec) {
  LogitSource src;
  src.kind = LogitSource::Kind::exact;
  src.eta = 0.0;
  src.eval = [inst, spec](double z) { return exact_log_odds(inst, spec, clip_feature(spec, z)); };
  return src;
}

Eigen::VectorXd MixtureDensity::weights(double z) const {
  return baseline_softmax(logits.eval(z));
}

Eigen::VectorXd MixtureDensity::log_weights(double z) const {
  return baseline_log_softmax(logits.eval(z));
}

double MixtureDensity::log_density(double z, double y) const {
  return MixtureLogDensity(*this, z)(y);
}

double MixtureDensity::cdf(double z, double x) const {
  const Eigen::VectorXd w = weights(z);
  double acc = w[0] * norm_cdf(x / spec.sigma_tail);
  for (int j = 0; j < spec.n; ++j)
    acc += w[j + 1] * norm_cdf((x - spec.centers[j]) / spec.sigma_interior);
  return acc;
}

double MixtureDensity::sample(double z, RngStream& rng) const {
  int comp = 0;
  if (cell_draw_mean && cell_draw_sd > 0.0) {
    const double y_true = rng.normal(cell_draw_mean(z), cell_draw_sd);
    if (y_true >= -spec.half_width && y_true < spec.half_width) {
      comp = static_cast<int>(std::floor((y_true + spec.half_width) / spec.h)) + 1;
      comp = std::min(comp, spec.n);  // guard the right edge against rounding
    }
  } else {
    const Eigen::VectorXd w = weights(z);
    const double u = rng.uniform();
    double acc = 0.0;
    comp = spec.n;  // fall through to the last component on rounding shortfall
    for (int j = 0; j <= spec.n; ++j) {
      acc += w[j];
      if (u < acc) {
        comp = j;
        break;
      }
    }
  }
  if (comp == 0) return rng.normal(0.0, spec.sigma_tail);
  return rng.normal(spec.centers[comp - 1], spec.sigma_interior);
}

MixtureDensity m0_mixture(const ProblemInstance& inst, const PartitionSpec& spec) {
  MixtureDensity mix{spec, exact_logit_source(inst, spec)};
  mix.cell_draw_mean = [](double z) { return z; };
  mix.cell_draw_sd = inst.sigma();
  return mix;
}

MixtureDensity clipped_m0_mixture(const ProblemInstance& inst, const PartitionSpec& spec) {
  MixtureDensity mix{spec, clipped_exact_logit_source(inst, spec)};
  mix.cell_draw_mean = [spec](double z) { return clip_feature(spec, z); };
  mix.cell_draw_sd = inst.sigma();
  return mix;
}

MixtureDensity neural_mixture(const PartitionSpec& spec, LogitSource net) {
  return {spec, std::move(net)};
}

MixtureLogDensity::MixtureLogDensity(const MixtureDensity& mix, double z)
    : centers_(mix.spec.centers.array()),
      inv_two_var_int_(0.5 / (mix.spec.sigma_interior * mix.spec.sigma_interior)),
      inv_two_var_tail_(0.5 / (mix.spec.sigma_tail * mix.spec.sigma_tail)),
      buf_(mix.spec.n) {
  const Eigen::VectorXd lw = mix.log_weights(z);
  interior_base_ =
      lw.tail(mix.spec.n).array() - std::log(mix.spec.sigma_interior * kSqrt2Pi);
  tail_base_ = lw[0] - std::log(mix.spec.sigma_tail * kSqrt2Pi);
}

double MixtureLogDensity::operator()(double y) const {
  buf_ = interior_base_ - (y - centers_).square() * inv_two_var_int_;
  const double tail = tail_base_ - y * y * inv_two_var_tail_;
  const double m = std::max(buf_.maxCoeff(), tail);
  const double s = (buf_ - m).exp().sum() + std::exp(tail - m);
  return m + std::log(s);
}

}  // namespace gmdiff
