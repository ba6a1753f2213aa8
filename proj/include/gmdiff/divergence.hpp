#pragma once

#include <vector>

#include "gmdiff/mixture.hpp"
#include "gmdiff/rng.hpp"

namespace gmdiff {

struct ReverseChain;  // chain.hpp

struct KlEstimate {
  enum class Method { quadrature, monte_carlo };
  double value = 0.0;
  double std_err = 0.0;  // 0 for quadrature
  Method method = Method::quadrature;
  long node_or_sample_count = 0;
};

/// Node counts of the nested stepwise-KL quadrature: Gauss-Legendre over the
/// context, Gauss-Hermite for the feature given the context, Gauss-Hermite
/// for the response under the true reverse Gaussian. The defaults are fixed
/// by the convergence study in the test suite.
struct StepwiseKlOptions {
  int context_nodes = 64;
  int feature_nodes = 64;
  int response_nodes = 128;
};

/// d_KL,t of a mixture model: E_Z[KL(N(Z, sigma^2) || mix(.|Z))] with the
/// feature law of step t. Throws if the inner integrand turns non-finite
/// (impossible for log-sum-exp mixture evaluation; guards regressions).
KlEstimate stepwise_kl(const ProblemInstance& inst, int t, const MixtureDensity& mix,
                       const StepwiseKlOptions& opts = {});

/// Same integral with the model set to the true reverse kernel (value 0 up
/// to rounding; exercises the full quadrature path).
KlEstimate stepwise_kl_true_kernel(const ProblemInstance& inst, int t,
                                   const StepwiseKlOptions& opts = {});

/// Monte Carlo counterpart of stepwise_kl, for quadrature/MC agreement checks.
KlEstimate stepwise_kl_mc(const ProblemInstance& inst, int t, const MixtureDensity& mix,
                          long samples, RngStream& rng);

/// Closed form of the local oscillation integral:
/// (1/2sigma) sqrt(2/pi) n^{-2/7} + (1/4sigma^2) n^{-4/7}.
double bound_L_term(const ProblemInstance& inst, const PartitionSpec& spec);

/// C^1-branch oscillation operator D_delta f = (delta/2)(|y - z| + delta/2)/sigma^2.
double oscillation_operator(const ProblemInstance& inst, double delta, double y, double z);

/// Monte Carlo value of the generic L_t(delta) integral over F_t.
KlEstimate mc_L_term(const ProblemInstance& inst, int t, const PartitionSpec& spec, long samples,
                     RngStream& rng);

struct TUTerms {
  double t_term = 0.0;         // (sigma + 1/2)/(2 sigma^2) sqrt(p)
  double u_term = 0.0;         // (pi/4) sqrt(E[Y^4]) sqrt(p) + log(4) p
  double boundary_prob = 0.0;  // exact P(|Y| > L - delta/2)
  double envelope_t = 0.0;     // C^(T) exp(-n^{2/7}/256)
  double envelope_u = 0.0;     // C^(U) exp(-n^{2/7}/256)
  bool envelope_valid = false; // n >= n_star
};

/// Boundary and tail-component terms from the exact boundary probability;
/// the exponential envelopes are only certified for n >= n_star.
TUTerms bound_T_U_terms(const ProblemInstance& inst, int t, const PartitionSpec& spec);

struct RiemannGaussTerms {
  double riemann = 0.0;     // (6/sqrt(2 pi)) n^{-2/7}
  double gauss_tail = 0.0;  // 2 exp(-n^{4/7}/8)
};

RiemannGaussTerms bound_riemann_gauss_terms(const PartitionSpec& spec);

struct StepTerms {
  double l_term = 0.0;
  double t_term = 0.0;
  double u_term = 0.0;
  double riemann_term = 0.0;
  double gauss_tail_term = 0.0;
  double b_nor = 0.0;        // sum of the five terms above
  double neural_term = 0.0;  // 2 eta
  double window_tail_term = 0.0;
};

struct BoundLedger {
  std::vector<StepTerms> steps;  // index t-1
  double terminal = 0.0;
  double total = 0.0;  // terminal + sum_t (b_nor + neural + window_tail)
};

StepTerms step_bound_terms(const ProblemInstance& inst, int t, const PartitionSpec& spec,
                           double eta, double window_tail);

/// Assemble the full ledger; specs/etas/window_tails hold one entry per step.
BoundLedger assemble_ledger(const ProblemInstance& inst, const std::vector<PartitionSpec>& specs,
                            const std::vector<double>& etas,
                            const std::vector<double>& window_tails);

/// A rate constant valid on the given grid of resolutions:
/// kappa_1(sigma) + (1/4sigma^2) n_*^{-2/7} + max_grid C# e^{-n^{2/7}/256} n^{2/7}.
double c_nor_constant(const ProblemInstance& inst, int t, const std::vector<long>& n_grid);

/// kappa_1(sigma) = (1/2sigma) sqrt(2/pi) + 6/sqrt(2 pi).
double kappa1(double sigma);

/// Explicit computable bound on the off-window KL contribution of a clipped
/// model: the Gaussian-KL-to-tail-component chain of inequalities with the
/// exact window-tail mass. Zero applies for unclipped exact-logit models.
double window_tail_kl_bound(const ProblemInstance& inst, int t, const PartitionSpec& spec,
                            double eta);

struct StabilityReport {
  double eta = 0.0;
  double max_abs_log_ratio = 0.0;  // sup |log pA - log pB| over the check grid
  bool ratio_ok = false;           // max_abs_log_ratio <= 2 eta (+ float slack)
  KlEstimate kl_a;
  KlEstimate kl_b;
  bool kl_ok = false;  // kl_a <= kl_b + 2 eta (+ float slack)
  bool ok() const { return ratio_ok && kl_ok; }
};

/// Certify the softmax stability sandwich for two logit families with sup
/// gap <= eta sharing a partition: pointwise density ratio within
/// [e^{-2 eta}, e^{2 eta}] on a grid, and stepwise KL gap <= 2 eta.
StabilityReport stability_certificate(const ProblemInstance& inst, int t,
                                      const MixtureDensity& mix_a, const MixtureDensity& mix_b,
                                      double eta, int z_grid = 200, int y_grid = 200,
                                      double slack = 1e-10);

struct ContextTailReport {
  double threshold = 0.0;
  double fraction = 0.0;  // share of contexts with output KL > threshold
  double mean_kl = 0.0;
  bool markov_ok = false;  // fraction <= mean/threshold
};

/// Markov-tail check for the per-context output KL on a context grid.
/// Closed form for exact chains; quadrature for mixture chains with T <= 2.
ContextTailReport context_kl_tail(const ReverseChain& chain, double threshold,
                                  int grid_points = 1024);

}  // namespace gmdiff
