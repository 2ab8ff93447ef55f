#ifndef GMMHMM_GMM_HMM_HPP
#define GMMHMM_GMM_HMM_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gmmhmm/gaussian.hpp"
#include "gmmhmm/markov.hpp"
#include "gmmhmm/sequence.hpp"

namespace gmmhmm {

/// Default integration half-width for continuous observations.
inline constexpr double kDefaultEps = 1e-3;

/// HMM whose per-state emission is a Gaussian mixture,
/// lambda = (A, pi, c, mu, Sigma), plus the half-width `eps` of the box each
/// observation's density is integrated over to obtain b_i(O_t).
class GmmHmm {
 public:
  GmmHmm(Eigen::VectorXd pi, Eigen::MatrixXd a, std::vector<GaussianMixture> emissions, double eps);

  std::size_t n_states() const { return static_cast<std::size_t>(pi_.size()); }
  std::size_t n_components() const { return emissions_.front().size(); }
  std::size_t dim() const { return emissions_.front().dim(); }
  double eps() const { return eps_; }
  const Eigen::VectorXd& pi() const { return pi_; }
  const Eigen::MatrixXd& transitions() const { return a_; }
  const std::vector<GaussianMixture>& emissions() const { return emissions_; }
  const GaussianMixture& emission(std::size_t state) const { return emissions_.at(state); }

 private:
  Eigen::VectorXd pi_;
  Eigen::MatrixXd a_;
  std::vector<GaussianMixture> emissions_;
  double eps_;
};

/// b_state(x): mixture mass of [x - eps, x + eps]^D in the given state.
double ghmm_emission_prob(const GmmHmm& model, std::size_t state, std::span<const double> x);
double ghmm_log_emission_prob(const GmmHmm& model, std::size_t state, std::span<const double> x);

/// log P(O | model) by the scaled forward pass.
double ghmm_log_score(const GmmHmm& model, const ContinuousSequence& seq);

/// Stationary distribution of the model's transition matrix.
Eigen::VectorXd ghmm_stationary(const GmmHmm& model);

/// Joint state/component posteriors gamma_t(j, k); element t is an N x M
/// matrix whose entries sum to one.
std::vector<Eigen::MatrixXd> ghmm_component_posteriors(const GmmHmm& model, const ContinuousSequence& seq);

struct GmmTrainResult {
  GmmHmm model;
  /// trace[k] is the log-likelihood after k re-estimations; the last entry
  /// belongs to `model`.
  std::vector<double> log_likelihood_trace;

  std::size_t iterations() const { return log_likelihood_trace.size() - 1; }
  double final_log_likelihood() const { return log_likelihood_trace.back(); }
};

/// Starting point for EM: near-uniform pi, A and mixture weights; every
/// component at the global mean (jittered by mean_jitter global standard
/// deviations) with the floored global covariance.
GmmHmm ghmm_initial_model(const ContinuousSequence& seq, std::size_t n_states, std::size_t n_components,
                          double eps, const TrainConfig& config, std::uint64_t seed);

GmmTrainResult ghmm_train(const ContinuousSequence& seq, std::size_t n_states, std::size_t n_components, double eps,
                          const TrainConfig& config, std::uint64_t seed);

/// Continues EM from a given model.
GmmTrainResult ghmm_train_from(const ContinuousSequence& seq, GmmHmm initial, const TrainConfig& config);

}  // namespace gmmhmm

#endif  // GMMHMM_GMM_HMM_HPP
