#ifndef GMMHMM_DISCRETE_HMM_HPP
#define GMMHMM_DISCRETE_HMM_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gmmhmm/markov.hpp"
#include "gmmhmm/sequence.hpp"

namespace gmmhmm {

/// lambda = (pi, A, B) over N hidden states and K observation symbols.
class DiscreteHmm {
 public:
  /// pi (N), A (N x N) and B (N x K) must be row stochastic within 1e-9.
  DiscreteHmm(Eigen::VectorXd pi, Eigen::MatrixXd a, Eigen::MatrixXd b);

  std::size_t n_states() const { return static_cast<std::size_t>(pi_.size()); }
  std::size_t n_symbols() const { return static_cast<std::size_t>(b_.cols()); }
  const Eigen::VectorXd& pi() const { return pi_; }
  const Eigen::MatrixXd& transitions() const { return a_; }
  const Eigen::MatrixXd& emissions() const { return b_; }

 private:
  Eigen::VectorXd pi_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
};

/// log P(O | model) by the scaled forward pass. Throws InputDomainError
/// naming the position of the first symbol >= K.
double dhmm_log_score(const DiscreteHmm& model, const DiscreteSequence& seq);

/// The same probability recovered from the backward pass,
/// log sum_i pi_i b_i(O_0) beta_0(i).
double dhmm_backward_log_score(const DiscreteHmm& model, const DiscreteSequence& seq);

struct DiscreteTrainResult {
  DiscreteHmm model;
  /// trace[k] is the log-likelihood of the model after k re-estimations; the
  /// last entry belongs to `model`.
  std::vector<double> log_likelihood_trace;

  std::size_t iterations() const { return log_likelihood_trace.size() - 1; }
  double final_log_likelihood() const { return log_likelihood_trace.back(); }
};

/// Near-uniform starting model (see perturbed_uniform).
DiscreteHmm dhmm_initial_model(std::size_t n_states, std::size_t n_symbols, double noise, std::uint64_t seed);

/// Baum-Welch on a single observation stream.
DiscreteTrainResult dhmm_train(const DiscreteSequence& seq, std::size_t n_states, std::size_t n_symbols,
                               const TrainConfig& config, std::uint64_t seed);

/// Continues Baum-Welch from a given model.
DiscreteTrainResult dhmm_train_from(const DiscreteSequence& seq, DiscreteHmm initial, const TrainConfig& config);

}  // namespace gmmhmm

#endif  // GMMHMM_DISCRETE_HMM_HPP
