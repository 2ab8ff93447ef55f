#include "gmmhmm/discrete_hmm.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "forward_backward.hpp"
#include "gmmhmm/error.hpp"

namespace gmmhmm {

DiscreteHmm::DiscreteHmm(Eigen::VectorXd pi, Eigen::MatrixXd a, Eigen::MatrixXd b)
    : pi_(std::move(pi)), a_(std::move(a)), b_(std::move(b)) {
  const auto n = pi_.size();
  if (n < 1) throw InputDomainError("discrete HMM needs at least one state");
  if (a_.rows() != n || a_.cols() != n) {
    throw InputDomainError(fmt::format("A is {}x{}, expected {}x{}", a_.rows(), a_.cols(), n, n));
  }
  if (b_.rows() != n || b_.cols() < 1) {
    throw InputDomainError(fmt::format("B is {}x{}, expected {} rows and >= 1 column", b_.rows(), b_.cols(), n));
  }
  require_stochastic(pi_, "pi");
  require_row_stochastic(a_, "A");
  require_row_stochastic(b_, "B");
}

namespace {

void check_symbols(const DiscreteHmm& model, const DiscreteSequence& seq) {
  if (seq.empty()) throw TooShortInputError("observation sequence is empty", 0, 1);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (seq[t] >= model.n_symbols()) {
      throw InputDomainError(
          fmt::format("symbol {} at position {} is outside the alphabet of size {}", seq[t], t, model.n_symbols()), t);
    }
  }
}

detail::EmissionTable emission_table(const Eigen::MatrixXd& b, const DiscreteSequence& seq) {
  detail::EmissionTable em;
  const auto n = b.rows();
  em.probs.resize(static_cast<Eigen::Index>(seq.size()), n);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    em.probs.row(static_cast<Eigen::Index>(t)) = b.col(seq[t]).transpose();
  }
  return em;
}

void reestimate_emissions(const detail::Posteriors& post, const DiscreteSequence& seq, Eigen::MatrixXd& b) {
  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(b.rows(), b.cols());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    numer.col(seq[t]) += post.gamma.row(static_cast<Eigen::Index>(t)).transpose();
  }
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    const double denom = numer.row(i).sum();
    if (denom > 0.0 && std::isfinite(denom)) b.row(i) = numer.row(i) / denom;
  }
}

}  // namespace

double dhmm_log_score(const DiscreteHmm& model, const DiscreteSequence& seq) {
  check_symbols(model, seq);
  return detail::forward(model.pi(), model.transitions(), emission_table(model.emissions(), seq));
}

double dhmm_backward_log_score(const DiscreteHmm& model, const DiscreteSequence& seq) {
  check_symbols(model, seq);
  const auto& a = model.transitions();
  const auto& b = model.emissions();
  const auto n = a.rows();
  const auto T = seq.size();

  Eigen::VectorXd beta = Eigen::VectorXd::Ones(n);
  double log_scale = 0.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    Eigen::VectorXd next(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) s += a(i, j) * b(j, seq[t + 1]) * beta[j];
      next[i] = s;
    }
    const double d = next.sum();
    if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
    beta = next / d;
    log_scale += std::log(d);
  }
  double p0 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) p0 += model.pi()[i] * b(i, seq[0]) * beta[i];
  return std::log(p0) + log_scale;
}

DiscreteHmm dhmm_initial_model(std::size_t n_states, std::size_t n_symbols, double noise, std::uint64_t seed) {
  if (n_states < 1 || n_symbols < 1) throw InputDomainError("discrete HMM needs N >= 1 and K >= 1");
  std::mt19937_64 rng(seed);
  const auto n = static_cast<Eigen::Index>(n_states);
  const auto k = static_cast<Eigen::Index>(n_symbols);
  Eigen::VectorXd pi = perturbed_uniform(n_states, noise, rng);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a.row(i) = perturbed_uniform(n_states, noise, rng).transpose();
  Eigen::MatrixXd b(n, k);
  for (Eigen::Index i = 0; i < n; ++i) b.row(i) = perturbed_uniform(n_symbols, noise, rng).transpose();
  return DiscreteHmm(std::move(pi), std::move(a), std::move(b));
}

DiscreteTrainResult dhmm_train_from(const DiscreteSequence& seq, DiscreteHmm initial, const TrainConfig& config) {
  config.validate();
  check_symbols(initial, seq);

  Eigen::VectorXd pi = initial.pi();
  Eigen::MatrixXd a = initial.transitions();
  Eigen::MatrixXd b = initial.emissions();
  std::vector<double> trace;

  for (int iter = 0;; ++iter) {
    const auto post = detail::posteriors(pi, a, emission_table(b, seq));
    trace.push_back(post.log_likelihood);
    if (iter > 0 && post.log_likelihood - trace[trace.size() - 2] < config.tol) break;
    if (iter == config.max_iters) break;
    detail::reestimate_transitions(post, pi, a);
    reestimate_emissions(post, seq, b);
  }
  return DiscreteTrainResult{DiscreteHmm(std::move(pi), std::move(a), std::move(b)), std::move(trace)};
}

DiscreteTrainResult dhmm_train(const DiscreteSequence& seq, std::size_t n_states, std::size_t n_symbols,
                               const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  if (seq.empty()) throw TooShortInputError("training sequence is empty", 0, 1);
  if (n_symbols <= seq.max_symbol()) {
    throw InputDomainError(
        fmt::format("n_symbols = {} but the sequence contains symbol {}", n_symbols, seq.max_symbol()));
  }
  return dhmm_train_from(seq, dhmm_initial_model(n_states, n_symbols, config.init_noise, seed), config);
}

}  // namespace gmmhmm
