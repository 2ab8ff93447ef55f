#include "gmmhmm/gmm_hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "forward_backward.hpp"
#include "gmmhmm/error.hpp"

namespace gmmhmm {

GmmHmm::GmmHmm(Eigen::VectorXd pi, Eigen::MatrixXd a, std::vector<GaussianMixture> emissions, double eps)
    : pi_(std::move(pi)), a_(std::move(a)), emissions_(std::move(emissions)), eps_(eps) {
  const auto n = pi_.size();
  if (n < 1) throw InputDomainError("GMM-HMM needs at least one state");
  if (a_.rows() != n || a_.cols() != n) {
    throw InputDomainError(fmt::format("A is {}x{}, expected {}x{}", a_.rows(), a_.cols(), n, n));
  }
  if (emissions_.size() != static_cast<std::size_t>(n)) {
    throw InputDomainError(fmt::format("{} emission mixtures for {} states", emissions_.size(), n));
  }
  for (const auto& e : emissions_) {
    if (e.size() != emissions_.front().size() || e.dim() != emissions_.front().dim()) {
      throw InputDomainError("all emission mixtures must share M and D");
    }
  }
  if (!(eps_ > 0.0) || !std::isfinite(eps_)) throw InputDomainError(fmt::format("eps must be > 0, got {}", eps_));
  require_stochastic(pi_, "pi");
  require_row_stochastic(a_, "A");
}

double ghmm_log_emission_prob(const GmmHmm& model, std::size_t state, std::span<const double> x) {
  if (state >= model.n_states()) {
    throw InputDomainError(fmt::format("state {} out of range for {} states", state, model.n_states()), state);
  }
  return model.emission(state).log_interval_prob(x, model.eps());
}

double ghmm_emission_prob(const GmmHmm& model, std::size_t state, std::span<const double> x) {
  return std::exp(ghmm_log_emission_prob(model, state, x));
}

namespace {

/// log(c_jk) + log m_jk(O_t) for every t, j, k, laid out [t][j][k].
struct ComponentLogTable {
  std::size_t n_states = 0;
  std::size_t n_components = 0;
  std::vector<double> values;
  detail::RowMatrix state_log;  // T x N, log b_j(O_t)

  double& at(std::size_t t, std::size_t j, std::size_t k) {
    return values[(t * n_states + j) * n_components + k];
  }
};

void check_sequence(const GmmHmm& model, const ContinuousSequence& seq) {
  if (seq.empty()) throw TooShortInputError("observation sequence is empty", 0, 1);
  if (seq.dim() != model.dim()) {
    throw InputDomainError(fmt::format("sequence has dimension {}, model expects {}", seq.dim(), model.dim()));
  }
}

/// Distinct values of a D = 1 sequence; lets the per-component log masses be
/// computed once per value rather than once per observation.
struct ScalarIndex {
  std::vector<double> values;
  std::vector<std::uint32_t> slot;  // slot[t] indexes `values`
};

ScalarIndex scalar_index(const ContinuousSequence& seq) {
  ScalarIndex idx;
  idx.values.assign(seq.values().begin(), seq.values().end());
  std::sort(idx.values.begin(), idx.values.end());
  idx.values.erase(std::unique(idx.values.begin(), idx.values.end()), idx.values.end());
  idx.slot.resize(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto it = std::lower_bound(idx.values.begin(), idx.values.end(), seq[t][0]);
    idx.slot[t] = static_cast<std::uint32_t>(it - idx.values.begin());
  }
  return idx;
}

ComponentLogTable component_log_table(const GmmHmm& model, const ContinuousSequence& seq,
                                      const ScalarIndex* index = nullptr) {
  ComponentLogTable table;
  const std::size_t T = seq.size();
  const std::size_t N = model.n_states();
  const std::size_t M = model.n_components();
  table.n_states = N;
  table.n_components = M;
  table.values.resize(T * N * M);
  table.state_log.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(N));

  if (model.dim() == 1) {
    ScalarIndex local;
    if (index == nullptr) {
      local = scalar_index(seq);
      index = &local;
    }
    const std::size_t U = index->values.size();
    // [u][j][k] followed by the per-state log-sum-exp [u][j]
    std::vector<double> comp_log(U * N * M);
    std::vector<double> state_log(U * N);
    for (std::size_t j = 0; j < N; ++j) {
      const auto& mix = model.emission(j);
      for (std::size_t k = 0; k < M; ++k) {
        const double w = mix.weights()[k];
        const double log_w = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
        const double mu = mix.component(k).mean()[0];
        const double sd = mix.component(k).cholesky_lower()(0, 0);
        const double h = model.eps() / sd;
        for (std::size_t u = 0; u < U; ++u) {
          comp_log[(u * N + j) * M + k] = log_w + standard_normal_log_interval((index->values[u] - mu) / sd, h);
        }
      }
      for (std::size_t u = 0; u < U; ++u) {
        state_log[u * N + j] = log_sum_exp(std::span<const double>(&comp_log[(u * N + j) * M], M));
      }
    }
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t u = index->slot[t];
      std::copy_n(&comp_log[u * N * M], N * M, &table.values[t * N * M]);
      for (std::size_t j = 0; j < N; ++j) {
        table.state_log(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = state_log[u * N + j];
      }
    }
    return table;
  }

  for (std::size_t j = 0; j < N; ++j) {
    const auto& mix = model.emission(j);
    for (std::size_t k = 0; k < M; ++k) {
      const double w = mix.weights()[k];
      const double log_w = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < T; ++t) {
        table.at(t, j, k) = log_w + mix.component(k).log_interval_prob(seq[t], model.eps());
      }
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < N; ++j) {
      table.state_log(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) =
          log_sum_exp(std::span<const double>(&table.at(t, j, 0), M));
    }
  }
  return table;
}

/// Replaces table values by gamma_t(j, k) given the state posteriors.
void component_posteriors_inplace(ComponentLogTable& table, const detail::RowMatrix& gamma) {
  const std::size_t T = static_cast<std::size_t>(gamma.rows());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < table.n_states; ++j) {
      const double g = gamma(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
      const double log_b = table.state_log(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
      for (std::size_t k = 0; k < table.n_components; ++k) {
        double& v = table.at(t, j, k);
        v = std::isfinite(log_b) ? g * std::exp(v - log_b) : 0.0;
      }
    }
  }
}

std::vector<GaussianMixture> reestimate_mixtures(const GmmHmm& model, ComponentLogTable& gamma_jk,
                                                 const ContinuousSequence& seq, double variance_floor) {
  const std::size_t T = seq.size();
  const std::size_t N = model.n_states();
  const std::size_t M = model.n_components();
  const auto D = static_cast<Eigen::Index>(model.dim());

  std::vector<GaussianMixture> out;
  out.reserve(N);
  for (std::size_t j = 0; j < N; ++j) {
    const auto& old = model.emission(j);
    std::vector<double> occupancy(M, 0.0);
    std::vector<Eigen::VectorXd> means(M, Eigen::VectorXd::Zero(D));
    std::vector<Eigen::MatrixXd> covs(M, Eigen::MatrixXd::Zero(D, D));

    if (D == 1) {
      std::vector<double> sum(M, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        const double x = seq[t][0];
        for (std::size_t k = 0; k < M; ++k) {
          const double g = gamma_jk.at(t, j, k);
          occupancy[k] += g;
          sum[k] += g * x;
        }
      }
      for (std::size_t k = 0; k < M; ++k) {
        means[k][0] = occupancy[k] > 0.0 ? sum[k] / occupancy[k] : old.component(k).mean()[0];
      }
      // Second pass around the re-estimated means.
      std::vector<double> sq(M, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        const double x = seq[t][0];
        for (std::size_t k = 0; k < M; ++k) {
          const double d = x - means[k][0];
          sq[k] += gamma_jk.at(t, j, k) * d * d;
        }
      }
      for (std::size_t k = 0; k < M; ++k) covs[k](0, 0) = sq[k];
    } else {
      for (std::size_t t = 0; t < T; ++t) {
        const Eigen::Map<const Eigen::VectorXd> x(seq[t].data(), D);
        for (std::size_t k = 0; k < M; ++k) {
          const double g = gamma_jk.at(t, j, k);
          occupancy[k] += g;
          means[k] += g * x;
        }
      }
      for (std::size_t k = 0; k < M; ++k) {
        if (occupancy[k] > 0.0) {
          means[k] /= occupancy[k];
        } else {
          means[k] = old.component(k).mean();
        }
      }
      Eigen::VectorXd d(D);
      for (std::size_t t = 0; t < T; ++t) {
        const Eigen::Map<const Eigen::VectorXd> x(seq[t].data(), D);
        for (std::size_t k = 0; k < M; ++k) {
          const double g = gamma_jk.at(t, j, k);
          if (g == 0.0) continue;
          d = x - means[k];
          covs[k].noalias() += g * d * d.transpose();
        }
      }
    }

    double total = 0.0;
    for (double o : occupancy) total += o;
    std::vector<double> weights(M);
    for (std::size_t k = 0; k < M; ++k) {
      weights[k] = total > 0.0 ? occupancy[k] / total : old.weights()[k];
      if (occupancy[k] > 0.0) {
        covs[k] = floor_covariance(covs[k] / occupancy[k], variance_floor);
      } else {
        covs[k] = old.component(k).covariance();
      }
    }
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (double& w : weights) w /= wsum;

    try {
      out.push_back(GaussianMixture::from_parameters(std::move(weights), means, covs));
    } catch (const ModelDegeneracyError& e) {
      throw ModelDegeneracyError(fmt::format("state {}: {}", j, e.what()), j, e.component());
    }
  }
  return out;
}

}  // namespace

double ghmm_log_score(const GmmHmm& model, const ContinuousSequence& seq) {
  check_sequence(model, seq);
  const auto table = component_log_table(model, seq);
  return detail::forward(model.pi(), model.transitions(), detail::emission_table_from_logs(table.state_log));
}

Eigen::VectorXd ghmm_stationary(const GmmHmm& model) { return stationary_distribution(model.transitions()); }

std::vector<Eigen::MatrixXd> ghmm_component_posteriors(const GmmHmm& model, const ContinuousSequence& seq) {
  check_sequence(model, seq);
  auto table = component_log_table(model, seq);
  const auto post = detail::posteriors(model.pi(), model.transitions(),
                                       detail::emission_table_from_logs(table.state_log));
  component_posteriors_inplace(table, post.gamma);
  const auto N = static_cast<Eigen::Index>(model.n_states());
  const auto M = static_cast<Eigen::Index>(model.n_components());
  std::vector<Eigen::MatrixXd> out(seq.size(), Eigen::MatrixXd(N, M));
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index k = 0; k < M; ++k) {
        out[t](j, k) = table.at(t, static_cast<std::size_t>(j), static_cast<std::size_t>(k));
      }
    }
  }
  return out;
}

GmmHmm ghmm_initial_model(const ContinuousSequence& seq, std::size_t n_states, std::size_t n_components,
                          double eps, const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  if (n_states < 1 || n_components < 1) throw InputDomainError("GMM-HMM needs N >= 1 and M >= 1");
  if (seq.size() < 2) throw TooShortInputError("GMM-HMM training needs T >= 2", seq.size(), 2);

  const auto D = static_cast<Eigen::Index>(seq.dim());
  const double T = static_cast<double>(seq.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(D);
  for (std::size_t t = 0; t < seq.size(); ++t) mean += Eigen::Map<const Eigen::VectorXd>(seq[t].data(), D);
  mean /= T;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(D, D);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(seq[t].data(), D) - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= T;
  if ((cov.diagonal().array() <= 0.0).any()) {
    throw InputDomainError("degenerate input: observations have zero variance");
  }
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  cov = floor_covariance(cov, config.variance_floor);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  Eigen::VectorXd pi = perturbed_uniform(n_states, config.init_noise, rng);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_states));
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.row(i) = perturbed_uniform(n_states, config.init_noise, rng).transpose();

  std::vector<GaussianMixture> emissions;
  emissions.reserve(n_states);
  for (std::size_t j = 0; j < n_states; ++j) {
    const Eigen::VectorXd w = perturbed_uniform(n_components, config.init_noise, rng);
    std::vector<double> weights(w.data(), w.data() + w.size());
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs(n_components, cov);
    for (std::size_t k = 0; k < n_components; ++k) {
      Eigen::VectorXd m = mean;
      for (Eigen::Index d = 0; d < D; ++d) m[d] += jitter(rng) * config.mean_jitter * sd[d];
      means.push_back(std::move(m));
    }
    emissions.push_back(GaussianMixture::from_parameters(std::move(weights), means, covs));
  }
  return GmmHmm(std::move(pi), std::move(a), std::move(emissions), eps);
}

GmmTrainResult ghmm_train_from(const ContinuousSequence& seq, GmmHmm initial, const TrainConfig& config) {
  config.validate();
  check_sequence(initial, seq);
  if (seq.size() < 2) throw TooShortInputError("GMM-HMM training needs T >= 2", seq.size(), 2);

  GmmHmm model = std::move(initial);
  ScalarIndex index;
  if (seq.dim() == 1) index = scalar_index(seq);
  std::vector<double> trace;
  for (int iter = 0;; ++iter) {
    auto table = component_log_table(model, seq, seq.dim() == 1 ? &index : nullptr);
    const auto post = detail::posteriors(model.pi(), model.transitions(),
                                         detail::emission_table_from_logs(table.state_log));
    trace.push_back(post.log_likelihood);
    if (iter > 0 && post.log_likelihood - trace[trace.size() - 2] < config.tol) break;
    if (iter == config.max_iters) break;

    Eigen::VectorXd pi = model.pi();
    Eigen::MatrixXd a = model.transitions();
    detail::reestimate_transitions(post, pi, a);
    component_posteriors_inplace(table, post.gamma);
    auto mixtures = reestimate_mixtures(model, table, seq, config.variance_floor);
    model = GmmHmm(std::move(pi), std::move(a), std::move(mixtures), model.eps());
  }
  return GmmTrainResult{std::move(model), std::move(trace)};
}

GmmTrainResult ghmm_train(const ContinuousSequence& seq, std::size_t n_states, std::size_t n_components, double eps,
                          const TrainConfig& config, std::uint64_t seed) {
  return ghmm_train_from(seq, ghmm_initial_model(seq, n_states, n_components, eps, config, seed), config);
}

}  // namespace gmmhmm
