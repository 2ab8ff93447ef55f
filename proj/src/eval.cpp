#include "gmmhmm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gmmhmm/restarts.hpp"

namespace gmmhmm {

double auc(std::span<const ScoredSample> samples) {
  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(samples.size());
  std::size_t n_pos = 0;
  for (const auto& s : samples) {
    if (std::isnan(s.score)) throw EvaluationError(fmt::format("sample '{}' has a NaN score", s.id));
    const bool pos = s.label == Label::kPositive;
    n_pos += pos ? 1 : 0;
    ranked.emplace_back(s.score, pos);
  }
  const std::size_t n_neg = samples.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw EvaluationError(fmt::format("AUC needs both classes, got {} positive and {} negative", n_pos, n_neg));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Sum of 1-based mid-ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranked.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < ranked.size() && ranked[j].first == ranked[i].first) {
      pos_in_group += ranked[j].second ? 1 : 0;
      ++j;
    }
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += mid_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double q = static_cast<double>(n_neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 1) throw InputDomainError("folds must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with explicit draws, so the permutation does not depend on
  // the standard library's shuffle implementation.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> parts(folds);
  const std::size_t base = n / folds;
  const std::size_t extra = n % folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    parts[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return parts;
}

namespace detail {

void check_cross_validation(std::size_t n_a, std::size_t n_b, const CrossValidationConfig& cfg) {
  if (cfg.folds < 2) throw InputDomainError(fmt::format("folds must be >= 2, got {}", cfg.folds));
  if (cfg.test_per_family < 1) throw InputDomainError("test_per_family must be >= 1");
  if (n_a < cfg.folds) {
    throw EvaluationError(fmt::format("family A has {} samples, need at least {} for {}-fold validation", n_a,
                                      cfg.folds, cfg.folds));
  }
  if (n_b < cfg.folds) {
    throw EvaluationError(fmt::format("family B has {} samples, need at least {} for {}-fold validation", n_b,
                                      cfg.folds, cfg.folds));
  }
}

void finish_report(EvalReport& report) {
  report.per_fold_auc.clear();
  double total = 0.0;
  for (const auto& f : report.folds) {
    report.per_fold_auc.push_back(f.auc);
    total += f.auc;
  }
  report.mean_auc = total / static_cast<double>(report.folds.size());
}

}  // namespace detail

Trainer<ContinuousSequence> make_trainer(const GmmRecipe& recipe) {
  return [recipe](std::span<const ContinuousSequence> training, std::uint64_t seed) -> Scorer<ContinuousSequence> {
    const auto stream = concatenate(training, recipe.t_cap);
    auto outcome = best_of_restarts<GmmTrainResult>(recipe.restarts, seed, 1, [&](std::uint64_t s) {
      return ghmm_train(stream, recipe.n_states, recipe.n_components, recipe.eps, recipe.config, s);
    });
    return [model = std::move(outcome.best.model)](const ContinuousSequence& seq) {
      return ghmm_log_score(model, seq);
    };
  };
}

Trainer<DiscreteSequence> make_trainer(const DiscreteRecipe& recipe) {
  return [recipe](std::span<const DiscreteSequence> training, std::uint64_t seed) -> Scorer<DiscreteSequence> {
    const auto stream = concatenate(training, recipe.t_cap);
    auto outcome = best_of_restarts<DiscreteTrainResult>(recipe.restarts, seed, 1, [&](std::uint64_t s) {
      return dhmm_train(stream, recipe.n_states, recipe.n_symbols, recipe.config, s);
    });
    return [model = std::move(outcome.best.model)](const DiscreteSequence& seq) { return dhmm_log_score(model, seq); };
  };
}

KlEstimate kl_gmm(const GaussianMixture& p, const GaussianMixture& q, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw InputDomainError("n_samples must be >= 1");
  if (p.dim() != q.dim()) {
    throw InputDomainError(fmt::format("mixtures differ in dimension ({} vs {})", p.dim(), q.dim()));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto D = static_cast<Eigen::Index>(p.dim());

  KlEstimate est;
  est.n_samples = n_samples;
  // Welford running mean / variance of the log ratio.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  Eigen::VectorXd z(D);
  Eigen::VectorXd x(D);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double u = u01(rng);
    std::size_t k = 0;
    double acc = p.weights()[0];
    while (k + 1 < p.size() && u >= acc) acc += p.weights()[++k];
    while (p.weights()[k] == 0.0 && k > 0) --k;  // rounding ran past the last live component
    for (auto& v : z) v = normal(rng);
    x = p.component(k).mean() + p.component(k).cholesky_lower() * z;
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(D));
    const double log_q = q.log_pdf(xs);
    if (log_q == -std::numeric_limits<double>::infinity()) {
      ++est.n_infinite;
      continue;
    }
    const double r = p.log_pdf(xs) - log_q;
    ++count;
    const double delta = r - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (r - mean);
  }
  if (est.n_infinite > 0) {
    est.value = std::numeric_limits<double>::infinity();
    est.std_error = std::numeric_limits<double>::infinity();
    return est;
  }
  est.value = mean;
  est.std_error = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
  return est;
}

GaussianMixture pooled_emission(const GmmHmm& model) {
  const Eigen::VectorXd stat = ghmm_stationary(model);
  std::vector<double> weights;
  std::vector<GaussianComponent> comps;
  for (std::size_t j = 0; j < model.n_states(); ++j) {
    const auto& mix = model.emission(j);
    for (std::size_t k = 0; k < mix.size(); ++k) {
      weights.push_back(stat[static_cast<Eigen::Index>(j)] * mix.weights()[k]);
      comps.push_back(mix.component(k));
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return GaussianMixture(std::move(weights), std::move(comps));
}

KlEstimate kl_models(const GmmHmm& m1, const GmmHmm& m2, std::size_t n_samples, std::uint64_t seed) {
  if (m1.dim() != m2.dim()) {
    throw InputDomainError(fmt::format("models differ in dimension ({} vs {})", m1.dim(), m2.dim()));
  }
  const auto p1 = pooled_emission(m1);
  const auto p2 = pooled_emission(m2);
  const auto forward = kl_gmm(p1, p2, n_samples, seed);
  const auto reverse = kl_gmm(p2, p1, n_samples, seed);
  KlEstimate est;
  est.n_samples = n_samples;
  est.n_infinite = forward.n_infinite + reverse.n_infinite;
  est.value = 0.5 * (forward.value + reverse.value);
  est.std_error = 0.5 * std::sqrt(forward.std_error * forward.std_error + reverse.std_error * reverse.std_error);
  return est;
}

}  // namespace gmmhmm
