#ifndef GMMHMM_EVAL_HPP
#define GMMHMM_EVAL_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "gmmhmm/discrete_hmm.hpp"
#include "gmmhmm/error.hpp"
#include "gmmhmm/gmm_hmm.hpp"
#include "gmmhmm/markov.hpp"
#include "gmmhmm/parallel.hpp"
#include "gmmhmm/sequence.hpp"

namespace gmmhmm {

enum class Label { kPositive, kNegative };

struct ScoredSample {
  std::string id;
  double score = 0.0;  // log probability per symbol
  Label label = Label::kPositive;
};

/// Mann-Whitney AUC: P(positive scores above negative), ties counted one half.
/// Scores may be -inf (a sequence the model cannot emit) but not NaN. Throws
/// EvaluationError unless both classes are present.
double auc(std::span<const ScoredSample> samples);

struct FoldResult {
  std::size_t fold = 0;
  double auc = 0.0;
  std::size_t n_train = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::vector<ScoredSample> samples;
};

struct EvalReport {
  std::vector<double> per_fold_auc;
  double mean_auc = 0.0;
  std::vector<FoldResult> folds;
  /// Effective configuration, echoed verbatim into every rendering.
  std::vector<std::pair<std::string, std::string>> config;
};

struct CrossValidationConfig {
  std::size_t folds = 5;
  std::size_t test_per_family = 100;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Shuffles 0..n-1 (seeded) and deals it into `folds` groups whose sizes
/// differ by at most one.
std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds, std::uint64_t seed);

template <class Sequence>
using Scorer = std::function<double(const Sequence&)>;

/// Trains on the given sequences and returns a log-probability scorer.
template <class Sequence>
using Trainer = std::function<Scorer<Sequence>(std::span<const Sequence> training, std::uint64_t seed)>;

namespace detail {
void check_cross_validation(std::size_t n_a, std::size_t n_b, const CrossValidationConfig& cfg);
void finish_report(EvalReport& report);
}  // namespace detail

/// F-fold protocol: for each fold, train on family A minus that fold, then
/// score up to test_per_family held-out A sequences (positives) and up to
/// test_per_family sequences from family B's matching fold (negatives)
/// with per-symbol log-probabilities, and compute the fold's AUC.
template <class Sequence>
EvalReport cross_validate(std::span<const Sequence> family_a, std::span<const Sequence> family_b,
                          const Trainer<Sequence>& trainer, const CrossValidationConfig& cfg) {
  detail::check_cross_validation(family_a.size(), family_b.size(), cfg);
  const auto parts_a = fold_partition(family_a.size(), cfg.folds, derive_seed(cfg.seed, 1));
  const auto parts_b = fold_partition(family_b.size(), cfg.folds, derive_seed(cfg.seed, 2));

  EvalReport report;
  report.folds.resize(cfg.folds);
  parallel_for(cfg.folds, cfg.jobs, [&](std::size_t f) {
    std::vector<Sequence> training;
    for (std::size_t g = 0; g < cfg.folds; ++g) {
      if (g == f) continue;
      for (std::size_t i : parts_a[g]) training.push_back(family_a[i]);
    }
    FoldResult& fold = report.folds[f];
    fold.fold = f;
    fold.n_train = training.size();
    Scorer<Sequence> scorer;
    try {
      scorer = trainer(std::span<const Sequence>(training), derive_seed(cfg.seed, 100 + f));
    } catch (const std::exception& e) {
      throw EvaluationError(fmt::format("fold {}: training failed: {}", f, e.what()));
    }
    auto score = [&](const Sequence& s, std::string id, Label label) {
      fold.samples.push_back(ScoredSample{std::move(id), scorer(s) / static_cast<double>(sequence_length(s)), label});
    };
    for (std::size_t n = 0; n < parts_a[f].size() && n < cfg.test_per_family; ++n) {
      score(family_a[parts_a[f][n]], fmt::format("a{}", parts_a[f][n]), Label::kPositive);
      ++fold.n_positive;
    }
    for (std::size_t n = 0; n < parts_b[f].size() && n < cfg.test_per_family; ++n) {
      score(family_b[parts_b[f][n]], fmt::format("b{}", parts_b[f][n]), Label::kNegative);
      ++fold.n_negative;
    }
    fold.auc = auc(fold.samples);
  });
  detail::finish_report(report);
  return report;
}

// ---------------------------------------------------------------------------
// Training recipes

struct GmmRecipe {
  std::size_t n_states = 2;
  std::size_t n_components = 2;
  double eps = kDefaultEps;
  TrainConfig config;
  std::size_t restarts = 1;
  std::size_t t_cap = 0;  // 0: use the whole concatenated stream
};

struct DiscreteRecipe {
  std::size_t n_states = 2;
  std::size_t n_symbols = 31;
  TrainConfig config;
  std::size_t restarts = 1;
  std::size_t t_cap = 100000;
};

/// Concatenates the training sequences (up to t_cap), trains `restarts`
/// seeded models and scores with the one of highest final log-likelihood.
Trainer<ContinuousSequence> make_trainer(const GmmRecipe& recipe);
Trainer<DiscreteSequence> make_trainer(const DiscreteRecipe& recipe);

// ---------------------------------------------------------------------------
// KL divergence

struct KlEstimate {
  double value = 0.0;      // nats
  double std_error = 0.0;  // of the Monte Carlo mean
  std::size_t n_samples = 0;
  /// Samples at which q has zero density; value is +inf when non-zero.
  std::size_t n_infinite = 0;

  bool is_infinite() const { return n_infinite > 0; }
};

/// Monte Carlo KL(p || q): mean of log p(x) - log q(x) over x ~ p.
KlEstimate kl_gmm(const GaussianMixture& p, const GaussianMixture& q, std::size_t n_samples, std::uint64_t seed);

/// Model-level emission density: per-state mixtures weighted by the
/// stationary distribution of A.
GaussianMixture pooled_emission(const GmmHmm& model);

/// Symmetrised divergence (KL(p1 || p2) + KL(p2 || p1)) / 2 between the
/// pooled emissions. Both directions use the same seed, so swapping the
/// arguments gives the identical result.
KlEstimate kl_models(const GmmHmm& m1, const GmmHmm& m2, std::size_t n_samples, std::uint64_t seed);

}  // namespace gmmhmm

#endif  // GMMHMM_EVAL_HPP
