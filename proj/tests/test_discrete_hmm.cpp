#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gmmhmm/discrete_hmm.hpp"
#include "gmmhmm/error.hpp"
#include "gmmhmm/features.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace gmmhmm;
using testing_support::mat;
using testing_support::vec;

DiscreteHmm coin(double heads) {
  Eigen::MatrixXd b(1, 2);
  b << heads, 1.0 - heads;
  return DiscreteHmm(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), b);
}

double enumerate(const std::vector<double>& pi, const oracle::Matrix& a, const oracle::Matrix& b,
                 const std::vector<Symbol>& seq) {
  oracle::Matrix em;
  for (Symbol o : seq) {
    std::vector<double> row;
    for (const auto& br : b) row.push_back(br[o]);
    em.push_back(row);
  }
  return std::log(oracle::path_sum(pi, a, em));
}

TEST(DiscreteScore, SingleUniformState) {
  EXPECT_NEAR(dhmm_log_score(coin(0.5), DiscreteSequence({0, 1, 1})), std::log(0.125), 1e-15);
}

TEST(DiscreteScore, DeterministicChain) {
  Eigen::MatrixXd b(2, 2);
  b << 1, 0, 0, 1;
  const DiscreteHmm m(Eigen::Vector2d(1, 0), Eigen::MatrixXd::Identity(2, 2), b);
  EXPECT_EQ(dhmm_log_score(m, DiscreteSequence({0, 0, 0})), 0.0);
}

TEST(DiscreteScore, MatchesPathEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const std::size_t k = 1 + (trial / 3) % 3;
    const std::size_t t = 1 + (trial / 9) % 8;
    const auto pi = oracle::random_distribution(n, rng);
    const auto a = oracle::random_stochastic(n, n, rng);
    const auto b = oracle::random_stochastic(n, k, rng);
    std::uniform_int_distribution<Symbol> sym(0, static_cast<Symbol>(k - 1));
    std::vector<Symbol> s(t);
    for (auto& o : s) o = sym(rng);
    const DiscreteHmm m(vec(pi), mat(a), mat(b));
    const double expected = enumerate(pi, a, b, s);
    EXPECT_NEAR(dhmm_log_score(m, DiscreteSequence(s)), expected, 1e-10) << "trial " << trial;
  }
}

TEST(DiscreteScore, BackwardAgreesWithForward) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = DiscreteHmm(vec(oracle::random_distribution(3, rng)), mat(oracle::random_stochastic(3, 3, rng)),
                               mat(oracle::random_stochastic(3, 5, rng)));
    const auto seq = synth_generate(m, 2000, trial);
    const double f = dhmm_log_score(m, seq);
    EXPECT_NEAR(dhmm_backward_log_score(m, seq), f, 1e-10 * std::abs(f));
  }
}

TEST(DiscreteScore, LongSequenceDoesNotUnderflow) {
  const auto seq = synth_generate(coin(0.3), 100000, 1);
  const double s = dhmm_log_score(coin(0.3), seq);
  EXPECT_TRUE(std::isfinite(s));
  EXPECT_LT(s, -50000.0);
}

TEST(DiscreteScore, ImpossibleSequenceIsMinusInfinity) {
  EXPECT_EQ(dhmm_log_score(coin(1.0), DiscreteSequence({0, 1})), -std::numeric_limits<double>::infinity());
}

TEST(DiscreteScore, OutOfAlphabetSymbolNamesPosition) {
  try {
    dhmm_log_score(coin(0.5), DiscreteSequence({0, 1, 2, 0}));
    FAIL() << "expected InputDomainError";
  } catch (const InputDomainError& e) {
    ASSERT_TRUE(e.position().has_value());
    EXPECT_EQ(*e.position(), 2u);
  }
}

TEST(DiscreteModel, RejectsNonStochasticRows) {
  Eigen::MatrixXd b(1, 2);
  b << 0.6, 0.6;
  EXPECT_THROW(DiscreteHmm(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), b), InputDomainError);
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.5, 1.1, -0.1;
  EXPECT_THROW(DiscreteHmm(Eigen::Vector2d(0.5, 0.5), a, Eigen::MatrixXd::Constant(2, 2, 0.5)), InputDomainError);
}

TEST(DiscreteTrain, SingleStateRecoversFrequency) {
  const auto seq = synth_generate(coin(0.9), 1000, 4);
  double zeros = 0;
  for (Symbol s : seq.symbols()) zeros += s == 0 ? 1 : 0;
  const auto r = dhmm_train(seq, 1, 2, TrainConfig{}, 0);
  EXPECT_NEAR(r.model.emissions()(0, 0), zeros / 1000.0, 0.03);
  // With one state Baum-Welch is frequency counting, so it is exact after one step.
  EXPECT_NEAR(r.model.emissions()(0, 0), zeros / 1000.0, 1e-12);
}

TEST(DiscreteTrain, InitialModelIsNearUniform) {
  const auto m = dhmm_initial_model(3, 5, 0.02, 9);
  EXPECT_LT((m.pi().array() * 3.0 - 1.0).abs().maxCoeff(), 0.05);
  EXPECT_LT((m.transitions().array() * 3.0 - 1.0).abs().maxCoeff(), 0.05);
  EXPECT_LT((m.emissions().array() * 5.0 - 1.0).abs().maxCoeff(), 0.05);
}

TEST(DiscreteTrain, EveryIterationStochasticAndMonotone) {
  std::mt19937_64 rng(31);
  const DiscreteHmm truth(vec(oracle::random_distribution(2, rng)), mat({{0.9, 0.1}, {0.2, 0.8}}),
                          mat(oracle::random_stochastic(2, 4, rng)));
  const auto seq = synth_generate(truth, 3000, 2);
  auto model = dhmm_initial_model(3, 4, 0.02, 5);
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < 40; ++it) {
    const auto step = dhmm_train_from(seq, model, TrainConfig{.max_iters = 1, .tol = 1e-300});
    ASSERT_EQ(step.log_likelihood_trace.size(), 2u);
    EXPECT_GE(step.log_likelihood_trace[0], prev - 1e-8);
    EXPECT_GE(step.log_likelihood_trace[1], step.log_likelihood_trace[0] - 1e-8);
    prev = step.log_likelihood_trace[1];
    model = step.model;
    EXPECT_NEAR(model.pi().sum(), 1.0, 1e-9);
    for (Eigen::Index i = 0; i < 3; ++i) {
      EXPECT_NEAR(model.transitions().row(i).sum(), 1.0, 1e-9);
      EXPECT_NEAR(model.emissions().row(i).sum(), 1.0, 1e-9);
    }
    EXPECT_GE(model.emissions().minCoeff(), 0.0);
  }
}

TEST(DiscreteTrain, TraceEndsWithReturnedModel) {
  const auto seq = synth_generate(coin(0.7), 500, 1);
  const auto r = dhmm_train(seq, 2, 2, TrainConfig{.max_iters = 7}, 3);
  EXPECT_LE(r.iterations(), 7u);
  EXPECT_DOUBLE_EQ(r.final_log_likelihood(), dhmm_log_score(r.model, seq));
}

TEST(DiscreteTrain, HeldOutScoreNearGenerator) {
  const DiscreteHmm truth(Eigen::Vector2d(0.6, 0.4), mat({{0.85, 0.15}, {0.1, 0.9}}),
                          mat({{0.7, 0.2, 0.1}, {0.1, 0.3, 0.6}}));
  const auto train = synth_generate(truth, 10000, 1);
  const auto test = synth_generate(truth, 10000, 2);
  const auto r = dhmm_train(train, 2, 3, TrainConfig{.max_iters = 500, .tol = 1e-8}, 7);
  const double ref = dhmm_log_score(truth, test);
  EXPECT_NEAR(dhmm_log_score(r.model, test), ref, 0.02 * std::abs(ref));
}

TEST(DiscreteTrain, DeterministicForSeed) {
  const auto seq = synth_generate(coin(0.4), 800, 8);
  const auto a = dhmm_train(seq, 2, 2, TrainConfig{}, 42);
  const auto b = dhmm_train(seq, 2, 2, TrainConfig{}, 42);
  EXPECT_EQ(a.log_likelihood_trace, b.log_likelihood_trace);
  EXPECT_EQ(a.model.emissions(), b.model.emissions());
}

TEST(DiscreteTrain, RejectsAlphabetSmallerThanData) {
  EXPECT_THROW(dhmm_train(DiscreteSequence({0, 3, 1}), 2, 3, TrainConfig{}, 0), InputDomainError);
}

}  // namespace
