#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gmmhmm/error.hpp"
#include "gmmhmm/gaussian.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace {

using namespace gmmhmm;
using testing_support::mixture;

double at(const GaussianComponent& c, double x) { return gaussian_pdf(std::span<const double>(&x, 1), c); }

TEST(GaussianPdf, StandardNormalAtMean) {
  EXPECT_NEAR(at(GaussianComponent::univariate(0.0, 1.0), 0.0), 0.398942280401432678, 1e-15);
}

TEST(GaussianPdf, AtMeanWithIdentityCovariance) {
  for (int d = 1; d <= 5; ++d) {
    const Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(d, -1.0, 2.0);
    GaussianComponent c(mu, Eigen::MatrixXd::Identity(d, d));
    const double expected = std::pow(2.0 * std::numbers::pi, -d / 2.0);
    EXPECT_NEAR(gaussian_pdf(std::span<const double>(mu.data(), d), c), expected, 1e-14 * expected) << "D=" << d;
  }
}

TEST(GaussianPdf, MatchesReferenceFormula) {
  EXPECT_NEAR(at(GaussianComponent::univariate(0.0, 4.0), 1.0), oracle::normal_pdf(1.0, 0.0, 4.0), 1e-12);
}

TEST(GaussianPdf, IntegratesToOne) {
  const auto c = GaussianComponent::univariate(1.5, 0.7);
  EXPECT_NEAR(oracle::simpson([&](double x) { return at(c, x); }, -20.0, 20.0, 20000), 1.0, 1e-6);
}

TEST(GaussianPdf, LogSpaceAgreesWithDirectEvaluation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double mu = u(rng) / 2;
    const double var = 0.1 + std::abs(u(rng));
    const double x = u(rng);
    const double direct = oracle::normal_pdf(x, mu, var);
    EXPECT_NEAR(at(GaussianComponent::univariate(mu, var), x), direct, 1e-10 * direct);
  }
}

TEST(GaussianPdf, MultivariateMatchesExplicitFormula) {
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  Eigen::VectorXd mu(2);
  mu << 0.5, -1.0;
  const GaussianComponent c(mu, cov);
  const double x[2] = {1.0, 0.2};
  // (2 pi)^-1 |S|^-1/2 exp(-q/2), q by the explicit 2x2 inverse.
  const double det = 2.0 * 1.0 - 0.6 * 0.6;
  const double dx = x[0] - mu[0], dy = x[1] - mu[1];
  const double q = (1.0 * dx * dx - 2 * 0.6 * dx * dy + 2.0 * dy * dy) / det;
  const double expected = std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
  EXPECT_NEAR(gaussian_pdf(x, c), expected, 1e-14);
}

TEST(GaussianComponent, RejectsDegenerateCovariance) {
  EXPECT_THROW(GaussianComponent::univariate(0.0, 0.0), ModelDegeneracyError);
  EXPECT_THROW(GaussianComponent::univariate(0.0, -1.0), ModelDegeneracyError);
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  EXPECT_THROW(GaussianComponent(Eigen::VectorXd::Zero(2), singular), ModelDegeneracyError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  EXPECT_THROW(GaussianComponent(Eigen::VectorXd::Zero(2), asym), ModelDegeneracyError);
  EXPECT_THROW(GaussianComponent(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2)), InputDomainError);
}

TEST(GaussianMixture, DegenerateComponentIsNamed) {
  try {
    GaussianMixture::from_parameters({0.5, 0.5}, {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)},
                                     {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1)});
    FAIL() << "expected ModelDegeneracyError";
  } catch (const ModelDegeneracyError& e) {
    ASSERT_TRUE(e.component().has_value());
    EXPECT_EQ(*e.component(), 1u);
  }
}

TEST(GaussianMixture, RejectsBadWeights) {
  const auto c = GaussianComponent::univariate(0.0, 1.0);
  EXPECT_THROW(GaussianMixture({0.5, 0.6}, {c, c}), InputDomainError);
  EXPECT_THROW(GaussianMixture({1.2, -0.2}, {c, c}), InputDomainError);
  EXPECT_THROW(GaussianMixture({1.0}, {c, c}), InputDomainError);
  EXPECT_THROW(GaussianMixture({}, {}), InputDomainError);
  EXPECT_NO_THROW(GaussianMixture({0.5, 0.5 + 5e-10}, {c, c}));
}

TEST(MixturePdf, SingleComponentEqualsComponent) {
  const auto c = GaussianComponent::univariate(0.3, 1.7);
  const GaussianMixture m({1.0}, {c});
  const double x = 1.1;
  EXPECT_DOUBLE_EQ(mixture_pdf(std::span<const double>(&x, 1), m), at(c, x));
}

TEST(MixturePdf, IdenticalComponentsEqualOne) {
  const auto c = GaussianComponent::univariate(-1.0, 0.5);
  const GaussianMixture m({0.3, 0.7}, {c, c});
  const double x = 0.25;
  EXPECT_NEAR(mixture_pdf(std::span<const double>(&x, 1), m), at(c, x), 1e-15);
}

TEST(MixturePdf, TwoComponentHandValue) {
  const GaussianMixture m({0.5, 0.5}, {GaussianComponent::univariate(0.0, 1.0), GaussianComponent::univariate(2.0, 1.0)});
  const double x = 1.0;
  // Both components are one standard deviation away: 0.5 phi(1) + 0.5 phi(1).
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(mixture_pdf(std::span<const double>(&x, 1), m), phi1, 1e-15);
}

TEST(MixturePdf, PermutationInvariant) {
  const auto a = GaussianComponent::univariate(0.0, 1.0);
  const auto b = GaussianComponent::univariate(3.0, 0.2);
  const auto c = GaussianComponent::univariate(-2.0, 4.0);
  const GaussianMixture m1({0.2, 0.3, 0.5}, {a, b, c});
  const GaussianMixture m2({0.5, 0.2, 0.3}, {c, a, b});
  for (double x : {-3.0, 0.0, 1.4, 2.9}) {
    EXPECT_NEAR(mixture_pdf(std::span<const double>(&x, 1), m1), mixture_pdf(std::span<const double>(&x, 1), m2),
                1e-15);
  }
}

TEST(MixtureIntervalProb, OneSigmaMass) {
  const GaussianMixture m({1.0}, {GaussianComponent::univariate(0.0, 1.0)});
  const double x = 0.0;
  const double quad = oracle::simpson([](double u) { return oracle::normal_pdf(u, 0.0, 1.0); }, -1.0, 1.0);
  EXPECT_NEAR(quad, 0.682689492137, 1e-11);
  EXPECT_NEAR(mixture_interval_prob(std::span<const double>(&x, 1), 1.0, m), quad, 1e-12);
}

TEST(MixtureIntervalProb, WideIntervalHoldsAllMass) {
  const GaussianMixture m({1.0}, {GaussianComponent::univariate(0.0, 1.0)});
  const double x = 0.0;
  EXPECT_NEAR(mixture_interval_prob(std::span<const double>(&x, 1), 10.0, m), 1.0, 1e-9);
}

TEST(MixtureIntervalProb, ZeroWidthIsZero) {
  const GaussianMixture m({0.4, 0.6}, {GaussianComponent::univariate(0.0, 1.0), GaussianComponent::univariate(1.0, 2.0)});
  const double x = 0.5;
  EXPECT_EQ(mixture_interval_prob(std::span<const double>(&x, 1), 0.0, m), 0.0);
}

TEST(MixtureIntervalProb, MatchesQuadratureAcrossScales) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const oracle::Mixture1d ref{{0.3, 0.7}, {-1.0 + 2 * u(rng), 2.0 * u(rng)}, {0.2 + u(rng), 0.5 + 2 * u(rng)}};
    const double x = -4.0 + 8.0 * u(rng);
    const double eps = std::pow(10.0, -4.0 + 4.0 * u(rng));
    const double expected = ref.interval(x, eps);
    const double got = mixture_interval_prob(std::span<const double>(&x, 1), eps, mixture(ref));
    EXPECT_NEAR(got, expected, 1e-10 * expected) << "x=" << x << " eps=" << eps;
  }
}

TEST(MixtureIntervalProb, MonotoneInEps) {
  const GaussianMixture m({0.5, 0.5}, {GaussianComponent::univariate(0.0, 1.0), GaussianComponent::univariate(4.0, 0.3)});
  for (double x : {-2.0, 0.0, 1.7, 4.0, 9.0}) {
    double prev = 0.0;
    for (double eps = 1e-6; eps < 50.0; eps *= 1.7) {
      const double p = mixture_interval_prob(std::span<const double>(&x, 1), eps, m);
      EXPECT_GE(p, prev) << "x=" << x << " eps=" << eps;
      EXPECT_LE(p, 1.0);
      prev = p;
    }
  }
}

TEST(MixtureIntervalProb, MultivariateUsesMidpointRule) {
  const GaussianComponent c(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  const GaussianMixture m({1.0}, {c});
  const double x[2] = {0.3, -0.2};
  const double eps = 0.01;
  EXPECT_NEAR(mixture_interval_prob(x, eps, m), gaussian_pdf(x, c) * (2 * eps) * (2 * eps), 1e-18);
}

TEST(StandardNormalTails, FarTailStaysFinite) {
  // Direct CDF differences underflow here; the log-space form must not.
  for (double z : {10.0, 40.0, 200.0, -300.0}) {
    const double lp = standard_normal_log_interval(z, 0.5);
    EXPECT_TRUE(std::isfinite(lp)) << z;
    // Leading-order check: log of the density at the interval's near edge times its width.
    const double near = std::abs(z) - 0.5;
    EXPECT_LT(lp, -0.5 * near * near);
  }
  EXPECT_NEAR(standard_normal_log_sf(0.0), std::log(0.5), 1e-15);
  EXPECT_NEAR(std::exp(standard_normal_log_sf(3.0)), 0.5 * std::erfc(3.0 / std::sqrt(2.0)), 1e-16);
}

TEST(LogSumExp, StableAndExact) {
  const std::vector<double> v{-1000.0, -1000.0};
  EXPECT_NEAR(log_sum_exp(v), -1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> w{std::log(0.2), std::log(0.3)};
  EXPECT_NEAR(log_sum_exp(w), std::log(0.5), 1e-15);
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> z{ninf, ninf};
  EXPECT_EQ(log_sum_exp(z), ninf);
}

TEST(FloorCovariance, ClampsEigenvalues) {
  Eigen::MatrixXd s(1, 1);
  s << 1e-9;
  EXPECT_DOUBLE_EQ(floor_covariance(s, 1e-6)(0, 0), 1e-6);
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 1.0, 1.0, 1.0;  // eigenvalues 0 and 2
  const Eigen::MatrixXd f = floor_covariance(c, 1e-3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
  EXPECT_NEAR(es.eigenvalues()[0], 1e-3, 1e-12);
  EXPECT_NEAR(es.eigenvalues()[1], 2.0, 1e-12);
}

}  // namespace
