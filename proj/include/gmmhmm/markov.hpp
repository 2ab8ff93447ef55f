#ifndef GMMHMM_MARKOV_HPP
#define GMMHMM_MARKOV_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gmmhmm {

/// Baum-Welch / EM settings shared by both model families.
struct TrainConfig {
  int max_iters = 200;
  double tol = 1e-4;            // stop when the log-likelihood gain drops below this
  double init_noise = 0.02;     // relative perturbation of the near-uniform rows
  double variance_floor = 1e-6; // GMM-HMM only
  /// GMM-HMM only: half-width of the uniform jitter applied to each
  /// component's initial mean, in global standard deviations. Zero leaves
  /// every component at the global mean, which EM can never leave.
  double mean_jitter = 0.02;

  /// Throws InputDomainError when a field is out of range.
  void validate() const;
};

/// Tolerance used when checking that a vector or matrix row sums to one.
inline constexpr double kStochasticTol = 1e-9;

/// Throws InputDomainError naming `what` unless `v` is non-negative and sums
/// to one within kStochasticTol.
void require_stochastic(const Eigen::VectorXd& v, std::string_view what);
void require_row_stochastic(const Eigen::MatrixXd& m, std::string_view what);

bool is_stochastic(const Eigen::VectorXd& v, double tol = kStochasticTol);
bool is_row_stochastic(const Eigen::MatrixXd& m, double tol = kStochasticTol);

/// Stationary distribution of a row-stochastic matrix: power iteration on
/// the lazy chain (A + I) / 2 from the uniform vector until the L1 change is
/// below `tol`. The lazy chain has the same fixed points as A but never
/// oscillates, so periodic chains converge too.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, double tol = 1e-12,
                                        int max_iters = 1'000'000);

/// Near-uniform probability vector: each entry (1/n)(1 + u), u ~ U(-noise, noise),
/// then renormalised.
Eigen::VectorXd perturbed_uniform(std::size_t n, double noise, std::mt19937_64& rng);

/// Derives an independent sub-seed (splitmix64 of seed and stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gmmhmm

#endif  // GMMHMM_MARKOV_HPP
