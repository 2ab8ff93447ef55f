#ifndef GMMHMM_GAUSSIAN_HPP
#define GMMHMM_GAUSSIAN_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gmmhmm {

/// A single multivariate normal N(mean, covariance).
///
/// The constructor validates the covariance (square, symmetric, positive
/// definite) and caches its Cholesky factor, so every evaluation after
/// construction is a pure function of the stored values.
class GaussianComponent {
 public:
  /// Throws ModelDegeneracyError on a singular / non-PD / asymmetric
  /// covariance, InputDomainError on shape mismatch or non-finite entries.
  GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  static GaussianComponent univariate(double mean, double variance);

  std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  /// Lower Cholesky factor L with L L' = covariance.
  const Eigen::MatrixXd& cholesky_lower() const { return chol_lower_; }

  double log_pdf(std::span<const double> x) const;

  /// Log of the probability mass in the box of half-width eps around x.
  /// Exact (normal CDF difference) for D = 1, midpoint rule pdf(x)(2 eps)^D
  /// otherwise. eps == 0 gives -inf.
  double log_interval_prob(std::span<const double> x, double eps) const;

 private:
  void check_dim(std::span<const double> x) const;

  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_lower_;
  double log_norm_ = 0.0;  // -D/2 log(2 pi) - 1/2 log|covariance|
  double sd_ = 0.0;        // D = 1 only
};

/// Convex combination of GaussianComponents sharing one dimension.
class GaussianMixture {
 public:
  /// Weights must be non-negative and sum to 1 within 1e-9.
  GaussianMixture(std::vector<double> weights, std::vector<GaussianComponent> components);

  /// Builds the components from raw parameters. A degenerate covariance is
  /// reported as a ModelDegeneracyError carrying the component index.
  static GaussianMixture from_parameters(std::vector<double> weights,
                                         const std::vector<Eigen::VectorXd>& means,
                                         const std::vector<Eigen::MatrixXd>& covariances);

  std::size_t size() const { return components_.size(); }
  std::size_t dim() const { return components_.front().dim(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianComponent>& components() const { return components_; }
  const GaussianComponent& component(std::size_t m) const { return components_.at(m); }

  double log_pdf(std::span<const double> x) const;
  double log_interval_prob(std::span<const double> x, double eps) const;

  /// Writes log(weight_m) + log_interval_prob of component m into out[m] and
  /// returns their log-sum-exp.
  double log_weighted_interval_probs(std::span<const double> x, double eps,
                                     std::span<double> out) const;

 private:
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<GaussianComponent> components_;
};

/// Density of `comp` at x, computed in log space and exponentiated.
double gaussian_pdf(std::span<const double> x, const GaussianComponent& comp);

double mixture_pdf(std::span<const double> x, const GaussianMixture& gmm);

/// Probability mass of the mixture in [x - eps, x + eps]^D (see
/// GaussianComponent::log_interval_prob). eps must be >= 0.
double mixture_interval_prob(std::span<const double> x, double eps, const GaussianMixture& gmm);

/// log P(z - h <= Z <= z + h) for a standard normal Z, h >= 0.
double standard_normal_log_interval(double z, double h);

/// log of the standard normal upper tail P(Z > u).
double standard_normal_log_sf(double u);

double log_sum_exp(std::span<const double> values);

/// Symmetrises `cov` and clamps its eigenvalues (the variance when D = 1) to
/// at least `floor`.
Eigen::MatrixXd floor_covariance(const Eigen::MatrixXd& cov, double floor);

}  // namespace gmmhmm

#endif  // GMMHMM_GAUSSIAN_HPP
