#include "gmmhmm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

double standard_normal_log_sf(double u) {
  if (u < 35.0) return std::log(0.5 * std::erfc(u / std::numbers::sqrt2));
  // Asymptotic Mills-ratio expansion; relative error below 4e-13 for u >= 35.
  const double r = 1.0 / (u * u);
  const double series = r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0)));
  return -0.5 * u * u - std::log(u) - kHalfLog2Pi + std::log1p(series);
}

double standard_normal_log_interval(double z, double h) {
  if (!(h >= 0.0)) throw InputDomainError(fmt::format("interval half-width must be >= 0, got {}", h));
  if (h == 0.0) return kNegInf;
  if (std::isinf(h)) return 0.0;

  // Narrow interval: Taylor expansion of the integral around z.
  if (h <= 1e-3 && h * (std::abs(z) + 1.0) <= 1e-2) {
    const double z2 = z * z;
    const double h2 = h * h;
    const double corr = (z2 - 1.0) * h2 / 6.0 + (z2 * z2 - 6.0 * z2 + 3.0) * h2 * h2 / 120.0;
    return std::log(2.0 * h) - 0.5 * z2 - kHalfLog2Pi + std::log1p(corr);
  }

  double a = z - h;
  double b = z + h;
  if (a < 0.0 && b > 0.0) {
    const double mass = 0.5 * (std::erf(b / std::numbers::sqrt2) + std::erf(-a / std::numbers::sqrt2));
    return std::log(mass);
  }
  if (b <= 0.0) {
    const double t = a;
    a = -b;
    b = -t;
  }
  // Both endpoints in the upper half: Q(a) - Q(b) with Q(b) <= Q(a).
  const double la = standard_normal_log_sf(a);
  const double lb = standard_normal_log_sf(b);
  if (lb == kNegInf) return la;
  return la + std::log1p(-std::exp(lb - la));
}

GaussianComponent::GaussianComponent(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const auto d = mean_.size();
  if (d < 1) throw InputDomainError("gaussian component needs dimension >= 1");
  if (covariance_.rows() != d || covariance_.cols() != d) {
    throw InputDomainError(fmt::format("covariance is {}x{} but mean has dimension {}",
                                       covariance_.rows(), covariance_.cols(), d));
  }
  if (!mean_.allFinite() || !covariance_.allFinite()) {
    throw InputDomainError("gaussian component has non-finite parameters");
  }

  if (d == 1) {
    const double var = covariance_(0, 0);
    if (!(var > 0.0)) throw ModelDegeneracyError(fmt::format("variance {} is not positive", var));
    sd_ = std::sqrt(var);
    chol_lower_ = Eigen::MatrixXd::Constant(1, 1, sd_);
    log_norm_ = -kHalfLog2Pi - std::log(sd_);
    return;
  }

  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ModelDegeneracyError("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) throw ModelDegeneracyError("covariance is not positive definite");
  chol_lower_ = llt.matrixL();
  const Eigen::VectorXd diag = chol_lower_.diagonal();
  if ((diag.array() <= 0.0).any()) throw ModelDegeneracyError("covariance is singular");
  const double half_log_det = diag.array().log().sum();
  if (!std::isfinite(half_log_det)) throw ModelDegeneracyError("covariance is singular");
  log_norm_ = -static_cast<double>(d) * kHalfLog2Pi - half_log_det;
}

GaussianComponent GaussianComponent::univariate(double mean, double variance) {
  return GaussianComponent(Eigen::VectorXd::Constant(1, mean), Eigen::MatrixXd::Constant(1, 1, variance));
}

void GaussianComponent::check_dim(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw InputDomainError(fmt::format("observation has dimension {}, model expects {}", x.size(), dim()));
  }
}

double GaussianComponent::log_pdf(std::span<const double> x) const {
  check_dim(x);
  if (dim() == 1) {
    const double z = (x[0] - mean_[0]) / sd_;
    return log_norm_ - 0.5 * z * z;
  }
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = chol_lower_.triangularView<Eigen::Lower>().solve(xv - mean_);
  return log_norm_ - 0.5 * y.squaredNorm();
}

double GaussianComponent::log_interval_prob(std::span<const double> x, double eps) const {
  check_dim(x);
  if (!(eps >= 0.0)) throw InputDomainError(fmt::format("eps must be >= 0, got {}", eps));
  if (dim() == 1) return standard_normal_log_interval((x[0] - mean_[0]) / sd_, eps / sd_);
  if (eps == 0.0) return kNegInf;
  return log_pdf(x) + static_cast<double>(dim()) * std::log(2.0 * eps);
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<GaussianComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty()) throw InputDomainError("mixture needs at least one component");
  if (weights_.size() != components_.size()) {
    throw InputDomainError(fmt::format("{} weights for {} components", weights_.size(), components_.size()));
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputDomainError(fmt::format("invalid mixture weight {}", w));
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputDomainError(fmt::format("mixture weights sum to {}, expected 1", total));
  }
  for (const auto& c : components_) {
    if (c.dim() != components_.front().dim()) throw InputDomainError("mixture components differ in dimension");
  }
  log_weights_.reserve(weights_.size());
  for (double w : weights_) log_weights_.push_back(w > 0.0 ? std::log(w) : kNegInf);
}

GaussianMixture GaussianMixture::from_parameters(std::vector<double> weights,
                                                 const std::vector<Eigen::VectorXd>& means,
                                                 const std::vector<Eigen::MatrixXd>& covariances) {
  if (means.size() != covariances.size()) {
    throw InputDomainError(fmt::format("{} means for {} covariances", means.size(), covariances.size()));
  }
  std::vector<GaussianComponent> comps;
  comps.reserve(means.size());
  for (std::size_t m = 0; m < means.size(); ++m) {
    try {
      comps.emplace_back(means[m], covariances[m]);
    } catch (const ModelDegeneracyError& e) {
      throw ModelDegeneracyError(fmt::format("component {}: {}", m, e.what()), std::nullopt, m);
    }
  }
  return GaussianMixture(std::move(weights), std::move(comps));
}

double GaussianMixture::log_pdf(std::span<const double> x) const {
  std::vector<double> terms(components_.size());
  for (std::size_t m = 0; m < components_.size(); ++m) {
    terms[m] = log_weights_[m] + components_[m].log_pdf(x);
  }
  return log_sum_exp(terms);
}

double GaussianMixture::log_weighted_interval_probs(std::span<const double> x, double eps,
                                                    std::span<double> out) const {
  for (std::size_t m = 0; m < components_.size(); ++m) {
    out[m] = log_weights_[m] + components_[m].log_interval_prob(x, eps);
  }
  return log_sum_exp(out.first(components_.size()));
}

double GaussianMixture::log_interval_prob(std::span<const double> x, double eps) const {
  std::vector<double> terms(components_.size());
  return log_weighted_interval_probs(x, eps, terms);
}

double gaussian_pdf(std::span<const double> x, const GaussianComponent& comp) {
  return std::exp(comp.log_pdf(x));
}

double mixture_pdf(std::span<const double> x, const GaussianMixture& gmm) {
  return std::exp(gmm.log_pdf(x));
}

double mixture_interval_prob(std::span<const double> x, double eps, const GaussianMixture& gmm) {
  return std::exp(gmm.log_interval_prob(x, eps));
}

Eigen::MatrixXd floor_covariance(const Eigen::MatrixXd& cov, double floor) {
  if (cov.rows() == 1) return Eigen::MatrixXd::Constant(1, 1, std::max(cov(0, 0), floor));
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.eigenvalues().minCoeff() >= floor) return sym;
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(floor);
  const Eigen::MatrixXd rebuilt = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (rebuilt + rebuilt.transpose());
}

}  // namespace gmmhmm
