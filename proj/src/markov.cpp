#include "gmmhmm/markov.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm {

void TrainConfig::validate() const {
  if (max_iters < 1) throw InputDomainError(fmt::format("max_iters must be >= 1, got {}", max_iters));
  if (!(tol > 0.0)) throw InputDomainError(fmt::format("tol must be > 0, got {}", tol));
  if (!(init_noise >= 0.0 && init_noise <= 0.1)) {
    throw InputDomainError(fmt::format("init_noise must lie in [0, 0.1], got {}", init_noise));
  }
  if (!(mean_jitter >= 0.0) || !std::isfinite(mean_jitter)) {
    throw InputDomainError(fmt::format("mean_jitter must be >= 0, got {}", mean_jitter));
  }
  if (!(variance_floor > 0.0)) {
    throw InputDomainError(fmt::format("variance_floor must be > 0, got {}", variance_floor));
  }
}

bool is_stochastic(const Eigen::VectorXd& v, double tol) {
  if (v.size() == 0 || !v.allFinite() || (v.array() < 0.0).any()) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

bool is_row_stochastic(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!is_stochastic(m.row(i).transpose(), tol)) return false;
  }
  return true;
}

void require_stochastic(const Eigen::VectorXd& v, std::string_view what) {
  if (!is_stochastic(v)) throw InputDomainError(fmt::format("{} is not a probability vector", what));
}

void require_row_stochastic(const Eigen::MatrixXd& m, std::string_view what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!is_stochastic(m.row(i).transpose())) {
      throw InputDomainError(fmt::format("row {} of {} is not a probability vector", i, what),
                             static_cast<std::size_t>(i));
    }
  }
  if (m.rows() == 0) throw InputDomainError(fmt::format("{} is empty", what));
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, double tol, int max_iters) {
  const auto n = transition.rows();
  const Eigen::MatrixXd lazy = 0.5 * (transition + Eigen::MatrixXd::Identity(n, n));
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < max_iters; ++it) {
    Eigen::RowVectorXd next = v * lazy;
    next /= next.sum();
    const double change = (next - v).cwiseAbs().sum();
    v = next;
    if (change < tol) break;
  }
  return v.transpose();
}

Eigen::VectorXd perturbed_uniform(std::size_t n, double noise, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-noise, noise);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = (1.0 + u(rng)) / static_cast<double>(n);
  return v / v.sum();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gmmhmm
