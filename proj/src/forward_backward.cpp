#include "forward_backward.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm::detail {

EmissionTable emission_table_from_logs(const RowMatrix& log_probs) {
  EmissionTable em;
  const auto T = log_probs.rows();
  const auto N = log_probs.cols();
  em.probs.resize(T, N);
  em.log_offset.resize(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    const double hi = log_probs.row(t).maxCoeff();
    const double offset = std::isfinite(hi) ? hi : 0.0;
    em.log_offset[static_cast<std::size_t>(t)] = offset;
    for (Eigen::Index i = 0; i < N; ++i) em.probs(t, i) = std::exp(log_probs(t, i) - offset);
  }
  return em;
}

double forward(const Eigen::VectorXd& pi, const Eigen::MatrixXd& a, const EmissionTable& em,
               RowMatrix* alpha, std::vector<double>* scale) {
  const auto T = em.probs.rows();
  const auto N = em.probs.cols();
  if (alpha) alpha->resize(T, N);
  if (scale) scale->assign(static_cast<std::size_t>(T), 0.0);

  std::vector<double> prev(static_cast<std::size_t>(N));
  std::vector<double> cur(static_cast<std::size_t>(N));
  double log_likelihood = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      double s;
      if (t == 0) {
        s = pi[i];
      } else {
        s = 0.0;
        for (Eigen::Index j = 0; j < N; ++j) s += prev[static_cast<std::size_t>(j)] * a(j, i);
      }
      s *= em.probs(t, i);
      cur[static_cast<std::size_t>(i)] = s;
      c += s;
    }
    if (!(c > 0.0) || !std::isfinite(c)) return -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < N; ++i) {
      cur[static_cast<std::size_t>(i)] /= c;
      if (alpha) (*alpha)(t, i) = cur[static_cast<std::size_t>(i)];
    }
    if (scale) (*scale)[static_cast<std::size_t>(t)] = c;
    log_likelihood += std::log(c);
    if (!em.log_offset.empty()) log_likelihood += em.log_offset[static_cast<std::size_t>(t)];
    std::swap(prev, cur);
  }
  return log_likelihood;
}

RowMatrix backward(const Eigen::MatrixXd& a, const EmissionTable& em, const std::vector<double>& scale) {
  const auto T = em.probs.rows();
  const auto N = em.probs.cols();
  RowMatrix beta(T, N);
  beta.row(T - 1).setOnes();
  std::vector<double> weighted(static_cast<std::size_t>(N));
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const double c = scale[static_cast<std::size_t>(t + 1)];
    for (Eigen::Index j = 0; j < N; ++j) {
      weighted[static_cast<std::size_t>(j)] = em.probs(t + 1, j) * beta(t + 1, j) / c;
    }
    for (Eigen::Index i = 0; i < N; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < N; ++j) s += a(i, j) * weighted[static_cast<std::size_t>(j)];
      beta(t, i) = s;
    }
  }
  return beta;
}

Posteriors posteriors(const Eigen::VectorXd& pi, const Eigen::MatrixXd& a, const EmissionTable& em) {
  Posteriors post;
  RowMatrix alpha;
  std::vector<double> scale;
  post.log_likelihood = forward(pi, a, em, &alpha, &scale);
  if (!std::isfinite(post.log_likelihood)) {
    throw ModelDegeneracyError("observation sequence has zero probability under the current model");
  }
  const RowMatrix beta = backward(a, em, scale);

  const auto T = em.probs.rows();
  const auto N = em.probs.cols();
  post.gamma.resize(T, N);
  post.digamma = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> weighted(static_cast<std::size_t>(N));
  for (Eigen::Index t = 0; t < T; ++t) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      post.gamma(t, i) = alpha(t, i) * beta(t, i);
      total += post.gamma(t, i);
    }
    post.gamma.row(t) /= total;

    if (t + 1 < T) {
      const double c = scale[static_cast<std::size_t>(t + 1)];
      double xi_total = 0.0;
      for (Eigen::Index j = 0; j < N; ++j) {
        weighted[static_cast<std::size_t>(j)] = em.probs(t + 1, j) * beta(t + 1, j) / c;
      }
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) xi_total += alpha(t, i) * a(i, j) * weighted[static_cast<std::size_t>(j)];
      }
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
          post.digamma(i, j) += alpha(t, i) * a(i, j) * weighted[static_cast<std::size_t>(j)] / xi_total;
        }
      }
    }
  }
  return post;
}

void reestimate_transitions(const Posteriors& post, Eigen::VectorXd& pi, Eigen::MatrixXd& a) {
  pi = post.gamma.row(0).transpose();
  pi /= pi.sum();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    // sum_j digamma(i, j) is sum_{t<T-1} gamma_t(i)
    const double denom = post.digamma.row(i).sum();
    if (denom > 0.0 && std::isfinite(denom)) a.row(i) = post.digamma.row(i) / denom;
  }
}

}  // namespace gmmhmm::detail
