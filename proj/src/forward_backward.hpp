#ifndef GMMHMM_SRC_FORWARD_BACKWARD_HPP
#define GMMHMM_SRC_FORWARD_BACKWARD_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace gmmhmm::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// T x N emission probabilities b_i(O_t). Row t has been divided by
/// exp(log_offset[t]) so that nothing underflows; the offsets are added back
/// into the log-likelihood. All-zero offsets mean the table is unscaled.
struct EmissionTable {
  RowMatrix probs;
  std::vector<double> log_offset;
};

/// Rescales row t of a table of log emission probabilities by its maximum.
EmissionTable emission_table_from_logs(const RowMatrix& log_probs);

/// Scaled alpha pass. Returns log P(O | model); -inf when some step has zero
/// total mass. `alpha` (optional) receives the normalised alphas, `scale`
/// the per-step normalisers c_t.
double forward(const Eigen::VectorXd& pi, const Eigen::MatrixXd& a, const EmissionTable& em,
               RowMatrix* alpha = nullptr, std::vector<double>* scale = nullptr);

/// Scaled beta pass using the normalisers from `forward`:
/// beta_{T-1}(i) = 1, beta_t(i) = sum_j a_ij b_j(O_{t+1}) beta_{t+1}(j) / c_{t+1}.
RowMatrix backward(const Eigen::MatrixXd& a, const EmissionTable& em, const std::vector<double>& scale);

struct Posteriors {
  double log_likelihood = 0.0;
  RowMatrix gamma;            // T x N, gamma_t(i) = P(x_t = i | O)
  Eigen::MatrixXd digamma;    // N x N, sum over t = 0..T-2 of P(x_t = i, x_{t+1} = j | O)
};

/// E-step shared by both model families. Throws ModelDegeneracyError when the
/// sequence has zero probability under the model.
Posteriors posteriors(const Eigen::VectorXd& pi, const Eigen::MatrixXd& a, const EmissionTable& em);

/// Re-estimated pi and A from posteriors; rows with no expected visits keep
/// their previous values.
void reestimate_transitions(const Posteriors& post, Eigen::VectorXd& pi, Eigen::MatrixXd& a);

}  // namespace gmmhmm::detail

#endif  // GMMHMM_SRC_FORWARD_BACKWARD_HPP
