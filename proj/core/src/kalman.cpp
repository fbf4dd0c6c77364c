#include "pt/kalman.hpp"

#include <string>

#include "pt/errors.hpp"

namespace pt {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const std::string& name) {
  if (m.rows() != m.cols() ||
      (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw ModelError(name + " must be symmetric");
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

void LinearGaussianModel::validate() const {
  const int d = state_dim();
  const int m = obs_dim();
  if (A.cols() != d || Q.rows() != d || Q.cols() != d || C.cols() != d ||
      R.rows() != m || R.cols() != m || init_mean.size() != d ||
      init_cov.rows() != d || init_cov.cols() != d)
    throw ModelError("LinearGaussianModel: dimension mismatch");
  check_symmetric(Q, "Q");
  check_symmetric(R, "R");
  check_symmetric(init_cov, "init_cov");
  if (min_eigenvalue(Q) < -1e-10) throw ModelError("Q must be PSD");
  if (min_eigenvalue(init_cov) < -1e-10) throw ModelError("init_cov must be PSD");
  if (min_eigenvalue(R) <= 0.0) throw ModelError("R must be PD");
}

std::vector<KalmanEstimate> kalman_filter(const LinearGaussianModel& model,
                                          const std::vector<Eigen::VectorXd>& obs) {
  model.validate();
  const int d = model.state_dim();

  std::vector<KalmanEstimate> estimates;
  estimates.reserve(obs.size());

  Eigen::VectorXd mean = model.init_mean;
  Eigen::MatrixXd cov = model.init_cov;

  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (obs[k].size() != model.obs_dim())
      throw DataError("observation dimension mismatch at step " + std::to_string(k));
    if (k > 0) {
      mean = model.A * mean;
      cov = model.A * cov * model.A.transpose() + model.Q;
      cov = 0.5 * (cov + cov.transpose());
    }

    const Eigen::MatrixXd s =
        model.C * cov * model.C.transpose() + model.R;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 1e-12 * std::max(1.0, hi))
      throw DataError("singular innovation covariance at step " + std::to_string(k));

    const Eigen::MatrixXd gain =
        cov * model.C.transpose() * s.llt().solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()));
    mean = mean + gain * (obs[k] - model.C * mean);
    cov = (Eigen::MatrixXd::Identity(d, d) - gain * model.C) * cov;
    cov = 0.5 * (cov + cov.transpose());
    estimates.push_back({mean, cov});
  }
  return estimates;
}

}  // namespace pt
