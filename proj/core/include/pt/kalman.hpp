#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pt {

// Linear-Gaussian state-space model: x_{k+1} = A x_k + w, w ~ N(0, Q);
// y_k = C x_k + v, v ~ N(0, R); x_1 ~ N(init_mean, init_cov).
struct LinearGaussianModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd C;
  Eigen::MatrixXd R;
  Eigen::VectorXd init_mean;
  Eigen::MatrixXd init_cov;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int obs_dim() const { return static_cast<int>(C.rows()); }

  // Throws ModelError on shape mismatch, asymmetric covariances, Q not PSD
  // or R not PD.
  void validate() const;
};

struct KalmanEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Posterior (mean, covariance) of x_k given y_1..k for each step. Posterior
// covariances are symmetrized every update. Throws DataError naming the step
// if an innovation covariance is numerically singular.
std::vector<KalmanEstimate> kalman_filter(const LinearGaussianModel& model,
                                          const std::vector<Eigen::VectorXd>& obs);

}  // namespace pt
