#pragma once

#include <span>
#include <vector>

namespace pt {

// Distribution of form exp(sum_k theta_k * features[k][s]) / Z on the finite
// space {0, ..., space_size-1}.
struct ExponentialModel {
  int space_size = 0;
  std::vector<std::vector<double>> features;  // features[k][s]
  std::vector<double> theta;

  std::vector<double> distribution() const;
  double log_partition() const;
  // Model expectations of each feature.
  std::vector<double> expectations() const;
};

struct ExpFitResult {
  ExponentialModel model;
  int iterations = 0;
  double gradient_norm = 0.0;  // max-norm of (target - model expectation)
};

// Fits theta so the model's feature expectations match `targets` within
// `tol` (max-norm), by gradient ascent on the concave log-likelihood with
// fixed step 0.5 and backtracking halving. Throws ModelError if the targets
// are not reached within max_iters (e.g. they sit on the boundary of the
// achievable set).
ExpFitResult fit_exponential(std::vector<std::vector<double>> features,
                             std::span<const double> targets, double tol,
                             int max_iters = 100000);

}  // namespace pt
