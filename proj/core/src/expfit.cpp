#include "pt/expfit.hpp"

#include <algorithm>
#include <cmath>

#include "pt/errors.hpp"

namespace pt {

namespace {

std::vector<double> log_weights(const ExponentialModel& m) {
  std::vector<double> lw(m.space_size, 0.0);
  for (std::size_t k = 0; k < m.features.size(); ++k)
    for (int s = 0; s < m.space_size; ++s) lw[s] += m.theta[k] * m.features[k][s];
  return lw;
}

}  // namespace

std::vector<double> ExponentialModel::distribution() const {
  auto lw = log_weights(*this);
  const double shift = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  for (double& v : lw) {
    v = std::exp(v - shift);
    z += v;
  }
  for (double& v : lw) v /= z;
  return lw;
}

double ExponentialModel::log_partition() const {
  auto lw = log_weights(*this);
  const double shift = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  for (double v : lw) z += std::exp(v - shift);
  return shift + std::log(z);
}

std::vector<double> ExponentialModel::expectations() const {
  const auto p = distribution();
  std::vector<double> e(features.size(), 0.0);
  for (std::size_t k = 0; k < features.size(); ++k)
    for (int s = 0; s < space_size; ++s) e[k] += p[s] * features[k][s];
  return e;
}

ExpFitResult fit_exponential(std::vector<std::vector<double>> features,
                             std::span<const double> targets, double tol,
                             int max_iters) {
  if (features.empty() || features.size() != targets.size())
    throw ModelError("fit_exponential: feature/target count mismatch");
  const int space = static_cast<int>(features[0].size());
  for (const auto& f : features)
    if (static_cast<int>(f.size()) != space)
      throw ModelError("fit_exponential: ragged feature table");

  ExponentialModel model;
  model.space_size = space;
  model.features = std::move(features);
  model.theta.assign(model.features.size(), 0.0);

  // Concave objective: theta . targets - log Z(theta).
  auto objective = [&](const std::vector<double>& theta) {
    ExponentialModel probe = model;
    probe.theta = theta;
    double dot = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) dot += theta[k] * targets[k];
    return dot - probe.log_partition();
  };

  double current = objective(model.theta);
  for (int iter = 0; iter < max_iters; ++iter) {
    const auto expect = model.expectations();
    double grad_norm = 0.0;
    std::vector<double> grad(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
      grad[k] = targets[k] - expect[k];
      grad_norm = std::max(grad_norm, std::abs(grad[k]));
    }
    if (grad_norm <= tol) return {std::move(model), iter, grad_norm};

    // Halve the step while the objective genuinely decreases; steps whose
    // effect is below floating-point resolution are accepted as-is.
    double step = 0.5;
    const double slack = 1e-12 * (1.0 + std::abs(current));
    for (;;) {
      std::vector<double> trial = model.theta;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += step * grad[k];
      const double value = objective(trial);
      if (value >= current - slack || step < 1e-16) {
        model.theta = std::move(trial);
        current = std::max(current, value);
        break;
      }
      step *= 0.5;
    }
  }
  throw ModelError("fit_exponential: not converged after max iterations");
}

}  // namespace pt
