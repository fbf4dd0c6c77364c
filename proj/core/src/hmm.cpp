#include "pt/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pt/errors.hpp"
#include "pt/rng.hpp"

namespace pt {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw ModelError(what + ": negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormTol)
    throw ModelError(what + ": does not sum to 1");
}

}  // namespace

int HmmModel::num_symbols() const {
  if (const auto* d = std::get_if<DiscreteEmission>(&emit))
    return d->table.empty() ? 0 : static_cast<int>(d->table[0].size());
  return -1;
}

void HmmModel::emission_likelihood(double obs, std::span<double> out) const {
  if (const auto* d = std::get_if<DiscreteEmission>(&emit)) {
    const long sym = std::lround(obs);
    if (std::abs(obs - static_cast<double>(sym)) > 1e-9 || sym < 0 ||
        sym >= num_symbols())
      throw DataError("observation " + std::to_string(obs) +
                      " is not a valid symbol index");
    for (int a = 0; a < num_states; ++a) out[a] = d->table[a][sym];
  } else {
    const auto& g = std::get<GaussianEmission>(emit);
    if (!std::isfinite(obs)) throw DataError("non-finite observation");
    for (int a = 0; a < num_states; ++a) {
      const double z = (obs - g.mean[a]) / std::sqrt(g.var[a]);
      out[a] = kInvSqrt2Pi / std::sqrt(g.var[a]) * std::exp(-0.5 * z * z);
    }
  }
}

void HmmModel::validate() const {
  if (num_states <= 0) throw ModelError("HmmModel: num_states must be positive");
  if (static_cast<int>(init.size()) != num_states ||
      static_cast<int>(trans.size()) != num_states)
    throw ModelError("HmmModel: init/trans size mismatch");
  check_distribution(init, "init");
  for (int b = 0; b < num_states; ++b) {
    if (static_cast<int>(trans[b].size()) != num_states)
      throw ModelError("HmmModel: trans row size mismatch");
    check_distribution(trans[b], "trans row " + std::to_string(b));
  }
  if (const auto* d = std::get_if<DiscreteEmission>(&emit)) {
    if (static_cast<int>(d->table.size()) != num_states)
      throw ModelError("HmmModel: emission table size mismatch");
    for (int a = 0; a < num_states; ++a)
      check_distribution(d->table[a], "emit row " + std::to_string(a));
  } else {
    const auto& g = std::get<GaussianEmission>(emit);
    if (static_cast<int>(g.mean.size()) != num_states ||
        static_cast<int>(g.var.size()) != num_states)
      throw ModelError("HmmModel: Gaussian emission size mismatch");
    for (double v : g.var)
      if (!(v > 0.0)) throw ModelError("HmmModel: Gaussian variance must be > 0");
  }
}

namespace {

struct ForwardPass {
  std::vector<std::vector<double>> alpha;  // filtered marginals per step
  std::vector<double> log_norms;           // log c_k
  std::vector<std::vector<double>> emis;   // cached emission likelihoods
  double log_likelihood = 0.0;
};

ForwardPass run_forward(const HmmModel& model, std::span<const double> obs) {
  const int n = model.num_states;
  const int steps = static_cast<int>(obs.size());
  if (steps < 1) throw DataError("empty observation sequence");

  ForwardPass fp;
  fp.alpha.assign(steps, std::vector<double>(n));
  fp.emis.assign(steps, std::vector<double>(n));
  fp.log_norms.resize(steps);

  std::vector<double> pred(model.init);
  for (int k = 0; k < steps; ++k) {
    model.emission_likelihood(obs[k], fp.emis[k]);
    double norm = 0.0;
    for (int a = 0; a < n; ++a) {
      fp.alpha[k][a] = pred[a] * fp.emis[k][a];
      norm += fp.alpha[k][a];
    }
    if (norm <= 0.0)
      throw DataError("impossible observation at step " + std::to_string(k));
    for (int a = 0; a < n; ++a) fp.alpha[k][a] /= norm;
    fp.log_norms[k] = std::log(norm);
    fp.log_likelihood += fp.log_norms[k];

    if (k + 1 < steps) {
      std::fill(pred.begin(), pred.end(), 0.0);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) pred[a] += fp.alpha[k][b] * model.trans[b][a];
    }
  }
  return fp;
}

// Scaled backward variables; beta[k] uses the forward normalizers so that
// alpha[k] * beta[k] is the smoothed marginal up to normalization.
std::vector<std::vector<double>> run_backward(const HmmModel& model,
                                              const ForwardPass& fp) {
  const int n = model.num_states;
  const int steps = static_cast<int>(fp.alpha.size());
  std::vector<std::vector<double>> beta(steps, std::vector<double>(n, 1.0));
  for (int k = steps - 2; k >= 0; --k) {
    const double inv_norm = std::exp(-fp.log_norms[k + 1]);
    for (int b = 0; b < n; ++b) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        acc += model.trans[b][a] * fp.emis[k + 1][a] * beta[k + 1][a];
      beta[k][b] = acc * inv_norm;
    }
  }
  return beta;
}

}  // namespace

PosteriorSequence forward_filter(const HmmModel& model,
                                 std::span<const double> obs) {
  model.validate();
  ForwardPass fp = run_forward(model, obs);
  return {std::move(fp.alpha), fp.log_likelihood};
}

PosteriorSequence backward_smooth(const HmmModel& model,
                                  std::span<const double> obs) {
  model.validate();
  ForwardPass fp = run_forward(model, obs);
  const auto beta = run_backward(model, fp);
  const int n = model.num_states;
  PosteriorSequence out;
  out.log_likelihood = fp.log_likelihood;
  out.marginals.assign(fp.alpha.size(), std::vector<double>(n));
  for (std::size_t k = 0; k < fp.alpha.size(); ++k) {
    double norm = 0.0;
    for (int a = 0; a < n; ++a) {
      out.marginals[k][a] = fp.alpha[k][a] * beta[k][a];
      norm += out.marginals[k][a];
    }
    for (int a = 0; a < n; ++a) out.marginals[k][a] /= norm;
  }
  return out;
}

ViterbiResult viterbi(const HmmModel& model, std::span<const double> obs) {
  model.validate();
  const int n = model.num_states;
  const int steps = static_cast<int>(obs.size());
  if (steps < 1) throw DataError("empty observation sequence");
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<double> emis(n);
  std::vector<double> score(n), next(n);
  std::vector<std::vector<int>> back(steps, std::vector<int>(n, 0));

  model.emission_likelihood(obs[0], emis);
  for (int a = 0; a < n; ++a)
    score[a] = std::log(model.init[a]) + std::log(emis[a]);

  for (int k = 1; k < steps; ++k) {
    model.emission_likelihood(obs[k], emis);
    for (int a = 0; a < n; ++a) {
      double best = neg_inf;
      int best_b = 0;
      for (int b = 0; b < n; ++b) {
        const double cand = score[b] + std::log(model.trans[b][a]);
        if (cand > best) {
          best = cand;
          best_b = b;
        }
      }
      next[a] = best + std::log(emis[a]);
      back[k][a] = best_b;
    }
    score.swap(next);
    if (*std::max_element(score.begin(), score.end()) == neg_inf)
      throw DataError("impossible observation at step " + std::to_string(k));
  }

  int best_state = 0;
  for (int a = 1; a < n; ++a)
    if (score[a] > score[best_state]) best_state = a;
  if (score[best_state] == neg_inf)
    throw DataError("impossible observation at step 0");

  ViterbiResult result;
  result.log_joint = score[best_state];
  result.path.resize(steps);
  result.path[steps - 1] = best_state;
  for (int k = steps - 1; k > 0; --k)
    result.path[k - 1] = back[k][result.path[k]];
  return result;
}

BaumWelchResult baum_welch(const HmmModel& model, std::span<const double> obs,
                           int max_iters, double tol) {
  model.validate();
  const int n = model.num_states;
  const int steps = static_cast<int>(obs.size());

  BaumWelchResult result;
  result.model = model;
  std::vector<bool> ever_reset(n, false);

  for (int iter = 0; iter < max_iters; ++iter) {
    ForwardPass fp = run_forward(result.model, obs);
    result.log_likelihood_trace.push_back(fp.log_likelihood);
    result.iterations = iter + 1;
    if (iter > 0) {
      const double gain = fp.log_likelihood - result.log_likelihood_trace[iter - 1];
      if (gain < tol) {
        result.converged = true;
        break;
      }
    }

    const auto beta = run_backward(result.model, fp);

    std::vector<std::vector<double>> gamma(steps, std::vector<double>(n));
    for (int k = 0; k < steps; ++k) {
      double norm = 0.0;
      for (int a = 0; a < n; ++a) {
        gamma[k][a] = fp.alpha[k][a] * beta[k][a];
        norm += gamma[k][a];
      }
      for (int a = 0; a < n; ++a) gamma[k][a] /= norm;
    }

    std::vector<std::vector<double>> xi_sum(n, std::vector<double>(n, 0.0));
    for (int k = 0; k + 1 < steps; ++k) {
      const double inv_norm = std::exp(-fp.log_norms[k + 1]);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
          xi_sum[b][a] += fp.alpha[k][b] * result.model.trans[b][a] *
                          fp.emis[k + 1][a] * beta[k + 1][a] * inv_norm;
    }

    HmmModel updated = result.model;
    updated.init = gamma[0];
    for (int b = 0; b < n; ++b) {
      double row = 0.0;
      for (int a = 0; a < n; ++a) row += xi_sum[b][a];
      if (row <= 0.0) {
        std::fill(updated.trans[b].begin(), updated.trans[b].end(), 1.0 / n);
        ever_reset[b] = true;
      } else {
        for (int a = 0; a < n; ++a) updated.trans[b][a] = xi_sum[b][a] / row;
      }
    }

    std::vector<double> occupancy(n, 0.0);
    for (int k = 0; k < steps; ++k)
      for (int a = 0; a < n; ++a) occupancy[a] += gamma[k][a];

    if (auto* d = std::get_if<DiscreteEmission>(&updated.emit)) {
      const int m = updated.num_symbols();
      for (int a = 0; a < n; ++a) {
        if (occupancy[a] <= 0.0) {
          std::fill(d->table[a].begin(), d->table[a].end(), 1.0 / m);
          ever_reset[a] = true;
          continue;
        }
        std::fill(d->table[a].begin(), d->table[a].end(), 0.0);
        for (int k = 0; k < steps; ++k)
          d->table[a][std::lround(obs[k])] += gamma[k][a];
        for (int s = 0; s < m; ++s) d->table[a][s] /= occupancy[a];
      }
    } else {
      auto& g = std::get<GaussianEmission>(updated.emit);
      for (int a = 0; a < n; ++a) {
        if (occupancy[a] <= 0.0) {
          ever_reset[a] = true;
          continue;  // keep previous Gaussian parameters
        }
        double mean = 0.0;
        for (int k = 0; k < steps; ++k) mean += gamma[k][a] * obs[k];
        mean /= occupancy[a];
        double var = 0.0;
        for (int k = 0; k < steps; ++k)
          var += gamma[k][a] * (obs[k] - mean) * (obs[k] - mean);
        var /= occupancy[a];
        g.mean[a] = mean;
        g.var[a] = std::max(var, 1e-12);  // keep variance positive
      }
    }

    result.model = std::move(updated);
  }

  for (int a = 0; a < n; ++a)
    if (ever_reset[a]) result.reset_states.push_back(a);
  return result;
}

HmmSample hmm_sample(const HmmModel& model, int num_steps, std::uint64_t seed) {
  model.validate();
  if (num_steps < 1) throw DataError("num_steps must be >= 1");
  Rng rng(seed);
  HmmSample sample;
  sample.states.resize(num_steps);
  sample.observations.resize(num_steps);

  int state = rng.categorical(model.init);
  for (int k = 0; k < num_steps; ++k) {
    if (k > 0) state = rng.categorical(model.trans[state]);
    sample.states[k] = state;
    if (const auto* d = std::get_if<DiscreteEmission>(&model.emit)) {
      sample.observations[k] = static_cast<double>(rng.categorical(d->table[state]));
    } else {
      const auto& g = std::get<GaussianEmission>(model.emit);
      sample.observations[k] = rng.normal(g.mean[state], std::sqrt(g.var[state]));
    }
  }
  return sample;
}

}  // namespace pt
