#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pt {

// Per-state rows over a finite symbol alphabet: table[state][symbol].
struct DiscreteEmission {
  std::vector<std::vector<double>> table;
};

// Per-state scalar Gaussian with variance > 0.
struct GaussianEmission {
  std::vector<double> mean;
  std::vector<double> var;
};

using Emission = std::variant<DiscreteEmission, GaussianEmission>;

// Discrete-state hidden Markov model. trans[b][a] is the probability of
// moving from state b to state a; rows are stochastic.
struct HmmModel {
  int num_states = 0;
  std::vector<double> init;
  std::vector<std::vector<double>> trans;
  Emission emit;

  bool is_discrete() const { return std::holds_alternative<DiscreteEmission>(emit); }
  int num_symbols() const;

  // Likelihood of `obs` under each state's emission law, written to `out`.
  void emission_likelihood(double obs, std::span<double> out) const;

  // Throws ModelError when a distribution fails to normalize (1e-12), a
  // probability is negative, or a Gaussian variance is not positive.
  void validate() const;
};

// Per-step distributions over hidden states plus the sequence log-likelihood
// accumulated from the recursion's normalizers.
struct PosteriorSequence {
  std::vector<std::vector<double>> marginals;
  double log_likelihood = 0.0;
};

struct ViterbiResult {
  std::vector<int> path;
  double log_joint = 0.0;
};

struct BaumWelchResult {
  HmmModel model;
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;
  // States whose expected occupancy hit zero and were re-initialized to
  // uniform rows during some M-step.
  std::vector<int> reset_states;
};

struct HmmSample {
  std::vector<int> states;
  std::vector<double> observations;
};

// Filtered marginals Pr(x_k | obs_1..k), O(T N^2), carried in the scaled
// linear domain. Throws DataError("impossible observation ...") when the
// total likelihood vanishes at some step.
PosteriorSequence forward_filter(const HmmModel& model,
                                 std::span<const double> obs);

// Smoothed marginals Pr(x_k | obs_1..T) via a scaled backward pass combined
// with the forward recursion.
PosteriorSequence backward_smooth(const HmmModel& model,
                                  std::span<const double> obs);

// Most probable state path and its log joint probability. Ties are broken
// toward the lowest state index at every backtrack step.
ViterbiResult viterbi(const HmmModel& model, std::span<const double> obs);

// EM parameter re-estimation on one observation sequence. The trace is the
// log-likelihood of the model entering each iteration and is non-decreasing;
// iteration stops when the improvement drops below `tol`.
BaumWelchResult baum_welch(const HmmModel& model, std::span<const double> obs,
                           int max_iters, double tol);

// Ancestral sampling of (hidden states, observations); deterministic in seed.
HmmSample hmm_sample(const HmmModel& model, int num_steps, std::uint64_t seed);

}  // namespace pt
