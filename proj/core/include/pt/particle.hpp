#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "pt/hmm.hpp"

namespace pt {

class Rng;

// Generic state-space model driven by samplers and a likelihood evaluator.
// Samplers mutate a state column in place using the supplied stream.
struct StateSpaceModel {
  int state_dim = 0;
  int obs_dim = 0;
  std::function<void(Eigen::Ref<Eigen::VectorXd>, Rng&)> sample_init;
  std::function<void(Eigen::Ref<Eigen::VectorXd>, Rng&)> sample_transition;
  std::function<double(const Eigen::VectorXd&,
                       const Eigen::Ref<const Eigen::VectorXd>&)>
      likelihood;  // (observation, state) -> density >= 0
};

// Weighted weak approximation of a filtering posterior. Column i of
// `states` is particle i; weights are kept normalized.
struct ParticleSet {
  Eigen::MatrixXd states;
  Eigen::VectorXd weights;
  int count() const { return static_cast<int>(weights.size()); }
};

enum class ResampleScheme { kSystematic, kMultinomial };

// Draws `count` particles from the model prior with uniform weights.
ParticleSet init_particles(const StateSpaceModel& model, int count,
                           std::uint64_t seed);

// One bootstrap update: resample with replacement by weight, propagate each
// particle through the transition prior, reweight by the observation
// likelihood and renormalize. Every particle owns a counter-based stream
// derived from (seed, step, index), so results do not depend on scheduling.
// Throws DataError("particle collapse ...") if all weights vanish.
void bootstrap_step(const StateSpaceModel& model, ParticleSet& particles,
                    const Eigen::VectorXd& obs, std::uint64_t seed, int step,
                    ResampleScheme scheme = ResampleScheme::kSystematic);

struct FilterRun {
  std::vector<ParticleSet> history;   // per-step particle sets (post-update)
  Eigen::MatrixXd means;              // steps x state_dim weighted means
  Eigen::VectorXd ess;                // effective sample size per step
};

// Chains bootstrap steps over an observation sequence. The first step
// reweights the fresh prior sample directly (no resample/propagate yet).
FilterRun run_filter(const StateSpaceModel& model,
                     const std::vector<Eigen::VectorXd>& obs, int num_particles,
                     std::uint64_t seed,
                     ResampleScheme scheme = ResampleScheme::kSystematic,
                     bool keep_history = false);

// 1 / sum w_i^2, in [1, N].
double effective_sample_size(const ParticleSet& particles);

// Weighted posterior expectation of an arbitrary coordinate function:
// sum_i w_i f(x_i).
double weighted_expectation(
    const ParticleSet& particles,
    const std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>& f);

struct KdeGrid {
  double lo = 0.0;
  double hi = 1.0;
  int count = 0;
};

// Gaussian-kernel density of one state coordinate on a uniform grid.
std::vector<double> kde_posterior(const ParticleSet& particles, int coord,
                                  double bandwidth, const KdeGrid& grid);

struct Density2d {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, y outer
};

Density2d kde_posterior_2d(const ParticleSet& particles, int coord_x,
                           int coord_y, double bandwidth, const KdeGrid& gx,
                           const KdeGrid& gy);

// Discrete HMM viewed as a state-space model; the 1-d state holds the
// state index. Exact filtering of the same model is the test oracle.
StateSpaceModel hmm_bridge(const HmmModel& model);

// 2D constant-velocity tracker whose measurements are the true position
// plus Gaussian noise with probability 1-clutter_prob, and a uniform draw
// over the [0, arena_size]^2 arena otherwise.
struct ClutterTrackerSpec {
  double arena_size = 100.0;
  double sigma_obs = 1.0;
  double sigma_accel = 0.2;
  double clutter_prob = 0.1;
  Eigen::Vector4d init_mean{10.0, 10.0, 1.0, 1.0};  // x, y, vx, vy
  double init_pos_spread = 2.0;
  double init_vel_spread = 0.5;
};

StateSpaceModel clutter_tracker(const ClutterTrackerSpec& spec);

struct TrackSimulation {
  Eigen::MatrixXd truth;                // steps x 4 states
  std::vector<Eigen::VectorXd> observations;
  std::vector<bool> clutter_flags;
};

// Generates a ground-truth trajectory and cluttered measurements.
TrackSimulation simulate_clutter_track(const ClutterTrackerSpec& spec,
                                       int num_steps, std::uint64_t seed);

}  // namespace pt
