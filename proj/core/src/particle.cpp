#include "pt/particle.hpp"

#include <cmath>
#include <string>

#include "pt/errors.hpp"
#include "pt/rng.hpp"

namespace pt {

namespace {

// Stream layout: phase in the top byte keeps init / resample / propagate /
// simulation draws on disjoint counter streams for any (step, index).
std::uint64_t stream_id(std::uint64_t phase, std::uint64_t step,
                        std::uint64_t index) {
  return (phase << 56) | (step << 32) | index;
}

constexpr std::uint64_t kPhaseInit = 0;
constexpr std::uint64_t kPhaseResample = 1;
constexpr std::uint64_t kPhasePropagate = 2;
constexpr std::uint64_t kPhaseSimTruth = 3;
constexpr std::uint64_t kPhaseSimObs = 4;

std::vector<int> resample_indices(const Eigen::VectorXd& weights, int count,
                                  Rng& rng, ResampleScheme scheme) {
  const int n = static_cast<int>(weights.size());
  std::vector<int> picks(count);
  if (scheme == ResampleScheme::kSystematic) {
    const double offset = rng.uniform();
    double cum = weights[0];
    int j = 0;
    for (int i = 0; i < count; ++i) {
      const double target = (offset + i) / count;
      while (target > cum && j + 1 < n) cum += weights[++j];
      picks[i] = j;
    }
  } else {
    for (int i = 0; i < count; ++i) {
      const double target = rng.uniform();
      double cum = 0.0;
      int j = 0;
      for (; j + 1 < n; ++j) {
        cum += weights[j];
        if (target < cum) break;
      }
      picks[i] = j;
    }
  }
  return picks;
}

void reweight(const StateSpaceModel& model, ParticleSet& particles,
              const Eigen::VectorXd& obs, int step) {
  const int n = particles.count();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = model.likelihood(obs, particles.states.col(i));
    particles.weights[i] = w;
    total += w;
  }
  if (!(total > 0.0))
    throw DataError("particle collapse at step " + std::to_string(step));
  particles.weights /= total;
}

}  // namespace

ParticleSet init_particles(const StateSpaceModel& model, int count,
                           std::uint64_t seed) {
  if (count < 1) throw ModelError("particle count must be >= 1");
  ParticleSet ps;
  ps.states.resize(model.state_dim, count);
  ps.weights = Eigen::VectorXd::Constant(count, 1.0 / count);
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, stream_id(kPhaseInit, 0, static_cast<std::uint64_t>(i)));
    model.sample_init(ps.states.col(i), rng);
  }
  return ps;
}

void bootstrap_step(const StateSpaceModel& model, ParticleSet& particles,
                    const Eigen::VectorXd& obs, std::uint64_t seed, int step,
                    ResampleScheme scheme) {
  const int n = particles.count();
  Rng resample_rng(seed, stream_id(kPhaseResample, static_cast<std::uint64_t>(step), 0));
  const auto picks = resample_indices(particles.weights, n, resample_rng, scheme);

  Eigen::MatrixXd resampled(model.state_dim, n);
  for (int i = 0; i < n; ++i) resampled.col(i) = particles.states.col(picks[i]);
  particles.states = std::move(resampled);

  for (int i = 0; i < n; ++i) {
    Rng rng(seed, stream_id(kPhasePropagate, static_cast<std::uint64_t>(step),
                            static_cast<std::uint64_t>(i)));
    model.sample_transition(particles.states.col(i), rng);
  }

  reweight(model, particles, obs, step);
}

FilterRun run_filter(const StateSpaceModel& model,
                     const std::vector<Eigen::VectorXd>& obs, int num_particles,
                     std::uint64_t seed, ResampleScheme scheme,
                     bool keep_history) {
  const int steps = static_cast<int>(obs.size());
  if (steps < 1) throw DataError("empty observation sequence");

  FilterRun run;
  run.means.resize(steps, model.state_dim);
  run.ess.resize(steps);

  ParticleSet particles = init_particles(model, num_particles, seed);
  for (int k = 0; k < steps; ++k) {
    if (k == 0) {
      reweight(model, particles, obs[0], 0);
    } else {
      bootstrap_step(model, particles, obs[k], seed, k, scheme);
    }
    run.means.row(k) = (particles.states * particles.weights).transpose();
    run.ess[k] = effective_sample_size(particles);
    if (keep_history) run.history.push_back(particles);
  }
  return run;
}

double effective_sample_size(const ParticleSet& particles) {
  return 1.0 / particles.weights.squaredNorm();
}

double weighted_expectation(
    const ParticleSet& particles,
    const std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>& f) {
  double acc = 0.0;
  for (int i = 0; i < particles.count(); ++i)
    acc += particles.weights[i] * f(particles.states.col(i));
  return acc;
}

std::vector<double> kde_posterior(const ParticleSet& particles, int coord,
                                  double bandwidth, const KdeGrid& grid) {
  if (grid.count < 2 || !(grid.hi > grid.lo)) throw DataError("empty KDE grid");
  if (!(bandwidth > 0.0)) throw ModelError("bandwidth must be > 0");
  const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * M_PI));
  std::vector<double> density(grid.count, 0.0);
  for (int j = 0; j < grid.count; ++j) {
    const double x = grid.lo + (grid.hi - grid.lo) * j / (grid.count - 1);
    double f = 0.0;
    for (int i = 0; i < particles.count(); ++i) {
      const double z = (x - particles.states(coord, i)) / bandwidth;
      f += particles.weights[i] * std::exp(-0.5 * z * z);
    }
    density[j] = f * norm;
  }
  return density;
}

Density2d kde_posterior_2d(const ParticleSet& particles, int coord_x,
                           int coord_y, double bandwidth, const KdeGrid& gx,
                           const KdeGrid& gy) {
  if (gx.count < 2 || gy.count < 2 || !(gx.hi > gx.lo) || !(gy.hi > gy.lo))
    throw DataError("empty KDE grid");
  if (!(bandwidth > 0.0)) throw ModelError("bandwidth must be > 0");
  Density2d out;
  out.nx = gx.count;
  out.ny = gy.count;
  out.values.assign(static_cast<std::size_t>(gx.count) * gy.count, 0.0);
  const double norm = 1.0 / (2.0 * M_PI * bandwidth * bandwidth);
  for (int jy = 0; jy < gy.count; ++jy) {
    const double y = gy.lo + (gy.hi - gy.lo) * jy / (gy.count - 1);
    for (int jx = 0; jx < gx.count; ++jx) {
      const double x = gx.lo + (gx.hi - gx.lo) * jx / (gx.count - 1);
      double f = 0.0;
      for (int i = 0; i < particles.count(); ++i) {
        const double zx = (x - particles.states(coord_x, i)) / bandwidth;
        const double zy = (y - particles.states(coord_y, i)) / bandwidth;
        f += particles.weights[i] * std::exp(-0.5 * (zx * zx + zy * zy));
      }
      out.values[static_cast<std::size_t>(jy) * gx.count + jx] = f * norm;
    }
  }
  return out;
}

StateSpaceModel hmm_bridge(const HmmModel& hmm) {
  hmm.validate();
  StateSpaceModel model;
  model.state_dim = 1;
  model.obs_dim = 1;
  model.sample_init = [hmm](Eigen::Ref<Eigen::VectorXd> state, Rng& rng) {
    state[0] = static_cast<double>(rng.categorical(hmm.init));
  };
  model.sample_transition = [hmm](Eigen::Ref<Eigen::VectorXd> state, Rng& rng) {
    const int s = static_cast<int>(std::lround(state[0]));
    state[0] = static_cast<double>(rng.categorical(hmm.trans[s]));
  };
  model.likelihood = [hmm](const Eigen::VectorXd& obs,
                           const Eigen::Ref<const Eigen::VectorXd>& state) {
    const int s = static_cast<int>(std::lround(state[0]));
    std::vector<double> like(hmm.num_states);
    hmm.emission_likelihood(obs[0], like);
    return like[s];
  };
  return model;
}

StateSpaceModel clutter_tracker(const ClutterTrackerSpec& spec) {
  StateSpaceModel model;
  model.state_dim = 4;
  model.obs_dim = 2;
  model.sample_init = [spec](Eigen::Ref<Eigen::VectorXd> state, Rng& rng) {
    state[0] = rng.normal(spec.init_mean[0], spec.init_pos_spread);
    state[1] = rng.normal(spec.init_mean[1], spec.init_pos_spread);
    state[2] = rng.normal(spec.init_mean[2], spec.init_vel_spread);
    state[3] = rng.normal(spec.init_mean[3], spec.init_vel_spread);
  };
  model.sample_transition = [spec](Eigen::Ref<Eigen::VectorXd> state, Rng& rng) {
    state[0] += state[2];
    state[1] += state[3];
    state[2] += spec.sigma_accel * rng.normal();
    state[3] += spec.sigma_accel * rng.normal();
  };
  model.likelihood = [spec](const Eigen::VectorXd& obs,
                            const Eigen::Ref<const Eigen::VectorXd>& state) {
    const double dx = obs[0] - state[0];
    const double dy = obs[1] - state[1];
    const double s2 = spec.sigma_obs * spec.sigma_obs;
    const double gauss = std::exp(-0.5 * (dx * dx + dy * dy) / s2) / (2.0 * M_PI * s2);
    const double uniform = 1.0 / (spec.arena_size * spec.arena_size);
    return (1.0 - spec.clutter_prob) * gauss + spec.clutter_prob * uniform;
  };
  return model;
}

TrackSimulation simulate_clutter_track(const ClutterTrackerSpec& spec,
                                       int num_steps, std::uint64_t seed) {
  if (num_steps < 1) throw DataError("num_steps must be >= 1");
  TrackSimulation sim;
  sim.truth.resize(num_steps, 4);
  sim.observations.reserve(num_steps);
  sim.clutter_flags.resize(num_steps);

  const StateSpaceModel model = clutter_tracker(spec);
  Eigen::VectorXd state(4);
  Rng truth_rng(seed, stream_id(kPhaseSimTruth, 0, 0));
  model.sample_init(state, truth_rng);

  for (int k = 0; k < num_steps; ++k) {
    if (k > 0) model.sample_transition(state, truth_rng);
    sim.truth.row(k) = state.transpose();

    Rng obs_rng(seed, stream_id(kPhaseSimObs, static_cast<std::uint64_t>(k), 0));
    Eigen::VectorXd obs(2);
    const bool clutter = obs_rng.uniform() < spec.clutter_prob;
    if (clutter) {
      obs[0] = obs_rng.uniform(0.0, spec.arena_size);
      obs[1] = obs_rng.uniform(0.0, spec.arena_size);
    } else {
      obs[0] = state[0] + spec.sigma_obs * obs_rng.normal();
      obs[1] = state[1] + spec.sigma_obs * obs_rng.normal();
    }
    sim.clutter_flags[k] = clutter;
    sim.observations.push_back(std::move(obs));
  }
  return sim;
}

}  // namespace pt
