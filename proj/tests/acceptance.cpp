// Acceptance suite: one checkable criterion per clause of the project's
// contract, each printing a single PASS/FAIL line. Run all criteria with no
// arguments, or a subset by number: acceptance --cli <pt-binary> [n ...].
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pt/beliefprop.hpp"
#include "pt/diffusion.hpp"
#include "pt/errors.hpp"
#include "pt/gibbs.hpp"
#include "pt/hmm.hpp"
#include "pt/image.hpp"
#include "pt/image_stats.hpp"
#include "pt/particle.hpp"
#include "pt/pcfg.hpp"
#include "pt/rng.hpp"
#include "pt/shape.hpp"
#include "pt/synthesis.hpp"

namespace fs = std::filesystem;
using namespace pt;

namespace {

std::string g_cli_path;

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

// --------------------------------------------------------------------------
// 1. HMM oracle suite
// --------------------------------------------------------------------------
bool hmm_oracle_suite(std::ostream& log) {
  Rng rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const bool gaussian = trial % 4 == 3;
    const int n = 2 + static_cast<int>(rng.below(3));       // N <= 4
    const int steps = 1 + static_cast<int>(rng.below(6));   // T <= 6
    const HmmModel model = oracle::random_hmm(n, 3, rng, gaussian);
    std::vector<double> obs(steps);
    for (double& o : obs)
      o = gaussian ? rng.uniform(-2.0, 2.0) : static_cast<double>(rng.below(3));

    const auto filtered = forward_filter(model, obs);
    const auto expect_f = oracle::enum_filtered(model, obs);
    const auto smoothed = backward_smooth(model, obs);
    const auto expect_s = oracle::enum_smoothed(model, obs);
    for (int k = 0; k < steps; ++k)
      for (int a = 0; a < n; ++a) {
        if (!close(filtered.marginals[k][a], expect_f[k][a], 1e-12)) {
          log << "filter mismatch, trial " << trial;
          return false;
        }
        if (!close(smoothed.marginals[k][a], expect_s[k][a], 1e-12)) {
          log << "smoother mismatch, trial " << trial;
          return false;
        }
      }

    if (!close(std::exp(filtered.log_likelihood), oracle::enum_likelihood(model, obs),
               1e-12)) {
      log << "likelihood mismatch, trial " << trial;
      return false;
    }

    const auto best = viterbi(model, obs);
    const auto expect_v = oracle::enum_viterbi(model, obs);
    if (!close(std::exp(best.log_joint), expect_v.prob, 1e-12)) {
      log << "viterbi mismatch, trial " << trial;
      return false;
    }
    if (expect_v.unique && best.path != expect_v.path) {
      log << "viterbi path mismatch, trial " << trial;
      return false;
    }
  }
  log << "200 models, filter/smoother/viterbi/likelihood all within 1e-12";
  return true;
}

// --------------------------------------------------------------------------
// 2. EM monotonicity
// --------------------------------------------------------------------------
bool em_monotonicity(std::ostream& log) {
  Rng rng(7777);
  for (int run = 0; run < 50; ++run) {
    const bool gaussian = run % 2 == 1;
    const HmmModel truth = oracle::random_hmm(3, 4, rng, gaussian);
    const auto sample = hmm_sample(truth, 80, 9000 + run);
    const HmmModel start = oracle::random_hmm(3, 4, rng, gaussian);
    const auto result = baum_welch(start, sample.observations, 25, 1e-13);
    for (std::size_t i = 1; i < result.log_likelihood_trace.size(); ++i) {
      if (result.log_likelihood_trace[i] <
          result.log_likelihood_trace[i - 1] - 1e-10) {
        log << "trace decreased in run " << run << " at iteration " << i;
        return false;
      }
    }
  }
  log << "50 runs, every trace non-decreasing (slack 1e-10)";
  return true;
}

// --------------------------------------------------------------------------
// 3. Particle-filter consistency
// --------------------------------------------------------------------------
bool particle_consistency(std::ostream& log) {
  Rng rng(424242);
  const HmmModel hmm = oracle::random_hmm(3, 3, rng);
  const auto sample = hmm_sample(hmm, 10, 31);
  const auto exact = forward_filter(hmm, sample.observations);
  const auto model = hmm_bridge(hmm);
  std::vector<Eigen::VectorXd> obs;
  for (double o : sample.observations)
    obs.push_back(Eigen::VectorXd::Constant(1, o));

  const int counts[4] = {100, 1000, 10000, 100000};
  double mean_tv[4] = {0, 0, 0, 0};
  for (int c = 0; c < 4; ++c) {
    for (int seed = 0; seed < 20; ++seed) {
      const auto run = run_filter(model, obs, counts[c], 1000 + seed,
                                  ResampleScheme::kSystematic, true);
      for (int k = 0; k < 10; ++k) {
        double tv = 0.0;
        std::vector<double> hist(3, 0.0);
        for (int i = 0; i < run.history[k].count(); ++i)
          hist[static_cast<int>(std::lround(run.history[k].states(0, i)))] +=
              run.history[k].weights[i];
        for (int a = 0; a < 3; ++a)
          tv += std::abs(hist[a] - exact.marginals[k][a]);
        mean_tv[c] += 0.5 * tv;
      }
    }
    mean_tv[c] /= 20.0 * 10.0;
  }

  log << "mean TV over N grid: " << mean_tv[0] << " " << mean_tv[1] << " "
      << mean_tv[2] << " " << mean_tv[3];
  if (mean_tv[3] > 0.02) return false;
  for (int c = 1; c < 4; ++c)
    if (mean_tv[c] >= mean_tv[c - 1]) return false;
  return true;
}

// --------------------------------------------------------------------------
// 4. Ising correctness
// --------------------------------------------------------------------------
bool ising_correctness(std::ostream& log) {
  // (a) 3x3 exact vs long Gibbs run.
  Rng field_rng(5150);
  ImageGrid field(3, 3);
  for (double& v : field.samples()) v = field_rng.uniform(-1.0, 1.0);
  IsingGrid grid = IsingGrid::square(3, field, 1.0, 1.0, 2.0);
  const auto exact = exact_marginals(ising_to_gibbs(grid));

  Rng chain(77);
  randomize_spins(grid, chain);
  for (int s = 0; s < 2000; ++s) gibbs_sweep(grid, chain);
  std::vector<double> plus(9, 0.0);
  const int sweeps = 1000000;
  for (int s = 0; s < sweeps; ++s) {
    gibbs_sweep(grid, chain);
    for (int i = 0; i < 9; ++i)
      if (grid.spins[i] == 1) plus[i] += 1.0;
  }
  for (int i = 0; i < 9; ++i) {
    if (std::abs(plus[i] / sweeps - exact.marginals[i][1]) >= 0.01) {
      log << "site " << i << " empirical " << plus[i] / sweeps << " vs exact "
          << exact.marginals[i][1];
      return false;
    }
  }

  // (b) 1x2 raster-sweep kernel has the Gibbs stationary vector.
  Rng rng2(62);
  IsingGrid two;
  two.width = 2;
  two.height = 1;
  two.field = ImageGrid(2, 1);
  two.field.at(0, 0) = rng2.uniform(-1.0, 1.0);
  two.field.at(1, 0) = rng2.uniform(-1.0, 1.0);
  two.temperature = 1.3;
  two.spins.assign(2, 1);
  const auto spin = [](int bit) { return bit == 0 ? -1.0 : 1.0; };
  const auto p_plus = [&](int site, int other_bit) {
    const double arg =
        2.0 * (two.coupling * spin(other_bit) +
               two.field_strength * two.field.at(site, 0)) /
        two.temperature;
    return 1.0 / (1.0 + std::exp(-arg));
  };
  double gibbs[4], z = 0.0;
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1) {
      IsingGrid w = two;
      w.spins = {static_cast<std::int8_t>(spin(s0)), static_cast<std::int8_t>(spin(s1))};
      gibbs[s0 * 2 + s1] = std::exp(-w.energy() / two.temperature);
      z += gibbs[s0 * 2 + s1];
    }
  for (double& g : gibbs) g /= z;
  for (int to0 = 0; to0 < 2; ++to0)
    for (int to1 = 0; to1 < 2; ++to1) {
      double acc = 0.0;
      for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1) {
          const double p0 = to0 == 1 ? p_plus(0, s1) : 1.0 - p_plus(0, s1);
          const double p1 = to1 == 1 ? p_plus(1, to0) : 1.0 - p_plus(1, to0);
          acc += gibbs[s0 * 2 + s1] * p0 * p1;
        }
      if (std::abs(acc - gibbs[to0 * 2 + to1]) > 1e-12) {
        log << "stationarity violated at state (" << to0 << "," << to1 << ")";
        return false;
      }
    }

  // (c) 4x4 mode search equals the exhaustive minimum, 20/20.
  Rng rng3(90210);
  for (int trial = 0; trial < 20; ++trial) {
    ImageGrid y(4, 4);
    for (double& v : y.samples()) v = rng3.uniform(-1.5, 1.5);
    IsingGrid small = IsingGrid::square(4, y);
    const auto mode = mode_search(small, 8, 4000 + trial);
    IsingGrid work = small;
    double best = std::numeric_limits<double>::infinity();
    for (long mask = 0; mask < (1L << 16); ++mask) {
      for (int i = 0; i < 16; ++i) work.spins[i] = (mask >> i) & 1 ? 1 : -1;
      best = std::min(best, work.energy());
    }
    if (std::abs(mode.energy - best) > 1e-12) {
      log << "trial " << trial << ": mode " << mode.energy << " vs exhaustive " << best;
      return false;
    }
  }
  log << "marginals within 0.01, stationary within 1e-12, 20/20 exact modes";
  return true;
}

// --------------------------------------------------------------------------
// 5. Segmentation probe
// --------------------------------------------------------------------------
bool segmentation_probe(std::ostream& log) {
  const auto schedule = geometric_schedule();
  for (int seed = 0; seed < 10; ++seed) {
    Rng noise(8800 + seed);
    ImageGrid img(64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        img.at(x, y) = (x < 32 ? 1.0 : -1.0) + 0.6 * noise.normal();
    const ImageGrid mask = segment_image(img, schedule, 1234 + seed);
    long agree = 0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        if (mask.at(x, y) == (x < 32 ? 1.0 : -1.0)) ++agree;
    const double rate = static_cast<double>(agree) / (64 * 64);
    if (rate < 0.95) {
      log << "seed " << seed << " agreement " << rate;
      return false;
    }
  }
  log << "10/10 seeds at >= 95% pixel agreement";
  return true;
}

// --------------------------------------------------------------------------
// 6. BP tree exactness
// --------------------------------------------------------------------------
bool bp_tree_exactness(std::ostream& log) {
  Rng rng(60606);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));  // <= 10 vertices
    const PairwiseModel model = oracle::random_tree_model(n, 3, rng);
    const auto exact = oracle::enumerate_pairwise(model);

    const auto bp = loopy_bp(model, 400, 1e-14, 0.0);
    for (int v = 0; v < n; ++v)
      for (int x = 0; x < model.domain_sizes[v]; ++x)
        if (std::abs(bp.beliefs.vertex[v][x] - exact.vertex[v][x]) > 1e-10) {
          log << "belief mismatch, trial " << trial;
          return false;
        }

    const auto decoded = max_product(model);
    if (std::abs(model.energy(decoded.config) - exact.map_energy) > 1e-9) {
      log << "MAP mismatch, trial " << trial;
      return false;
    }

    const double bethe = bethe_free_energy(model, bp.beliefs);
    if (std::abs(bethe - (-exact.log_z)) > 1e-8) {
      log << "Bethe mismatch, trial " << trial << ": " << bethe << " vs "
          << -exact.log_z;
      return false;
    }
  }
  log << "200 trees: beliefs 1e-10, exact MAPs, Bethe = -log Z within 1e-8";
  return true;
}

// --------------------------------------------------------------------------
// 7. PCFG inside oracle
// --------------------------------------------------------------------------
Pcfg random_acceptance_grammar(Rng& rng) {
  Pcfg g;
  g.terminals = {"x", "y"};
  const int arity3 = rng.uniform() < 0.5 ? 1 : 2;
  const int arities[4] = {0, 0, 2, arity3};
  const auto random_dist = [&](int n, bool sparse) {
    std::vector<double> d(n);
    double sum = 0.0;
    for (double& v : d) {
      v = sparse && rng.uniform() < 0.2 ? 0.0 : 0.05 + rng.uniform();
      sum += v;
    }
    if (sum == 0.0) {  // sparse draw zeroed everything
      d[0] = 1.0;
      sum = 1.0;
    }
    for (double& v : d) v /= sum;
    return d;
  };
  for (int a = 0; a < 4; ++a) {
    PcfgLabel label;
    label.name = std::string(1, static_cast<char>('P' + a));
    label.arity = arities[a];
    if (label.arity == 0) {
      label.emission = random_dist(2, false);
    } else {
      for (int slot = 0; slot < label.arity; ++slot) {
        std::vector<double> d = random_dist(4, true);
        d[0] += 2.0;
        d[1] += 2.0;
        double sum = 0.0;
        for (double v : d) sum += v;
        for (double& v : d) v /= sum;
        label.child_dist.push_back(std::move(d));
      }
    }
    g.labels.push_back(std::move(label));
  }
  g.root = {0.0, 0.0, 1.0, 0.0};
  return g;
}

bool pcfg_inside_oracle(std::ostream& log) {
  Rng rng(31415);
  const int cap = 1;
  for (int trial = 0; trial < 50; ++trial) {
    const Pcfg g = random_acceptance_grammar(rng);
    if (!validate(g).valid) {
      log << "generated grammar invalid, trial " << trial;
      return false;
    }
    const auto stats = oracle::enumerate_yields(g, 4, cap);
    for (const auto& [yield, expected] : stats) {
      const double got = inside(g, yield, cap);
      if (!close(got, expected.inside, 1e-12)) {
        log << "inside mismatch, trial " << trial;
        return false;
      }
      const auto best = viterbi_parse(g, yield, cap);
      if (!best.found) {
        log << "missing parse, trial " << trial;
        return false;
      }
      const double viterbi_prob = std::exp(best.log_prob);
      if (viterbi_prob > got * (1.0 + 1e-12)) {
        log << "viterbi above inside, trial " << trial;
        return false;
      }
      const bool unique = count_parses(g, yield, cap) == 1.0;
      const bool equal = std::abs(got - viterbi_prob) <= 1e-12 * got;
      if (unique != equal) {
        log << "equality detection wrong, trial " << trial << " yield size "
            << yield.size();
        return false;
      }
    }
  }
  log << "50 grammars, all yields <= 4: inside exact, equality detection correct";
  return true;
}

// --------------------------------------------------------------------------
// 8. Kurtosis calibration
// --------------------------------------------------------------------------
bool kurtosis_calibration(std::ostream& log) {
  Rng rng(99999);
  std::vector<double> gauss(1000000);
  for (double& v : gauss) v = rng.normal();
  const double kg = kurtosis(gauss);
  if (std::abs(kg - 3.0) > 0.1) {
    log << "gaussian kurtosis " << kg;
    return false;
  }
  std::vector<double> laplace(1000000);
  for (double& v : laplace) {
    const double u = rng.uniform() - 0.5;
    v = -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u);
  }
  const double kl = kurtosis(laplace);
  if (std::abs(kl - 6.0) > 0.2) {
    log << "laplace kurtosis " << kl;
    return false;
  }
  const DeadLeavesSpec spec;
  for (int seed = 0; seed < 20; ++seed) {
    const auto img = synth_dead_leaves(spec, 256, 3000 + seed);
    const double k = kurtosis(horizontal_diff(img.image));
    if (k <= 3.0) {
      log << "dead-leaves seed " << seed << " kurtosis " << k;
      return false;
    }
  }
  log << "gaussian " << kg << ", laplace " << kl << ", 20/20 heavy-tailed syntheses";
  return true;
}

// --------------------------------------------------------------------------
// 9. Spectral-slope probe
// --------------------------------------------------------------------------
bool spectral_slope_probe(std::ostream& log) {
  Rng rng(2222);
  ImageGrid noise(256, 256);
  for (double& v : noise.samples()) v = rng.normal();
  const auto flat = power_spectrum_slope(noise);
  if (std::abs(flat.lambda) > 0.15) {
    log << "white-noise lambda " << flat.lambda;
    return false;
  }
  const DeadLeavesSpec spec;
  double mean_lambda = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const auto img = synth_dead_leaves(spec, 256, 6000 + seed);
    mean_lambda += power_spectrum_slope(img.image).lambda;
  }
  mean_lambda /= 20.0;
  log << "white " << flat.lambda << ", dead-leaves mean lambda " << mean_lambda;
  return mean_lambda >= 1.5 && mean_lambda <= 2.5;
}

// --------------------------------------------------------------------------
// 10. Diffusion
// --------------------------------------------------------------------------
bool diffusion_criteria(std::ostream& log) {
  const ImageGrid constant(32, 32, 1.25);
  const auto fixed = diffuse(constant, 0.3, 50, 0.02, 0.1);
  for (double v : fixed.image.samples())
    if (v != 1.25) {
      log << "constant image moved";
      return false;
    }

  Rng rng(1212);
  ImageGrid img(32, 32);
  for (double& v : img.samples()) v = rng.normal();
  const auto result = diffuse(img, 0.2, 1000, 0.02, 0.1);
  for (std::size_t i = 1; i < result.energy_trace.size(); ++i)
    if (result.energy_trace[i] > result.energy_trace[i - 1] + 1e-9) {
      log << "energy increased at step " << i;
      return false;
    }

  bool rejected = false;
  try {
    diffuse(img, 0.2, 1, 0.05, 0.1);  // dt > 0.2 * epsilon
  } catch (const ModelError&) {
    rejected = true;
  }
  if (!rejected) {
    log << "stability guard did not fire";
    return false;
  }
  log << "fixed point exact, 1000-step energy monotone, guard rejects dt > 0.2 eps";
  return true;
}

// --------------------------------------------------------------------------
// 11. Shape geodesics
// --------------------------------------------------------------------------
bool shape_geodesics(std::ostream& log) {
  const Kernel kernel{KernelFamily::kGaussian, 1.0};

  // Conservation at N = 50.
  Rng rng(555);
  LandmarkState state;
  state.points.resize(50, 2);
  state.momenta.resize(50, 2);
  for (int i = 0; i < 50; ++i) {
    // Spacing near the kernel width, so the landmarks genuinely interact.
    state.points(i, 0) = 1.3 * (i % 10) + 0.3 * rng.uniform(-1.0, 1.0);
    state.points(i, 1) = 1.3 * (i / 10) + 0.3 * rng.uniform(-1.0, 1.0);
    state.momenta(i, 0) = rng.uniform(-0.5, 0.5);
    state.momenta(i, 1) = rng.uniform(-0.5, 0.5);
  }
  const double h0 = kinetic_energy(state, kernel);
  const Eigen::RowVectorXd p0 = state.momenta.colwise().sum();
  const auto traj = geodesic_shoot(state, kernel, 1.0, 1e-3);
  const double h_drift =
      std::abs(kinetic_energy(traj.states.back(), kernel) - h0) / std::abs(h0);
  const double p_drift = (traj.states.back().momenta.colwise().sum() - p0).norm();
  if (h_drift > 1e-6) {
    log << "H drift " << h_drift;
    return false;
  }
  if (p_drift > 1e-9) {
    log << "momentum drift " << p_drift;
    return false;
  }

  // Single landmark closed form.
  LandmarkState one;
  one.points = Eigen::MatrixXd::Zero(1, 2);
  one.momenta.resize(1, 2);
  one.momenta << 0.37, -0.21;
  const auto free = geodesic_shoot(one, kernel, 1.0, 1e-3);
  const Eigen::RowVector2d expected(2.0 * 0.37, 2.0 * -0.21);
  if ((free.states.back().points.row(0) - expected).norm() > 1e-10 ||
      (free.states.back().momenta.row(0) - one.momenta.row(0)).norm() > 1e-10) {
    log << "single-landmark closed form violated";
    return false;
  }

  // Time reversal.
  LandmarkState reversed = traj.states.back();
  reversed.momenta = -reversed.momenta;
  const auto back = geodesic_shoot(reversed, kernel, 1.0, 1e-3);
  const double return_error =
      (back.states.back().points - state.points).cwiseAbs().maxCoeff();
  if (return_error > 1e-6) {
    log << "time reversal error " << return_error;
    return false;
  }

  // Small-displacement distance vs the quotient quadratic form, on a
  // well-separated configuration where the metric is numerically flat.
  const Kernel tight{KernelFamily::kGaussian, 0.4};
  Eigen::MatrixXd start(4, 2);
  start << 0.0, 0.0, 2.4, 0.0, 0.0, 2.4, 2.4, 2.4;
  Rng drng(22);
  Eigen::MatrixXd direction(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int d = 0; d < 2; ++d) direction(i, d) = drng.uniform(-1.0, 1.0);
  const double eps = 1e-3;
  const auto shot =
      geodesic_distance(start, start + eps * direction, tight, 400, 1e-12);
  if (!shot.matched) {
    log << "shooting did not match the target";
    return false;
  }
  const double quadratic = eps * eps * metric_energy(start, direction, tight);
  const double rel =
      std::abs(shot.distance * shot.distance - quadratic) / quadratic;
  if (rel > 1e-6) {
    log << "metric consistency off by " << rel;
    return false;
  }

  log << "H drift " << h_drift << ", momentum drift " << p_drift
      << ", reversal " << return_error << ", metric agreement " << rel;
  return true;
}

// --------------------------------------------------------------------------
// 12. Determinism harness
// --------------------------------------------------------------------------
bool read_file_bytes(const fs::path& p, std::string& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

bool determinism_harness(std::ostream& log) {
  if (g_cli_path.empty()) {
    log << "no --cli path given";
    return false;
  }
  const fs::path root = fs::temp_directory_path() / "pt_acceptance_diff";
  fs::remove_all(root);
  fs::create_directories(root);

  const std::vector<std::string> demos = {"anneal-strip", "shape-walk",
                                          "deadleaves-gallery", "tracker"};
  std::size_t total_files = 0;
  for (const auto& name : demos) {
    // Rerun the identical command and byte-compare every artifact it wrote.
    const fs::path dir = root / name;
    const std::string cmd = g_cli_path + " demo " + name + " --out-dir " +
                            dir.string() + " --seed 4242 >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      log << "demo " << name << " failed";
      return false;
    }
    std::map<fs::path, std::string> first_run;
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::string bytes;
      if (!read_file_bytes(entry.path(), bytes)) {
        log << "unreadable artifact " << entry.path();
        return false;
      }
      first_run[entry.path().filename()] = std::move(bytes);
    }
    if (first_run.empty()) {
      log << "demo " << name << " wrote nothing";
      return false;
    }
    if (std::system(cmd.c_str()) != 0) {
      log << "demo " << name << " rerun failed";
      return false;
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      ++files;
      std::string bytes;
      const auto it = first_run.find(entry.path().filename());
      if (it == first_run.end() || !read_file_bytes(entry.path(), bytes) ||
          bytes != it->second) {
        log << "demo " << name << ": " << entry.path().filename() << " differs";
        return false;
      }
    }
    if (files != first_run.size()) {
      log << "demo " << name << " artifact set changed";
      return false;
    }
    total_files += files;
  }
  fs::remove_all(root);
  log << "4 demo bundles, " << total_files << " artifacts byte-identical across reruns";
  return true;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::ostream&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else {
      selected.push_back(std::atoi(arg.c_str()));
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "HMM oracle suite", hmm_oracle_suite},
      {2, "EM monotonicity", em_monotonicity},
      {3, "particle-filter consistency", particle_consistency},
      {4, "Ising correctness", ising_correctness},
      {5, "segmentation probe", segmentation_probe},
      {6, "BP tree exactness", bp_tree_exactness},
      {7, "PCFG inside oracle", pcfg_inside_oracle},
      {8, "kurtosis calibration", kurtosis_calibration},
      {9, "spectral-slope probe", spectral_slope_probe},
      {10, "diffusion", diffusion_criteria},
      {11, "shape geodesics", shape_geodesics},
      {12, "determinism harness", determinism_harness},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
      continue;
    std::ostringstream log;
    bool ok = false;
    try {
      ok = criterion.run(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion.id << " ("
              << criterion.name << "): " << log.str() << "\n";
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
