#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pt/image.hpp"

namespace pt {

class Rng;

// Clique energy on one vertex: energy[label].
struct SingletonTerm {
  int vertex = 0;
  std::vector<double> energy;
};

// Clique energy on an edge: energy[la * Lb + lb], row-major over the labels
// of vertices a and b.
struct PairTerm {
  int a = 0;
  int b = 0;
  std::vector<double> energy;
};

// Finite-label Gibbs model Pr_T(x) = exp(-sum_C E_C(x)/T) / Z_T on a graph
// given by adjacency lists. Pair terms must connect adjacent vertices.
struct GibbsModel {
  std::vector<int> domain_sizes;
  std::vector<std::vector<int>> adjacency;
  std::vector<SingletonTerm> singleton_terms;
  std::vector<PairTerm> pair_terms;
  double temperature = 1.0;

  int num_vertices() const { return static_cast<int>(domain_sizes.size()); }
  void validate() const;
  double energy(std::span<const int> config) const;
  // Product of domain sizes; throws ModelError above 2^20.
  std::size_t config_count() const;
};

struct MarginalResult {
  std::vector<std::vector<double>> marginals;  // per vertex, per label
  double log_partition = 0.0;
};

// Exhaustive per-vertex marginals and log Z_T; the oracle every sampler and
// propagation scheme is tested against. Requires config_count() <= 2^20.
MarginalResult exact_marginals(const GibbsModel& model);

// One raster-order pass of single-site heat-bath updates (one uniform per
// site).
void gibbs_sweep(const GibbsModel& model, std::vector<int>& config, Rng& rng);

// Two-layer Ising field: spins x in {+1,-1} coupled to an observed real
// field y. E(x) = -coupling * sum_adjacent x x' - field_strength * sum x y.
// Missing neighbors at the grid border are simply absent from the sums.
struct IsingGrid {
  int width = 0;
  int height = 0;
  ImageGrid field;
  double coupling = 1.0;
  double field_strength = 1.0;
  double temperature = 1.0;
  std::vector<std::int8_t> spins;  // row-major, exactly +1 or -1

  static IsingGrid square(int side, ImageGrid field, double coupling = 1.0,
                          double field_strength = 1.0, double temperature = 1.0);

  std::size_t size() const { return spins.size(); }
  double energy() const;
  void validate() const;
};

// Uniform random +-1 initialization.
void randomize_spins(IsingGrid& grid, Rng& rng);

// Raster-order heat bath at the grid's current temperature:
// Pr(x_v = +1 | rest) = 1 / (1 + exp(-2 (J * sum_nbr x + h * y_v) / T)).
void gibbs_sweep(IsingGrid& grid, Rng& rng);
void gibbs_sweep(IsingGrid& grid, std::uint64_t seed);

// Geometric temperature ladder t0 * rate^k down to (and excluding) t_min.
std::vector<double> geometric_schedule(double t0 = 4.0, double rate = 0.95,
                                       double t_min = 0.05);

struct AnnealResult {
  std::vector<std::vector<std::int8_t>> snapshots;  // one per temperature
};

// Runs `sweeps_per_temp` heat-bath sweeps at each temperature of the
// strictly decreasing schedule, recording a snapshot per level. The grid is
// left in the final low-temperature state.
AnnealResult anneal(IsingGrid& grid, std::span<const double> schedule,
                    int sweeps_per_temp, std::uint64_t seed);

struct ModeResult {
  std::vector<std::int8_t> spins;
  double energy = 0.0;
};

// Best-of-restarts annealing followed by greedy single-site descent until no
// flip lowers the energy.
ModeResult mode_search(const IsingGrid& grid, int restarts, std::uint64_t seed);

// Two-part segmentation: rescales the image affinely to [-1, +1] around its
// median, anneals the Ising field, and returns the final spins as a +-1
// mask. Throws DataError("degenerate contrast") on a constant image.
ImageGrid segment_image(const ImageGrid& image, std::span<const double> schedule,
                        std::uint64_t seed, double coupling = 1.0,
                        double field_strength = 1.0);

// The same Ising problem expressed as a generic GibbsModel (labels 0 -> -1,
// 1 -> +1); used to cross-check the specialized code against enumeration.
GibbsModel ising_to_gibbs(const IsingGrid& grid);

struct FunctionFitResult {
  std::vector<double> bin_edges;  // after empty-bin merging
  std::vector<double> phi;        // piecewise-constant potential, phi[0] = 0
  std::vector<double> model_hist;
  std::vector<double> target_hist;
  int iterations = 0;
  bool converged = false;
};

// Fits an exponential model with a function parameter: Pr(x) proportional to
// base(x) * exp(phi(f(x))), with phi piecewise constant over bins of the
// statistic f. phi is found by iterative scaling until the model histogram
// of f matches the empirical histogram of `samples` within `tol` per bin.
// Bins with no sample mass are merged into their neighbors. Desk scale only:
// the base model is enumerated exactly.
FunctionFitResult fit_function_exponential(
    const GibbsModel& base,
    const std::function<double(std::span<const int>)>& statistic,
    std::span<const double> samples, int num_bins, double tol = 0.02,
    int max_iters = 200);

}  // namespace pt
