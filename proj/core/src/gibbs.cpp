#include "pt/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pt/errors.hpp"
#include "pt/rng.hpp"

namespace pt {

void GibbsModel::validate() const {
  if (temperature <= 0.0) throw ModelError("temperature must be > 0");
  const int n = num_vertices();
  if (static_cast<int>(adjacency.size()) != n)
    throw ModelError("adjacency size mismatch");
  for (const auto& term : singleton_terms) {
    if (term.vertex < 0 || term.vertex >= n)
      throw ModelError("singleton term on unknown vertex");
    if (static_cast<int>(term.energy.size()) != domain_sizes[term.vertex])
      throw ModelError("singleton energy table size mismatch");
  }
  for (const auto& term : pair_terms) {
    if (term.a < 0 || term.a >= n || term.b < 0 || term.b >= n)
      throw ModelError("pair term on unknown vertex");
    const auto& nbrs = adjacency[term.a];
    if (std::find(nbrs.begin(), nbrs.end(), term.b) == nbrs.end())
      throw ModelError("pair term clique is not an edge of the graph");
    if (static_cast<int>(term.energy.size()) !=
        domain_sizes[term.a] * domain_sizes[term.b])
      throw ModelError("pair energy table size mismatch");
  }
}

double GibbsModel::energy(std::span<const int> config) const {
  double e = 0.0;
  for (const auto& term : singleton_terms) e += term.energy[config[term.vertex]];
  for (const auto& term : pair_terms)
    e += term.energy[config[term.a] * domain_sizes[term.b] + config[term.b]];
  return e;
}

std::size_t GibbsModel::config_count() const {
  std::size_t count = 1;
  for (int d : domain_sizes) {
    if (d < 1) throw ModelError("empty vertex domain");
    count *= static_cast<std::size_t>(d);
    if (count > (1u << 20))
      throw ModelError("state space too large for exhaustive enumeration");
  }
  return count;
}

namespace {

bool next_config(std::vector<int>& config, const std::vector<int>& domains) {
  for (std::size_t v = 0; v < config.size(); ++v) {
    if (++config[v] < domains[v]) return true;
    config[v] = 0;
  }
  return false;
}

}  // namespace

MarginalResult exact_marginals(const GibbsModel& model) {
  model.validate();
  model.config_count();
  const int n = model.num_vertices();

  std::vector<int> config(n, 0);
  double min_energy = std::numeric_limits<double>::infinity();
  do {
    min_energy = std::min(min_energy, model.energy(config));
  } while (next_config(config, model.domain_sizes));

  MarginalResult result;
  result.marginals.resize(n);
  for (int v = 0; v < n; ++v) result.marginals[v].assign(model.domain_sizes[v], 0.0);

  double z = 0.0;
  std::fill(config.begin(), config.end(), 0);
  do {
    const double w =
        std::exp(-(model.energy(config) - min_energy) / model.temperature);
    z += w;
    for (int v = 0; v < n; ++v) result.marginals[v][config[v]] += w;
  } while (next_config(config, model.domain_sizes));

  for (int v = 0; v < n; ++v)
    for (double& m : result.marginals[v]) m /= z;
  result.log_partition = std::log(z) - min_energy / model.temperature;
  return result;
}

void gibbs_sweep(const GibbsModel& model, std::vector<int>& config, Rng& rng) {
  const int n = model.num_vertices();
  std::vector<double> cond;
  for (int v = 0; v < n; ++v) {
    const int labels = model.domain_sizes[v];
    cond.assign(labels, 0.0);
    for (const auto& term : model.singleton_terms)
      if (term.vertex == v)
        for (int l = 0; l < labels; ++l) cond[l] += term.energy[l];
    for (const auto& term : model.pair_terms) {
      if (term.a == v)
        for (int l = 0; l < labels; ++l)
          cond[l] += term.energy[l * model.domain_sizes[term.b] + config[term.b]];
      else if (term.b == v)
        for (int l = 0; l < labels; ++l)
          cond[l] += term.energy[config[term.a] * labels + l];
    }
    const double shift = *std::min_element(cond.begin(), cond.end());
    for (int l = 0; l < labels; ++l)
      cond[l] = std::exp(-(cond[l] - shift) / model.temperature);
    config[v] = rng.categorical(cond);
  }
}

IsingGrid IsingGrid::square(int side, ImageGrid field, double coupling,
                            double field_strength, double temperature) {
  IsingGrid grid;
  grid.width = side;
  grid.height = side;
  grid.field = std::move(field);
  grid.coupling = coupling;
  grid.field_strength = field_strength;
  grid.temperature = temperature;
  grid.spins.assign(static_cast<std::size_t>(side) * side, 1);
  grid.validate();
  return grid;
}

void IsingGrid::validate() const {
  if (width < 1 || height < 1) throw ModelError("IsingGrid: empty grid");
  if (field.width() != width || field.height() != height)
    throw ModelError("IsingGrid: field size mismatch");
  if (spins.size() != static_cast<std::size_t>(width) * height)
    throw ModelError("IsingGrid: spin field size mismatch");
  if (temperature <= 0.0) throw ModelError("IsingGrid: temperature must be > 0");
  if (coupling < 0.0 || field_strength < 0.0)
    throw ModelError("IsingGrid: coupling and field strength must be >= 0");
  for (std::int8_t s : spins)
    if (s != 1 && s != -1) throw ModelError("IsingGrid: spins must be +-1");
}

double IsingGrid::energy() const {
  double pair = 0.0;
  double unary = 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      if (x + 1 < width) pair += spins[i] * spins[i + 1];
      if (y + 1 < height) pair += spins[i] * spins[i + width];
      unary += spins[i] * field.at(x, y);
    }
  }
  return -coupling * pair - field_strength * unary;
}

void randomize_spins(IsingGrid& grid, Rng& rng) {
  for (auto& s : grid.spins) s = rng.uniform() < 0.5 ? -1 : 1;
}

void gibbs_sweep(IsingGrid& grid, Rng& rng) {
  const int w = grid.width;
  const int h = grid.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double nbr = 0.0;
      if (x > 0) nbr += grid.spins[i - 1];
      if (x + 1 < w) nbr += grid.spins[i + 1];
      if (y > 0) nbr += grid.spins[i - w];
      if (y + 1 < h) nbr += grid.spins[i + w];
      const double arg = 2.0 *
                         (grid.coupling * nbr +
                          grid.field_strength * grid.field.at(x, y)) /
                         grid.temperature;
      const double p_plus = 1.0 / (1.0 + std::exp(-arg));
      grid.spins[i] = rng.uniform() < p_plus ? 1 : -1;
    }
  }
}

void gibbs_sweep(IsingGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  gibbs_sweep(grid, rng);
}

std::vector<double> geometric_schedule(double t0, double rate, double t_min) {
  if (t0 <= 0.0 || rate <= 0.0 || rate >= 1.0 || t_min <= 0.0 || t_min > t0)
    throw ModelError("invalid annealing schedule parameters");
  std::vector<double> schedule;
  for (double t = t0; t >= t_min; t *= rate) schedule.push_back(t);
  return schedule;
}

AnnealResult anneal(IsingGrid& grid, std::span<const double> schedule,
                    int sweeps_per_temp, std::uint64_t seed) {
  if (schedule.empty()) throw ModelError("empty annealing schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] <= 0.0 || (i > 0 && schedule[i] >= schedule[i - 1]))
      throw ModelError("annealing schedule must be strictly decreasing and positive");
  }
  AnnealResult result;
  result.snapshots.reserve(schedule.size());
  Rng rng(seed);
  for (double t : schedule) {
    grid.temperature = t;
    for (int s = 0; s < sweeps_per_temp; ++s) gibbs_sweep(grid, rng);
    result.snapshots.push_back(grid.spins);
  }
  return result;
}

namespace {

// Flips any spin whose flip lowers the energy until none does.
void greedy_descent(IsingGrid& grid) {
  const int w = grid.width;
  const int h = grid.height;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        double nbr = 0.0;
        if (x > 0) nbr += grid.spins[i - 1];
        if (x + 1 < w) nbr += grid.spins[i + 1];
        if (y > 0) nbr += grid.spins[i - w];
        if (y + 1 < h) nbr += grid.spins[i + w];
        const double delta =
            2.0 * grid.spins[i] *
            (grid.coupling * nbr + grid.field_strength * grid.field.at(x, y));
        if (delta < 0.0) {
          grid.spins[i] = -grid.spins[i];
          changed = true;
        }
      }
    }
  }
}

}  // namespace

ModeResult mode_search(const IsingGrid& grid, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw ModelError("restarts must be >= 1");
  const auto schedule = geometric_schedule();
  ModeResult best;
  best.energy = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    IsingGrid work = grid;
    Rng init_rng(seed, static_cast<std::uint64_t>(r) * 2 + 1);
    randomize_spins(work, init_rng);
    anneal(work, schedule, 10, seed + 0x9E3779B97F4A7C15ull * (r + 1));
    greedy_descent(work);
    const double e = work.energy();
    if (e < best.energy) {
      best.energy = e;
      best.spins = work.spins;
    }
  }
  return best;
}

ImageGrid segment_image(const ImageGrid& image, std::span<const double> schedule,
                        std::uint64_t seed, double coupling,
                        double field_strength) {
  const double median = image.median();
  double spread = 0.0;
  for (double v : image.samples())
    spread = std::max(spread, std::abs(v - median));
  if (spread <= 0.0) throw DataError("degenerate contrast");

  ImageGrid normalized(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i)
    normalized.samples()[i] = (image.samples()[i] - median) / spread;

  IsingGrid grid;
  grid.width = image.width();
  grid.height = image.height();
  grid.field = std::move(normalized);
  grid.coupling = coupling;
  grid.field_strength = field_strength;
  grid.temperature = schedule.empty() ? 1.0 : schedule.front();
  grid.spins.assign(image.size(), 1);
  Rng init_rng(seed, 0xA11);
  randomize_spins(grid, init_rng);
  anneal(grid, schedule, 10, seed);

  ImageGrid mask(image.width(), image.height());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask.samples()[i] = static_cast<double>(grid.spins[i]);
  return mask;
}

GibbsModel ising_to_gibbs(const IsingGrid& grid) {
  grid.validate();
  const int w = grid.width;
  const int h = grid.height;
  const int n = w * h;
  GibbsModel model;
  model.temperature = grid.temperature;
  model.domain_sizes.assign(n, 2);
  model.adjacency.resize(n);

  auto spin = [](int label) { return label == 0 ? -1.0 : 1.0; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int v = y * w + x;
      SingletonTerm unary;
      unary.vertex = v;
      unary.energy = {-grid.field_strength * spin(0) * grid.field.at(x, y),
                      -grid.field_strength * spin(1) * grid.field.at(x, y)};
      model.singleton_terms.push_back(std::move(unary));

      const auto add_edge = [&](int u) {
        model.adjacency[v].push_back(u);
        model.adjacency[u].push_back(v);
        PairTerm pair;
        pair.a = v;
        pair.b = u;
        pair.energy.resize(4);
        for (int la = 0; la < 2; ++la)
          for (int lb = 0; lb < 2; ++lb)
            pair.energy[la * 2 + lb] = -grid.coupling * spin(la) * spin(lb);
        model.pair_terms.push_back(std::move(pair));
      };
      if (x + 1 < w) add_edge(v + 1);
      if (y + 1 < h) add_edge(v + w);
    }
  }
  return model;
}

FunctionFitResult fit_function_exponential(
    const GibbsModel& base,
    const std::function<double(std::span<const int>)>& statistic,
    std::span<const double> samples, int num_bins, double tol, int max_iters) {
  base.validate();
  base.config_count();
  if (samples.size() < 1000)
    throw DataError("need at least 1000 samples of the statistic");
  if (num_bins < 2) throw ModelError("need at least 2 bins");

  const double lo = *std::min_element(samples.begin(), samples.end());
  const double hi = *std::max_element(samples.begin(), samples.end());
  if (!(hi > lo)) throw DataError("statistic samples are constant");

  std::vector<double> edges(num_bins + 1);
  for (int b = 0; b <= num_bins; ++b)
    edges[b] = lo + (hi - lo) * b / num_bins;

  auto bin_of = [](const std::vector<double>& e, double x) {
    const int nb = static_cast<int>(e.size()) - 1;
    if (x <= e.front()) return 0;
    if (x >= e.back()) return nb - 1;
    int b = static_cast<int>(std::upper_bound(e.begin(), e.end(), x) - e.begin()) - 1;
    return std::clamp(b, 0, nb - 1);
  };

  // Empirical histogram; merge empty bins into their left neighbor.
  std::vector<double> target(num_bins, 0.0);
  for (double x : samples) target[bin_of(edges, x)] += 1.0;
  {
    std::vector<double> merged_edges{edges.front()};
    std::vector<double> merged_target;
    for (int b = 0; b < num_bins; ++b) {
      if (target[b] > 0.0 || merged_target.empty()) {
        merged_target.push_back(target[b]);
        merged_edges.push_back(edges[b + 1]);
      } else {
        merged_target.back() += target[b];
        merged_edges.back() = edges[b + 1];
      }
    }
    // A leading empty bin merges rightward.
    while (merged_target.size() > 1 && merged_target.front() == 0.0) {
      merged_target[1] += merged_target[0];
      merged_target.erase(merged_target.begin());
      merged_edges.erase(merged_edges.begin() + 1);
    }
    edges = std::move(merged_edges);
    target = std::move(merged_target);
  }
  const int bins = static_cast<int>(target.size());
  const double total = static_cast<double>(samples.size());
  for (double& t : target) t /= total;

  // Base mass of each bin by exhaustive enumeration.
  std::vector<int> config(base.num_vertices(), 0);
  std::vector<double> base_mass(bins, 0.0);
  double min_energy = std::numeric_limits<double>::infinity();
  do {
    min_energy = std::min(min_energy, base.energy(config));
  } while (next_config(config, base.domain_sizes));
  std::fill(config.begin(), config.end(), 0);
  do {
    const double w =
        std::exp(-(base.energy(config) - min_energy) / base.temperature);
    base_mass[bin_of(edges, statistic(config))] += w;
  } while (next_config(config, base.domain_sizes));

  FunctionFitResult result;
  result.bin_edges = edges;
  result.target_hist = target;
  result.phi.assign(bins, 0.0);

  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    double z = 0.0;
    std::vector<double> model_hist(bins, 0.0);
    for (int b = 0; b < bins; ++b) {
      model_hist[b] = base_mass[b] * std::exp(result.phi[b]);
      z += model_hist[b];
    }
    for (double& m : model_hist) m /= z;
    result.model_hist = model_hist;

    double worst = 0.0;
    for (int b = 0; b < bins; ++b)
      worst = std::max(worst, std::abs(model_hist[b] - target[b]));
    if (worst <= tol) {
      result.converged = true;
      break;
    }

    bool achievable = true;
    for (int b = 0; b < bins; ++b) {
      if (target[b] <= 0.0) continue;
      if (base_mass[b] <= 0.0) {
        achievable = false;
        continue;
      }
      result.phi[b] += std::log(target[b] / model_hist[b]);
    }
    if (!achievable) break;  // target mass where the base model has none
  }

  const double shift = result.phi[0];
  for (double& p : result.phi) p -= shift;
  return result;
}

}  // namespace pt
