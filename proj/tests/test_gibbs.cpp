#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "pt/errors.hpp"
#include "pt/gibbs.hpp"
#include "pt/image.hpp"
#include "pt/rng.hpp"

using namespace pt;

namespace {

ImageGrid constant_field(int w, int h, double value) {
  return ImageGrid(w, h, value);
}

ImageGrid random_field(int w, int h, Rng& rng, double lo = -1.0, double hi = 1.0) {
  ImageGrid img(w, h);
  for (double& v : img.samples()) v = rng.uniform(lo, hi);
  return img;
}

// Exhaustive Ising minimum over all 2^(w*h) spin fields.
double exhaustive_min_energy(const IsingGrid& grid) {
  IsingGrid work = grid;
  const int n = grid.width * grid.height;
  double best = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int i = 0; i < n; ++i) work.spins[i] = (mask >> i) & 1 ? 1 : -1;
    best = std::min(best, work.energy());
  }
  return best;
}

// Pr(spin = +1) per site of a 1 x n Ising chain via transfer-matrix passes:
// one pass per target site, tracking the partition sum restricted to +1.
std::vector<double> chain_plus_marginals(const IsingGrid& chain) {
  const int n = chain.width;
  const double j = chain.coupling / chain.temperature;
  const double h = chain.field_strength / chain.temperature;
  const auto spin = [](int s) { return s == 0 ? -1.0 : 1.0; };

  std::vector<double> plus(n);
  for (int target = 0; target < n; ++target) {
    std::array<double, 2> f, f_mark;
    for (int s = 0; s < 2; ++s)
      f[s] = std::exp(h * spin(s) * chain.field.at(0, 0));
    f_mark = {0.0, target == 0 ? f[1] : 0.0};
    for (int k = 1; k < n; ++k) {
      std::array<double, 2> g{0.0, 0.0}, g_mark{0.0, 0.0};
      for (int s = 0; s < 2; ++s) {
        const double unary = std::exp(h * spin(s) * chain.field.at(k, 0));
        for (int p = 0; p < 2; ++p) {
          const double w = unary * std::exp(j * spin(s) * spin(p));
          g[s] += f[p] * w;
          g_mark[s] += f_mark[p] * w;
        }
      }
      if (k == target) g_mark = {0.0, g[1]};
      f = g;
      f_mark = g_mark;
    }
    plus[target] = (f_mark[0] + f_mark[1]) / (f[0] + f[1]);
  }
  return plus;
}

}  // namespace

TEST_CASE("single-site closed form marginal") {
  IsingGrid grid = IsingGrid::square(1, constant_field(1, 1, 1.0), 1.0, 1.0, 1.0);
  const auto result = exact_marginals(ising_to_gibbs(grid));
  // Pr(+1) = e / (e + 1/e)
  CHECK(result.marginals[0][1] ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));
  CHECK(result.marginals[0][1] == doctest::Approx(0.880797).epsilon(1e-5));
}

TEST_CASE("zero field gives half-half marginals by spin-flip symmetry") {
  IsingGrid grid = IsingGrid::square(3, constant_field(3, 3, 0.0), 1.0, 1.0, 1.7);
  const auto result = exact_marginals(ising_to_gibbs(grid));
  for (const auto& m : result.marginals) {
    CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("exact marginals agree with the chain transfer matrix") {
  Rng rng(6);
  IsingGrid chain;
  chain.width = 5;
  chain.height = 1;
  chain.field = random_field(5, 1, rng);
  chain.coupling = 0.8;
  chain.field_strength = 1.2;
  chain.temperature = 1.3;
  chain.spins.assign(5, 1);

  const auto result = exact_marginals(ising_to_gibbs(chain));
  const auto expected = chain_plus_marginals(chain);
  for (int i = 0; i < 5; ++i)
    CHECK(result.marginals[i][1] == doctest::Approx(expected[i]).epsilon(1e-10));
  for (const auto& m : result.marginals)
    CHECK(m[0] + m[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state spaces beyond 2^20 are rejected") {
  GibbsModel model;
  model.domain_sizes.assign(21, 2);
  model.adjacency.resize(21);
  model.temperature = 1.0;
  CHECK_THROWS_AS(exact_marginals(model), ModelError);
}

TEST_CASE("one cold sweep under a strong field aligns every spin") {
  IsingGrid grid = IsingGrid::square(4, constant_field(4, 4, 5.0), 1.0, 1.0, 1e-6);
  Rng init(3);
  randomize_spins(grid, init);
  gibbs_sweep(grid, std::uint64_t{9});
  for (auto s : grid.spins) CHECK(s == 1);
}

TEST_CASE("1x2 sweep kernel has the Gibbs distribution as stationary vector") {
  Rng rng(12);
  IsingGrid grid;
  grid.width = 2;
  grid.height = 1;
  grid.field = random_field(2, 1, rng);
  grid.coupling = 1.0;
  grid.field_strength = 1.0;
  grid.temperature = 1.4;
  grid.spins.assign(2, 1);

  const auto spin = [](int bit) { return bit == 0 ? -1.0 : 1.0; };
  const auto p_plus = [&](int site, int other_bit) {
    const double arg = 2.0 *
                       (grid.coupling * spin(other_bit) +
                        grid.field_strength * grid.field.at(site, 0)) /
                       grid.temperature;
    return 1.0 / (1.0 + std::exp(-arg));
  };

  // Raster sweep: site 0 given old s1, then site 1 given new s0.
  double transition[4][4];
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1)
      for (int t0 = 0; t0 < 2; ++t0)
        for (int t1 = 0; t1 < 2; ++t1) {
          const double p0 = t0 == 1 ? p_plus(0, s1) : 1.0 - p_plus(0, s1);
          const double p1 = t1 == 1 ? p_plus(1, t0) : 1.0 - p_plus(1, t0);
          transition[s0 * 2 + s1][t0 * 2 + t1] = p0 * p1;
        }

  double gibbs[4];
  double z = 0.0;
  IsingGrid work = grid;
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1) {
      work.spins = {static_cast<std::int8_t>(spin(s0)),
                    static_cast<std::int8_t>(spin(s1))};
      gibbs[s0 * 2 + s1] = std::exp(-work.energy() / grid.temperature);
      z += gibbs[s0 * 2 + s1];
    }
  for (double& g : gibbs) g /= z;

  for (int to = 0; to < 4; ++to) {
    double acc = 0.0;
    for (int from = 0; from < 4; ++from) acc += gibbs[from] * transition[from][to];
    CHECK(acc == doctest::Approx(gibbs[to]).epsilon(1e-12));
  }
}

TEST_CASE("heat-bath site kernel satisfies detailed balance") {
  Rng rng(44);
  for (int side : {2}) {
    IsingGrid grid = IsingGrid::square(side, random_field(side, side, rng), 1.0,
                                       1.0, 1.1);
    const int n = side * side;
    const auto spin = [](int bit) { return bit == 0 ? -1 : 1; };
    IsingGrid work = grid;
    for (long mask = 0; mask < (1L << n); ++mask) {
      for (int i = 0; i < n; ++i) work.spins[i] = spin((mask >> i) & 1);
      const double pi_x = std::exp(-work.energy() / grid.temperature);
      for (int v = 0; v < n; ++v) {
        const int x = v % side, y = v / side;
        double nbr = 0.0;
        if (x > 0) nbr += work.spins[v - 1];
        if (x + 1 < side) nbr += work.spins[v + 1];
        if (y > 0) nbr += work.spins[v - side];
        if (y + 1 < side) nbr += work.spins[v + side];
        const double arg =
            2.0 * (grid.coupling * nbr + grid.field_strength * grid.field.at(x, y)) /
            grid.temperature;
        const double plus = 1.0 / (1.0 + std::exp(-arg));
        // Flip v and compare pi(x) K(x -> x') with pi(x') K(x' -> x).
        IsingGrid flipped = work;
        flipped.spins[v] = -flipped.spins[v];
        const double pi_y = std::exp(-flipped.energy() / grid.temperature);
        const double k_xy = flipped.spins[v] == 1 ? plus : 1.0 - plus;
        const double k_yx = work.spins[v] == 1 ? plus : 1.0 - plus;
        CHECK(pi_x * k_xy == doctest::Approx(pi_y * k_yx).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("generic heat-bath sweep reproduces exact marginals") {
  // 3-vertex chain with 3 labels and mixed terms, driven through the
  // general GibbsModel sweep rather than the Ising specialization.
  Rng rng(81);
  GibbsModel model;
  model.domain_sizes = {3, 3, 3};
  model.adjacency = {{1}, {0, 2}, {1}};
  model.temperature = 1.2;
  for (int v = 0; v < 3; ++v) {
    SingletonTerm term;
    term.vertex = v;
    term.energy = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                   rng.uniform(-1.0, 1.0)};
    model.singleton_terms.push_back(std::move(term));
  }
  for (int e = 0; e < 2; ++e) {
    PairTerm term;
    term.a = e;
    term.b = e + 1;
    term.energy.resize(9);
    for (double& x : term.energy) x = rng.uniform(-0.8, 0.8);
    model.pair_terms.push_back(std::move(term));
  }
  const auto exact = exact_marginals(model);

  std::vector<int> config(3, 0);
  Rng chain(5);
  for (int s = 0; s < 500; ++s) gibbs_sweep(model, config, chain);
  std::vector<std::array<double, 3>> counts(3, {0.0, 0.0, 0.0});
  const int sweeps = 200000;
  for (int s = 0; s < sweeps; ++s) {
    gibbs_sweep(model, config, chain);
    for (int v = 0; v < 3; ++v) counts[v][config[v]] += 1.0;
  }
  for (int v = 0; v < 3; ++v)
    for (int l = 0; l < 3; ++l)
      CHECK(std::abs(counts[v][l] / sweeps - exact.marginals[v][l]) < 0.02);
}

TEST_CASE("long gibbs runs reproduce exact marginals") {
  Rng rng(2);
  IsingGrid grid = IsingGrid::square(3, random_field(3, 3, rng), 1.0, 1.0, 2.0);
  const auto exact = exact_marginals(ising_to_gibbs(grid));

  Rng chain_rng(99);
  randomize_spins(grid, chain_rng);
  const int burn_in = 2000;
  for (int s = 0; s < burn_in; ++s) gibbs_sweep(grid, chain_rng);

  std::vector<double> plus_counts(9, 0.0);
  const int sweeps = 1000000;
  for (int s = 0; s < sweeps; ++s) {
    gibbs_sweep(grid, chain_rng);
    for (int i = 0; i < 9; ++i)
      if (grid.spins[i] == 1) plus_counts[i] += 1.0;
  }
  for (int i = 0; i < 9; ++i)
    CHECK(std::abs(plus_counts[i] / sweeps - exact.marginals[i][1]) < 0.01);
}

TEST_CASE("annealing recovers a field-dominated ground state") {
  // Exhaustive check first at 4x4, then the 32x32 probe.
  ImageGrid small(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) small.at(x, y) = x < 2 ? 2.0 : -2.0;
  IsingGrid tiny = IsingGrid::square(4, small, 1.0, 1.0, 4.0);
  const double best = exhaustive_min_energy(tiny);
  IsingGrid aligned = tiny;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      aligned.spins[y * 4 + x] = x < 2 ? 1 : -1;
  CHECK(aligned.energy() == doctest::Approx(best).epsilon(1e-12));

  ImageGrid field(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) field.at(x, y) = x < 16 ? 2.0 : -2.0;
  IsingGrid grid = IsingGrid::square(32, field, 1.0, 1.0, 4.0);
  Rng init(7);
  randomize_spins(grid, init);
  const auto schedule = geometric_schedule();
  const auto result = anneal(grid, schedule, 10, 21);
  CHECK(result.snapshots.size() == schedule.size());

  long agree = 0;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      if ((grid.spins[y * 32 + x] > 0) == (x < 16)) ++agree;
  CHECK(static_cast<double>(agree) / (32 * 32) >= 0.99);
}

TEST_CASE("uniform positive field anneals to all plus") {
  IsingGrid grid = IsingGrid::square(8, constant_field(8, 8, 1.0), 1.0, 1.0, 4.0);
  Rng init(1);
  randomize_spins(grid, init);
  anneal(grid, geometric_schedule(), 10, 5);
  for (auto s : grid.spins) CHECK(s == 1);
}

TEST_CASE("anneal validates the schedule") {
  IsingGrid grid = IsingGrid::square(2, constant_field(2, 2, 0.5));
  std::vector<double> increasing = {1.0, 2.0};
  CHECK_THROWS_AS(anneal(grid, increasing, 1, 0), ModelError);
  std::vector<double> negative = {1.0, -0.5};
  CHECK_THROWS_AS(anneal(grid, negative, 1, 0), ModelError);
}

TEST_CASE("mode search finds the exhaustive minimum on 4x4 grids") {
  Rng rng(123);
  for (int trial = 0; trial < 5; ++trial) {
    IsingGrid grid = IsingGrid::square(4, random_field(4, 4, rng, -1.5, 1.5));
    const auto mode = mode_search(grid, 3, 500 + trial);
    CHECK(mode.energy == doctest::Approx(exhaustive_min_energy(grid)).epsilon(1e-12));

    // Greedy postcondition: no single flip lowers the energy.
    IsingGrid check = grid;
    check.spins = mode.spins;
    const double base = check.energy();
    for (std::size_t i = 0; i < check.spins.size(); ++i) {
      check.spins[i] = -check.spins[i];
      CHECK(check.energy() >= base - 1e-12);
      check.spins[i] = -check.spins[i];
    }
  }
}

TEST_CASE("zero field mode is a uniform configuration") {
  IsingGrid grid = IsingGrid::square(4, constant_field(4, 4, 0.0));
  const auto mode = mode_search(grid, 2, 9);
  IsingGrid uniform = grid;
  uniform.spins.assign(16, 1);
  CHECK(mode.energy == doctest::Approx(uniform.energy()).epsilon(1e-12));
}

TEST_CASE("segmentation of a clean two-half image is exact") {
  ImageGrid img(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) img.at(x, y) = x < 8 ? 200.0 : 40.0;
  const auto schedule = geometric_schedule();
  const auto mask = segment_image(img, schedule, 3);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      CHECK(mask.at(x, y) == (x < 8 ? 1.0 : -1.0));
}

TEST_CASE("inverting the image inverts the mask") {
  ImageGrid img(12, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) img.at(x, y) = y < 6 ? 180.0 : 60.0;
  ImageGrid inverted(12, 12);
  for (std::size_t i = 0; i < img.size(); ++i)
    inverted.samples()[i] = 255.0 - img.samples()[i];

  const auto schedule = geometric_schedule();
  const auto mask = segment_image(img, schedule, 8);
  const auto mask_inv = segment_image(inverted, schedule, 8);
  for (std::size_t i = 0; i < mask.size(); ++i)
    CHECK(mask.samples()[i] == -mask_inv.samples()[i]);
}

TEST_CASE("segmentation is invariant under affine rescaling") {
  Rng rng(17);
  ImageGrid img(10, 10);
  for (double& v : img.samples())
    v = static_cast<double>(rng.below(256));  // integer-valued
  ImageGrid scaled(10, 10);
  for (std::size_t i = 0; i < img.size(); ++i)
    scaled.samples()[i] = 3.0 * img.samples()[i] + 7.0;

  const auto schedule = geometric_schedule();
  const auto mask_a = segment_image(img, schedule, 4);
  const auto mask_b = segment_image(scaled, schedule, 4);
  for (std::size_t i = 0; i < mask_a.size(); ++i)
    CHECK(mask_a.samples()[i] == mask_b.samples()[i]);
}

TEST_CASE("constant image yields a degenerate-contrast error") {
  ImageGrid img(8, 8, 42.0);
  const auto schedule = geometric_schedule();
  CHECK_THROWS_WITH_AS(segment_image(img, schedule, 0), "degenerate contrast",
                       DataError);
}

TEST_CASE("noisy two-region segmentation stays above 95 percent") {
  Rng noise(33);
  ImageGrid img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      img.at(x, y) = (x < 32 ? 1.0 : -1.0) + 0.6 * noise.normal();
  const auto schedule = geometric_schedule();
  const auto mask = segment_image(img, schedule, 11);
  long agree = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (mask.at(x, y) == (x < 32 ? 1.0 : -1.0)) ++agree;
  CHECK(static_cast<double>(agree) / (64 * 64) >= 0.95);
}

TEST_CASE("conditional independence across separators (Hammersley-Clifford)") {
  Rng rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 6 + static_cast<int>(rng.below(4));
    GibbsModel model;
    model.domain_sizes.assign(n, 2);
    model.adjacency.resize(n);
    model.temperature = 1.0;
    for (int v = 0; v < n; ++v) {
      SingletonTerm term;
      term.vertex = v;
      term.energy = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      model.singleton_terms.push_back(std::move(term));
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (rng.uniform() > 0.4) continue;
        model.adjacency[a].push_back(b);
        model.adjacency[b].push_back(a);
        PairTerm term;
        term.a = a;
        term.b = b;
        term.energy = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                       rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        model.pair_terms.push_back(std::move(term));
      }

    // Pick non-adjacent (a, b); S = neighbors of a separates them.
    int va = -1, vb = -1;
    for (int a = 0; a < n && va < 0; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        const auto& nbrs = model.adjacency[a];
        if (std::find(nbrs.begin(), nbrs.end(), b) == nbrs.end()) {
          va = a;
          vb = b;
          break;
        }
      }
    if (va < 0) continue;  // complete graph, nothing to separate

    const auto& separator = model.adjacency[va];
    // Joint probabilities by enumeration.
    std::vector<int> config(n, 0);
    std::vector<double> probs;
    std::vector<long> keys;
    double z = 0.0;
    for (;;) {
      const double w = std::exp(-model.energy(config) / model.temperature);
      z += w;
      long key = 0;
      for (int v : separator) key = key * 2 + config[v];
      keys.push_back(key * 4 + config[va] * 2 + config[vb]);
      probs.push_back(w);
      int v = 0;
      while (v < n && ++config[v] == 2) config[v++] = 0;
      if (v == n) break;
    }

    // Conditional mutual information I(x_a; x_b | x_S).
    std::map<long, std::array<double, 4>> cells;
    for (std::size_t i = 0; i < probs.size(); ++i)
      cells[keys[i] / 4][keys[i] % 4] += probs[i] / z;
    double cmi = 0.0;
    for (const auto& [key, joint] : cells) {
      const double mass = joint[0] + joint[1] + joint[2] + joint[3];
      if (mass <= 0.0) continue;
      const double pa[2] = {(joint[0] + joint[1]) / mass, (joint[2] + joint[3]) / mass};
      const double pb[2] = {(joint[0] + joint[2]) / mass, (joint[1] + joint[3]) / mass};
      for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib) {
          const double p = joint[ia * 2 + ib] / mass;
          if (p > 0.0) cmi += mass * p * std::log(p / (pa[ia] * pb[ib]));
        }
    }
    CHECK(std::abs(cmi) <= 1e-10);
  }
}

TEST_CASE("function-parameter fit: fixed point is flat") {
  // Base: 1d chain, 3 vertices, 2 labels, agreement coupling.
  GibbsModel base;
  base.domain_sizes.assign(3, 2);
  base.adjacency = {{1}, {0, 2}, {1}};
  base.temperature = 1.0;
  for (int e = 0; e < 2; ++e) {
    PairTerm term;
    term.a = e;
    term.b = e + 1;
    term.energy = {-0.5, 0.5, 0.5, -0.5};
    base.pair_terms.push_back(std::move(term));
  }
  const auto agreements = [](std::span<const int> c) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) acc += c[i] == c[i + 1] ? 1.0 : 0.0;
    return acc;
  };

  // Build a sample multiset exactly matching the base histogram.
  const auto exact = exact_marginals(base);
  (void)exact;
  std::vector<int> config(3, 0);
  std::map<double, double> hist;
  double z = 0.0;
  for (;;) {
    const double w = std::exp(-base.energy(config));
    z += w;
    hist[agreements(config)] += w;
    int v = 0;
    while (v < 3 && ++config[v] == 2) config[v++] = 0;
    if (v == 3) break;
  }
  std::vector<double> samples;
  for (const auto& [value, mass] : hist) {
    const long copies = std::lround(100000.0 * mass / z);
    for (long i = 0; i < copies; ++i) samples.push_back(value);
  }

  const auto fit = fit_function_exponential(base, agreements, samples, 3);
  CHECK(fit.converged);
  for (double phi : fit.phi) CHECK(std::abs(phi) < 0.05);
}

TEST_CASE("function-parameter fit: two-bin logistic closed form") {
  GibbsModel base;
  base.domain_sizes = {2};
  base.adjacency.resize(1);
  base.temperature = 1.0;
  const auto value = [](std::span<const int> c) { return static_cast<double>(c[0]); };

  std::vector<double> samples;
  for (int i = 0; i < 7000; ++i) samples.push_back(0.0);
  for (int i = 0; i < 3000; ++i) samples.push_back(1.0);

  const auto fit = fit_function_exponential(base, value, samples, 2, 0.001);
  CHECK(fit.converged);
  REQUIRE(fit.phi.size() == 2);
  CHECK(fit.phi[1] - fit.phi[0] == doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-6));
}

TEST_CASE("function-parameter fit reproduces a prescribed histogram") {
  // 4-label chain of length 6; statistic = nearest-neighbour agreements.
  GibbsModel base;
  base.domain_sizes.assign(6, 4);
  base.adjacency.resize(6);
  base.temperature = 1.0;
  for (int v = 0; v + 1 < 6; ++v) {
    base.adjacency[v].push_back(v + 1);
    base.adjacency[v + 1].push_back(v);
  }
  const auto agreements = [](std::span<const int> c) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) acc += c[i] == c[i + 1] ? 1.0 : 0.0;
    return acc;
  };

  // Prescribed target: histogram of a coupled chain, computed exactly.
  GibbsModel coupled = base;
  for (int v = 0; v + 1 < 6; ++v) {
    PairTerm term;
    term.a = v;
    term.b = v + 1;
    term.energy.assign(16, 0.0);
    for (int l = 0; l < 4; ++l) term.energy[l * 4 + l] = -0.8;
    coupled.pair_terms.push_back(std::move(term));
  }
  std::vector<int> config(6, 0);
  std::map<double, double> hist;
  double z = 0.0;
  for (;;) {
    const double w = std::exp(-coupled.energy(config));
    z += w;
    hist[agreements(config)] += w;
    int v = 0;
    while (v < 6 && ++config[v] == 4) config[v++] = 0;
    if (v == 6) break;
  }
  std::vector<double> samples;
  for (const auto& [value, mass] : hist) {
    const long copies = std::lround(200000.0 * mass / z);
    for (long i = 0; i < copies; ++i) samples.push_back(value);
  }

  const auto fit = fit_function_exponential(base, agreements, samples, 6, 0.02);
  CHECK(fit.converged);
  REQUIRE(fit.model_hist.size() == fit.target_hist.size());
  for (std::size_t b = 0; b < fit.model_hist.size(); ++b)
    CHECK(std::abs(fit.model_hist[b] - fit.target_hist[b]) <= 0.02);
}
