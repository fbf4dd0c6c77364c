#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pt/beliefprop.hpp"
#include "pt/errors.hpp"
#include "pt/gibbs.hpp"
#include "pt/hmm.hpp"
#include "pt/rng.hpp"

using namespace pt;

namespace {

// 3x3 Ising posterior as a pairwise model with strictly positive potentials.
PairwiseModel ising_pairwise(const ImageGrid& field, double coupling, double temp) {
  PairwiseModel model;
  const int w = field.width(), h = field.height();
  model.domain_sizes.assign(w * h, 2);
  model.unary.resize(w * h);
  const auto spin = [](int l) { return l == 0 ? -1.0 : 1.0; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto& phi = model.unary[y * w + x];
      phi = {std::exp(spin(0) * field.at(x, y) / temp),
             std::exp(spin(1) * field.at(x, y) / temp)};
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int v = y * w + x;
      const auto add = [&](int u) {
        PairwiseModel::Edge edge;
        edge.a = v;
        edge.b = u;
        edge.psi.resize(4);
        for (int la = 0; la < 2; ++la)
          for (int lb = 0; lb < 2; ++lb)
            edge.psi[la * 2 + lb] = std::exp(coupling * spin(la) * spin(lb) / temp);
        model.edges.push_back(std::move(edge));
      };
      if (x + 1 < w) add(v + 1);
      if (y + 1 < h) add(v + w);
    }
  return model;
}

}  // namespace

TEST_CASE("mean field is exact when there are no edges") {
  PairwiseModel model;
  model.domain_sizes = {2, 3};
  model.unary = {{0.3, 0.9}, {0.2, 0.5, 0.1}};
  const auto result = mean_field(model);
  CHECK(result.converged);
  CHECK(result.approx.vertex[0][0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(result.approx.vertex[0][1] == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(result.approx.vertex[1][1] == doctest::Approx(0.625).epsilon(1e-10));
}

TEST_CASE("mean field finds the symmetric fixed point on a symmetric edge") {
  PairwiseModel model;
  model.domain_sizes = {2, 2};
  model.unary = {{1.0, 1.0}, {1.0, 1.0}};
  PairwiseModel::Edge edge;
  edge.a = 0;
  edge.b = 1;
  edge.psi = {2.0, 0.5, 0.5, 2.0};
  model.edges.push_back(edge);
  const auto result = mean_field(model);
  CHECK(result.converged);
  for (int x = 0; x < 2; ++x)
    CHECK(result.approx.vertex[0][x] ==
          doctest::Approx(result.approx.vertex[1][x]).epsilon(1e-8));
  // Free energy trace never increases.
  for (std::size_t i = 1; i < result.free_energy_trace.size(); ++i)
    CHECK(result.free_energy_trace[i] <= result.free_energy_trace[i - 1] + 1e-12);
}

TEST_CASE("Bethe approximation beats mean field on small Ising grids") {
  // Mean field is by construction the KL(prod q || p) optimizer over
  // products, so the comparison is between the variational gaps:
  // KL(mean field) = F_mf + log Z against its Bethe analog
  // F_bethe + log Z, and between per-vertex marginal accuracy.
  Rng rng(515);
  int gap_wins = 0, marginal_wins = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    ImageGrid field(3, 3);
    for (double& v : field.samples()) v = rng.uniform(-1.0, 1.0);
    const PairwiseModel model = ising_pairwise(field, 0.5, 1.0);
    const auto exact = oracle::enumerate_pairwise(model);

    const auto mf = mean_field(model, 2000, 1e-12);
    const auto bp = loopy_bp(model, 2000, 1e-12, 0.5);
    const double kl_mf = mf.free_energy + exact.log_z;  // true KL, >= 0
    CHECK(kl_mf >= -1e-10);
    const double kl_bethe =
        bethe_free_energy(model, bp.beliefs) + exact.log_z;
    if (kl_mf >= kl_bethe) ++gap_wins;

    double err_mf = 0.0, err_bp = 0.0;
    for (int v = 0; v < model.num_vertices(); ++v)
      for (int x = 0; x < 2; ++x) {
        err_mf += std::abs(mf.approx.vertex[v][x] - exact.vertex[v][x]);
        err_bp += std::abs(bp.beliefs.vertex[v][x] - exact.vertex[v][x]);
      }
    if (err_mf >= err_bp) ++marginal_wins;
  }
  CHECK(gap_wins >= static_cast<int>(0.9 * trials));
  CHECK(marginal_wins >= static_cast<int>(0.9 * trials));
}

TEST_CASE("BP on a chain equals HMM forward-backward smoothing") {
  Rng rng(99);
  const HmmModel hmm = oracle::random_hmm(3, 3, rng);
  const std::vector<double> obs = {0, 2, 1, 1, 0};
  const auto smoothed = backward_smooth(hmm, obs);

  // Chain pairwise model: unary at step k is the emission likelihood (times
  // the initial law at k = 0), pairwise is the transition table.
  PairwiseModel model;
  const int steps = 5;
  model.domain_sizes.assign(steps, 3);
  model.unary.resize(steps);
  std::vector<double> like(3);
  for (int k = 0; k < steps; ++k) {
    hmm.emission_likelihood(obs[k], like);
    model.unary[k] = like;
    if (k == 0)
      for (int a = 0; a < 3; ++a) model.unary[k][a] *= hmm.init[a];
  }
  for (int k = 0; k + 1 < steps; ++k) {
    PairwiseModel::Edge edge;
    edge.a = k;
    edge.b = k + 1;
    edge.psi.resize(9);
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a) edge.psi[b * 3 + a] = hmm.trans[b][a];
    model.edges.push_back(std::move(edge));
  }

  const auto bp = loopy_bp(model, 500, 1e-14, 0.0);
  CHECK(bp.converged);
  for (int k = 0; k < steps; ++k)
    for (int a = 0; a < 3; ++a)
      CHECK(bp.beliefs.vertex[k][a] ==
            doctest::Approx(smoothed.marginals[k][a]).epsilon(1e-10));
}

TEST_CASE("BP is exact on random trees and a star") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(rng.below(8));
    const PairwiseModel model = oracle::random_tree_model(n, 3, rng);
    const auto exact = oracle::enumerate_pairwise(model);
    const auto bp = loopy_bp(model, 500, 1e-14, 0.0);
    CHECK(bp.converged);
    for (int v = 0; v < n; ++v)
      for (int x = 0; x < model.domain_sizes[v]; ++x)
        CHECK(bp.beliefs.vertex[v][x] ==
              doctest::Approx(exact.vertex[v][x]).epsilon(1e-10));
    for (std::size_t e = 0; e < model.edges.size(); ++e)
      for (std::size_t i = 0; i < exact.edge[e].size(); ++i)
        CHECK(bp.beliefs.edge[e][i] == doctest::Approx(exact.edge[e][i]).epsilon(1e-10));
    CHECK(bp.beliefs.max_compatibility_error(model) <= 1e-8);
  }
}

TEST_CASE("single-vertex belief is the normalized potential") {
  PairwiseModel model;
  model.domain_sizes = {3};
  model.unary = {{1.0, 3.0, 4.0}};
  const auto bp = loopy_bp(model);
  CHECK(bp.beliefs.vertex[0][0] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(bp.beliefs.vertex[0][1] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(bp.beliefs.vertex[0][2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("non-convergent odd frustrated cycle is flagged oscillating") {
  // Strong disagreement on an odd cycle with an asymmetric bias; undamped
  // synchronous updates keep rotating the contradiction around the loop.
  PairwiseModel model;
  const int n = 5;
  model.domain_sizes.assign(n, 2);
  model.unary.assign(n, {1.1, 0.9});
  model.unary[0] = {1.4, 0.6};
  for (int v = 0; v < n; ++v) {
    PairwiseModel::Edge edge;
    edge.a = v;
    edge.b = (v + 1) % n;
    edge.psi = {1e-4, 1.0, 1.0, 1e-4};
    model.edges.push_back(std::move(edge));
  }
  const auto bp = loopy_bp(model, 200, 1e-12, 0.0);
  CHECK_FALSE(bp.converged);
}

TEST_CASE("max-product equals the exhaustive MAP on trees") {
  Rng rng(404);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(rng.below(4));
    const PairwiseModel model = oracle::random_tree_model(n, 2, rng);
    const auto exact = oracle::enumerate_pairwise(model);
    const auto result = max_product(model);
    CHECK(result.exact);
    CHECK(model.energy(result.config) == doctest::Approx(exact.map_energy).epsilon(1e-9));
  }
}

TEST_CASE("max-product trivial cases") {
  PairwiseModel isolated;
  isolated.domain_sizes = {2, 3};
  isolated.unary = {{0.2, 0.8}, {0.1, 0.7, 0.2}};
  // No edges: fall back to vertex argmax (not a tree, 2 components).
  const auto result = max_product(isolated);
  CHECK(result.config == std::vector<int>{1, 1});

  // Attractive chain with a pinned endpoint copies the pinned label.
  PairwiseModel chain;
  const int n = 5;
  chain.domain_sizes.assign(n, 2);
  chain.unary.assign(n, {1.0, 1.0});
  chain.unary[0] = {1e-9, 1.0};  // pin to label 1
  for (int v = 0; v + 1 < n; ++v) {
    PairwiseModel::Edge edge;
    edge.a = v;
    edge.b = v + 1;
    edge.psi = {1.0, 1e-6, 1e-6, 1.0};
    chain.edges.push_back(std::move(edge));
  }
  const auto pinned = max_product(chain);
  CHECK(pinned.exact);
  for (int v = 0; v < n; ++v) CHECK(pinned.config[v] == 1);
}

TEST_CASE("Bethe free energy equals -log Z on trees") {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    const PairwiseModel model = oracle::random_tree_model(4 + t % 5, 3, rng);
    const auto exact = oracle::enumerate_pairwise(model);
    const auto bp = loopy_bp(model, 500, 1e-14, 0.0);
    const double f = bethe_free_energy(model, bp.beliefs);
    CHECK(f == doctest::Approx(-exact.log_z).epsilon(1e-8));
  }
}

TEST_CASE("Bethe free energy of a single vertex is -log sum phi") {
  PairwiseModel model;
  model.domain_sizes = {3};
  model.unary = {{1.0, 3.0, 4.0}};
  const auto bp = loopy_bp(model);
  CHECK(bethe_free_energy(model, bp.beliefs) ==
        doctest::Approx(-std::log(8.0)).epsilon(1e-10));
}

TEST_CASE("Bethe gap is usually below the mean-field gap on 3x3 Ising") {
  Rng rng(11);
  int bethe_wins = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    ImageGrid field(3, 3);
    for (double& v : field.samples()) v = rng.uniform(-1.0, 1.0);
    const PairwiseModel model = ising_pairwise(field, 0.5, 1.0);
    const auto exact = oracle::enumerate_pairwise(model);

    const auto bp = loopy_bp(model, 2000, 1e-12, 0.5);
    const double bethe_gap =
        std::abs(bethe_free_energy(model, bp.beliefs) - (-exact.log_z));
    const auto mf = mean_field(model, 2000, 1e-12);
    const double mf_gap = std::abs(mf.free_energy - (-exact.log_z));
    CHECK(std::isfinite(bethe_gap));
    if (bethe_gap <= mf_gap) ++bethe_wins;
  }
  CHECK(bethe_wins >= static_cast<int>(0.8 * trials));
}

TEST_CASE("converged BP beliefs are a stationary point of the Bethe energy") {
  Rng rng(88);
  ImageGrid field(3, 3);
  for (double& v : field.samples()) v = rng.uniform(-1.0, 1.0);
  const PairwiseModel model = ising_pairwise(field, 0.4, 1.0);
  const auto bp = loopy_bp(model, 5000, 1e-13, 0.5);
  REQUIRE(bp.converged);
  const double f0 = bethe_free_energy(model, bp.beliefs);

  // Compatible perturbations: zero-marginal patterns on edge tables keep
  // every vertex belief intact. Stationarity means the response is second
  // order: shrinking the perturbation by 10 shrinks the change by ~100.
  Rng prng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> direction(model.edges.size());
    for (double& d : direction) d = prng.uniform() - 0.5;

    const auto perturb = [&](double scale) {
      EdgeMarginalSet perturbed = bp.beliefs;
      for (std::size_t e = 0; e < perturbed.edge.size(); ++e) {
        const double eps = scale * direction[e];
        perturbed.edge[e][0] += eps;
        perturbed.edge[e][1] -= eps;
        perturbed.edge[e][2] -= eps;
        perturbed.edge[e][3] += eps;
      }
      return std::abs(bethe_free_energy(model, perturbed) - f0);
    };

    const double coarse = perturb(1e-4);
    CHECK(coarse <= 1e-6);
    const double fine = perturb(1e-5);
    CHECK(fine <= std::max(0.03 * coarse, 1e-12));
  }
}

TEST_CASE("incompatible beliefs are rejected") {
  PairwiseModel model;
  model.domain_sizes = {2, 2};
  model.unary = {{1.0, 1.0}, {1.0, 1.0}};
  PairwiseModel::Edge edge;
  edge.a = 0;
  edge.b = 1;
  edge.psi = {1.0, 1.0, 1.0, 1.0};
  model.edges.push_back(edge);

  EdgeMarginalSet bad;
  bad.vertex = {{0.9, 0.1}, {0.5, 0.5}};
  bad.edge = {{0.25, 0.25, 0.25, 0.25}};  // marginal is (0.5, 0.5), not (0.9, 0.1)
  CHECK_THROWS_AS(bethe_free_energy(model, bad), DataError);
}

TEST_CASE("cycle BP equals the infinite lifted chain (covering graph)") {
  // Homogeneous binary cycle; the universal cover is a doubly infinite
  // homogeneous chain whose stationary marginal comes from the Perron
  // eigenvectors of the transfer operator M(x, y) = psi(x, y) phi(y).
  const std::vector<double> phi = {0.65, 0.35};
  const std::vector<double> psi = {1.3, 0.8, 0.8, 1.3};  // mild attraction

  PairwiseModel model;
  const int n = 7;
  model.domain_sizes.assign(n, 2);
  model.unary.assign(n, phi);
  for (int v = 0; v < n; ++v) {
    PairwiseModel::Edge edge;
    edge.a = v;
    edge.b = (v + 1) % n;
    edge.psi = psi;
    model.edges.push_back(std::move(edge));
  }
  const auto bp = loopy_bp(model, 5000, 1e-13, 0.0);
  REQUIRE(bp.converged);

  // Middle-site marginal of the lifted chain: iterated (normalized) transfer
  // passes from both ends converge to the Perron eigenvectors, and their
  // pointwise product at the middle site is the stationary marginal.
  const int len = 400;
  std::vector<std::array<double, 2>> fwd(len), bwd(len);
  fwd[0] = {phi[0], phi[1]};
  for (int k = 1; k < len; ++k) {
    for (int y = 0; y < 2; ++y) {
      double acc = 0.0;
      for (int x = 0; x < 2; ++x) acc += fwd[k - 1][x] * psi[x * 2 + y];
      fwd[k][y] = acc * phi[y];
    }
    const double norm = fwd[k][0] + fwd[k][1];
    fwd[k][0] /= norm;
    fwd[k][1] /= norm;
  }
  bwd[len - 1] = {1.0, 1.0};
  for (int k = len - 2; k >= 0; --k) {
    for (int x = 0; x < 2; ++x) {
      double acc = 0.0;
      for (int y = 0; y < 2; ++y) acc += psi[x * 2 + y] * phi[y] * bwd[k + 1][y];
      bwd[k][x] = acc;
    }
    const double norm = bwd[k][0] + bwd[k][1];
    bwd[k][0] /= norm;
    bwd[k][1] /= norm;
  }
  const int mid = len / 2;
  double marginal[2] = {fwd[mid][0] * bwd[mid][0], fwd[mid][1] * bwd[mid][1]};
  const double norm = marginal[0] + marginal[1];
  marginal[0] /= norm;
  marginal[1] /= norm;

  for (int v = 0; v < n; ++v) {
    CHECK(std::abs(bp.beliefs.vertex[v][0] - marginal[0]) <= 1e-6);
    CHECK(std::abs(bp.beliefs.vertex[v][1] - marginal[1]) <= 1e-6);
  }
}
