#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "pt/beliefprop.hpp"
#include "pt/hmm.hpp"
#include "pt/particle.hpp"
#include "pt/rng.hpp"

namespace {

pt::HmmModel random_hmm(int states, int symbols, pt::Rng& rng) {
  pt::HmmModel model;
  model.num_states = states;
  const auto row = [&](int n) {
    std::vector<double> r(n);
    double sum = 0.0;
    for (double& v : r) {
      v = 0.05 + rng.uniform();
      sum += v;
    }
    for (double& v : r) v /= sum;
    return r;
  };
  model.init = row(states);
  model.trans.resize(states);
  for (auto& r : model.trans) r = row(states);
  pt::DiscreteEmission emit;
  emit.table.resize(states);
  for (auto& r : emit.table) r = row(symbols);
  model.emit = std::move(emit);
  return model;
}

void BM_ForwardFilter(benchmark::State& state) {
  pt::Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  const pt::HmmModel model = random_hmm(n, 8, rng);
  const auto sample = pt::hmm_sample(model, 4096, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::forward_filter(model, sample.observations));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_ForwardFilter)->Arg(4)->Arg(16)->Arg(64);

void BM_Viterbi(benchmark::State& state) {
  pt::Rng rng(2);
  const pt::HmmModel model = random_hmm(16, 8, rng);
  const auto sample = pt::hmm_sample(model, 4096, 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::viterbi(model, sample.observations));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_Viterbi);

void BM_BootstrapStep(benchmark::State& state) {
  pt::Rng rng(3);
  const pt::HmmModel hmm = random_hmm(4, 4, rng);
  const auto model = pt::hmm_bridge(hmm);
  const int particles = static_cast<int>(state.range(0));
  pt::ParticleSet ps = pt::init_particles(model, particles, 5);
  const Eigen::VectorXd obs = Eigen::VectorXd::Constant(1, 1.0);
  int step = 1;
  for (auto _ : state) pt::bootstrap_step(model, ps, obs, 5, step++);
  state.SetItemsProcessed(state.iterations() * particles);
}
BENCHMARK(BM_BootstrapStep)->Arg(1000)->Arg(100000);

void BM_LoopyBpGrid(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  pt::Rng rng(4);
  pt::PairwiseModel model;
  model.domain_sizes.assign(side * side, 2);
  model.unary.resize(side * side);
  for (auto& phi : model.unary) phi = {0.5 + rng.uniform(), 0.5 + rng.uniform()};
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const int v = y * side + x;
      const auto add = [&](int u) {
        pt::PairwiseModel::Edge edge;
        edge.a = v;
        edge.b = u;
        edge.psi = {1.3, 0.8, 0.8, 1.3};
        model.edges.push_back(std::move(edge));
      };
      if (x + 1 < side) add(v + 1);
      if (y + 1 < side) add(v + side);
    }
  for (auto _ : state)
    benchmark::DoNotOptimize(pt::loopy_bp(model, 50, 1e-9, 0.5));
}
BENCHMARK(BM_LoopyBpGrid)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
