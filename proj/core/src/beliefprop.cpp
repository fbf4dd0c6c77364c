#include "pt/beliefprop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "pt/errors.hpp"

namespace pt {

void PairwiseModel::validate() const {
  const int n = num_vertices();
  if (static_cast<int>(unary.size()) != n)
    throw ModelError("PairwiseModel: unary table count mismatch");
  for (int v = 0; v < n; ++v) {
    if (static_cast<int>(unary[v].size()) != domain_sizes[v])
      throw ModelError("PairwiseModel: unary table size mismatch");
    for (double p : unary[v])
      if (!(p > 0.0)) throw ModelError("PairwiseModel: potentials must be > 0");
  }
  for (const auto& e : edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n || e.a == e.b)
      throw ModelError("PairwiseModel: bad edge");
    if (static_cast<int>(e.psi.size()) != domain_sizes[e.a] * domain_sizes[e.b])
      throw ModelError("PairwiseModel: psi table size mismatch");
    for (double p : e.psi)
      if (!(p > 0.0)) throw ModelError("PairwiseModel: potentials must be > 0");
  }
}

std::vector<std::vector<int>> PairwiseModel::incidence() const {
  std::vector<std::vector<int>> inc(num_vertices());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    inc[edges[e].a].push_back(static_cast<int>(e));
    inc[edges[e].b].push_back(static_cast<int>(e));
  }
  return inc;
}

bool PairwiseModel::is_tree() const {
  const int n = num_vertices();
  if (static_cast<int>(edges.size()) != n - 1) return false;
  const auto inc = incidence();
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int visited = 0;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    ++visited;
    for (int e : inc[v]) {
      const int w = edges[e].a == v ? edges[e].b : edges[e].a;
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  return visited == n;
}

double PairwiseModel::energy(std::span<const int> config) const {
  double e = 0.0;
  for (int v = 0; v < num_vertices(); ++v) e -= std::log(unary[v][config[v]]);
  for (const auto& edge : edges)
    e -= std::log(edge.psi[config[edge.a] * domain_sizes[edge.b] + config[edge.b]]);
  return e;
}

double EdgeMarginalSet::max_compatibility_error(const PairwiseModel& model) const {
  double worst = 0.0;
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    const int a = model.edges[e].a;
    const int b = model.edges[e].b;
    const int la = model.domain_sizes[a];
    const int lb = model.domain_sizes[b];
    for (int xa = 0; xa < la; ++xa) {
      double row = 0.0;
      for (int xb = 0; xb < lb; ++xb) row += edge[e][xa * lb + xb];
      worst = std::max(worst, std::abs(row - vertex[a][xa]));
    }
    for (int xb = 0; xb < lb; ++xb) {
      double col = 0.0;
      for (int xa = 0; xa < la; ++xa) col += edge[e][xa * lb + xb];
      worst = std::max(worst, std::abs(col - vertex[b][xb]));
    }
  }
  return worst;
}

namespace {

void normalize(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
}

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

// Directed messages: slot 2e is a->b (a table over labels of b), slot 2e+1
// is b->a.
struct Messages {
  std::vector<std::vector<double>> value;

  static Messages uniform(const PairwiseModel& model) {
    Messages m;
    m.value.resize(model.edges.size() * 2);
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
      m.value[2 * e].assign(model.domain_sizes[model.edges[e].b], 1.0);
      normalize(m.value[2 * e]);
      m.value[2 * e + 1].assign(model.domain_sizes[model.edges[e].a], 1.0);
      normalize(m.value[2 * e + 1]);
    }
    return m;
  }
};

// Product of phi_v and all messages into v except the one along edge
// `skip_edge` (pass -1 to keep all).
std::vector<double> pre_message(const PairwiseModel& model,
                                const std::vector<std::vector<int>>& inc,
                                const Messages& msgs, int v, int skip_edge) {
  std::vector<double> out(model.unary[v]);
  for (int e : inc[v]) {
    if (e == skip_edge) continue;
    const auto& incoming =
        model.edges[e].a == v ? msgs.value[2 * e + 1] : msgs.value[2 * e];
    for (std::size_t x = 0; x < out.size(); ++x) out[x] *= incoming[x];
  }
  return out;
}

enum class Semiring { kSum, kMax };

// One synchronous update of every directed message; returns the largest
// entry change after damping.
double update_messages(const PairwiseModel& model,
                       const std::vector<std::vector<int>>& inc, Messages& msgs,
                       double damping, Semiring ring) {
  Messages next = msgs;
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    const int a = model.edges[e].a;
    const int b = model.edges[e].b;
    const int la = model.domain_sizes[a];
    const int lb = model.domain_sizes[b];
    const auto from_a = pre_message(model, inc, msgs, a, static_cast<int>(e));
    const auto from_b = pre_message(model, inc, msgs, b, static_cast<int>(e));
    auto& to_b = next.value[2 * e];
    auto& to_a = next.value[2 * e + 1];
    for (int xb = 0; xb < lb; ++xb) {
      double acc = 0.0;
      for (int xa = 0; xa < la; ++xa) {
        const double term = from_a[xa] * model.edges[e].psi[xa * lb + xb];
        acc = ring == Semiring::kSum ? acc + term : std::max(acc, term);
      }
      to_b[xb] = acc;
    }
    for (int xa = 0; xa < la; ++xa) {
      double acc = 0.0;
      for (int xb = 0; xb < lb; ++xb) {
        const double term = from_b[xb] * model.edges[e].psi[xa * lb + xb];
        acc = ring == Semiring::kSum ? acc + term : std::max(acc, term);
      }
      to_a[xa] = acc;
    }
    normalize(to_b);
    normalize(to_a);
  }

  double delta = 0.0;
  for (std::size_t i = 0; i < msgs.value.size(); ++i) {
    for (std::size_t x = 0; x < msgs.value[i].size(); ++x) {
      const double damped =
          damping * msgs.value[i][x] + (1.0 - damping) * next.value[i][x];
      delta = std::max(delta, std::abs(damped - msgs.value[i][x]));
      next.value[i][x] = damped;
    }
  }
  msgs = std::move(next);
  return delta;
}

}  // namespace

MeanFieldResult mean_field(const PairwiseModel& model, int max_iters,
                           double tol) {
  model.validate();
  const int n = model.num_vertices();
  const auto inc = model.incidence();

  MeanFieldResult result;
  result.approx.vertex.resize(n);
  for (int v = 0; v < n; ++v)
    result.approx.vertex[v].assign(model.domain_sizes[v],
                                   1.0 / model.domain_sizes[v]);
  auto& q = result.approx.vertex;

  const auto free_energy = [&]() {
    double f = 0.0;
    for (int v = 0; v < n; ++v)
      for (int x = 0; x < model.domain_sizes[v]; ++x)
        if (q[v][x] > 0.0)
          f += q[v][x] * (std::log(q[v][x]) - std::log(model.unary[v][x]));
    for (const auto& e : model.edges) {
      const int lb = model.domain_sizes[e.b];
      for (int xa = 0; xa < model.domain_sizes[e.a]; ++xa)
        for (int xb = 0; xb < lb; ++xb)
          f -= q[e.a][xa] * q[e.b][xb] * std::log(e.psi[xa * lb + xb]);
    }
    return f;
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    double delta = 0.0;
    for (int v = 0; v < n; ++v) {
      const int lv = model.domain_sizes[v];
      std::vector<double> logq(lv);
      for (int x = 0; x < lv; ++x) logq[x] = std::log(model.unary[v][x]);
      for (int e : inc[v]) {
        const auto& edge = model.edges[e];
        const int w = edge.a == v ? edge.b : edge.a;
        const int lw = model.domain_sizes[w];
        for (int x = 0; x < lv; ++x) {
          double acc = 0.0;
          for (int xw = 0; xw < lw; ++xw) {
            const double psi = edge.a == v ? edge.psi[x * lw + xw]
                                           : edge.psi[xw * lv + x];
            acc += q[w][xw] * std::log(psi);
          }
          logq[x] += acc;
        }
      }
      const double shift = *std::max_element(logq.begin(), logq.end());
      std::vector<double> updated(lv);
      double norm = 0.0;
      for (int x = 0; x < lv; ++x) {
        updated[x] = std::exp(logq[x] - shift);
        norm += updated[x];
      }
      for (int x = 0; x < lv; ++x) {
        updated[x] /= norm;
        delta = std::max(delta, std::abs(updated[x] - q[v][x]));
      }
      q[v] = std::move(updated);
    }
    result.free_energy_trace.push_back(free_energy());
    if (delta < tol) {
      result.converged = true;
      break;
    }
  }
  result.free_energy = result.free_energy_trace.back();
  return result;
}

BeliefPropResult loopy_bp(const PairwiseModel& model, int max_iters, double tol,
                          double damping) {
  model.validate();
  if (damping < 0.0 || damping >= 1.0)
    throw ModelError("damping must lie in [0, 1)");
  const auto inc = model.incidence();
  Messages msgs = Messages::uniform(model);

  BeliefPropResult result;
  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    result.final_delta = update_messages(model, inc, msgs, damping, Semiring::kSum);
    if (result.final_delta < tol) {
      result.converged = true;
      break;
    }
  }

  const int n = model.num_vertices();
  result.beliefs.vertex.resize(n);
  for (int v = 0; v < n; ++v) {
    result.beliefs.vertex[v] = pre_message(model, inc, msgs, v, -1);
    normalize(result.beliefs.vertex[v]);
  }
  result.beliefs.edge.resize(model.edges.size());
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    const auto& edge = model.edges[e];
    const int la = model.domain_sizes[edge.a];
    const int lb = model.domain_sizes[edge.b];
    const auto from_a = pre_message(model, inc, msgs, edge.a, static_cast<int>(e));
    const auto from_b = pre_message(model, inc, msgs, edge.b, static_cast<int>(e));
    auto& table = result.beliefs.edge[e];
    table.resize(la * lb);
    for (int xa = 0; xa < la; ++xa)
      for (int xb = 0; xb < lb; ++xb)
        table[xa * lb + xb] = from_a[xa] * edge.psi[xa * lb + xb] * from_b[xb];
    normalize(table);
  }
  return result;
}

namespace {

// Exact tree MAP by an upward max pass and downward argmax traceback.
MaxProductResult tree_map(const PairwiseModel& model,
                          const std::vector<std::vector<int>>& inc) {
  const int n = model.num_vertices();
  std::vector<int> parent(n, -1), parent_edge(n, -1), order;
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    order.push_back(v);
    for (int e : inc[v]) {
      const int w = model.edges[e].a == v ? model.edges[e].b : model.edges[e].a;
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = v;
        parent_edge[w] = e;
        frontier.push(w);
      }
    }
  }

  // up[v][x]: max score of the subtree under v given v takes label x.
  std::vector<std::vector<double>> up(n);
  // choice[v][xp]: best label of v given its parent takes label xp.
  std::vector<std::vector<int>> choice(n);
  for (int v = 0; v < n; ++v) {
    up[v].assign(model.domain_sizes[v], 0.0);
    for (int x = 0; x < model.domain_sizes[v]; ++x)
      up[v][x] = std::log(model.unary[v][x]);
  }

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (parent[v] < 0) continue;
    const int p = parent[v];
    const auto& edge = model.edges[parent_edge[v]];
    const int lv = model.domain_sizes[v];
    const int lp = model.domain_sizes[p];
    choice[v].assign(lp, 0);
    for (int xp = 0; xp < lp; ++xp) {
      double best = -std::numeric_limits<double>::infinity();
      int best_x = 0;
      for (int x = 0; x < lv; ++x) {
        const double psi = edge.a == v ? edge.psi[x * lp + xp]
                                       : edge.psi[xp * lv + x];
        const double cand = up[v][x] + std::log(psi);
        if (cand > best) {
          best = cand;
          best_x = x;
        }
      }
      up[p][xp] += best;
      choice[v][xp] = best_x;
    }
  }

  MaxProductResult result;
  result.exact = true;
  result.converged = true;
  result.config.assign(n, 0);
  int best_root = 0;
  for (int x = 1; x < model.domain_sizes[0]; ++x)
    if (up[0][x] > up[0][best_root]) best_root = x;
  result.config[0] = best_root;
  for (int v : order)
    if (parent[v] >= 0) result.config[v] = choice[v][result.config[parent[v]]];
  return result;
}

}  // namespace

MaxProductResult max_product(const PairwiseModel& model, int max_iters,
                             double tol) {
  model.validate();
  const auto inc = model.incidence();
  if (model.is_tree()) return tree_map(model, inc);

  Messages msgs = Messages::uniform(model);
  MaxProductResult result;
  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    const double delta = update_messages(model, inc, msgs, 0.5, Semiring::kMax);
    if (delta < tol) {
      result.converged = true;
      break;
    }
  }
  const int n = model.num_vertices();
  result.config.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    const auto marg = pre_message(model, inc, msgs, v, -1);
    int best = 0;
    for (int x = 1; x < model.domain_sizes[v]; ++x)
      if (marg[x] > marg[best]) best = x;
    result.config[v] = best;
  }
  return result;
}

double bethe_free_energy(const PairwiseModel& model,
                         const EdgeMarginalSet& beliefs, double compat_tol) {
  model.validate();
  if (beliefs.vertex.size() != static_cast<std::size_t>(model.num_vertices()) ||
      beliefs.edge.size() != model.edges.size())
    throw DataError("beliefs shape does not match the model");
  if (beliefs.max_compatibility_error(model) > compat_tol)
    throw DataError("incompatible edge marginals");

  std::vector<int> degree(model.num_vertices(), 0);
  for (const auto& e : model.edges) {
    ++degree[e.a];
    ++degree[e.b];
  }

  double average_energy = 0.0;
  double bethe_entropy = 0.0;
  for (int v = 0; v < model.num_vertices(); ++v) {
    for (int x = 0; x < model.domain_sizes[v]; ++x)
      average_energy -= beliefs.vertex[v][x] * std::log(model.unary[v][x]);
    bethe_entropy -= (degree[v] - 1) * entropy(beliefs.vertex[v]);
  }
  for (std::size_t e = 0; e < model.edges.size(); ++e) {
    const auto& edge = model.edges[e];
    const int lb = model.domain_sizes[edge.b];
    for (int xa = 0; xa < model.domain_sizes[edge.a]; ++xa)
      for (int xb = 0; xb < lb; ++xb)
        average_energy -=
            beliefs.edge[e][xa * lb + xb] * std::log(edge.psi[xa * lb + xb]);
    bethe_entropy += entropy(beliefs.edge[e]);
  }
  return average_energy - bethe_entropy;
}

}  // namespace pt
