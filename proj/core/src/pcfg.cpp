#include "pt/pcfg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "pt/errors.hpp"
#include "pt/rng.hpp"

namespace pt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kVertexGuard = 1000000;

bool normalized(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= 1e-12;
}

}  // namespace

std::vector<std::vector<double>> Pcfg::mean_offspring_matrix() const {
  const int n = num_labels();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (const auto& slot : labels[a].child_dist)
      for (int b = 0; b < n; ++b) m[a][b] += slot[b];
  return m;
}

GrammarReport validate(const Pcfg& grammar) {
  GrammarReport report;
  const int n = grammar.num_labels();
  if (n == 0) {
    report.violations.push_back("grammar has no labels");
    return report;
  }
  if (static_cast<int>(grammar.root.size()) != n)
    report.violations.push_back("root distribution size mismatch");
  else if (!normalized(grammar.root))
    report.violations.push_back("root distribution not normalized");

  for (int a = 0; a < n; ++a) {
    const auto& label = grammar.labels[a];
    if (label.arity < 0)
      report.violations.push_back(label.name + ": negative arity");
    if (static_cast<int>(label.child_dist.size()) != label.arity)
      report.violations.push_back(label.name + ": child slot count mismatch");
    for (const auto& slot : label.child_dist) {
      if (static_cast<int>(slot.size()) != n || !normalized(slot))
        report.violations.push_back(label.name + ": child distribution not normalized");
    }
    if (label.arity == 0) {
      if (static_cast<int>(label.emission.size()) != grammar.num_terminals() ||
          !normalized(label.emission))
        report.violations.push_back(label.name + ": emission distribution not normalized");
    }
  }

  if (!report.violations.empty()) return report;

  const auto m = grammar.mean_offspring_matrix();
  Eigen::MatrixXd mat(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mat(a, b) = m[a][b];
  report.spectral_radius = mat.eigenvalues().cwiseAbs().maxCoeff();
  if (report.spectral_radius >= 1.0)
    report.violations.push_back(
        "supercritical branching: spectral radius " +
        std::to_string(report.spectral_radius) + " >= 1");

  report.valid = report.violations.empty();
  return report;
}

std::vector<int> ParseTree::leaf_nodes() const {
  std::vector<int> leaves;
  std::vector<int> stack{root};
  // Explicit stack, children pushed right-to-left so leaves pop in order.
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (nodes[v].children.empty()) {
      leaves.push_back(v);
    } else {
      for (auto it = nodes[v].children.rbegin(); it != nodes[v].children.rend(); ++it)
        stack.push_back(*it);
    }
  }
  return leaves;
}

std::vector<int> ParseTree::yield() const {
  std::vector<int> out;
  for (int v : leaf_nodes()) out.push_back(nodes[v].terminal);
  return out;
}

std::vector<int> ParseTree::path_to_root(int node) const {
  std::vector<int> labels;
  for (int v = node; v >= 0; v = nodes[v].parent) labels.push_back(nodes[v].label);
  return labels;
}

ParseTree sample_tree(const Pcfg& grammar, std::uint64_t seed) {
  const auto report = validate(grammar);
  if (!report.valid)
    throw ModelError("invalid grammar: " + report.violations.front());

  Rng rng(seed);
  ParseTree tree;
  tree.root = 0;
  tree.nodes.push_back({rng.categorical(grammar.root), -1, {}, -1});

  // Breadth-first expansion; label draws are ordered by creation index.
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& label = grammar.labels[tree.nodes[v].label];
    if (label.arity == 0) {
      tree.nodes[v].terminal = rng.categorical(label.emission);
      continue;
    }
    for (int slot = 0; slot < label.arity; ++slot) {
      if (tree.nodes.size() >= kVertexGuard)
        throw DataError("runaway tree: vertex guard exceeded");
      const int child_label = rng.categorical(label.child_dist[slot]);
      tree.nodes[v].children.push_back(static_cast<int>(tree.nodes.size()));
      tree.nodes.push_back({child_label, static_cast<int>(v), {}, -1});
    }
  }
  return tree;
}

TreeLogProb tree_log_prob(const Pcfg& grammar, const ParseTree& tree) {
  TreeLogProb out;
  const auto fail = [&](const std::string& where) {
    out.log_prob = kNegInf;
    out.locator = where;
    return out;
  };

  if (tree.nodes.empty()) return fail("empty tree");
  if (grammar.root[tree.nodes[tree.root].label] <= 0.0)
    return fail("root label has zero root probability");
  out.log_prob = std::log(grammar.root[tree.nodes[tree.root].label]);

  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& node = tree.nodes[v];
    const auto& label = grammar.labels[node.label];
    if (static_cast<int>(node.children.size()) != label.arity)
      return fail("vertex " + std::to_string(v) + ": arity mismatch for label " +
                  label.name);
    if (label.arity == 0) {
      if (node.terminal < 0 || node.terminal >= grammar.num_terminals())
        return fail("vertex " + std::to_string(v) + ": missing terminal");
      const double p = label.emission[node.terminal];
      if (p <= 0.0)
        return fail("vertex " + std::to_string(v) + ": zero-probability emission");
      out.log_prob += std::log(p);
    } else {
      for (int slot = 0; slot < label.arity; ++slot) {
        const int child_label = tree.nodes[node.children[slot]].label;
        const double p = label.child_dist[slot][child_label];
        if (p <= 0.0)
          return fail("vertex " + std::to_string(v) + ": zero-probability child " +
                      std::to_string(slot));
        out.log_prob += std::log(p);
      }
    }
  }
  return out;
}

namespace {

// Span program shared by inside / counting / Viterbi. Cells are indexed by
// (start, length); each cell stores, per label, the non-unary value ("base")
// and per remaining unary budget the full value.
struct SpanTables {
  // base[cell][label], full[cell][label][budget]
  std::vector<std::vector<double>> base;
  std::vector<std::vector<std::vector<double>>> full;
};

struct ViterbiBack {
  // Decision per (cell, label, budget): split point and child labels for
  // arity 2, child label for arity 1, terminal for arity 0.
  struct Decision {
    int split = -1;
    int left = -1;
    int right = -1;
  };
  std::vector<std::vector<std::vector<Decision>>> choice;
};

enum class Mode { kSum, kCount, kMax };

int cell_index(int start, int len, int n) { return (len - 1) * n + start; }

void check_arities(const Pcfg& grammar) {
  for (const auto& label : grammar.labels)
    if (label.arity > 2)
      throw ModelError("span program requires arities <= 2, label " + label.name +
                       " has arity " + std::to_string(label.arity));
}

// Fills the tables; `back` may be null unless mode == kMax.
SpanTables run_span_program(const Pcfg& grammar, std::span<const int> yield,
                            int cap, Mode mode, ViterbiBack* back) {
  check_arities(grammar);
  if (yield.empty()) throw DataError("empty yield");
  for (int t : yield)
    if (t < 0 || t >= grammar.num_terminals())
      throw DataError("yield symbol out of range");
  if (cap < 0) throw ModelError("unary cap must be >= 0");

  const int n = static_cast<int>(yield.size());
  const int labels = grammar.num_labels();
  const int cells = n * n;
  const double zero = mode == Mode::kMax ? kNegInf : 0.0;

  SpanTables tables;
  tables.base.assign(cells, std::vector<double>(labels, zero));
  tables.full.assign(cells, std::vector<std::vector<double>>(
                               labels, std::vector<double>(cap + 1, zero)));
  if (back)
    back->choice.assign(cells, std::vector<std::vector<ViterbiBack::Decision>>(
                                   labels, std::vector<ViterbiBack::Decision>(cap + 1)));

  const auto combine = [mode](double acc, double term) {
    return mode == Mode::kMax ? std::max(acc, term) : acc + term;
  };
  const auto weight = [mode, &grammar](double p) {
    if (mode == Mode::kCount) return p > 0.0 ? 1.0 : 0.0;
    if (mode == Mode::kMax) return p > 0.0 ? std::log(p) : kNegInf;
    return p;
  };
  const auto times = [mode](double a, double b) {
    if (mode == Mode::kMax) return a + b;  // log domain
    return a * b;
  };

  for (int len = 1; len <= n; ++len) {
    for (int start = 0; start + len <= n; ++start) {
      const int cell = cell_index(start, len, n);
      // Non-unary core: emissions (length 1) and binary splits.
      for (int a = 0; a < labels; ++a) {
        const auto& label = grammar.labels[a];
        if (label.arity == 0) {
          if (len == 1) {
            tables.base[cell][a] = weight(label.emission[yield[start]]);
            if (back)
              for (int u = 0; u <= cap; ++u)
                back->choice[cell][a][u] = {-1, -1, yield[start]};
          }
        } else if (label.arity == 2) {
          double acc = zero;
          ViterbiBack::Decision best;
          for (int split = 1; split < len; ++split) {
            const int left_cell = cell_index(start, split, n);
            const int right_cell = cell_index(start + split, len - split, n);
            for (int b = 0; b < labels; ++b) {
              const double pb = label.child_dist[0][b];
              if (pb <= 0.0) continue;
              const double lv = tables.full[left_cell][b][cap];
              if (lv == zero && mode != Mode::kMax) continue;
              for (int c = 0; c < labels; ++c) {
                const double pc = label.child_dist[1][c];
                if (pc <= 0.0) continue;
                const double rv = tables.full[right_cell][c][cap];
                const double term =
                    times(times(weight(pb), lv), times(weight(pc), rv));
                if (mode == Mode::kMax) {
                  if (term > acc) {
                    acc = term;
                    best = {split, b, c};
                  }
                } else {
                  acc = combine(acc, term);
                }
              }
            }
          }
          tables.base[cell][a] = acc;
          if (back)
            for (int u = 0; u <= cap; ++u) back->choice[cell][a][u] = best;
        }
      }
      // Unary layers: budget u allows u arity-1 -> arity-1 descents.
      for (int u = 0; u <= cap; ++u) {
        for (int a = 0; a < labels; ++a) {
          const auto& label = grammar.labels[a];
          if (label.arity != 1) {
            tables.full[cell][a][u] = tables.base[cell][a];
            continue;
          }
          double acc = zero;
          ViterbiBack::Decision best;
          for (int b = 0; b < labels; ++b) {
            const double pb = label.child_dist[0][b];
            if (pb <= 0.0) continue;
            double child;
            if (grammar.labels[b].arity == 1) {
              if (u == 0) continue;
              child = tables.full[cell][b][u - 1];
            } else {
              child = tables.base[cell][b];
            }
            const double term = times(weight(pb), child);
            if (mode == Mode::kMax) {
              if (term > acc) {
                acc = term;
                best = {-1, b, -1};
              }
            } else {
              acc = combine(acc, term);
            }
          }
          tables.full[cell][a][u] = acc;
          if (back) back->choice[cell][a][u] = best;
        }
      }
    }
  }
  return tables;
}

}  // namespace

double inside(const Pcfg& grammar, std::span<const int> yield, int unary_cap) {
  const auto tables = run_span_program(grammar, yield, unary_cap, Mode::kSum, nullptr);
  const int n = static_cast<int>(yield.size());
  const int cell = cell_index(0, n, n);
  double total = 0.0;
  for (int a = 0; a < grammar.num_labels(); ++a)
    total += grammar.root[a] * tables.full[cell][a][unary_cap];
  return total;
}

double count_parses(const Pcfg& grammar, std::span<const int> yield,
                    int unary_cap) {
  const auto tables = run_span_program(grammar, yield, unary_cap, Mode::kCount, nullptr);
  const int n = static_cast<int>(yield.size());
  const int cell = cell_index(0, n, n);
  double total = 0.0;
  for (int a = 0; a < grammar.num_labels(); ++a)
    if (grammar.root[a] > 0.0) total += tables.full[cell][a][unary_cap];
  return total;
}

namespace {

// Rebuilds the argmax tree from the decision tables.
int build_tree(const Pcfg& grammar, const SpanTables& tables,
               const ViterbiBack& back, int n, int start, int len, int label,
               int budget, int parent, ParseTree& tree) {
  const int self = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({label, parent, {}, -1});
  const auto& decision = back.choice[cell_index(start, len, n)][label][budget];
  const auto& spec = grammar.labels[label];
  if (spec.arity == 0) {
    tree.nodes[self].terminal = decision.right;
  } else if (spec.arity == 1) {
    const int child_budget =
        grammar.labels[decision.left].arity == 1 ? budget - 1 : budget;
    const int child = build_tree(grammar, tables, back, n, start, len,
                                 decision.left, child_budget, self, tree);
    tree.nodes[self].children.push_back(child);
  } else {
    const int cap = static_cast<int>(back.choice[0][0].size()) - 1;
    const int left = build_tree(grammar, tables, back, n, start, decision.split,
                                decision.left, cap, self, tree);
    tree.nodes[self].children.push_back(left);
    const int right =
        build_tree(grammar, tables, back, n, start + decision.split,
                   len - decision.split, decision.right, cap, self, tree);
    tree.nodes[self].children.push_back(right);
  }
  return self;
}

}  // namespace

ViterbiParse viterbi_parse(const Pcfg& grammar, std::span<const int> yield,
                           int unary_cap) {
  ViterbiBack back;
  const auto tables =
      run_span_program(grammar, yield, unary_cap, Mode::kMax, &back);
  const int n = static_cast<int>(yield.size());
  const int cell = cell_index(0, n, n);

  ViterbiParse result;
  double best = kNegInf;
  int best_label = -1;
  for (int a = 0; a < grammar.num_labels(); ++a) {
    if (grammar.root[a] <= 0.0) continue;
    const double cand = std::log(grammar.root[a]) + tables.full[cell][a][unary_cap];
    if (cand > best) {
      best = cand;
      best_label = a;
    }
  }
  if (best_label < 0 || best == kNegInf) return result;  // no parse

  result.found = true;
  result.log_prob = best;
  result.tree.root = 0;
  build_tree(grammar, tables, back, n, 0, n, best_label, unary_cap, -1,
             result.tree);
  return result;
}

ExtendedStateReport extended_state_check(const Pcfg& grammar, long num_samples,
                                         std::uint64_t seed, int leaf_index) {
  if (leaf_index < 1) throw ModelError("leaf_index must be >= 1");
  ExtendedStateReport report;
  report.trees_sampled = num_samples;

  // counts[state][(past, future)]
  std::map<std::string, std::map<std::pair<int, int>, long>> counts;
  for (long i = 0; i < num_samples; ++i) {
    const ParseTree tree = sample_tree(grammar, Rng(seed, static_cast<std::uint64_t>(i)).next_u64());
    const auto leaves = tree.leaf_nodes();
    if (static_cast<int>(leaves.size()) < leaf_index + 2) continue;
    ++report.trees_usable;
    const auto path = tree.path_to_root(leaves[leaf_index]);
    std::string state;
    for (int label : path) {
      if (!state.empty()) state += '/';
      state += grammar.labels[label].name;
    }
    const int past = tree.nodes[leaves[leaf_index - 1]].terminal;
    const int future = tree.nodes[leaves[leaf_index + 1]].terminal;
    ++counts[state][{past, future}];
  }

  bool any_testable = false;
  for (const auto& [state, table] : counts) {
    ExtendedStateReport::Cell cell;
    cell.state = state;

    std::map<int, long> row_sums, col_sums;
    long total = 0;
    for (const auto& [key, c] : table) {
      row_sums[key.first] += c;
      col_sums[key.second] += c;
      total += c;
    }
    cell.trees = total;
    const int rows = static_cast<int>(row_sums.size());
    const int cols = static_cast<int>(col_sums.size());
    cell.dof = (rows - 1) * (cols - 1);

    if (cell.dof == 0 || total < 50) {
      cell.skipped = true;
      report.cells.push_back(std::move(cell));
      continue;
    }

    bool enough_mass = true;
    double chi2 = 0.0;
    for (const auto& [r, rsum] : row_sums) {
      for (const auto& [c, csum] : col_sums) {
        const double expected = static_cast<double>(rsum) * csum / total;
        if (expected < 5.0) enough_mass = false;
        const auto it = table.find({r, c});
        const double observed = it == table.end() ? 0.0 : it->second;
        chi2 += (observed - expected) * (observed - expected) / expected;
      }
    }
    if (!enough_mass) {
      cell.skipped = true;
      report.cells.push_back(std::move(cell));
      continue;
    }

    cell.chi2 = chi2;
    boost::math::chi_squared dist(cell.dof);
    cell.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
    any_testable = true;
    report.cells.push_back(std::move(cell));
  }
  report.vacuous = !any_testable;
  return report;
}

}  // namespace pt
