#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pt {

// Label of a random branching tree. The label fixes the vertex arity; an
// arity-m label carries one child-label distribution per slot, an arity-0
// label emits a terminal symbol.
struct PcfgLabel {
  std::string name;
  int arity = 0;
  std::vector<std::vector<double>> child_dist;  // arity rows over labels
  std::vector<double> emission;                 // arity-0: over terminals
};

struct Pcfg {
  std::vector<std::string> terminals;
  std::vector<PcfgLabel> labels;
  std::vector<double> root;  // distribution over labels

  int num_labels() const { return static_cast<int>(labels.size()); }
  int num_terminals() const { return static_cast<int>(terminals.size()); }

  // M[a][b] = expected number of children labeled b under a parent labeled a.
  std::vector<std::vector<double>> mean_offspring_matrix() const;
};

struct GrammarReport {
  bool valid = false;
  double spectral_radius = 0.0;
  std::vector<std::string> violations;
};

// Normalization within 1e-12 and subcriticality (spectral radius of the
// mean-offspring matrix < 1, so sampled trees are almost surely finite).
GrammarReport validate(const Pcfg& grammar);

// Rooted ordered labeled tree; leaves carry terminals and appear in yield
// order when nodes are traversed depth-first.
struct ParseTree {
  struct Node {
    int label = 0;
    int parent = -1;
    std::vector<int> children;
    int terminal = -1;  // set iff the node is a leaf
  };
  std::vector<Node> nodes;
  int root = 0;

  std::vector<int> yield() const;             // terminal ids, left to right
  std::vector<int> leaf_nodes() const;        // node ids in yield order
  std::vector<int> path_to_root(int node) const;  // labels, leaf first
};

// Ancestral sampling: root from the root distribution, then each child label
// independently given the parent, terminals at the leaves. Deterministic in
// seed. Throws DataError("runaway tree") past 10^6 vertices.
ParseTree sample_tree(const Pcfg& grammar, std::uint64_t seed);

struct TreeLogProb {
  double log_prob = 0.0;  // -inf on zero-probability events
  std::string locator;    // empty when log_prob is finite
};

TreeLogProb tree_log_prob(const Pcfg& grammar, const ParseTree& tree);

// Total probability of all parse trees with the given yield, for grammars
// whose labels have arity <= 2 (CKY-style span program). Runs of arity-1
// vertices are capped at unary_cap+1 in a row; every result is relative to
// that cap.
double inside(const Pcfg& grammar, std::span<const int> yield,
              int unary_cap = 1);

// Number of distinct parse trees of the yield under the same cap.
double count_parses(const Pcfg& grammar, std::span<const int> yield,
                    int unary_cap = 1);

struct ViterbiParse {
  bool found = false;
  ParseTree tree;
  double log_prob = 0.0;
};

// Argmax parse under the same span program; ties broken toward the smallest
// (split, child label) decision tuple at every cell.
ViterbiParse viterbi_parse(const Pcfg& grammar, std::span<const int> yield,
                           int unary_cap = 1);

struct ExtendedStateReport {
  struct Cell {
    std::string state;  // labels from the leaf to the root, '/'-joined
    long trees = 0;
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool skipped = false;  // not enough mass for the test
  };
  std::vector<Cell> cells;
  long trees_sampled = 0;
  long trees_usable = 0;
  bool vacuous = false;  // no cell had two outcomes on both sides
};

// Samples trees and tests, per extended state at leaf `leaf_index`, whether
// the neighbouring observations (one symbol each side) are independent
// (chi-squared on the contingency table). Conditional independence given the
// leaf-to-root label path is what makes the extended state Markov.
ExtendedStateReport extended_state_check(const Pcfg& grammar, long num_samples,
                                         std::uint64_t seed, int leaf_index = 1);

}  // namespace pt
