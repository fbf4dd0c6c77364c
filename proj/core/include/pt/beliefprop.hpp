#pragma once

#include <span>
#include <vector>

namespace pt {

// Pairwise Gibbs model with strictly positive potentials: unary phi_v per
// vertex and pairwise psi_e per edge (row-major over (label_a, label_b)).
struct PairwiseModel {
  struct Edge {
    int a = 0;
    int b = 0;
    std::vector<double> psi;
  };

  std::vector<int> domain_sizes;
  std::vector<std::vector<double>> unary;
  std::vector<Edge> edges;

  int num_vertices() const { return static_cast<int>(domain_sizes.size()); }
  void validate() const;
  // Incident edge indices per vertex.
  std::vector<std::vector<int>> incidence() const;
  bool is_tree() const;
  // -log of the unnormalized probability of a configuration.
  double energy(std::span<const int> config) const;
};

// Vertex and edge marginal tables. Compatible when every edge table's
// one-sided sums reproduce the vertex tables.
struct EdgeMarginalSet {
  std::vector<std::vector<double>> vertex;
  std::vector<std::vector<double>> edge;  // aligned with model.edges

  double max_compatibility_error(const PairwiseModel& model) const;
};

struct MeanFieldSet {
  std::vector<std::vector<double>> vertex;
};

struct MeanFieldResult {
  MeanFieldSet approx;
  double free_energy = 0.0;
  std::vector<double> free_energy_trace;  // after each sweep
  int iterations = 0;
  bool converged = false;
};

// Best fully factorized approximation by coordinate ascent on the
// variational free energy (equals KL(prod q_v || p) - log Z, so the KL gap
// is non-increasing even though Z is never computed).
MeanFieldResult mean_field(const PairwiseModel& model, int max_iters = 1000,
                           double tol = 1e-10);

struct BeliefPropResult {
  EdgeMarginalSet beliefs;
  int iterations = 0;
  bool converged = false;   // false => oscillating, last beliefs returned
  double final_delta = 0.0;
};

// Synchronous sum-product message passing with damping. Exact on trees; a
// Bethe fixed point when it converges on loopy graphs.
BeliefPropResult loopy_bp(const PairwiseModel& model, int max_iters = 1000,
                          double tol = 1e-9, double damping = 0.5);

struct MaxProductResult {
  std::vector<int> config;
  bool exact = false;  // true on trees (two-pass with traceback)
  int iterations = 0;
  bool converged = false;
};

// MAP configuration via max-product. On trees this is an exact two-pass
// dynamic program with ties broken toward the lowest label; on loopy graphs
// the decoded configuration carries no optimality guarantee (exact=false).
MaxProductResult max_product(const PairwiseModel& model, int max_iters = 1000,
                             double tol = 1e-12);

// Bethe free energy U - S with S = sum_e H(p_e) - sum_v (deg(v)-1) H(p_v).
// Equals -log Z when the beliefs are exact tree marginals. Throws DataError
// if the beliefs are not compatible within compat_tol.
double bethe_free_energy(const PairwiseModel& model,
                         const EdgeMarginalSet& beliefs,
                         double compat_tol = 1e-6);

}  // namespace pt
