#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "objhc/dataset.hpp"
#include "objhc/dendrogram.hpp"
#include "objhc/measures.hpp"
#include "objhc/objectives.hpp"

// Brute-force references. Nothing here calls into the fast evaluators or
// the feature maps; weights come from pairwise() or an explicit matrix.
namespace objhc::oracle {

struct ExhaustiveLimit {
  int max_n_trees = 8;
  int max_n_sat = 20;
};

// Dense closed-form weights; diagonal set to 0.
Eigen::MatrixXd pairwise_matrix(const EmbeddingSet& data, const Measure& measure);

// |LCA(i, j)| for every leaf pair, found by walking parent pointers.
std::vector<std::vector<int>> lca_size_table(const Dendrogram& tree);

// Formula-literal pair sums: sum_{i<j} w_ij * f(|LCA|). For the "+" kinds
// this falls back to the triple definitions.
double eval_pairwise_direct(const Dendrogram& tree, const Eigen::MatrixXd& weights,
                            ObjectiveKind kind);
double eval_pairwise_direct(const Dendrogram& tree, const Measure& measure,
                            const EmbeddingSet& data, ObjectiveKind kind);

// Triple forms; each triple contributes according to which pair separates
// last (the pair with the smallest LCA).
double eval_mw_triples(const Dendrogram& tree, const Eigen::MatrixXd& weights);
double eval_dasgupta_triples(const Dendrogram& tree, const Eigen::MatrixXd& weights);
double eval_ckmm_triples(const Dendrogram& tree, const Eigen::MatrixXd& distances);
double eval_mw_plus_triples(const Dendrogram& tree, const Eigen::MatrixXd& weights);
double eval_ckmm_plus_triples(const Dendrogram& tree, const Eigen::MatrixXd& distances);

double mw_upper_bound(const Eigen::MatrixXd& weights);
double ckmm_upper_bound(const Eigen::MatrixXd& distances);

struct TreeOptimum {
  Dendrogram tree;
  double value;
  std::uint64_t trees_enumerated;
};

// Enumerates every binary tree on n leaves once ((2n-3)!! of them) and
// returns the best under `kind` (Dasgupta minimized, MW/CKMM maximized).
// Ties go to the lexicographically smallest preorder encoding.
TreeOptimum exhaustive_tree_opt(const Eigen::MatrixXd& weights, ObjectiveKind kind,
                                const ExhaustiveLimit& limit = {});

struct SatOptimum {
  std::vector<int> s_set;
  double value;
};

// Best S with |S| = ceil(n/2) for the weight of pairs with an endpoint in S.
SatOptimum exhaustive_balanced_max2sat(const Eigen::MatrixXd& distances,
                                       const ExhaustiveLimit& limit = {});

struct MonteCarloEstimate {
  double mean;
  double stderr_mean;
};

MonteCarloEstimate monte_carlo_random_tree(const Eigen::MatrixXd& weights, ObjectiveKind kind,
                                           int samples, std::uint64_t seed);

}  // namespace objhc::oracle
