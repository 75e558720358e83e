#pragma once

#include <optional>
#include <span>
#include <string>

#include "objhc/dendrogram.hpp"
#include "objhc/measures.hpp"

namespace objhc {

enum class ObjectiveKind { Dasgupta, MW, CKMM, MWPlus, CKMMPlus };

std::string to_string(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(const std::string& name);
// Dasgupta/MW/MW+ expect similarities; CKMM/CKMM+ expect distances.
Orientation required_orientation(ObjectiveKind kind);

// Binary-tree evaluators. Each internal node C = L u R contributes the cross
// weight <sum phi_L, sum psi_R> times a factor of |C|; total work O(nk).
double eval_dasgupta(const Dendrogram& tree, const FeatureMaps& maps);
double eval_mw(const Dendrogram& tree, const FeatureMaps& maps);
double eval_ckmm(const Dendrogram& tree, const FeatureMaps& maps);

// Extensions that also accept n-ary nodes: triples split across three
// children of one node score as a uniformly random binarization would.
double eval_mw_plus(const Dendrogram& tree, const FeatureMaps& maps);
double eval_ckmm_plus(const Dendrogram& tree, const FeatureMaps& maps);

double evaluate(ObjectiveKind kind, const Dendrogram& tree, const FeatureMaps& maps);

// Sum over i < j of weight(i, j).
double total_pair_weight(const FeatureMaps& maps);

// Triple-sum upper bounds, O(n^3) over the materialized weights.
double mw_upper_bound(const FeatureMaps& maps);
double ckmm_upper_bound(const FeatureMaps& maps);

// Closed-form expectation over random binary trees.
double random_tree_expectation(const FeatureMaps& maps, ObjectiveKind kind);

struct Normalized {
  double value = 0.0;
  bool degenerate = false;
};

// (q - q_random) / (q_upper - q_random); degenerate when the denominator is
// not positive, in which case value = 0.
Normalized normalize(double q_value, double q_upper, double q_random);

// Ordered same-class pairs including e1 == e2, normalized by sum |C_i|^2.
double dendrogram_purity(const Dendrogram& tree, std::span<const int> labels);

struct ObjectiveReport {
  ObjectiveKind kind = ObjectiveKind::MW;
  double q_value = 0.0;
  // Upper bound for maximization objectives. For Dasgupta (minimized) this
  // holds the lower bound n * sum(w) - Q_M^ub, and alpha = bound / q_value.
  double q_upper = 0.0;
  double q_random_expected = 0.0;
  double alpha = 0.0;
  double alpha_star = 0.0;
  bool degenerate = false;
  std::optional<double> purity;
};

ObjectiveReport make_report(ObjectiveKind kind, const Dendrogram& tree, const FeatureMaps& maps);

}  // namespace objhc
