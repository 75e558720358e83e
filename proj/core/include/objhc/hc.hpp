#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "objhc/dataset.hpp"
#include "objhc/dendrogram.hpp"
#include "objhc/measures.hpp"
#include "objhc/partitioner.hpp"

namespace objhc {

enum class Linkage { Single, Complete, Average, Ward };

enum class Algorithm {
  BisectPlusPlus,    // bppc
  BalancedTwoSat,    // b2satc
  BalancedBisection, // bbhc
  AverageLinkage,
  SingleLinkage,
  CompleteLinkage,
  Ward,
  BisectingKMeans,
  RandomCut,
  Random,
};

std::string to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);

enum class Max2SatSolver { Auto, Exhaustive, GdRelaxation };

struct HcConfig {
  int theta = 512;  // blocks smaller than this go to average linkage
  PartitionConfig partition;
  Max2SatSolver solver = Max2SatSolver::Auto;
  std::uint64_t seed = 0;

  void validate() const;
};

// One agglomeration step. Cluster ids: leaves 0..m-1, then m, m+1, ... in
// merge order. Height is in the input's units (a similarity for similarity
// input, a distance otherwise).
struct Merge {
  int first;
  int second;
  double height;
  int size;
};

// Lance-Williams agglomeration over a dense symmetric weight matrix. Among
// equally good pairs the lexicographically smallest (min id, max id) wins.
std::vector<Merge> hac_merges(const Eigen::MatrixXd& weights, Orientation orientation,
                              Linkage linkage);

Dendrogram hac(const EmbeddingSet& data, const Measure& measure, Linkage linkage);
Dendrogram hac(const FeatureMaps& maps, Linkage linkage);
Dendrogram average_linkage(const EmbeddingSet& data, const Measure& measure);

// Recursive delta-imbalanced bisection by gd_partition, with average
// linkage below theta points.
Dendrogram bppc(const EmbeddingSet& data, const Measure& measure, const HcConfig& config);
Dendrogram bppc(const FeatureMaps& maps, const HcConfig& config);

// Recursive max-cut balanced bisection (sizes floor/ceil), distance weights.
Dendrogram balanced_bisection_hc(const FeatureMaps& maps, const PartitionConfig& config);
Dendrogram balanced_bisection_hc(const EmbeddingSet& data, const Measure& measure,
                                 const HcConfig& config);

// S with |S| = ceil(n/2) maximizing the weight of pairs touching S, i.e.
// minimizing the internal weight of the complement.
std::vector<int> balanced_max2sat_partition(const FeatureMaps& maps, Max2SatSolver solver,
                                            const PartitionConfig& config);

struct B2SatResult {
  std::vector<int> s_set;
  std::vector<Dendrogram> candidates;  // path over S then V\S; S|V\S bisections; full bisection
  std::vector<double> scores;          // CKMM value of each candidate
  int chosen = 0;

  const Dendrogram& tree() const { return candidates[static_cast<std::size_t>(chosen)]; }
};

B2SatResult b2satc_detailed(const FeatureMaps& maps, const HcConfig& config);
Dendrogram b2satc(const FeatureMaps& maps, const HcConfig& config);
Dendrogram b2satc(const EmbeddingSet& data, const Measure& measure, const HcConfig& config);

// Recursive 2-means (k-means++ seeding, Lloyd), falling back to a median
// split on the highest-variance coordinate when a split degenerates.
Dendrogram bkmeans(const EmbeddingSet& data, std::uint64_t seed);

// Projection on one Gaussian direction, then recursive cuts at uniform
// points of each block's projected range.
Dendrogram random_cut(const EmbeddingSet& data, std::uint64_t seed);

// Dispatch by algorithm name; measure checks happen here.
Dendrogram run_algorithm(Algorithm algo, const EmbeddingSet& data, const Measure& measure,
                         const HcConfig& config);

}  // namespace objhc
