#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "objhc/measures.hpp"

namespace objhc {

enum class CutSense { MinimizeCut, MaximizeCut };
enum class Rounding { DeterministicTopK, Randomized };

// Similarities keep similar items together (small cut); distances push
// dissimilar items apart (large cut).
inline CutSense sense_for(Orientation o) {
  return o == Orientation::Similarity ? CutSense::MinimizeCut : CutSense::MaximizeCut;
}

struct PartitionConfig {
  double delta = 0.0;          // imbalance, sizes ~ (1/2 +- delta) n
  int iterations = 200;
  double eta0 = 0.0;           // 0 selects 1 / (max |phi_i| * max |psi_i|)
  double noise_variance = 0.1;
  Rounding rounding = Rounding::DeterministicTopK;
  int restarts = 3;
  int rounding_retries = 16;   // randomized rounding only
  std::uint64_t seed = 0;
  CutSense sense = CutSense::MinimizeCut;

  void validate() const;
};

struct PartitionVector {
  Eigen::VectorXd relaxed;  // best relaxed iterate, inside the feasible set
  std::vector<int> part_one;
  std::vector<int> part_two;
  double cut_value = 0.0;
};

// Size of the first part: round((1/2 + delta) n), kept within [1, n - 1].
int part_one_size(int n, double delta);

// Euclidean projection onto [-1, 1]^n intersected with {sum x = target}.
// Throws Infeasible when |target| > n.
Eigen::VectorXd project_box_hyperplane(const Eigen::VectorXd& y, double target_sum);

// Sum of weight(u, v) over u in a, v in b.
double cut_weight(const FeatureMaps& maps, std::span<const int> a, std::span<const int> b);
// Sum of weight(u, v) over unordered pairs u != v inside `members`.
double internal_weight(const FeatureMaps& maps, std::span<const int> members);

// Randomized projected gradient descent on x^T W x with W x = phi (psi^T x).
// The result is the best of all restarts and of derandomized_balanced_cut
// under config.sense.
PartitionVector gd_partition(const FeatureMaps& maps, const PartitionConfig& config);

// Greedy by conditional expectations: vertices in index order go to the side
// whose conditional expected cut is better, so the final cut is at least
// (at most, when minimizing) the mean cut of a uniformly random split with
// the given sizes.
PartitionVector derandomized_balanced_cut(const FeatureMaps& maps, std::pair<int, int> sizes,
                                          CutSense sense);

struct SubsetChoice {
  std::vector<int> members;
  double internal = 0.0;
};

// Picks `size` vertices with small internal weight by projected gradient
// descent on the relaxed quadratic sum_{u<v} (1+z_u)(1+z_v)/4 * w_uv.
// config.sense and config.delta are ignored.
SubsetChoice gd_min_internal(const FeatureMaps& maps, int size, const PartitionConfig& config);

// Conditional-expectation greedy for the same problem; never worse than the
// mean over uniformly random subsets of that size.
SubsetChoice derandomized_min_internal(const FeatureMaps& maps, int size);

}  // namespace objhc
