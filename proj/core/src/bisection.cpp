#include <algorithm>
#include <limits>
#include <numeric>

#include "hac_internal.hpp"
#include "objhc/error.hpp"
#include "objhc/objectives.hpp"
#include "objhc/random.hpp"

namespace objhc {

void HcConfig::validate() const {
  require(theta >= 1, ErrorKind::InvalidParam, "theta must be >= 1");
  partition.validate();
}

namespace {

std::vector<int> map_back(std::span<const int> local, std::span<const int> block) {
  std::vector<int> out;
  out.reserve(local.size());
  for (int i : local) out.push_back(block[i]);
  return out;
}

NodeId bppc_block(DendrogramBuilder& builder, const FeatureMaps& maps, std::vector<int> block,
                  const HcConfig& config, std::uint64_t seed) {
  if (block.size() == 1) return block[0];
  const FeatureMaps local = maps.slice(block);
  if (static_cast<int>(block.size()) < config.theta) {
    return detail::agglomerate(builder, block, detail::block_weights(local), maps.orientation,
                               Linkage::Average, nullptr);
  }
  PartitionConfig pc = config.partition;
  pc.seed = seed;
  pc.sense = sense_for(maps.orientation);
  const PartitionVector split = gd_partition(local, pc);
  const NodeId left =
      bppc_block(builder, maps, map_back(split.part_one, block), config, derive_seed(seed, 1));
  const NodeId right =
      bppc_block(builder, maps, map_back(split.part_two, block), config, derive_seed(seed, 2));
  return builder.join(left, right);
}

NodeId bisect_block(DendrogramBuilder& builder, const FeatureMaps& maps, std::vector<int> block,
                    const PartitionConfig& config, std::uint64_t seed) {
  if (block.size() == 1) return block[0];
  const int m = static_cast<int>(block.size());
  std::vector<int> one, two;
  if (m == 2) {
    one = {block[0]};
    two = {block[1]};
  } else {
    PartitionConfig pc = config;
    pc.delta = 0.0;
    pc.seed = seed;
    pc.sense = CutSense::MaximizeCut;
    const FeatureMaps local = maps.slice(block);
    const PartitionVector split = gd_partition(local, pc);
    one = map_back(split.part_one, block);
    two = map_back(split.part_two, block);
  }
  const NodeId left = bisect_block(builder, maps, std::move(one), config, derive_seed(seed, 1));
  const NodeId right = bisect_block(builder, maps, std::move(two), config, derive_seed(seed, 2));
  return builder.join(left, right);
}

std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

void require_distance(const FeatureMaps& maps, const char* what) {
  if (maps.orientation != Orientation::Distance) {
    fail(ErrorKind::MeasureMismatch, std::string(what) + " needs a distance measure");
  }
}

std::vector<int> complement_of(std::span<const int> members, int n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int m : members) in[m] = 1;
  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (!in[i]) rest.push_back(i);
  }
  return rest;
}

}  // namespace

Dendrogram bppc(const FeatureMaps& maps, const HcConfig& config) {
  config.validate();
  const int n = static_cast<int>(maps.size());
  require(n >= 1, ErrorKind::InvalidParam, "no points");
  DendrogramBuilder builder(n);
  const NodeId root = bppc_block(builder, maps, iota_vector(n), config, config.seed);
  return std::move(builder).finish(root);
}

Dendrogram bppc(const EmbeddingSet& data, const Measure& measure, const HcConfig& config) {
  return bppc(build_feature_maps(data, measure, config.seed), config);
}

Dendrogram balanced_bisection_hc(const FeatureMaps& maps, const PartitionConfig& config) {
  require_distance(maps, "balanced bisection");
  config.validate();
  const int n = static_cast<int>(maps.size());
  require(n >= 1, ErrorKind::InvalidParam, "no points");
  DendrogramBuilder builder(n);
  const NodeId root = bisect_block(builder, maps, iota_vector(n), config, config.seed);
  return std::move(builder).finish(root);
}

Dendrogram balanced_bisection_hc(const EmbeddingSet& data, const Measure& measure,
                                 const HcConfig& config) {
  if (measure.orientation() != Orientation::Distance) {
    fail(ErrorKind::MeasureMismatch, "balanced bisection needs a distance measure");
  }
  PartitionConfig pc = config.partition;
  pc.seed = config.seed;
  return balanced_bisection_hc(build_feature_maps(data, measure, config.seed), pc);
}

std::vector<int> balanced_max2sat_partition(const FeatureMaps& maps, Max2SatSolver solver,
                                            const PartitionConfig& config) {
  require_distance(maps, "balanced MAX-2-SAT partitioning");
  const int n = static_cast<int>(maps.size());
  require(n >= 1, ErrorKind::InvalidParam, "no points");
  const int t_size = n / 2;
  if (solver == Max2SatSolver::Auto) {
    solver = n <= 20 ? Max2SatSolver::Exhaustive : Max2SatSolver::GdRelaxation;
  }

  std::vector<int> complement_set;
  if (solver == Max2SatSolver::Exhaustive) {
    require(n <= 20, ErrorKind::TooLarge, "exhaustive MAX-2-SAT is limited to n <= 20");
    const Eigen::MatrixXd w = detail::block_weights(maps);
    // Walk all t_size-subsets in lexicographic order; keep the first minimum
    // of the internal weight.
    std::vector<int> pick(t_size);
    std::iota(pick.begin(), pick.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
      double internal = 0.0;
      for (int a = 0; a < t_size; ++a) {
        for (int b = a + 1; b < t_size; ++b) internal += w(pick[a], pick[b]);
      }
      if (internal < best) {
        best = internal;
        complement_set = pick;
      }
      int i = t_size - 1;
      while (i >= 0 && pick[i] == n - t_size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < t_size; ++j) pick[j] = pick[j - 1] + 1;
    }
  } else {
    SubsetChoice best = gd_min_internal(maps, t_size, config);
    SubsetChoice greedy = derandomized_min_internal(maps, t_size);
    if (greedy.internal < best.internal) best = std::move(greedy);
    Rng rng(derive_seed(config.seed, 0x5a7));
    std::vector<int> shuffled = iota_vector(n);
    rng.shuffle(std::span<int>(shuffled));
    shuffled.resize(static_cast<std::size_t>(t_size));
    std::sort(shuffled.begin(), shuffled.end());
    const double random_internal = internal_weight(maps, shuffled);
    if (random_internal < best.internal) best = {std::move(shuffled), random_internal};
    complement_set = std::move(best.members);
  }
  return complement_of(complement_set, n);
}

B2SatResult b2satc_detailed(const FeatureMaps& maps, const HcConfig& config) {
  require_distance(maps, "B2SAT&C");
  config.validate();
  const int n = static_cast<int>(maps.size());
  require(n >= 1, ErrorKind::InvalidParam, "no points");
  PartitionConfig pc = config.partition;
  pc.seed = derive_seed(config.seed, 1);

  B2SatResult out;
  out.s_set = balanced_max2sat_partition(maps, config.solver, pc);
  std::vector<int> rest = complement_of(out.s_set, n);

  // Path over shuffled S followed by shuffled V \ S.
  Rng rng(derive_seed(config.seed, 2));
  std::vector<int> s_order = out.s_set;
  std::vector<int> t_order = rest;
  rng.shuffle(std::span<int>(s_order));
  rng.shuffle(std::span<int>(t_order));
  std::vector<int> order = s_order;
  order.insert(order.end(), t_order.begin(), t_order.end());
  out.candidates.push_back(path_tree(order));

  // Separate bisections of S and V \ S under one root.
  {
    DendrogramBuilder builder(n);
    if (rest.empty()) {
      out.candidates.push_back(std::move(builder).finish(out.s_set.front()));
    } else {
      PartitionConfig bc = config.partition;
      const NodeId s_root = bisect_block(builder, maps, out.s_set, bc, derive_seed(config.seed, 3));
      const NodeId t_root = bisect_block(builder, maps, rest, bc, derive_seed(config.seed, 4));
      out.candidates.push_back(std::move(builder).finish(builder.join(s_root, t_root)));
    }
  }

  PartitionConfig full = config.partition;
  full.seed = derive_seed(config.seed, 5);
  out.candidates.push_back(balanced_bisection_hc(maps, full));

  for (const auto& t : out.candidates) out.scores.push_back(eval_ckmm(t, maps));
  out.chosen = static_cast<int>(std::max_element(out.scores.begin(), out.scores.end()) -
                                out.scores.begin());
  return out;
}

Dendrogram b2satc(const FeatureMaps& maps, const HcConfig& config) {
  auto result = b2satc_detailed(maps, config);
  return std::move(result.candidates[static_cast<std::size_t>(result.chosen)]);
}

Dendrogram b2satc(const EmbeddingSet& data, const Measure& measure, const HcConfig& config) {
  if (measure.orientation() != Orientation::Distance) {
    fail(ErrorKind::MeasureMismatch, "B2SAT&C needs a distance measure");
  }
  return b2satc(build_feature_maps(data, measure, config.seed), config);
}

}  // namespace objhc
