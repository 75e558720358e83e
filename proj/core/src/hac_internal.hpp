#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "objhc/dendrogram.hpp"
#include "objhc/hc.hpp"

namespace objhc::detail {

// Agglomerates the points whose tree nodes are `leaves` (row i of `weights`
// belongs to leaves[i]) and returns the subtree root. Merges are appended
// to `merges` when non-null.
NodeId agglomerate(DendrogramBuilder& builder, std::span<const NodeId> leaves,
                   Eigen::MatrixXd weights, Orientation orientation, Linkage linkage,
                   std::vector<Merge>* merges);

// Symmetrized dense weights of a block.
Eigen::MatrixXd block_weights(const FeatureMaps& maps);

}  // namespace objhc::detail
