#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "hac_internal.hpp"
#include "objhc/error.hpp"

namespace objhc {

namespace detail {

Eigen::MatrixXd block_weights(const FeatureMaps& maps) {
  Eigen::MatrixXd w = maps.materialize();
  if (!maps.same) w = 0.5 * (w + w.transpose()).eval();
  return w;
}

NodeId agglomerate(DendrogramBuilder& builder, std::span<const NodeId> leaves,
                   Eigen::MatrixXd weights, Orientation orientation, Linkage linkage,
                   std::vector<Merge>* merges) {
  const int m = static_cast<int>(leaves.size());
  require(m >= 1, ErrorKind::InvalidParam, "empty block");
  require(weights.rows() == m && weights.cols() == m, ErrorKind::DimensionMismatch,
          "weight matrix does not match block size");
  if (m == 1) return leaves[0];

  // Work with "smaller is closer" throughout.
  Eigen::MatrixXd& dist = weights;
  const double flip = orientation == Orientation::Similarity ? -1.0 : 1.0;
  if (flip < 0) dist = -dist;

  std::vector<int> cluster_id(m);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  std::vector<NodeId> node(leaves.begin(), leaves.end());
  std::vector<int> size(m, 1);
  std::vector<char> active(m, 1);
  std::vector<int> nn(m, -1);
  std::vector<double> nn_dist(m, std::numeric_limits<double>::infinity());
  int next_id = m;

  auto key = [&](int a, int b) {
    return std::make_tuple(dist(a, b), std::min(cluster_id[a], cluster_id[b]),
                           std::max(cluster_id[a], cluster_id[b]));
  };
  auto refresh = [&](int a) {
    nn[a] = -1;
    nn_dist[a] = std::numeric_limits<double>::infinity();
    for (int t = 0; t < m; ++t) {
      if (t == a || !active[t]) continue;
      if (nn[a] < 0 || key(a, t) < key(a, nn[a])) {
        nn[a] = t;
        nn_dist[a] = dist(a, t);
      }
    }
  };
  for (int a = 0; a < m; ++a) refresh(a);

  NodeId root = node[0];
  for (int step = 0; step < m - 1; ++step) {
    int p = -1;
    for (int a = 0; a < m; ++a) {
      if (!active[a] || nn[a] < 0) continue;
      if (p < 0 || key(a, nn[a]) < key(p, nn[p])) p = a;
    }
    int q = nn[p];
    if (cluster_id[q] < cluster_id[p]) std::swap(p, q);
    const double height = dist(p, q);
    const double np = size[p], nq = size[q];

    for (int k = 0; k < m; ++k) {
      if (!active[k] || k == p || k == q) continue;
      const double dp = dist(k, p), dq = dist(k, q);
      double updated = 0.0;
      switch (linkage) {
        case Linkage::Single: updated = std::min(dp, dq); break;
        case Linkage::Complete: updated = std::max(dp, dq); break;
        case Linkage::Average: updated = (np * dp + nq * dq) / (np + nq); break;
        case Linkage::Ward: {
          const double nk = size[k];
          updated = ((np + nk) * dp + (nq + nk) * dq - nk * height) / (np + nq + nk);
          break;
        }
      }
      dist(k, p) = dist(p, k) = updated;
    }

    if (merges) merges->push_back({cluster_id[p], cluster_id[q], flip * height, size[p] + size[q]});
    root = builder.join(node[p], node[q]);
    node[p] = root;
    size[p] += size[q];
    cluster_id[p] = next_id++;
    active[q] = 0;

    // Only rows p and q changed; everything else keeps its neighbour
    // unless p became closer.
    refresh(p);
    for (int a = 0; a < m; ++a) {
      if (!active[a] || a == p) continue;
      if (nn[a] == p || nn[a] == q) {
        refresh(a);
      } else if (key(a, p) < key(a, nn[a])) {
        nn[a] = p;
        nn_dist[a] = dist(a, p);
      }
    }
  }
  return root;
}

}  // namespace detail

std::vector<Merge> hac_merges(const Eigen::MatrixXd& weights, Orientation orientation,
                              Linkage linkage) {
  const int m = static_cast<int>(weights.rows());
  require(m >= 1, ErrorKind::InvalidParam, "empty weight matrix");
  DendrogramBuilder builder(m);
  std::vector<NodeId> leaves(m);
  std::iota(leaves.begin(), leaves.end(), 0);
  std::vector<Merge> merges;
  detail::agglomerate(builder, leaves, weights, orientation, linkage, &merges);
  return merges;
}

Dendrogram hac(const FeatureMaps& maps, Linkage linkage) {
  const int n = static_cast<int>(maps.size());
  require(n >= 1, ErrorKind::InvalidParam, "no points");
  // The dense distance matrix is the limiting resource.
  require(n <= 30000, ErrorKind::TooLarge, "agglomerative clustering is limited to 30000 points");
  DendrogramBuilder builder(n);
  std::vector<NodeId> leaves(n);
  std::iota(leaves.begin(), leaves.end(), 0);
  const NodeId root = detail::agglomerate(builder, leaves, detail::block_weights(maps),
                                          maps.orientation, linkage, nullptr);
  return std::move(builder).finish(root);
}

Dendrogram hac(const EmbeddingSet& data, const Measure& measure, Linkage linkage) {
  if (linkage == Linkage::Ward && measure.kind != MeasureKind::L2Squared) {
    fail(ErrorKind::MeasureMismatch, "Ward's method needs the l2sq distance");
  }
  return hac(build_feature_maps(data, measure, 0), linkage);
}

Dendrogram average_linkage(const EmbeddingSet& data, const Measure& measure) {
  return hac(data, measure, Linkage::Average);
}

}  // namespace objhc
