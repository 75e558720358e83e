#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "objhc/error.hpp"
#include "objhc/hc.hpp"
#include "objhc/random.hpp"

namespace objhc {

std::string to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::BisectPlusPlus: return "bppc";
    case Algorithm::BalancedTwoSat: return "b2satc";
    case Algorithm::BalancedBisection: return "bbhc";
    case Algorithm::AverageLinkage: return "avg";
    case Algorithm::SingleLinkage: return "single";
    case Algorithm::CompleteLinkage: return "complete";
    case Algorithm::Ward: return "ward";
    case Algorithm::BisectingKMeans: return "bkmeans";
    case Algorithm::RandomCut: return "randomcut";
    case Algorithm::Random: return "random";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::BisectPlusPlus, Algorithm::BalancedTwoSat, Algorithm::BalancedBisection,
                 Algorithm::AverageLinkage, Algorithm::SingleLinkage, Algorithm::CompleteLinkage,
                 Algorithm::Ward, Algorithm::BisectingKMeans, Algorithm::RandomCut,
                 Algorithm::Random}) {
    if (to_string(a) == name) return a;
  }
  fail(ErrorKind::InvalidParam, "unknown algorithm '" + name + "'");
}

namespace {

constexpr int kLloydIterations = 100;
constexpr double kLloydTolerance = 1e-6;

// Sorts the block by one coordinate (index as tie-break) and halves it.
std::pair<std::vector<int>, std::vector<int>> median_split(const RowMatrix& x,
                                                           std::vector<int> block) {
  const Eigen::Index d = x.cols();
  Eigen::Index best_dim = 0;
  double best_var = -1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    double mean = 0.0, sq = 0.0;
    for (int i : block) mean += x(i, j);
    mean /= static_cast<double>(block.size());
    for (int i : block) sq += (x(i, j) - mean) * (x(i, j) - mean);
    if (sq > best_var) {
      best_var = sq;
      best_dim = j;
    }
  }
  std::sort(block.begin(), block.end(), [&](int a, int b) {
    return x(a, best_dim) < x(b, best_dim) || (x(a, best_dim) == x(b, best_dim) && a < b);
  });
  const auto half = static_cast<std::ptrdiff_t>(block.size() / 2);
  return {std::vector<int>(block.begin(), block.begin() + half),
          std::vector<int>(block.begin() + half, block.end())};
}

std::pair<std::vector<int>, std::vector<int>> two_means(const RowMatrix& x,
                                                        const std::vector<int>& block, Rng& rng) {
  const Eigen::Index d = x.cols();
  const std::size_t m = block.size();
  RowMatrix centers(2, d);
  centers.row(0) = x.row(block[rng.below(m)]);

  // k-means++: second center drawn proportionally to squared distance.
  std::vector<double> d2(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    d2[i] = (x.row(block[i]) - centers.row(0)).squaredNorm();
    total += d2[i];
  }
  if (!(total > 0.0)) return {};
  double pick = rng.uniform() * total;
  std::size_t chosen = m - 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (d2[i] <= 0.0) continue;
    pick -= d2[i];
    if (pick < 0.0) {
      chosen = i;
      break;
    }
  }
  centers.row(1) = x.row(block[chosen]);

  std::vector<int> side(m, 0);
  for (int it = 0; it < kLloydIterations; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const double a = (x.row(block[i]) - centers.row(0)).squaredNorm();
      const double b = (x.row(block[i]) - centers.row(1)).squaredNorm();
      side[i] = b < a ? 1 : 0;
    }
    RowMatrix next = RowMatrix::Zero(2, d);
    double count[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      next.row(side[i]) += x.row(block[i]);
      count[side[i]] += 1.0;
    }
    if (count[0] == 0.0 || count[1] == 0.0) return {};
    next.row(0) /= count[0];
    next.row(1) /= count[1];
    const double shift = std::max((next.row(0) - centers.row(0)).norm(),
                                  (next.row(1) - centers.row(1)).norm());
    centers = next;
    if (shift < kLloydTolerance) break;
  }
  // Final assignment against the converged centers.
  std::vector<int> a, b;
  for (std::size_t i = 0; i < m; ++i) {
    const double da = (x.row(block[i]) - centers.row(0)).squaredNorm();
    const double db = (x.row(block[i]) - centers.row(1)).squaredNorm();
    (db < da ? b : a).push_back(block[i]);
  }
  if (a.empty() || b.empty()) return {};
  return {std::move(a), std::move(b)};
}

NodeId bkmeans_block(DendrogramBuilder& builder, const RowMatrix& x, std::vector<int> block,
                     std::uint64_t seed) {
  if (block.size() == 1) return block[0];
  if (block.size() == 2) return builder.join(block[0], block[1]);
  Rng rng(seed);
  auto [left, right] = two_means(x, block, rng);
  if (left.empty() || right.empty()) std::tie(left, right) = median_split(x, std::move(block));
  const NodeId l = bkmeans_block(builder, x, std::move(left), derive_seed(seed, 1));
  const NodeId r = bkmeans_block(builder, x, std::move(right), derive_seed(seed, 2));
  return builder.join(l, r);
}

// `block` is sorted by (projection, index).
NodeId random_cut_block(DendrogramBuilder& builder, const Eigen::VectorXd& proj,
                        std::span<const int> block, std::uint64_t seed) {
  if (block.size() == 1) return block[0];
  Rng rng(seed);
  const double lo = proj(block.front());
  const double hi = proj(block.back());
  std::size_t cut = 0;
  if (lo == hi) {
    cut = 1 + static_cast<std::size_t>(rng.below(block.size() - 1));
  } else {
    while (cut == 0) {
      const double u = rng.uniform(lo, hi);
      cut = static_cast<std::size_t>(
          std::lower_bound(block.begin(), block.end(), u,
                           [&](int i, double value) { return proj(i) < value; }) -
          block.begin());
    }
  }
  const NodeId l = random_cut_block(builder, proj, block.first(cut), derive_seed(seed, 1));
  const NodeId r = random_cut_block(builder, proj, block.subspan(cut), derive_seed(seed, 2));
  return builder.join(l, r);
}

}  // namespace

Dendrogram bkmeans(const EmbeddingSet& data, std::uint64_t seed) {
  data.validate();
  const int n = static_cast<int>(data.size());
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  DendrogramBuilder builder(n);
  const NodeId root = bkmeans_block(builder, data.points, std::move(all), seed);
  return std::move(builder).finish(root);
}

Dendrogram random_cut(const EmbeddingSet& data, std::uint64_t seed) {
  data.validate();
  const int n = static_cast<int>(data.size());
  Rng rng(seed);
  Eigen::VectorXd direction(data.points.cols());
  for (Eigen::Index j = 0; j < direction.size(); ++j) direction(j) = rng.normal();
  const Eigen::VectorXd proj = data.points * direction;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return proj(a) < proj(b); });
  DendrogramBuilder builder(n);
  const NodeId root = random_cut_block(builder, proj, order, derive_seed(seed, 7));
  return std::move(builder).finish(root);
}

Dendrogram run_algorithm(Algorithm algo, const EmbeddingSet& data, const Measure& measure,
                         const HcConfig& config) {
  config.validate();
  switch (algo) {
    case Algorithm::BisectPlusPlus: return bppc(data, measure, config);
    case Algorithm::BalancedTwoSat: return b2satc(data, measure, config);
    case Algorithm::BalancedBisection: return balanced_bisection_hc(data, measure, config);
    case Algorithm::AverageLinkage:
      return hac(build_feature_maps(data, measure, config.seed), Linkage::Average);
    case Algorithm::SingleLinkage:
      return hac(build_feature_maps(data, measure, config.seed), Linkage::Single);
    case Algorithm::CompleteLinkage:
      return hac(build_feature_maps(data, measure, config.seed), Linkage::Complete);
    case Algorithm::Ward: return hac(data, measure, Linkage::Ward);
    case Algorithm::BisectingKMeans: return bkmeans(data, config.seed);
    case Algorithm::RandomCut: return random_cut(data, config.seed);
    case Algorithm::Random: return random_binary_tree(static_cast<int>(data.size()), config.seed);
  }
  fail(ErrorKind::InvalidParam, "unhandled algorithm");
}

}  // namespace objhc
