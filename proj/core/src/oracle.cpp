#include "objhc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "objhc/error.hpp"
#include "objhc/random.hpp"
#include "objhc/summation.hpp"

namespace objhc::oracle {
namespace {

constexpr int kDirectLimit = 2000;
constexpr int kTripleLimit = 200;

void check_square(const Eigen::MatrixXd& w, int n) {
  require(w.rows() == w.cols(), ErrorKind::DimensionMismatch, "weight matrix must be square");
  require(w.rows() == n, ErrorKind::DimensionMismatch, "weight matrix size differs from tree");
}

std::vector<int> depths(const Dendrogram& tree) {
  std::vector<int> depth(tree.node_count(), -1);
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    int d = 0;
    for (NodeId u = v; tree.parent(u) >= 0; u = tree.parent(u)) ++d;
    depth[v] = d;
  }
  return depth;
}

NodeId lca(const Dendrogram& tree, const std::vector<int>& depth, NodeId a, NodeId b) {
  while (depth[a] > depth[b]) a = tree.parent(a);
  while (depth[b] > depth[a]) b = tree.parent(b);
  while (a != b) {
    a = tree.parent(a);
    b = tree.parent(b);
  }
  return a;
}

double pair_factor(ObjectiveKind kind, int n, int lca_size) {
  switch (kind) {
    case ObjectiveKind::Dasgupta:
    case ObjectiveKind::CKMM:
      return lca_size;
    case ObjectiveKind::MW:
      return n - lca_size;
    default:
      fail(ErrorKind::InvalidParam, "no pair form for this objective");
  }
}

struct Triple {
  // Pair (a, b) merges first; c is the outsider. all_equal marks an
  // unresolved triple (all three meet at one node).
  int a, b, c;
  bool all_equal;
};

template <typename F>
void for_each_triple(const Dendrogram& tree, F&& f) {
  const int n = tree.n_leaves();
  require(n <= kTripleLimit, ErrorKind::TooLarge, "triple oracle limited to n <= 200");
  const auto table = lca_size_table(tree);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const int ij = table[i][j], ik = table[i][k], jk = table[j][k];
        if (ij == ik && ik == jk) {
          f(Triple{i, j, k, true});
        } else if (ij < ik && ij < jk) {
          f(Triple{i, j, k, false});
        } else if (ik < ij && ik < jk) {
          f(Triple{i, k, j, false});
        } else {
          f(Triple{j, k, i, false});
        }
      }
}

double upper_pair_sum(const Eigen::MatrixXd& w) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = i + 1; j < w.rows(); ++j) s += w(i, j);
  return s.value();
}

// Trees over a subset, as preorder codes: -1 opens an internal node followed
// by its left then right subtree; a non-negative entry is a leaf.
using Code = std::vector<signed char>;

class TreeEnumerator {
 public:
  const std::vector<Code>& trees(std::uint32_t mask) {
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    std::vector<Code> out;
    if (std::popcount(mask) == 1) {
      out.push_back(Code{static_cast<signed char>(std::countr_zero(mask))});
    } else {
      const std::uint32_t low = mask & (~mask + 1);
      const std::uint32_t rest = mask ^ low;
      // Left side holds the smallest leaf; every split is listed once.
      for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
        const std::uint32_t left = low | sub;
        if (left != mask) {
          const auto& ls = trees(left);
          const auto& rs = trees(mask ^ left);
          for (const auto& l : ls)
            for (const auto& r : rs) {
              Code c;
              c.reserve(1 + l.size() + r.size());
              c.push_back(-1);
              c.insert(c.end(), l.begin(), l.end());
              c.insert(c.end(), r.begin(), r.end());
              out.push_back(std::move(c));
            }
        }
        if (sub == 0) break;
      }
    }
    return memo_.emplace(mask, std::move(out)).first->second;
  }

 private:
  std::map<std::uint32_t, std::vector<Code>> memo_;
};

struct Decoded {
  std::vector<int> leaves;
  NodeId node;
};

Decoded decode(const Code& code, std::size_t& pos, DendrogramBuilder* builder,
               const Eigen::MatrixXd& w, ObjectiveKind kind, int n, double& value) {
  if (code[pos] >= 0) {
    const int leaf = code[pos++];
    return {{leaf}, leaf};
  }
  ++pos;
  Decoded l = decode(code, pos, builder, w, kind, n, value);
  Decoded r = decode(code, pos, builder, w, kind, n, value);
  const int size = static_cast<int>(l.leaves.size() + r.leaves.size());
  const double factor = pair_factor(kind, n, size);
  for (int a : l.leaves)
    for (int b : r.leaves) value += w(a, b) * factor;
  NodeId node = -1;
  if (builder) node = builder->join(l.node, r.node);
  l.leaves.insert(l.leaves.end(), r.leaves.begin(), r.leaves.end());
  return {std::move(l.leaves), node};
}

}  // namespace

Eigen::MatrixXd pairwise_matrix(const EmbeddingSet& data, const Measure& measure) {
  const int n = static_cast<int>(data.size());
  require(n <= kDirectLimit, ErrorKind::TooLarge, "direct oracle limited to n <= 2000");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = pairwise(measure, row_span(data.points, i), row_span(data.points, j));
      w(i, j) = v;
      w(j, i) = v;
    }
  return w;
}

std::vector<std::vector<int>> lca_size_table(const Dendrogram& tree) {
  const int n = tree.n_leaves();
  const auto depth = depths(tree);
  std::vector<std::vector<int>> table(n, std::vector<int>(n, 1));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int s = tree.size(lca(tree, depth, i, j));
      table[i][j] = s;
      table[j][i] = s;
    }
  return table;
}

double eval_pairwise_direct(const Dendrogram& tree, const Eigen::MatrixXd& weights,
                            ObjectiveKind kind) {
  const int n = tree.n_leaves();
  require(n <= kDirectLimit, ErrorKind::TooLarge, "direct oracle limited to n <= 2000");
  check_square(weights, n);
  if (kind == ObjectiveKind::MWPlus) return eval_mw_plus_triples(tree, weights);
  if (kind == ObjectiveKind::CKMMPlus) return eval_ckmm_plus_triples(tree, weights);
  const auto table = lca_size_table(tree);
  CompensatedSum total;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) total += weights(i, j) * pair_factor(kind, n, table[i][j]);
  return total.value();
}

double eval_pairwise_direct(const Dendrogram& tree, const Measure& measure,
                            const EmbeddingSet& data, ObjectiveKind kind) {
  require(static_cast<int>(data.size()) == tree.n_leaves(), ErrorKind::DimensionMismatch,
          "dataset size differs from tree");
  require(measure.orientation() == required_orientation(kind), ErrorKind::MeasureMismatch,
          "measure orientation does not fit the objective");
  return eval_pairwise_direct(tree, pairwise_matrix(data, measure), kind);
}

double eval_mw_triples(const Dendrogram& tree, const Eigen::MatrixXd& w) {
  check_square(w, tree.n_leaves());
  require(tree.is_binary(), ErrorKind::NonBinaryTree, "triple form needs a binary tree");
  CompensatedSum total;
  for_each_triple(tree, [&](const Triple& t) { total += w(t.a, t.b); });
  return total.value();
}

double eval_dasgupta_triples(const Dendrogram& tree, const Eigen::MatrixXd& w) {
  check_square(w, tree.n_leaves());
  require(tree.is_binary(), ErrorKind::NonBinaryTree, "triple form needs a binary tree");
  CompensatedSum total;
  for_each_triple(tree, [&](const Triple& t) { total += w(t.a, t.c) + w(t.b, t.c); });
  return total.value() + 2.0 * upper_pair_sum(w);
}

double eval_ckmm_triples(const Dendrogram& tree, const Eigen::MatrixXd& d) {
  return eval_dasgupta_triples(tree, d);
}

double eval_mw_plus_triples(const Dendrogram& tree, const Eigen::MatrixXd& w) {
  check_square(w, tree.n_leaves());
  CompensatedSum total;
  for_each_triple(tree, [&](const Triple& t) {
    if (t.all_equal)
      total += (w(t.a, t.b) + w(t.a, t.c) + w(t.b, t.c)) / 3.0;
    else
      total += w(t.a, t.b);
  });
  return total.value();
}

double eval_ckmm_plus_triples(const Dendrogram& tree, const Eigen::MatrixXd& d) {
  check_square(d, tree.n_leaves());
  CompensatedSum total;
  for_each_triple(tree, [&](const Triple& t) {
    if (t.all_equal)
      total += 2.0 * (d(t.a, t.b) + d(t.a, t.c) + d(t.b, t.c)) / 3.0;
    else
      total += d(t.a, t.c) + d(t.b, t.c);
  });
  return total.value() + 2.0 * upper_pair_sum(d);
}

double mw_upper_bound(const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  CompensatedSum total;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k)
        total += std::max({w(i, j), w(i, k), w(j, k)});
  return total.value();
}

double ckmm_upper_bound(const Eigen::MatrixXd& d) {
  const Eigen::Index n = d.rows();
  CompensatedSum total;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k)
        total += std::max({d(i, j) + d(i, k), d(i, j) + d(j, k), d(i, k) + d(j, k)});
  return total.value() + 2.0 * upper_pair_sum(d);
}

TreeOptimum exhaustive_tree_opt(const Eigen::MatrixXd& weights, ObjectiveKind kind,
                                const ExhaustiveLimit& limit) {
  const int n = static_cast<int>(weights.rows());
  require(n >= 2, ErrorKind::InvalidParam, "need at least two leaves");
  require(n <= limit.max_n_trees && n <= 16, ErrorKind::TooLarge,
          "exhaustive tree search over the size limit");
  check_square(weights, n);
  require(kind == ObjectiveKind::Dasgupta || kind == ObjectiveKind::MW ||
              kind == ObjectiveKind::CKMM,
          ErrorKind::InvalidParam, "exhaustive search supports dasgupta, mw, ckmm");
  const bool minimize = kind == ObjectiveKind::Dasgupta;

  TreeEnumerator enumerator;
  const auto& all = enumerator.trees((std::uint32_t{1} << n) - 1);
  const Code* best = nullptr;
  double best_value = 0.0;
  for (const auto& code : all) {
    double value = 0.0;
    std::size_t pos = 0;
    decode(code, pos, nullptr, weights, kind, n, value);
    const bool better = !best || (minimize ? value < best_value : value > best_value) ||
                        (value == best_value && code < *best);
    if (better) {
      best = &code;
      best_value = value;
    }
  }
  DendrogramBuilder builder(n);
  double ignored = 0.0;
  std::size_t pos = 0;
  const NodeId root = decode(*best, pos, &builder, weights, kind, n, ignored).node;
  return {std::move(builder).finish(root), best_value, all.size()};
}

SatOptimum exhaustive_balanced_max2sat(const Eigen::MatrixXd& d, const ExhaustiveLimit& limit) {
  const int n = static_cast<int>(d.rows());
  require(n >= 2, ErrorKind::InvalidParam, "need at least two points");
  require(n <= limit.max_n_sat && n <= 30, ErrorKind::TooLarge,
          "exhaustive max-2-sat over the size limit");
  const int k = (n + 1) / 2;
  SatOptimum best{{}, -1.0};
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double value = 0.0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (((mask >> u) & 1u) || ((mask >> v) & 1u)) value += d(u, v);
    if (best.s_set.empty() || value > best.value) {
      best.value = value;
      best_mask = mask;
      best.s_set = {0};
    }
  }
  best.s_set.clear();
  for (int u = 0; u < n; ++u)
    if ((best_mask >> u) & 1u) best.s_set.push_back(u);
  return best;
}

MonteCarloEstimate monte_carlo_random_tree(const Eigen::MatrixXd& weights, ObjectiveKind kind,
                                           int samples, std::uint64_t seed) {
  require(samples >= 1, ErrorKind::InvalidParam, "samples must be positive");
  const int n = static_cast<int>(weights.rows());
  double mean = 0.0, m2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto tree = random_binary_tree(n, derive_seed(seed, static_cast<std::uint64_t>(s)));
    const double x = eval_pairwise_direct(tree, weights, kind);
    const double delta = x - mean;
    mean += delta / (s + 1);
    m2 += delta * (x - mean);
  }
  const double var = samples > 1 ? m2 / (samples - 1) : 0.0;
  return {mean, std::sqrt(var / samples)};
}

}  // namespace objhc::oracle
