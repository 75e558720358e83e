#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace objhc {

using NodeId = int;

// Rooted tree over leaves 0..n-1. Internal nodes have ids n, n+1, ... and
// at least two children each; a binary tree has exactly n-1 of them.
class Dendrogram {
 public:
  // Validates and builds from a parent array (-1 marks the root). Children
  // are ordered by ascending id. Throws FormatError.
  static Dendrogram from_parents(int n_leaves, std::vector<NodeId> parents);

  int n_leaves() const { return n_leaves_; }
  int node_count() const { return static_cast<int>(parent_.size()); }
  int internal_count() const { return node_count() - n_leaves_; }
  NodeId root() const { return root_; }
  bool is_leaf(NodeId v) const { return v < n_leaves_; }
  bool is_binary() const;

  NodeId parent(NodeId v) const { return parent_[v]; }
  const std::vector<NodeId>& parents() const { return parent_; }
  std::span<const NodeId> children(NodeId v) const;
  int size(NodeId v) const { return size_[v]; }

  // Internal nodes, every child listed before its parent.
  const std::vector<NodeId>& postorder() const { return postorder_; }

  // Leaves in left-to-right child order.
  std::vector<int> leaf_order() const;

  friend bool operator==(const Dendrogram& a, const Dendrogram& b) {
    return a.n_leaves_ == b.n_leaves_ && a.parent_ == b.parent_;
  }

 private:
  friend class DendrogramBuilder;
  Dendrogram() = default;
  void finalize();

  int n_leaves_ = 0;
  NodeId root_ = 0;
  std::vector<NodeId> parent_;
  std::vector<std::vector<NodeId>> children_;  // indexed by id - n_leaves_
  std::vector<int> size_;
  std::vector<NodeId> postorder_;
};

// Bottom-up construction; every node must be joined at most once.
class DendrogramBuilder {
 public:
  explicit DendrogramBuilder(int n_leaves);

  NodeId join(NodeId left, NodeId right);
  NodeId join(std::span<const NodeId> children);

  // Throws InvalidParam unless `root` spans every leaf.
  Dendrogram finish(NodeId root) &&;

  int n_leaves() const { return n_leaves_; }

 private:
  int n_leaves_;
  std::vector<NodeId> parent_;
  std::vector<std::vector<NodeId>> children_;
};

// Recursive fair-coin splits conditioned on both sides being non-empty,
// applied to a shuffled leaf order.
Dendrogram random_binary_tree(int n, std::uint64_t seed);

// Caterpillar tree: the element at position p (1-based) splits off at depth
// p, so positions p < q meet at a node of size n - p + 1.
Dendrogram path_tree(std::span<const int> order);

// Star: one root with all n leaves as children.
Dendrogram star_tree(int n);

struct NodeVisit {
  NodeId node;
  int size;
  NodeId left;
  NodeId right;
};

// Visits every internal node of a binary tree once, children first, and
// returns the compensated sum of visit(node). Throws NonBinaryTree.
double lca_sizes_accumulate(const Dendrogram& tree,
                            const std::function<double(const NodeVisit&)>& visit);

// JSON {"n", "parents", "leaf_count"}.
std::string serialize(const Dendrogram& tree);
Dendrogram deserialize(const std::string& text);

}  // namespace objhc
