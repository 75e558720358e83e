#include "objhc/dendrogram.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "objhc/error.hpp"
#include "objhc/random.hpp"
#include "objhc/summation.hpp"

namespace objhc {

bool Dendrogram::is_binary() const {
  return std::all_of(children_.begin(), children_.end(),
                     [](const auto& c) { return c.size() == 2; });
}

std::span<const NodeId> Dendrogram::children(NodeId v) const {
  if (v < n_leaves_) return {};
  return children_[v - n_leaves_];
}

void Dendrogram::finalize() {
  const int total = node_count();
  size_.assign(total, 0);
  for (int i = 0; i < n_leaves_; ++i) size_[i] = 1;
  postorder_.clear();
  postorder_.reserve(children_.size());
  if (is_leaf(root_)) return;

  // Iterative DFS; a node is emitted once all its children are.
  std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& kids = children_[v - n_leaves_];
    if (next < kids.size()) {
      const NodeId c = kids[next++];
      if (!is_leaf(c)) stack.emplace_back(c, 0);
      continue;
    }
    int s = 0;
    for (NodeId c : kids) s += size_[c];
    size_[v] = s;
    postorder_.push_back(v);
    stack.pop_back();
  }
}

Dendrogram Dendrogram::from_parents(int n_leaves, std::vector<NodeId> parents) {
  if (n_leaves < 1) fail(ErrorKind::Format, "tree needs at least one leaf");
  const int total = static_cast<int>(parents.size());
  if (total < n_leaves) fail(ErrorKind::Format, "parent array shorter than leaf count");

  Dendrogram tree;
  tree.n_leaves_ = n_leaves;
  tree.children_.assign(total - n_leaves, {});
  int roots = 0;
  for (NodeId v = 0; v < total; ++v) {
    const NodeId p = parents[v];
    if (p == -1) {
      ++roots;
      tree.root_ = v;
      continue;
    }
    if (p < 0 || p >= total) fail(ErrorKind::Format, "parent id out of range at node " + std::to_string(v));
    if (p == v) fail(ErrorKind::Format, "node " + std::to_string(v) + " is its own parent");
    if (p < n_leaves) fail(ErrorKind::Format, "leaf " + std::to_string(p) + " referenced as a parent");
    tree.children_[p - n_leaves].push_back(v);
  }
  if (roots != 1) fail(ErrorKind::Format, "expected exactly one root, found " + std::to_string(roots));
  if (n_leaves > 1 && tree.root_ < n_leaves) fail(ErrorKind::Format, "a leaf cannot be the root");
  for (int i = 0; i < total - n_leaves; ++i) {
    if (tree.children_[i].size() < 2) {
      fail(ErrorKind::Format, "internal node " + std::to_string(i + n_leaves) + " has fewer than two children");
    }
  }
  tree.parent_ = std::move(parents);
  tree.finalize();
  // Nodes caught in a cycle are never reached from the root.
  if (static_cast<int>(tree.postorder_.size()) != total - n_leaves ||
      (total > 1 && tree.size_[tree.root_] != n_leaves)) {
    fail(ErrorKind::Format, "parent array is not a single tree");
  }
  return tree;
}

std::vector<int> Dendrogram::leaf_order() const {
  std::vector<int> order;
  order.reserve(n_leaves_);
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (is_leaf(v)) {
      order.push_back(v);
      continue;
    }
    const auto& kids = children_[v - n_leaves_];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

DendrogramBuilder::DendrogramBuilder(int n_leaves) : n_leaves_(n_leaves) {
  require(n_leaves >= 1, ErrorKind::InvalidParam, "tree needs at least one leaf");
  parent_.assign(n_leaves, -1);
  parent_.reserve(2 * static_cast<std::size_t>(n_leaves));
}

NodeId DendrogramBuilder::join(NodeId left, NodeId right) {
  const NodeId kids[2] = {left, right};
  return join(kids);
}

NodeId DendrogramBuilder::join(std::span<const NodeId> children) {
  require(children.size() >= 2, ErrorKind::InvalidParam, "join needs at least two children");
  const NodeId id = static_cast<NodeId>(parent_.size());
  for (NodeId c : children) {
    require(c >= 0 && c < id, ErrorKind::InvalidParam, "unknown node " + std::to_string(c));
    require(parent_[c] == -1, ErrorKind::InvalidParam, "node " + std::to_string(c) + " joined twice");
    parent_[c] = id;
  }
  parent_.push_back(-1);
  children_.emplace_back(children.begin(), children.end());
  return id;
}

Dendrogram DendrogramBuilder::finish(NodeId root) && {
  require(root >= 0 && root < static_cast<NodeId>(parent_.size()) && parent_[root] == -1,
          ErrorKind::InvalidParam, "bad root");
  Dendrogram tree;
  tree.n_leaves_ = n_leaves_;
  tree.root_ = root;
  tree.parent_ = std::move(parent_);
  tree.children_ = std::move(children_);
  tree.finalize();
  require(tree.size_[root] == n_leaves_ && tree.internal_count() == static_cast<int>(tree.postorder_.size()),
          ErrorKind::InvalidParam, "builder root does not span all leaves");
  return tree;
}

namespace {

NodeId random_split(DendrogramBuilder& builder, std::span<int> block, Rng& rng) {
  if (block.size() == 1) return block[0];
  // Fair coin per element, resampled until both sides are non-empty.
  std::vector<char> side(block.size());
  std::size_t left = 0;
  do {
    left = 0;
    for (auto& s : side) {
      s = rng.coin() ? 1 : 0;
      left += s;
    }
  } while (left == 0 || left == block.size());
  std::stable_partition(block.begin(), block.end(),
                        [&, i = std::size_t{0}](int) mutable { return side[i++] != 0; });
  const NodeId l = random_split(builder, block.first(left), rng);
  const NodeId r = random_split(builder, block.subspan(left), rng);
  return builder.join(l, r);
}

}  // namespace

Dendrogram random_binary_tree(int n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidParam, "n must be >= 1");
  Rng rng(seed);
  std::vector<int> leaves(n);
  std::iota(leaves.begin(), leaves.end(), 0);
  rng.shuffle(std::span<int>(leaves));
  DendrogramBuilder builder(n);
  const NodeId root = random_split(builder, leaves, rng);
  return std::move(builder).finish(root);
}

Dendrogram path_tree(std::span<const int> order) {
  const int n = static_cast<int>(order.size());
  require(n >= 1, ErrorKind::InvalidParam, "empty order");
  std::vector<char> seen(n, 0);
  for (int v : order) {
    require(v >= 0 && v < n && !seen[v], ErrorKind::InvalidParam, "order is not a permutation");
    seen[v] = 1;
  }
  DendrogramBuilder builder(n);
  NodeId below = order[n - 1];
  for (int p = n - 2; p >= 0; --p) below = builder.join(order[p], below);
  return std::move(builder).finish(below);
}

Dendrogram star_tree(int n) {
  require(n >= 1, ErrorKind::InvalidParam, "n must be >= 1");
  DendrogramBuilder builder(n);
  if (n == 1) return std::move(builder).finish(0);
  std::vector<NodeId> leaves(n);
  std::iota(leaves.begin(), leaves.end(), 0);
  return std::move(builder).finish(builder.join(leaves));
}

double lca_sizes_accumulate(const Dendrogram& tree,
                            const std::function<double(const NodeVisit&)>& visit) {
  if (!tree.is_binary()) fail(ErrorKind::NonBinaryTree, "expected a binary tree");
  CompensatedSum total;
  for (NodeId v : tree.postorder()) {
    const auto kids = tree.children(v);
    total += visit(NodeVisit{v, tree.size(v), kids[0], kids[1]});
  }
  return total.value();
}

std::string serialize(const Dendrogram& tree) {
  const nlohmann::json j = {
      {"n", tree.n_leaves()}, {"parents", tree.parents()}, {"leaf_count", tree.n_leaves()}};
  return j.dump() + "\n";
}

Dendrogram deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Format, std::string("tree JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer() || !j.contains("parents") ||
      !j["parents"].is_array()) {
    fail(ErrorKind::Format, "tree JSON needs integer 'n' and array 'parents'");
  }
  const int n = j["n"].get<int>();
  if (j.contains("leaf_count") && j["leaf_count"] != n) {
    fail(ErrorKind::Format, "leaf_count disagrees with n");
  }
  std::vector<NodeId> parents;
  parents.reserve(j["parents"].size());
  for (const auto& p : j["parents"]) {
    if (!p.is_number_integer()) fail(ErrorKind::Format, "non-integer parent id");
    parents.push_back(p.get<NodeId>());
  }
  return Dendrogram::from_parents(n, std::move(parents));
}

}  // namespace objhc
