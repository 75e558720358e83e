#include "objhc/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "objhc/error.hpp"
#include "objhc/parallel.hpp"
#include "objhc/summation.hpp"

namespace objhc {

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Dasgupta: return "dasgupta";
    case ObjectiveKind::MW: return "mw";
    case ObjectiveKind::CKMM: return "ckmm";
    case ObjectiveKind::MWPlus: return "mw_plus";
    case ObjectiveKind::CKMMPlus: return "ckmm_plus";
  }
  return "?";
}

ObjectiveKind parse_objective_kind(const std::string& name) {
  if (name == "dasgupta") return ObjectiveKind::Dasgupta;
  if (name == "mw") return ObjectiveKind::MW;
  if (name == "ckmm") return ObjectiveKind::CKMM;
  if (name == "mw_plus" || name == "mw+") return ObjectiveKind::MWPlus;
  if (name == "ckmm_plus" || name == "ckmm+") return ObjectiveKind::CKMMPlus;
  fail(ErrorKind::InvalidParam, "unknown objective '" + name + "'");
}

Orientation required_orientation(ObjectiveKind kind) {
  return kind == ObjectiveKind::CKMM || kind == ObjectiveKind::CKMMPlus ? Orientation::Distance
                                                                        : Orientation::Similarity;
}

namespace {

void check_maps(const Dendrogram& tree, const FeatureMaps& maps, ObjectiveKind kind) {
  require(static_cast<int>(maps.size()) == tree.n_leaves(), ErrorKind::DimensionMismatch,
          "tree has " + std::to_string(tree.n_leaves()) + " leaves but maps have " +
              std::to_string(maps.size()) + " rows");
  if (maps.orientation != required_orientation(kind)) {
    fail(ErrorKind::MeasureMismatch, to_string(kind) + " needs " +
                                         to_string(required_orientation(kind)) + " weights, got " +
                                         to_string(maps.orientation));
  }
}

// Per-node sums of phi and psi rows over the leaves of each subtree.
class SubtreeSums {
 public:
  SubtreeSums(const Dendrogram& tree, const FeatureMaps& maps) : maps_(maps) {
    const Eigen::Index nodes = tree.node_count();
    const Eigen::Index n = tree.n_leaves();
    phi_.resize(nodes, maps.phi.cols());
    phi_.topRows(n) = maps.phi;
    if (!maps.same) {
      psi_.resize(nodes, maps.psi.cols());
      psi_.topRows(n) = maps.psi;
    }
    for (NodeId v : tree.postorder()) {
      phi_.row(v).setZero();
      if (!maps.same) psi_.row(v).setZero();
      for (NodeId c : tree.children(v)) {
        phi_.row(v) += phi_.row(c);
        if (!maps.same) psi_.row(v) += psi_.row(c);
      }
    }
  }

  // Total weight between the leaf sets of two disjoint subtrees.
  double cross(NodeId a, NodeId b) const {
    if (maps_.same) return phi_.row(a).dot(phi_.row(b));
    return 0.5 * (phi_.row(a).dot(psi_.row(b)) + phi_.row(b).dot(psi_.row(a)));
  }

 private:
  const FeatureMaps& maps_;
  RowMatrix phi_;
  RowMatrix psi_;
};

double eval_binary(const Dendrogram& tree, const FeatureMaps& maps, ObjectiveKind kind) {
  check_maps(tree, maps, kind);
  if (!tree.is_binary()) fail(ErrorKind::NonBinaryTree, to_string(kind) + " needs a binary tree");
  if (tree.n_leaves() < 2) return 0.0;
  const SubtreeSums sums(tree, maps);
  const double n = tree.n_leaves();
  return lca_sizes_accumulate(tree, [&](const NodeVisit& v) {
    const double w = sums.cross(v.left, v.right);
    return kind == ObjectiveKind::MW ? w * (n - v.size) : w * v.size;
  });
}

// Pair-across-children aggregates of one node: P = sum_{a<b} cross(a, b) and
// Q = sum_{a<b} cross(a, b) * (|a| + |b|).
std::pair<double, double> child_pair_sums(const Dendrogram& tree, const SubtreeSums& sums,
                                          NodeId v) {
  const auto kids = tree.children(v);
  CompensatedSum p;
  CompensatedSum q;
  for (std::size_t a = 0; a < kids.size(); ++a) {
    for (std::size_t b = a + 1; b < kids.size(); ++b) {
      const double w = sums.cross(kids[a], kids[b]);
      p += w;
      q += w * (tree.size(kids[a]) + tree.size(kids[b]));
    }
  }
  return {p.value(), q.value()};
}

double eval_plus(const Dendrogram& tree, const FeatureMaps& maps, ObjectiveKind kind) {
  check_maps(tree, maps, kind);
  if (tree.n_leaves() < 2) return 0.0;
  const SubtreeSums sums(tree, maps);
  const double n = tree.n_leaves();
  CompensatedSum total;
  for (NodeId v : tree.postorder()) {
    const double c = tree.size(v);
    const auto [p, q] = child_pair_sums(tree, sums, v);
    // Pairs meeting at v: third leaves outside v, inside one of the pair's
    // two children, or in a third child of v (a random-binarization triple).
    if (kind == ObjectiveKind::MWPlus) {
      total += p * (n - c) + (c * p - q) / 3.0;
    } else {
      total += q + 2.0 * (c * p - q) / 3.0;
    }
  }
  return total.value();
}

// Symmetrized dense weights.
Eigen::MatrixXd symmetric_weights(const FeatureMaps& maps) {
  Eigen::MatrixXd w = maps.materialize();
  if (!maps.same) w = 0.5 * (w + w.transpose()).eval();
  return w;
}

}  // namespace

double eval_dasgupta(const Dendrogram& tree, const FeatureMaps& maps) {
  return eval_binary(tree, maps, ObjectiveKind::Dasgupta);
}

double eval_mw(const Dendrogram& tree, const FeatureMaps& maps) {
  return eval_binary(tree, maps, ObjectiveKind::MW);
}

double eval_ckmm(const Dendrogram& tree, const FeatureMaps& maps) {
  return eval_binary(tree, maps, ObjectiveKind::CKMM);
}

double eval_mw_plus(const Dendrogram& tree, const FeatureMaps& maps) {
  return eval_plus(tree, maps, ObjectiveKind::MWPlus);
}

double eval_ckmm_plus(const Dendrogram& tree, const FeatureMaps& maps) {
  return eval_plus(tree, maps, ObjectiveKind::CKMMPlus);
}

double evaluate(ObjectiveKind kind, const Dendrogram& tree, const FeatureMaps& maps) {
  switch (kind) {
    case ObjectiveKind::Dasgupta: return eval_dasgupta(tree, maps);
    case ObjectiveKind::MW: return eval_mw(tree, maps);
    case ObjectiveKind::CKMM: return eval_ckmm(tree, maps);
    case ObjectiveKind::MWPlus: return eval_mw_plus(tree, maps);
    case ObjectiveKind::CKMMPlus: return eval_ckmm_plus(tree, maps);
  }
  return 0.0;
}

double total_pair_weight(const FeatureMaps& maps) {
  const Eigen::Index n = maps.phi.rows();
  CompensatedSum diag;
  for (Eigen::Index i = 0; i < n; ++i) diag += maps.weight(i, i);
  const Eigen::VectorXd phi_sum = maps.phi.colwise().sum();
  const Eigen::VectorXd psi_sum = maps.psi.colwise().sum();
  return 0.5 * (phi_sum.dot(psi_sum) - diag.value());
}

namespace {

template <typename TripleTerm>
double triple_sum(const Eigen::MatrixXd& w, TripleTerm term) {
  const Eigen::Index n = w.rows();
  std::vector<double> partial(static_cast<std::size_t>(std::max<Eigen::Index>(n, 0)), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    CompensatedSum s;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double wij = w(i, j);
      for (Eigen::Index k = j + 1; k < n; ++k) s += term(wij, w(i, k), w(j, k));
    }
    partial[ii] = s.value();
  });
  CompensatedSum total;
  for (double p : partial) total += p;
  return total.value();
}

}  // namespace

double mw_upper_bound(const FeatureMaps& maps) {
  require(maps.orientation == Orientation::Similarity, ErrorKind::MeasureMismatch,
          "MW upper bound needs similarity weights");
  return triple_sum(symmetric_weights(maps),
                    [](double a, double b, double c) { return std::max({a, b, c}); });
}

double ckmm_upper_bound(const FeatureMaps& maps) {
  require(maps.orientation == Orientation::Distance, ErrorKind::MeasureMismatch,
          "CKMM upper bound needs distance weights");
  const double triples = triple_sum(symmetric_weights(maps), [](double ij, double ik, double jk) {
    return std::max({ij + ik, ik + jk, ij + jk});
  });
  return triples + 2.0 * total_pair_weight(maps);
}

double random_tree_expectation(const FeatureMaps& maps, ObjectiveKind kind) {
  const double n = static_cast<double>(maps.size());
  if (n < 2) return 0.0;
  const double total = total_pair_weight(maps);
  const double mw = (n - 2.0) / 3.0 * total;
  switch (kind) {
    case ObjectiveKind::MW:
    case ObjectiveKind::MWPlus: return mw;
    case ObjectiveKind::Dasgupta: return n * total - mw;
    case ObjectiveKind::CKMM:
    case ObjectiveKind::CKMMPlus: return (2.0 * (n - 2.0) / 3.0 + 2.0) * total;
  }
  return 0.0;
}

Normalized normalize(double q_value, double q_upper, double q_random) {
  const double denom = q_upper - q_random;
  // A gap at rounding level means bound and expectation coincide.
  const double scale = std::max(std::abs(q_upper), std::abs(q_random));
  if (!(denom > 1e-12 * scale) || denom <= 0.0) return {0.0, true};
  return {(q_value - q_random) / denom, false};
}

double dendrogram_purity(const Dendrogram& tree, std::span<const int> labels) {
  if (labels.empty()) fail(ErrorKind::MissingLabels, "dendrogram purity needs class labels");
  require(static_cast<int>(labels.size()) == tree.n_leaves(), ErrorKind::DimensionMismatch,
          "label count differs from leaf count");
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> class_size(classes, 0.0);
  for (int c : labels) {
    require(c >= 0, ErrorKind::InvalidParam, "negative class label");
    class_size[c] += 1.0;
  }
  CompensatedSum normalizer;
  for (double s : class_size) {
    require(s > 0.0, ErrorKind::InvalidParam, "empty class in label coding");
    normalizer += s * s;
  }

  // Per-node class histograms merged small-into-large. Ordered pairs meeting
  // at v in class c: count_v(c)^2 - sum over children of count_child(c)^2.
  using Histogram = std::unordered_map<int, int>;
  std::vector<Histogram> hist(tree.node_count());
  for (int i = 0; i < tree.n_leaves(); ++i) hist[i][labels[i]] = 1;

  CompensatedSum total;
  total += static_cast<double>(tree.n_leaves());  // e1 == e2 terms
  for (NodeId v : tree.postorder()) {
    const auto kids = tree.children(v);
    const NodeId big = *std::max_element(kids.begin(), kids.end(), [&](NodeId a, NodeId b) {
      return hist[a].size() < hist[b].size();
    });
    Histogram merged = std::move(hist[big]);
    // class -> (count in the largest child, sum of squared counts elsewhere)
    std::unordered_map<int, std::pair<double, double>> touched;
    for (NodeId c : kids) {
      if (c == big) continue;
      for (const auto& [cls, cnt] : hist[c]) {
        auto [it, fresh] = touched.try_emplace(cls, 0.0, 0.0);
        if (fresh) {
          const auto found = merged.find(cls);
          it->second.first = found == merged.end() ? 0.0 : found->second;
        }
        it->second.second += static_cast<double>(cnt) * cnt;
        merged[cls] += cnt;
      }
      Histogram().swap(hist[c]);
    }
    const double size = tree.size(v);
    for (const auto& [cls, counts] : touched) {
      const double f = merged[cls];
      const double pairs = f * f - counts.first * counts.first - counts.second;
      if (pairs > 0.0) total += pairs * f / size;
    }
    hist[v] = std::move(merged);
  }
  return total.value() / normalizer.value();
}

ObjectiveReport make_report(ObjectiveKind kind, const Dendrogram& tree, const FeatureMaps& maps) {
  ObjectiveReport r;
  r.kind = kind;
  r.q_value = evaluate(kind, tree, maps);
  r.q_random_expected = random_tree_expectation(maps, kind);
  if (kind == ObjectiveKind::Dasgupta) {
    const double constant = static_cast<double>(maps.size()) * total_pair_weight(maps);
    r.q_upper = constant - mw_upper_bound(maps);
    r.alpha = r.q_value > 0.0 ? r.q_upper / r.q_value : 0.0;
    // Mirror image of the MW normalization: random at 0, the bound at 1.
    const auto norm = normalize(-r.q_value, -r.q_upper, -r.q_random_expected);
    r.alpha_star = norm.value;
    r.degenerate = norm.degenerate;
  } else {
    const bool is_mw = kind == ObjectiveKind::MW || kind == ObjectiveKind::MWPlus;
    r.q_upper = is_mw ? mw_upper_bound(maps) : ckmm_upper_bound(maps);
    r.alpha = r.q_upper > 0.0 ? r.q_value / r.q_upper : 0.0;
    const auto norm = normalize(r.q_value, r.q_upper, r.q_random_expected);
    r.alpha_star = norm.value;
    r.degenerate = norm.degenerate;
  }
  return r;
}

}  // namespace objhc
