#include <numeric>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "objhc/error.hpp"
#include "objhc/objectives.hpp"
#include "objhc/oracle.hpp"

namespace objhc {
namespace {

using testing::close_rel;
using testing::pair_then_third;
using testing::random_points;
using testing::random_weights;
using testing::small_ckmm_distances;
using testing::small_mw_weights;

FeatureMaps sim(const Eigen::MatrixXd& w) { return FeatureMaps::from_matrix(w, Orientation::Similarity); }
FeatureMaps dist(const Eigen::MatrixXd& d) { return FeatureMaps::from_matrix(d, Orientation::Distance); }

TEST(SmallInstance, MW) {
  const auto t = pair_then_third();
  const auto m = sim(small_mw_weights());
  EXPECT_NEAR(eval_mw(t, m), 3.0, 1e-12);
  EXPECT_NEAR(eval_dasgupta(t, m), 15.0, 1e-12);
  EXPECT_NEAR(eval_dasgupta(t, m) + eval_mw(t, m), 18.0, 1e-12);
  EXPECT_NEAR(mw_upper_bound(m), 3.0, 1e-12);
  EXPECT_NEAR(random_tree_expectation(m, ObjectiveKind::MW), 2.0, 1e-12);
  const auto n = normalize(3.0, 3.0, 2.0);
  EXPECT_NEAR(n.value, 1.0, 1e-12);
  const auto r = make_report(ObjectiveKind::MW, t, m);
  EXPECT_NEAR(r.alpha, 1.0, 1e-12);
  EXPECT_NEAR(r.alpha_star, 1.0, 1e-12);
}

TEST(SmallInstance, CKMM) {
  const auto t = pair_then_third();
  const auto m = dist(small_ckmm_distances());
  EXPECT_NEAR(eval_ckmm(t, m), 17.0, 1e-12);
  EXPECT_NEAR(ckmm_upper_bound(m), 17.0, 1e-12);
}

TEST(ZeroWeights, AllZero) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(5, 5);
  const auto t = random_binary_tree(5, 1);
  EXPECT_EQ(eval_mw(t, sim(z)), 0.0);
  EXPECT_EQ(eval_ckmm(t, dist(z)), 0.0);
}

TEST(Errors, MeasureAndShape) {
  const auto t = pair_then_third();
  EXPECT_THROW(eval_mw(t, dist(small_ckmm_distances())), Error);
  EXPECT_THROW(eval_ckmm(t, sim(small_mw_weights())), Error);
  EXPECT_THROW(eval_mw(star_tree(3), sim(small_mw_weights())), Error);
  EXPECT_THROW(eval_mw(random_binary_tree(4, 0), sim(small_mw_weights())), Error);
}

TEST(TwoLeaves, Degenerate) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(0, 1) = w(1, 0) = 2.5;
  const auto t = random_binary_tree(2, 0);
  EXPECT_EQ(mw_upper_bound(sim(w)), 0.0);
  EXPECT_DOUBLE_EQ(ckmm_upper_bound(dist(w)), 5.0);
  EXPECT_EQ(random_tree_expectation(sim(w), ObjectiveKind::MW), 0.0);
  EXPECT_DOUBLE_EQ(random_tree_expectation(dist(w), ObjectiveKind::CKMM), 5.0);
  const auto r = make_report(ObjectiveKind::MW, t, sim(w));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.alpha_star, 0.0);
}

TEST(Normalize, Endpoints) {
  EXPECT_EQ(normalize(4.0, 10.0, 4.0).value, 0.0);
  EXPECT_EQ(normalize(10.0, 10.0, 4.0).value, 1.0);
  const auto d = normalize(1.0, 2.0, 2.0);
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.value, 0.0);
}

TEST(Expectation, Linear) {
  const auto w = random_weights(9, 4);
  for (auto kind : {ObjectiveKind::MW, ObjectiveKind::CKMM, ObjectiveKind::Dasgupta}) {
    const auto o = required_orientation(kind);
    const double base = random_tree_expectation(FeatureMaps::from_matrix(w, o), kind);
    const double scaled = random_tree_expectation(FeatureMaps::from_matrix(3.0 * w, o), kind);
    EXPECT_TRUE(close_rel(scaled, 3.0 * base, 1e-12));
  }
}

TEST(Expectation, MatchesMonteCarlo) {
  const auto w = random_weights(10, 77);
  for (auto kind : {ObjectiveKind::MW, ObjectiveKind::CKMM, ObjectiveKind::Dasgupta}) {
    const auto maps = FeatureMaps::from_matrix(w, required_orientation(kind));
    const double closed = random_tree_expectation(maps, kind);
    const auto mc = oracle::monte_carlo_random_tree(w, kind, 10000, 5);
    EXPECT_NEAR(mc.mean, closed, 3.5 * mc.stderr_mean) << to_string(kind);
    EXPECT_NEAR(mc.mean / closed, 1.0, 0.02);
  }
}

class OracleEquivalence : public ::testing::TestWithParam<int> {};

TEST_P(OracleEquivalence, FastMatchesOracles) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  Rng rng(seed);
  const int n = 2 + static_cast<int>(rng.below(11));
  const int d = 1 + static_cast<int>(rng.below(5));
  const auto data = random_points(n, d, seed * 31 + 1);
  const auto tree = random_binary_tree(n, seed * 17 + 3);

  const auto cos = build_feature_maps(data, Measure::cos_sim(), 0);
  const auto l2 = build_feature_maps(data, Measure::l2_squared(), 0);
  const auto w = oracle::pairwise_matrix(data, Measure::cos_sim());
  const auto dd = oracle::pairwise_matrix(data, Measure::l2_squared());

  const double mw = eval_mw(tree, cos);
  EXPECT_TRUE(close_rel(mw, oracle::eval_pairwise_direct(tree, Measure::cos_sim(), data,
                                                         ObjectiveKind::MW), 1e-9));
  EXPECT_TRUE(close_rel(mw, oracle::eval_mw_triples(tree, w), 1e-9));
  EXPECT_TRUE(close_rel(eval_mw_plus(tree, cos), mw, 1e-9));

  const double qd = eval_dasgupta(tree, cos);
  EXPECT_TRUE(close_rel(qd, oracle::eval_pairwise_direct(tree, w, ObjectiveKind::Dasgupta), 1e-9));
  EXPECT_TRUE(close_rel(qd, oracle::eval_dasgupta_triples(tree, w), 1e-9));
  EXPECT_TRUE(close_rel(qd + mw, n * total_pair_weight(cos), 1e-9));

  const double qc = eval_ckmm(tree, l2);
  EXPECT_TRUE(close_rel(qc, oracle::eval_pairwise_direct(tree, Measure::l2_squared(), data,
                                                         ObjectiveKind::CKMM), 1e-9));
  EXPECT_TRUE(close_rel(qc, oracle::eval_ckmm_triples(tree, dd), 1e-9));
  EXPECT_TRUE(close_rel(eval_ckmm_plus(tree, l2), qc, 1e-9));

  EXPECT_TRUE(close_rel(mw_upper_bound(cos), oracle::mw_upper_bound(w), 1e-9));
  EXPECT_TRUE(close_rel(ckmm_upper_bound(l2), oracle::ckmm_upper_bound(dd), 1e-9));
  EXPECT_LE(mw, mw_upper_bound(cos) * (1 + 1e-12) + 1e-12);
  EXPECT_LE(qc, ckmm_upper_bound(l2) * (1 + 1e-12) + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Random, OracleEquivalence, ::testing::Range(0, 200));

TEST(Equivariance, LeafRelabeling) {
  const int n = 9;
  const auto data = random_points(n, 3, 4);
  const auto tree = random_binary_tree(n, 8);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(1);
  rng.shuffle(std::span<int>(perm));
  // Point i moves to row perm[i]; leaf i becomes leaf perm[i].
  EmbeddingSet moved;
  moved.points.resize(n, 3);
  for (int i = 0; i < n; ++i) moved.points.row(perm[i]) = data.points.row(i);
  std::vector<NodeId> parents(tree.parents().size());
  for (int v = 0; v < tree.node_count(); ++v) {
    const int at = v < n ? perm[v] : v;
    parents[at] = tree.parent(v);
  }
  const auto relabeled = Dendrogram::from_parents(n, parents);
  for (auto kind : {ObjectiveKind::MW, ObjectiveKind::Dasgupta, ObjectiveKind::CKMM}) {
    const auto m = kind == ObjectiveKind::CKMM ? Measure::l2_squared() : Measure::cos_sim();
    const double a = evaluate(kind, tree, build_feature_maps(data, m, 0));
    const double b = evaluate(kind, relabeled, build_feature_maps(moved, m, 0));
    EXPECT_TRUE(close_rel(a, b, 1e-9));
  }
}

TEST(Equivariance, EqualWeightsDasguptaInvariantUnderRelabel) {
  const int n = 7;
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n, n, 0.5);
  w.diagonal().setZero();
  const auto t = random_binary_tree(n, 3);
  const double base = eval_dasgupta(t, sim(w));
  Eigen::MatrixXd w2 = w;
  // Constant weights: any relabeling is the identity on W.
  EXPECT_DOUBLE_EQ(eval_dasgupta(t, sim(w2)), base);
  EXPECT_TRUE(close_rel(oracle::eval_mw_triples(t, w), 0.5 * 35, 1e-12));
}

TEST(PlusForms, StarTreeEqualsRandomExpectation) {
  for (int n : {3, 5, 8}) {
    const auto w = random_weights(n, static_cast<std::uint64_t>(n) + 40);
    const auto star = star_tree(n);
    const auto s = sim(w);
    const auto d = dist(w);
    EXPECT_TRUE(close_rel(eval_mw_plus(star, s), random_tree_expectation(s, ObjectiveKind::MW), 1e-9));
    EXPECT_TRUE(close_rel(eval_ckmm_plus(star, d), random_tree_expectation(d, ObjectiveKind::CKMM), 1e-9));
  }
}

TEST(PlusForms, NaryMatchesTripleOracle) {
  // Root with three children: ((0,1),(2,3,4),5)
  const std::vector<NodeId> parents{6, 6, 7, 7, 7, 8, 8, 8, -1};
  const auto t = Dendrogram::from_parents(6, parents);
  const auto w = random_weights(6, 12);
  EXPECT_TRUE(close_rel(eval_mw_plus(t, sim(w)), oracle::eval_mw_plus_triples(t, w), 1e-9));
  EXPECT_TRUE(close_rel(eval_ckmm_plus(t, dist(w)), oracle::eval_ckmm_plus_triples(t, w), 1e-9));
}

TEST(Purity, Examples) {
  const auto two = random_binary_tree(2, 0);
  const std::vector<int> l2{0, 1};
  EXPECT_DOUBLE_EQ(dendrogram_purity(two, l2), 1.0);

  // ((0,1),(2,3)) with classes {0,1},{2,3}: pure.
  const auto pure = Dendrogram::from_parents(4, {4, 4, 5, 5, 6, 6, -1});
  const std::vector<int> labels{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(dendrogram_purity(pure, labels), 1.0);

  // ((0,2),(1,3)): per class, 2 diagonal terms of 1 plus 2 ordered
  // off-diagonal terms whose LCA (the root) has purity 2/4. Total
  // (2 * (2 + 2 * 0.5)) / (4 + 4) = 0.75.
  const auto mixed = Dendrogram::from_parents(4, {4, 5, 4, 5, 6, 6, -1});
  EXPECT_DOUBLE_EQ(dendrogram_purity(mixed, labels), 0.75);
}

TEST(Purity, BruteForce) {
  const int n = 20;
  const auto t = random_binary_tree(n, 2);
  Rng rng(6);
  std::vector<int> labels(n);
  for (auto& l : labels) l = static_cast<int>(rng.below(3));
  const auto table = oracle::lca_size_table(t);
  std::vector<int> count(3, 0);
  for (int l : labels) ++count[l];
  double num = 0, den = 0;
  for (int c = 0; c < 3; ++c) den += double(count[c]) * count[c];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (labels[i] != labels[j]) continue;
      if (i == j) {
        num += 1.0;
        continue;
      }
      // Count class members under the LCA by walking leaves.
      const int size = table[i][j];
      int same = 0;
      for (int k = 0; k < n; ++k)
        if (labels[k] == labels[i] && table[i][k] <= size && table[j][k] <= size) ++same;
      num += double(same) / size;
    }
  EXPECT_NEAR(dendrogram_purity(t, labels), num / den, 1e-12);
}

TEST(Purity, MissingLabels) {
  const auto t = random_binary_tree(3, 0);
  try {
    dendrogram_purity(t, std::vector<int>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingLabels);
  }
}

TEST(ObjectiveNames, Parse) {
  EXPECT_EQ(parse_objective_kind("mw"), ObjectiveKind::MW);
  EXPECT_EQ(parse_objective_kind("ckmm"), ObjectiveKind::CKMM);
  EXPECT_EQ(parse_objective_kind("dasgupta"), ObjectiveKind::Dasgupta);
  EXPECT_EQ(parse_objective_kind("mw_plus"), ObjectiveKind::MWPlus);
  EXPECT_EQ(parse_objective_kind("ckmm_plus"), ObjectiveKind::CKMMPlus);
}

}  // namespace
}  // namespace objhc
