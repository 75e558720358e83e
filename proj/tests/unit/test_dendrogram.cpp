#include <algorithm>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "objhc/dendrogram.hpp"
#include "objhc/error.hpp"
#include "objhc/oracle.hpp"

namespace objhc {
namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

void expect_valid_binary(const Dendrogram& t, int n) {
  ASSERT_EQ(t.n_leaves(), n);
  EXPECT_EQ(t.node_count(), 2 * n - 1);
  EXPECT_TRUE(t.is_binary());
  EXPECT_EQ(t.size(t.root()), n);
  for (NodeId v : t.postorder()) {
    int s = 0;
    for (NodeId c : t.children(v)) {
      EXPECT_EQ(t.parent(c), v);
      s += t.size(c);
    }
    EXPECT_EQ(s, t.size(v));
  }
  auto order = t.leaf_order();
  std::sort(order.begin(), order.end());
  std::vector<int> expect(n);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(order, expect);
}

TEST(RandomTree, SmallCases) {
  const auto one = random_binary_tree(1, 0);
  EXPECT_EQ(one.node_count(), 1);
  EXPECT_EQ(one.size(one.root()), 1);
  const auto two = random_binary_tree(2, 5);
  expect_valid_binary(two, 2);
  EXPECT_EQ(two.parents(), (std::vector<NodeId>{2, 2, -1}));
  EXPECT_EQ(kind_of([] { random_binary_tree(0, 1); }), ErrorKind::InvalidParam);
}

TEST(RandomTree, ValidAndDeterministic) {
  for (int n = 1; n <= 60; n += 7) {
    const auto t = random_binary_tree(n, 99);
    expect_valid_binary(t, n);
    EXPECT_TRUE(t == random_binary_tree(n, 99));
  }
}

TEST(RandomTree, RootSplitFrequenciesN4) {
  const int samples = 100000;
  int balanced = 0;
  for (int s = 0; s < samples; ++s) {
    const auto t = random_binary_tree(4, static_cast<std::uint64_t>(s) + 1000);
    const auto kids = t.children(t.root());
    if (t.size(kids[0]) == 2) ++balanced;
  }
  const double p22 = 6.0 / 14.0, p13 = 8.0 / 14.0;
  const double e22 = samples * p22, e13 = samples * p13;
  const double o22 = balanced, o13 = samples - balanced;
  const double chi2 = (o22 - e22) * (o22 - e22) / e22 + (o13 - e13) * (o13 - e13) / e13;
  // One degree of freedom; 10.83 is the p = 0.001 critical value.
  EXPECT_LT(chi2, 10.83);
}

TEST(PathTree, LcaSizes) {
  const std::vector<int> order{0, 1, 2};
  const auto t = path_tree(order);
  const auto table = oracle::lca_size_table(t);
  EXPECT_EQ(table[0][1], 3);
  EXPECT_EQ(table[1][2], 2);
}

TEST(PathTree, PositionalLaw) {
  const std::vector<int> order{4, 2, 5, 0, 3, 1};
  const auto t = path_tree(order);
  expect_valid_binary(t, 6);
  const auto table = oracle::lca_size_table(t);
  const int n = 6;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) EXPECT_EQ(table[order[p]][order[q]], n - (p + 1) + 1);
  EXPECT_EQ(table[order[0]][order[3]], 6);
}

TEST(PathTree, TwoLeavesAnyOrder) {
  const std::vector<int> a{0, 1}, b{1, 0};
  EXPECT_TRUE(path_tree(a) == path_tree(b));
}

TEST(PathTree, RejectsNonPermutation) {
  EXPECT_EQ(kind_of([] {
              const std::vector<int> bad{0, 0, 1};
              path_tree(bad);
            }),
            ErrorKind::InvalidParam);
}

TEST(StarTree, Shape) {
  const auto t = star_tree(5);
  EXPECT_EQ(t.node_count(), 6);
  EXPECT_EQ(t.children(t.root()).size(), 5u);
  EXPECT_FALSE(t.is_binary());
  EXPECT_EQ(kind_of([&] { lca_sizes_accumulate(t, [](const NodeVisit&) { return 0.0; }); }),
            ErrorKind::NonBinaryTree);
}

TEST(Accumulate, VisitsEveryNodeOnce) {
  const auto two = random_binary_tree(2, 1);
  std::vector<int> sizes;
  lca_sizes_accumulate(two, [&](const NodeVisit& v) {
    sizes.push_back(v.size);
    return 0.0;
  });
  EXPECT_EQ(sizes, (std::vector<int>{2}));

  const std::vector<int> order{0, 1, 2};
  sizes.clear();
  lca_sizes_accumulate(path_tree(order), [&](const NodeVisit& v) {
    sizes.push_back(v.size);
    return 0.0;
  });
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<int>{2, 3}));
}

TEST(Accumulate, CrossPairCountsSumToAllPairs) {
  for (int n : {2, 5, 17, 40}) {
    const auto t = random_binary_tree(n, static_cast<std::uint64_t>(n));
    const double pairs = lca_sizes_accumulate(t, [&](const NodeVisit& v) {
      return static_cast<double>(t.size(v.left)) * t.size(v.right);
    });
    EXPECT_EQ(pairs, n * (n - 1) / 2.0);
  }
}

TEST(Accumulate, AgreesWithExplicitLca) {
  for (int seed = 0; seed < 20; ++seed) {
    const int n = 3 + seed;
    const auto t = random_binary_tree(n, static_cast<std::uint64_t>(seed));
    const auto table = oracle::lca_size_table(t);
    std::vector<std::vector<int>> found(n, std::vector<int>(n, 0));
    lca_sizes_accumulate(t, [&](const NodeVisit& v) {
      std::vector<int> left, right;
      for (int leaf = 0; leaf < n; ++leaf) {
        for (NodeId u = leaf; u >= 0; u = t.parent(u)) {
          if (u == v.left) left.push_back(leaf);
          if (u == v.right) right.push_back(leaf);
        }
      }
      for (int a : left)
        for (int b : right) found[a][b] = found[b][a] = v.size;
      return 0.0;
    });
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) EXPECT_EQ(found[i][j], table[i][j]);
  }
}

TEST(Serialize, RoundTrip) {
  for (int n = 1; n <= 50; ++n) {
    const auto t = random_binary_tree(n, static_cast<std::uint64_t>(3 * n));
    EXPECT_TRUE(deserialize(serialize(t)) == t);
  }
  const auto star = star_tree(4);
  EXPECT_TRUE(deserialize(serialize(star)) == star);
}

TEST(Serialize, Malformed) {
  EXPECT_EQ(kind_of([] { deserialize(R"({"n":2,"parents":[2,-1,-1],"leaf_count":2})"); }),
            ErrorKind::Format);
  // Leaf 0 used as a parent, i.e. a leaf referenced as an internal node.
  EXPECT_EQ(kind_of([] { deserialize(R"({"n":3,"parents":[3,0,4,4,-1],"leaf_count":3})"); }),
            ErrorKind::Format);
  // Internal node with a single child.
  EXPECT_EQ(kind_of([] { deserialize(R"({"n":2,"parents":[3,3,3,-1],"leaf_count":2})"); }),
            ErrorKind::Format);
  EXPECT_EQ(kind_of([] { deserialize(R"({"n":2,"parents":[2,2,5],"leaf_count":2})"); }),
            ErrorKind::Format);
  EXPECT_EQ(kind_of([] { deserialize("not json"); }), ErrorKind::Format);
  // Cycle between internal nodes 3 and 4.
  EXPECT_EQ(kind_of([] { deserialize(R"({"n":3,"parents":[3,3,4,4,3,-1],"leaf_count":3})"); }),
            ErrorKind::Format);
}

TEST(Builder, RejectsPartialRoot) {
  DendrogramBuilder b(3);
  const NodeId p = b.join(0, 1);
  EXPECT_EQ(kind_of([&] { (void)std::move(b).finish(p); }), ErrorKind::InvalidParam);
}

}  // namespace
}  // namespace objhc
