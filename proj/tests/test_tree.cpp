#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mpmrf/tree.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mpmrf;

namespace {

// BFS distances from u, computed without the library's path routine.
std::vector<std::size_t> distances(const Tree& t, Vertex u) {
  std::vector<std::size_t> dist(t.size() + 1, SIZE_MAX);
  std::vector<Vertex> queue{u};
  dist[u] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (Vertex w : t.neighbors(queue[i]))
      if (dist[w] == SIZE_MAX) {
        dist[w] = dist[queue[i]] + 1;
        queue.push_back(w);
      }
  return dist;
}

void expect_rooted_invariants(const RootedTree& r) {
  ASSERT_EQ(r.order().size(), r.size());
  EXPECT_EQ(r.order()[0], r.root());
  std::vector<Edge> rebuilt;
  for (Vertex v = 1; v <= r.size(); ++v) {
    if (v == r.root()) {
      EXPECT_EQ(r.parent(v), kNoVertex);
      continue;
    }
    EXPECT_LT(r.position(r.parent(v)), r.position(v));
    rebuilt.emplace_back(r.parent(v), v);
  }
  std::sort(rebuilt.begin(), rebuilt.end());
  EXPECT_EQ(rebuilt, std::vector<Edge>(r.tree().edges().begin(), r.tree().edges().end()));
}

}  // namespace

TEST(BuildTree, SingleVertex) {
  Tree t = build_tree(1, {});
  EXPECT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.edges().empty());
}

TEST(BuildTree, ThreeVertexSeries) {
  Tree t = build_tree(3, {{1, 2}, {2, 3}});
  EXPECT_EQ(t.size(), 3u);
  EXPECT_TRUE(t.has_edge(3, 2));
  EXPECT_FALSE(t.has_edge(1, 3));
}

TEST(BuildTree, Rejections) {
  expect_code(ErrorCode::NotATree, [] { build_tree(3, {{1, 2}, {2, 3}, {1, 3}}); });
  expect_code(ErrorCode::NotATree, [] { build_tree(4, {{1, 2}, {3, 4}, {1, 2}}); });
  expect_code(ErrorCode::NotATree, [] { build_tree(3, {{1, 1}, {2, 3}}); });
  expect_code(ErrorCode::NotATree, [] { build_tree(4, {{1, 2}, {2, 1}, {3, 4}}); });
  expect_code(ErrorCode::NotATree, [] { build_tree(3, {{1, 2}}); });
  expect_code(ErrorCode::NotATree, [] { build_tree(0, {}); });
  expect_code(ErrorCode::BadIndex, [] { build_tree(3, {{1, 2}, {2, 4}}); });
  expect_code(ErrorCode::BadIndex, [] { build_tree(3, {{0, 2}, {2, 3}}); });
}

TEST(Generate, Shapes) {
  EXPECT_EQ(star(3).edges(), (std::vector<Edge>{{1, 2}, {1, 3}}));
  EXPECT_EQ(series(4).edges(), (std::vector<Edge>{{1, 2}, {2, 3}, {3, 4}}));
  Tree c = chi_nary(2, 2);
  EXPECT_EQ(c.size(), 7u);
  EXPECT_EQ(c.degree(1), 2u);
  auto nb = c.neighbors(2);
  EXPECT_EQ(std::vector<Vertex>(nb.begin(), nb.end()), (std::vector<Vertex>{1, 4, 5}));
  nb = c.neighbors(3);
  EXPECT_EQ(std::vector<Vertex>(nb.begin(), nb.end()), (std::vector<Vertex>{1, 6, 7}));
  EXPECT_EQ(chi_nary(1, 4).size(), 5u);
  EXPECT_EQ(chi_nary(3, 2).size(), 13u);
  expect_code(ErrorCode::BadShapeParam, [] { star(0); });
  expect_code(ErrorCode::BadShapeParam, [] { series(0); });
  expect_code(ErrorCode::BadShapeParam, [] { chi_nary(0, 2); });
}

TEST(Generate, ExampleTree50) {
  Tree t = example_tree_50();
  EXPECT_EQ(t.size(), 50u);
  EXPECT_EQ(t.degree(30), 21u);
  EXPECT_EQ(t.degree(2), 8u);
  for (Vertex hub : {9, 16, 23}) EXPECT_EQ(t.degree(hub), 8u);
  EXPECT_EQ(t.degree(1), 1u);
  EXPECT_EQ(diameter(t), 6u);
}

TEST(RootTree, SeriesFromOne) {
  RootedTree r = root_tree(series(3), 1);
  EXPECT_EQ(r.parent(2), 1u);
  EXPECT_EQ(r.parent(3), 2u);
  EXPECT_EQ(std::vector<Vertex>(r.order().begin(), r.order().end()), (std::vector<Vertex>{1, 2, 3}));
}

TEST(RootTree, SevenVertexOrders) {
  Tree t = oracle::seven_vertex_tree();
  RootedTree r1 = root_tree(t, 1);
  EXPECT_EQ(std::vector<Vertex>(r1.order().begin(), r1.order().end()), (std::vector<Vertex>{1, 2, 3, 4, 5, 6, 7}));
  RootedTree r3 = root_tree(t, 3);
  expect_rooted_invariants(r3);
  EXPECT_EQ(r3.order()[0], 3u);
  EXPECT_EQ(r3.children(3), (std::vector<Vertex>{1, 4, 5}));
}

TEST(RootTree, BadRoot) {
  expect_code(ErrorCode::BadIndex, [] { root_tree(series(3), 4); });
  expect_code(ErrorCode::BadIndex, [] { root_tree(series(3), 0); });
}

TEST(Reroot, PathFlip) {
  RootedTree r = reroot(root_tree(series(3), 1), 3);
  EXPECT_EQ(r.parent(2), 3u);
  EXPECT_EQ(r.parent(1), 2u);
  EXPECT_EQ(r.parent(3), kNoVertex);
}

TEST(Reroot, Identity) {
  RootedTree a = root_tree(oracle::seven_vertex_tree(), 4);
  RootedTree b = reroot(a, 4);
  for (Vertex v = 1; v <= 7; ++v) EXPECT_EQ(a.parent(v), b.parent(v));
}

TEST(Reroot, SevenVertexToThree) {
  RootedTree a = root_tree(oracle::seven_vertex_tree(), 1);
  RootedTree b = reroot(a, 3);
  EXPECT_EQ(b.parent(1), 3u);
  for (Vertex v : {2, 4, 5, 6, 7}) EXPECT_EQ(b.parent(v), a.parent(v)) << v;
}

TEST(Path, Examples) {
  EXPECT_EQ(path(series(4), 1, 4), (std::vector<Edge>{{1, 2}, {2, 3}, {3, 4}}));
  EXPECT_TRUE(path(series(4), 2, 2).empty());
  EXPECT_EQ(path(oracle::seven_vertex_tree(), 2, 5), (std::vector<Edge>{{1, 2}, {1, 3}, {3, 5}}));
  expect_code(ErrorCode::BadIndex, [] { path(series(4), 1, 5); });
}

// Property checks over every labelled tree with d <= 6 and every root.
TEST(TreeProperties, AllSmallTrees) {
  for (std::size_t d = 1; d <= 6; ++d) {
    for (const Tree& t : oracle::all_trees(d)) {
      for (Vertex r = 1; r <= d; ++r) {
        RootedTree rooted = root_tree(t, r);
        expect_rooted_invariants(rooted);
        for (Vertex r2 = 1; r2 <= d; ++r2) {
          RootedTree a = reroot(rooted, r2), b = root_tree(t, r2);
          for (Vertex v = 1; v <= d; ++v) ASSERT_EQ(a.parent(v), b.parent(v));
        }
      }
      for (Vertex u = 1; u <= d; ++u) {
        auto dist = distances(t, u);
        for (Vertex v = 1; v <= d; ++v) {
          auto p = path(t, u, v);
          auto q = path(t, v, u);
          ASSERT_EQ(p.size(), dist[v]);
          std::reverse(q.begin(), q.end());
          ASSERT_EQ(p, q);
        }
      }
    }
  }
}

TEST(TreeProperties, PrueferCounts) {
  // Cayley: d^(d-2) labelled trees.
  EXPECT_EQ(oracle::all_trees(4).size(), 16u);
  EXPECT_EQ(oracle::all_trees(5).size(), 125u);
}

TEST(WeightedAdjacency, ParentRecoveryOnRandomTrees) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = 2 + rng() % 12;
    std::vector<Edge> edges;
    for (Vertex v = 2; v <= d; ++v) edges.emplace_back(1 + rng() % (v - 1), v);
    Tree t = Tree::build(d, edges);
    RootedTree rooted(t, 1 + rng() % d);
    std::vector<double> alpha(d - 1);
    for (double& a : alpha) a = (rng() % 4 == 0) ? 0.0 : std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    WeightedAdjacency adj(rooted, alpha);
    auto parents = adj.parent_positions();
    for (std::size_t i = 1; i < d; ++i) ASSERT_EQ(parents[i], rooted.position(rooted.parent(adj.labels()[i])));
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_EQ(adj(i, i), 1.0);
      for (std::size_t j = 0; j < d; ++j) EXPECT_EQ(adj(i, j), adj(j, i));
    }
  }
}

TEST(WeightedAdjacency, FirstPositiveColumnWhenAllAlphaPositive) {
  RootedTree rooted(oracle::seven_vertex_tree(), 3);
  std::vector<double> alpha(6, 0.4);
  WeightedAdjacency adj(rooted, alpha);
  for (std::size_t i = 1; i < 7; ++i) {
    std::size_t first = 0;
    while (adj(i, first) <= 0.0) ++first;
    EXPECT_EQ(first, rooted.position(rooted.parent(adj.labels()[i])));
  }
}
