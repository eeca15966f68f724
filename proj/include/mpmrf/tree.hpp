#pragma once

// Tree topology: validated undirected trees, rootings with a deterministic
// topological order, path queries, canonical shapes and the weighted
// adjacency matrix used by the matrix-form algorithms.
//
// Vertices are 1-indexed in every public signature.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <deque>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "mpmrf/error.hpp"

namespace mpmrf {

using Vertex = std::size_t;

inline constexpr Vertex kNoVertex = 0;
inline constexpr std::size_t kNoPosition = std::numeric_limits<std::size_t>::max();

/// Unordered edge, stored normalised so that u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class Tree {
 public:
  /// Validates and builds a tree on vertices 1..d.
  static Tree build(std::size_t d, std::span<const Edge> edges) {
    if (d == 0) throw Error(ErrorCode::NotATree, "a tree needs at least one vertex");
    for (const Edge& e : edges) {
      if (e.u < 1 || e.v > d)
        throw Error(ErrorCode::BadIndex, "edge (" + std::to_string(e.u) + "," +
                                             std::to_string(e.v) + ") outside [1," +
                                             std::to_string(d) + "]");
      if (e.u == e.v) throw Error(ErrorCode::NotATree, "self-loop at vertex " + std::to_string(e.u));
    }
    std::vector<Edge> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorCode::NotATree, "duplicate edge");
    if (sorted.size() != d - 1)
      throw Error(ErrorCode::NotATree, "expected " + std::to_string(d - 1) + " edges, got " +
                                           std::to_string(sorted.size()));

    Tree tree;
    tree.d_ = d;
    tree.edges_ = std::move(sorted);
    tree.neighbors_.assign(d + 1, {});
    tree.incident_.assign(d + 1, {});
    for (std::size_t id = 0; id < tree.edges_.size(); ++id) {
      const Edge& e = tree.edges_[id];
      tree.neighbors_[e.u].push_back(e.v);
      tree.neighbors_[e.v].push_back(e.u);
    }
    for (Vertex v = 1; v <= d; ++v) std::sort(tree.neighbors_[v].begin(), tree.neighbors_[v].end());
    for (Vertex v = 1; v <= d; ++v) {
      for (Vertex w : tree.neighbors_[v]) tree.incident_[v].push_back(tree.edge_id_search(Edge(v, w)));
    }

    // d-1 distinct edges: connected iff acyclic iff tree.
    std::vector<bool> seen(d + 1, false);
    std::vector<Vertex> stack{1};
    seen[1] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : tree.neighbors_[v]) {
        if (!seen[w]) {
          seen[w] = true;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    if (reached != d) throw Error(ErrorCode::NotATree, "graph is disconnected");
    return tree;
  }

  std::size_t size() const noexcept { return d_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Neighbours of v in ascending order.
  std::span<const Vertex> neighbors(Vertex v) const {
    check_vertex(v);
    return neighbors_[v];
  }

  /// Edge ids (indices into edges()) parallel to neighbors(v).
  std::span<const std::size_t> incident_edges(Vertex v) const {
    check_vertex(v);
    return incident_[v];
  }

  std::size_t degree(Vertex v) const { return neighbors(v).size(); }

  bool has_edge(Vertex a, Vertex b) const {
    if (a < 1 || a > d_ || b < 1 || b > d_ || a == b) return false;
    return std::binary_search(neighbors_[a].begin(), neighbors_[a].end(), b);
  }

  /// Index of edge {a,b} in edges(); throws BadIndex if the edge is absent.
  std::size_t edge_id(Vertex a, Vertex b) const {
    if (!has_edge(a, b))
      throw Error(ErrorCode::BadIndex,
                  "(" + std::to_string(a) + "," + std::to_string(b) + ") is not an edge");
    return edge_id_search(Edge(a, b));
  }

  void check_vertex(Vertex v) const {
    if (v < 1 || v > d_)
      throw Error(ErrorCode::BadIndex,
                  "vertex " + std::to_string(v) + " outside [1," + std::to_string(d_) + "]");
  }

  friend bool operator==(const Tree& a, const Tree& b) { return a.d_ == b.d_ && a.edges_ == b.edges_; }

 private:
  std::size_t edge_id_search(const Edge& e) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    return static_cast<std::size_t>(it - edges_.begin());
  }

  std::size_t d_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> neighbors_;
  std::vector<std::vector<std::size_t>> incident_;
};

inline Tree build_tree(std::size_t d, std::span<const Edge> edges) { return Tree::build(d, edges); }

inline Tree build_tree(std::size_t d, std::initializer_list<Edge> edges) {
  return Tree::build(d, std::span<const Edge>(edges.begin(), edges.size()));
}

/// A tree together with a root, the parent of every vertex and a topological
/// order (each parent precedes its children).
class RootedTree {
 public:
  RootedTree(Tree tree, Vertex root) : tree_(std::move(tree)), root_(root) {
    tree_.check_vertex(root);
    const std::size_t d = tree_.size();
    parent_.assign(d + 1, kNoVertex);
    parent_edge_.assign(d + 1, kNoPosition);
    position_.assign(d + 1, kNoPosition);
    order_.reserve(d);

    // BFS, children visited in ascending index: deterministic output.
    std::deque<Vertex> queue{root};
    position_[root] = 0;
    order_.push_back(root);
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      auto nbrs = tree_.neighbors(v);
      auto ids = tree_.incident_edges(v);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        Vertex w = nbrs[i];
        if (position_[w] != kNoPosition) continue;
        parent_[w] = v;
        parent_edge_[w] = ids[i];
        position_[w] = order_.size();
        order_.push_back(w);
        queue.push_back(w);
      }
    }
  }

  const Tree& tree() const noexcept { return tree_; }
  std::size_t size() const noexcept { return tree_.size(); }
  Vertex root() const noexcept { return root_; }

  /// Parent of v, or kNoVertex for the root.
  Vertex parent(Vertex v) const {
    tree_.check_vertex(v);
    return parent_[v];
  }

  /// Id of the edge joining v to its parent, or kNoPosition for the root.
  std::size_t parent_edge(Vertex v) const {
    tree_.check_vertex(v);
    return parent_edge_[v];
  }

  std::span<const Vertex> order() const noexcept { return order_; }

  /// 0-based position of v in order().
  std::size_t position(Vertex v) const {
    tree_.check_vertex(v);
    return position_[v];
  }

  std::vector<Vertex> children(Vertex v) const {
    std::vector<Vertex> out;
    for (Vertex w : tree_.neighbors(v))
      if (parent_[w] == v) out.push_back(w);
    return out;
  }

 private:
  Tree tree_;
  Vertex root_;
  std::vector<Vertex> parent_;
  std::vector<std::size_t> parent_edge_;
  std::vector<std::size_t> position_;
  std::vector<Vertex> order_;
};

inline RootedTree root_tree(const Tree& tree, Vertex root) { return RootedTree(tree, root); }

/// Re-rooting is a fresh rooting at the new vertex; only parents along the
/// path between the two roots change.
inline RootedTree reroot(const RootedTree& rooted, Vertex new_root) {
  return RootedTree(rooted.tree(), new_root);
}

/// Unique edge sequence from u to v (empty when u == v).
inline std::vector<Edge> path(const Tree& tree, Vertex u, Vertex v) {
  tree.check_vertex(u);
  tree.check_vertex(v);
  std::vector<Edge> out;
  if (u == v) return out;
  RootedTree from_v(tree, v);
  for (Vertex w = u; w != v; w = from_v.parent(w)) out.emplace_back(w, from_v.parent(w));
  return out;
}

/// Longest path length (in edges).
inline std::size_t diameter(const Tree& tree) {
  auto farthest = [&](Vertex src) {
    RootedTree r(tree, src);
    Vertex last = r.order().back();
    std::size_t len = 0;
    for (Vertex w = last; w != src; w = r.parent(w)) ++len;
    return std::pair{last, len};
  };
  auto [far, ignored] = farthest(1);
  (void)ignored;
  return farthest(far).second;
}

// ---------------------------------------------------------------------------
// Canonical shapes

struct Star {
  std::size_t d = 1;
};
struct Series {
  std::size_t d = 1;
};
/// Complete chi-ary tree of radius xi (xi generations below the root).
struct ChiNary {
  std::size_t chi = 1;
  std::size_t xi = 0;
};

using TreeShape = std::variant<Star, Series, ChiNary>;

inline std::size_t chi_nary_size(std::size_t chi, std::size_t xi) {
  constexpr std::size_t kMaxVertices = 50'000'000;
  if (chi < 1) throw Error(ErrorCode::BadShapeParam, "chi must be >= 1");
  std::size_t total = 0;
  std::size_t level = 1;
  for (std::size_t g = 0; g <= xi; ++g) {
    total += level;
    if (total > kMaxVertices) throw Error(ErrorCode::BadShapeParam, "chi-nary tree too large");
    if (g < xi) {
      if (level > kMaxVertices / chi) throw Error(ErrorCode::BadShapeParam, "chi-nary tree too large");
      level *= chi;
    }
  }
  return total;
}

inline std::size_t shape_size(const TreeShape& shape) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ChiNary>) {
          return chi_nary_size(s.chi, s.xi);
        } else {
          if (s.d < 1) throw Error(ErrorCode::BadShapeParam, "shape needs d >= 1");
          return s.d;
        }
      },
      shape);
}

/// Star: vertex 1 joined to 2..d. Series: edges (i, i+1). Chi-nary: BFS
/// labelling from root 1, children of i are chi*(i-1)+2 .. chi*(i-1)+chi+1.
inline Tree generate(const TreeShape& shape) {
  const std::size_t d = shape_size(shape);
  std::vector<Edge> edges;
  edges.reserve(d - 1);
  if (std::holds_alternative<Star>(shape)) {
    for (Vertex v = 2; v <= d; ++v) edges.emplace_back(1, v);
  } else if (std::holds_alternative<Series>(shape)) {
    for (Vertex v = 1; v < d; ++v) edges.emplace_back(v, v + 1);
  } else {
    const std::size_t chi = std::get<ChiNary>(shape).chi;
    for (Vertex v = 2; v <= d; ++v) edges.emplace_back((v - 2) / chi + 1, v);
  }
  return Tree::build(d, edges);
}

inline Tree star(std::size_t d) { return generate(Star{d}); }
inline Tree series(std::size_t d) { return generate(Series{d}); }
inline Tree chi_nary(std::size_t chi, std::size_t xi) { return generate(ChiNary{chi, xi}); }

/// The 50-vertex example tree: hub chain 2-9-16-23-30, leaf 1 on hub 2,
/// leaves 3..8 on 2, 10..15 on 9, 17..22 on 16, 24..29 on 23, 31..50 on 30.
inline Tree example_tree_50() {
  std::vector<Edge> edges{{1, 2}, {2, 9}, {9, 16}, {16, 23}, {23, 30}};
  for (Vertex hub : {2, 9, 16, 23})
    for (Vertex leaf = hub + 1; leaf <= hub + 6; ++leaf) edges.emplace_back(hub, leaf);
  for (Vertex leaf = 31; leaf <= 50; ++leaf) edges.emplace_back(30, leaf);
  return Tree::build(50, edges);
}

// ---------------------------------------------------------------------------
// Weighted adjacency matrix in topological labelling

/// d x d matrix, rows/columns labelled by a rooted tree's topological order:
/// diagonal 1, alpha on edges, 0 elsewhere. A structural mask is kept beside
/// the weights so parents stay recoverable on edges with alpha = 0.
class WeightedAdjacency {
 public:
  /// edge_alpha is indexed by edge id of rooted.tree().
  WeightedAdjacency(const RootedTree& rooted, std::span<const double> edge_alpha)
      : d_(rooted.size()), labels_(rooted.order().begin(), rooted.order().end()) {
    const Tree& tree = rooted.tree();
    if (edge_alpha.size() != tree.edges().size())
      throw Error(ErrorCode::BadVectorLength, "one alpha per edge required");
    weights_.assign(d_ * d_, 0.0);
    mask_.assign(d_ * d_, 0);
    for (std::size_t i = 0; i < d_; ++i) {
      weights_[i * d_ + i] = 1.0;
      mask_[i * d_ + i] = 1;
    }
    for (std::size_t id = 0; id < tree.edges().size(); ++id) {
      const Edge& e = tree.edges()[id];
      std::size_t i = rooted.position(e.u), j = rooted.position(e.v);
      weights_[i * d_ + j] = weights_[j * d_ + i] = edge_alpha[id];
      mask_[i * d_ + j] = mask_[j * d_ + i] = 1;
    }
  }

  std::size_t size() const noexcept { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return weights_[i * d_ + j]; }
  bool adjacent(std::size_t i, std::size_t j) const { return i != j && mask_[i * d_ + j] != 0; }
  std::span<const Vertex> labels() const noexcept { return labels_; }

  /// Parent position of every row: the first adjacent column. Row 0 (the
  /// root) gets kNoPosition.
  std::vector<std::size_t> parent_positions() const {
    std::vector<std::size_t> out(d_, kNoPosition);
    for (std::size_t k = 1; k < d_; ++k) {
      for (std::size_t j = 0; j < d_; ++j) {
        if (adjacent(k, j)) {
          out[k] = j;
          break;
        }
      }
    }
    return out;
  }

 private:
  std::size_t d_;
  std::vector<Vertex> labels_;
  std::vector<double> weights_;
  std::vector<unsigned char> mask_;
};

}  // namespace mpmrf
