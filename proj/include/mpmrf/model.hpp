#pragma once

// Model parameters: a tree, a common Poisson mean and one dependence
// parameter per edge.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mpmrf/error.hpp"
#include "mpmrf/tree.hpp"

namespace mpmrf {

struct EdgeAlpha {
  Vertex u = 0;
  Vertex v = 0;
  double alpha = 0.0;
};

class Model {
 public:
  /// edge_alpha[i] belongs to tree.edges()[i].
  Model(Tree tree, double lambda, std::vector<double> edge_alpha)
      : tree_(std::move(tree)), lambda_(lambda), alpha_(std::move(edge_alpha)) {
    if (!std::isfinite(lambda_) || lambda_ <= 0.0)
      throw Error(ErrorCode::BadLambda, "lambda must be finite and > 0, got " + std::to_string(lambda_));
    if (alpha_.size() != tree_.edges().size())
      throw Error(ErrorCode::MissingEdgeAlpha, "expected " + std::to_string(tree_.edges().size()) +
                                                   " edge alphas, got " + std::to_string(alpha_.size()));
    for (double a : alpha_) check_alpha(a);
  }

  const Tree& tree() const noexcept { return tree_; }
  std::size_t size() const noexcept { return tree_.size(); }
  double lambda() const noexcept { return lambda_; }

  /// Alphas indexed by edge id.
  std::span<const double> alphas() const noexcept { return alpha_; }

  /// Direction-insensitive lookup.
  double alpha(Vertex a, Vertex b) const { return alpha_[tree_.edge_id(a, b)]; }

  double alpha_sum() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }

  bool independent() const {
    return std::all_of(alpha_.begin(), alpha_.end(), [](double a) { return a == 0.0; });
  }
  bool comonotone() const {
    return std::all_of(alpha_.begin(), alpha_.end(), [](double a) { return a == 1.0; });
  }

  static void check_alpha(double a) {
    if (!std::isfinite(a) || a < 0.0 || a > 1.0)
      throw Error(ErrorCode::BadAlpha, "alpha must lie in [0,1], got " + std::to_string(a));
  }

 private:
  Tree tree_;
  double lambda_;
  std::vector<double> alpha_;
};

/// Same alpha on every edge.
inline Model new_model(Tree tree, double lambda, double broadcast_alpha) {
  Model::check_alpha(broadcast_alpha);
  const std::size_t m = tree.edges().size();
  return Model(std::move(tree), lambda, std::vector<double>(m, broadcast_alpha));
}

/// Explicit per-edge alphas in any order and orientation.
inline Model new_model(Tree tree, double lambda, std::span<const EdgeAlpha> entries) {
  std::vector<double> alpha(tree.edges().size(), 0.0);
  std::vector<bool> set(alpha.size(), false);
  for (const EdgeAlpha& e : entries) {
    std::size_t id = tree.edge_id(e.u, e.v);
    if (set[id])
      throw Error(ErrorCode::BadInput,
                  "alpha given twice for edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    Model::check_alpha(e.alpha);
    alpha[id] = e.alpha;
    set[id] = true;
  }
  for (std::size_t id = 0; id < set.size(); ++id) {
    if (!set[id])
      throw Error(ErrorCode::MissingEdgeAlpha, "no alpha for edge (" + std::to_string(tree.edges()[id].u) +
                                                   "," + std::to_string(tree.edges()[id].v) + ")");
  }
  return Model(std::move(tree), lambda, std::move(alpha));
}

inline Model new_model(Tree tree, double lambda, std::initializer_list<EdgeAlpha> entries) {
  return new_model(std::move(tree), lambda, std::span<const EdgeAlpha>(entries.begin(), entries.size()));
}

/// Restriction to the subtree induced by `keep`. The retained vertices are
/// relabelled 1..|keep| in ascending order of their original labels.
inline Model prune(const Model& model, std::span<const Vertex> keep) {
  const Tree& tree = model.tree();
  std::vector<Vertex> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  if (kept.empty()) throw Error(ErrorCode::NotASubtree, "empty vertex set");
  for (Vertex v : kept) tree.check_vertex(v);

  std::vector<Vertex> relabel(tree.size() + 1, kNoVertex);
  for (std::size_t i = 0; i < kept.size(); ++i) relabel[kept[i]] = i + 1;

  std::vector<Edge> edges;
  std::vector<EdgeAlpha> alphas;
  for (std::size_t id = 0; id < tree.edges().size(); ++id) {
    const Edge& e = tree.edges()[id];
    if (relabel[e.u] != kNoVertex && relabel[e.v] != kNoVertex) {
      edges.emplace_back(relabel[e.u], relabel[e.v]);
      alphas.push_back({relabel[e.u], relabel[e.v], model.alphas()[id]});
    }
  }
  // An induced subgraph of a tree is a tree iff it has |keep|-1 edges.
  if (edges.size() + 1 != kept.size())
    throw Error(ErrorCode::NotASubtree, "kept vertices do not induce a connected subtree");
  return new_model(Tree::build(kept.size(), edges), model.lambda(), alphas);
}

inline Model prune(const Model& model, std::initializer_list<Vertex> keep) {
  return prune(model, std::span<const Vertex>(keep.begin(), keep.end()));
}

/// Flattened rooted view used by every recursion: entries are in topological
/// order, parent[i] < i, and alpha[i] is the dependence parameter of the edge
/// to the parent (0 at the root).
struct TopologicalPlan {
  double lambda = 0.0;
  std::vector<Vertex> vertex;
  std::vector<std::size_t> parent;
  std::vector<double> alpha;

  std::size_t size() const noexcept { return vertex.size(); }
};

inline TopologicalPlan make_plan(const Model& model, const RootedTree& rooted) {
  TopologicalPlan plan;
  plan.lambda = model.lambda();
  const std::size_t d = rooted.size();
  plan.vertex.assign(rooted.order().begin(), rooted.order().end());
  plan.parent.resize(d, kNoPosition);
  plan.alpha.resize(d, 0.0);
  for (std::size_t i = 1; i < d; ++i) {
    Vertex v = plan.vertex[i];
    plan.parent[i] = rooted.position(rooted.parent(v));
    plan.alpha[i] = model.alphas()[rooted.parent_edge(v)];
  }
  return plan;
}

inline TopologicalPlan make_plan(const Model& model, Vertex root) {
  return make_plan(model, RootedTree(model.tree(), root));
}

}  // namespace mpmrf
