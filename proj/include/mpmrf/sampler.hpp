#pragma once

// Exact simulation. sample() follows the parent-to-child representation
// (2d - 1 variates per row); sample_splatter() builds the same law from
// independent event cascades and serves as an independent check.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "mpmrf/model.hpp"
#include "mpmrf/parallel.hpp"
#include "mpmrf/thinning.hpp"

namespace mpmrf {

using Engine = std::mt19937_64;

/// n x d realisations, row-major; column j holds vertex j + 1.
struct SamplePanel {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<Count> values;
  std::uint64_t seed = 0;
  /// Vertex order in which components were generated.
  std::vector<Vertex> order;

  Count at(std::size_t row, Vertex v) const { return values[row * d + (v - 1)]; }

  std::vector<Count> row_sums() const {
    std::vector<Count> sums(n, 0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < d; ++j) sums[r] += values[r * d + j];
    return sums;
  }
};

struct SampleOptions {
  std::size_t threads = 0;
  /// Rows per independent RNG stream; part of the reproducibility contract.
  std::size_t rows_per_stream = 1024;
};

namespace detail {

template <typename Rng>
void sample_row(const TopologicalPlan& plan, Rng& rng, std::vector<Count>& scratch, Count* row) {
  const std::size_t d = plan.size();
  scratch[0] = poisson_draw(plan.lambda, rng);
  for (std::size_t i = 1; i < d; ++i) {
    const double a = plan.alpha[i];
    Count propagated = thin(a, scratch[plan.parent[i]], rng);
    Count innovation = poisson_draw(plan.lambda * (1.0 - a), rng);
    scratch[i] = propagated + innovation;
  }
  for (std::size_t i = 0; i < d; ++i) row[plan.vertex[i] - 1] = scratch[i];
}

}  // namespace detail

/// One realisation of N generated parent-first from `root`.
template <typename Rng>
std::vector<Count> sample_one(const TopologicalPlan& plan, Rng& rng) {
  std::vector<Count> scratch(plan.size()), row(plan.size());
  detail::sample_row(plan, rng, scratch, row.data());
  return row;
}

/// Rows are split into fixed blocks, each driven by its own child stream, so
/// the panel depends on (seed, rows_per_stream) only and not on threading.
inline SamplePanel sample(const Model& model, Vertex root, std::size_t n, std::uint64_t seed,
                          const SampleOptions& options = {}) {
  if (n == 0) throw Error(ErrorCode::BadInput, "sample count must be >= 1");
  model.tree().check_vertex(root);
  const TopologicalPlan plan = make_plan(model, root);
  SamplePanel panel;
  panel.n = n;
  panel.d = plan.size();
  panel.seed = seed;
  panel.order = plan.vertex;
  panel.values.assign(n * panel.d, 0);

  const std::size_t block = std::max<std::size_t>(1, options.rows_per_stream);
  const std::size_t n_blocks = (n + block - 1) / block;
  parallel_for_blocks(n_blocks, options.threads, [&](std::size_t b) {
    Engine rng(split_seed(seed, b));
    std::vector<Count> scratch(panel.d);
    const std::size_t end = std::min(n, (b + 1) * block);
    for (std::size_t r = b * block; r < end; ++r)
      detail::sample_row(plan, rng, scratch, panel.values.data() + r * panel.d);
  });
  return panel;
}

/// N as a superposition of cascades: each vertex spawns Poisson(lambda (1 -
/// alpha to its parent)) events, and every event copies itself to each child
/// independently with that edge's alpha, recursively down the rooted tree.
template <typename Rng>
std::vector<Count> sample_splatter(const Model& model, Vertex root, Rng& rng) {
  model.tree().check_vertex(root);
  const TopologicalPlan plan = make_plan(model, root);
  const std::size_t d = plan.size();
  std::vector<std::vector<std::size_t>> children(d);
  for (std::size_t i = 1; i < d; ++i) children[plan.parent[i]].push_back(i);

  std::vector<Count> counts(d, 0);
  std::vector<std::size_t> stack;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t origin = 0; origin < d; ++origin) {
    const Count events = poisson_draw(plan.lambda * (1.0 - plan.alpha[origin]), rng);
    for (Count e = 0; e < events; ++e) {
      stack.assign(1, origin);
      while (!stack.empty()) {
        std::size_t at = stack.back();
        stack.pop_back();
        ++counts[at];
        for (std::size_t c : children[at])
          if (uniform(rng) < plan.alpha[c]) stack.push_back(c);
      }
    }
  }
  std::vector<Count> out(d);
  for (std::size_t i = 0; i < d; ++i) out[plan.vertex[i] - 1] = counts[i];
  return out;
}

}  // namespace mpmrf
