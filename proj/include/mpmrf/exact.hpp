#pragma once

// Closed-form quantities: the joint pmf as a product of parent-child
// convolutions, the joint pgf through the leaves-up eta recursion, and the
// covariance matrix as a max-product matrix power.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mpmrf/distributions.hpp"
#include "mpmrf/model.hpp"
#include "mpmrf/thinning.hpp"
#include "mpmrf/tree.hpp"

namespace mpmrf {

inline void check_length(std::size_t got, std::size_t want) {
  if (got != want)
    throw Error(ErrorCode::BadVectorLength,
                "expected a vector of length " + std::to_string(want) + ", got " + std::to_string(got));
}

// ---------------------------------------------------------------------------
// Joint pmf

/// ln p_N(x). Each non-root factor is a log-sum-exp over the number of
/// events inherited from the parent.
inline double log_joint_pmf(const Model& model, Vertex root, std::span<const Count> x) {
  check_length(x.size(), model.size());
  const TopologicalPlan plan = make_plan(model, root);
  const double lambda = plan.lambda;
  double total = log_poisson_pmf(x[plan.vertex[0] - 1], lambda);
  std::vector<double> terms;
  for (std::size_t i = 1; i < plan.size() && total != kNegInf; ++i) {
    const Count xv = x[plan.vertex[i] - 1];
    const Count xp = x[plan.vertex[plan.parent[i]] - 1];
    const double a = plan.alpha[i];
    terms.clear();
    for (Count k = 0; k <= std::min(xv, xp); ++k)
      terms.push_back(log_poisson_pmf(xv - k, lambda * (1.0 - a)) + log_binomial_pmf(k, xp, a));
    total += log_sum_exp(terms);
  }
  return total;
}

inline double joint_pmf(const Model& model, Vertex root, std::span<const Count> x) {
  return std::exp(log_joint_pmf(model, root, x));
}

inline double joint_pmf(const Model& model, Vertex root, std::initializer_list<Count> x) {
  return joint_pmf(model, root, std::span<const Count>(x.begin(), x.size()));
}

/// Enumeration oracle: walks every latent configuration (innovation counts
/// and thinning outcomes) of the parent-to-child construction rooted at the
/// highest-labelled vertex and sums the probability of those producing x.
/// Linear-space arithmetic, own rooting; shares no code with joint_pmf.
inline double joint_pmf_bruteforce(const Model& model, std::span<const Count> x) {
  constexpr std::size_t kMaxDim = 6;
  constexpr Count kMaxCount = 8;
  const std::size_t d = model.size();
  check_length(x.size(), d);
  if (d > kMaxDim) throw Error(ErrorCode::TooLargeForOracle, "enumeration limited to d <= 6");
  for (Count c : x)
    if (c > kMaxCount) throw Error(ErrorCode::TooLargeForOracle, "enumeration limited to counts <= 8");

  // Adjacency and a DFS preorder from vertex d, built from the raw edge list.
  std::vector<std::vector<std::pair<Vertex, double>>> adj(d + 1);
  for (std::size_t id = 0; id < model.tree().edges().size(); ++id) {
    const Edge& e = model.tree().edges()[id];
    adj[e.u].push_back({e.v, model.alphas()[id]});
    adj[e.v].push_back({e.u, model.alphas()[id]});
  }
  std::vector<Vertex> order, parent(d + 1, 0);
  std::vector<double> edge_alpha(d + 1, 0.0);
  std::vector<bool> seen(d + 1, false);
  std::vector<Vertex> stack{d};
  seen[d] = true;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto [w, a] : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      parent[w] = v;
      edge_alpha[w] = a;
      stack.push_back(w);
    }
  }

  auto factorial = [](Count n) { return std::tgamma(static_cast<double>(n) + 1.0); };
  auto poisson = [&](Count n, double mu) {
    return std::exp(-mu) * std::pow(mu, static_cast<double>(n)) / factorial(n);
  };
  auto binomial = [&](Count k, Count n, double p) {
    return factorial(n) / (factorial(k) * factorial(n - k)) * std::pow(p, static_cast<double>(k)) *
           std::pow(1.0 - p, static_cast<double>(n - k));
  };

  const double lambda = model.lambda();
  std::vector<Count> value(d + 1, 0);
  std::function<double(std::size_t)> walk = [&](std::size_t idx) -> double {
    if (idx == order.size()) return 1.0;
    const Vertex v = order[idx];
    double sum = 0.0;
    if (parent[v] == 0) {
      for (Count l = 0; l <= kMaxCount; ++l) {
        if (l != x[v - 1]) continue;
        value[v] = l;
        sum += poisson(l, lambda) * walk(idx + 1);
      }
      return sum;
    }
    const Count np = value[parent[v]];
    const double a = edge_alpha[v];
    for (Count b = 0; b <= np; ++b) {
      for (Count l = 0; l <= kMaxCount; ++l) {
        if (b + l != x[v - 1]) continue;
        value[v] = b + l;
        sum += binomial(b, np, a) * poisson(l, lambda * (1.0 - a)) * walk(idx + 1);
      }
    }
    return sum;
  };
  return walk(0);
}

inline double joint_pmf_bruteforce(const Model& model, std::initializer_list<Count> x) {
  return joint_pmf_bruteforce(model, std::span<const Count>(x.begin(), x.size()));
}

// ---------------------------------------------------------------------------
// eta recursion

/// eta_i = t_i * prod_{children c} (1 - alpha_c + alpha_c eta_c), evaluated
/// in reverse topological order (no recursion). arg_at(i) supplies the
/// argument of plan position i. T may be real or complex.
template <typename T, typename ArgAt>
void eta_into(const TopologicalPlan& plan, ArgAt&& arg_at, std::vector<T>& eta) {
  const std::size_t d = plan.size();
  eta.assign(d, T(1.0));
  for (std::size_t i = d; i-- > 0;) {
    eta[i] *= arg_at(i);
    if (i > 0) {
      const double a = plan.alpha[i];
      eta[plan.parent[i]] *= T(1.0 - a) + T(a) * eta[i];
    }
  }
}

/// sum_i lambda (1 - alpha_i) (eta_i - 1): the log of the joint pgf.
template <typename T>
T pgf_exponent(const TopologicalPlan& plan, std::span<const T> eta) {
  T acc(0.0);
  for (std::size_t i = 0; i < plan.size(); ++i) acc += T(plan.lambda * (1.0 - plan.alpha[i])) * (eta[i] - T(1.0));
  return acc;
}

/// Holds one rooting and evaluates every eta_v for an argument vector.
class EtaEvaluator {
 public:
  EtaEvaluator(const Model& model, const RootedTree& rooted) : plan_(make_plan(model, rooted)) {}
  EtaEvaluator(const Model& model, Vertex root) : plan_(make_plan(model, root)) {}

  const TopologicalPlan& plan() const noexcept { return plan_; }

  /// t and the result are indexed by vertex label - 1.
  template <typename T>
  std::vector<T> evaluate(std::span<const T> t) const {
    check_length(t.size(), plan_.size());
    std::vector<T> by_position;
    eta_into<T>(plan_, [&](std::size_t i) { return t[plan_.vertex[i] - 1]; }, by_position);
    std::vector<T> by_vertex(plan_.size());
    for (std::size_t i = 0; i < plan_.size(); ++i) by_vertex[plan_.vertex[i] - 1] = by_position[i];
    return by_vertex;
  }

  /// Same argument on every coordinate; result indexed by plan position.
  template <typename T>
  std::vector<T> evaluate_uniform(T t) const {
    std::vector<T> by_position;
    eta_into<T>(plan_, [&](std::size_t) { return t; }, by_position);
    return by_position;
  }

 private:
  TopologicalPlan plan_;
};

template <typename T>
T eta_eval(const Model& model, const RootedTree& rooted, Vertex v, std::span<const T> t) {
  rooted.tree().check_vertex(v);
  return EtaEvaluator(model, rooted).evaluate(t)[v - 1];
}

/// Joint pgf E[prod t_v^{N_v}] built from the rooting at `root`. Real
/// arguments above 1 are accepted (the pgf is entire).
template <typename T>
T joint_pgf(const Model& model, Vertex root, std::span<const T> t) {
  check_length(t.size(), model.size());
  const TopologicalPlan plan = make_plan(model, root);
  std::vector<T> eta;
  eta_into<T>(plan, [&](std::size_t i) { return t[plan.vertex[i] - 1]; }, eta);
  return std::exp(pgf_exponent<T>(plan, eta));
}

template <typename T>
T joint_pgf(const Model& model, Vertex root, std::initializer_list<T> t) {
  return joint_pgf<T>(model, root, std::span<const T>(t.begin(), t.size()));
}

// ---------------------------------------------------------------------------
// Covariance

struct CovarianceMatrix {
  std::size_t d = 0;
  double lambda = 0.0;
  /// Row-major, indexed by vertex label - 1.
  std::vector<double> values;

  double operator()(Vertex u, Vertex v) const { return values[(u - 1) * d + (v - 1)]; }

  double grand_sum() const {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
};

/// (a * b)_ij = max_k a_ik b_kj for square row-major matrices.
inline std::vector<double> max_product(std::span<const double> a, std::span<const double> b, std::size_t d) {
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double aik = a[i * d + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] = std::max(out[i * d + j], aik * b[k * d + j]);
    }
  return out;
}

/// lambda times the max-product power of the weighted adjacency matrix. The
/// power is iterated until it stops changing, which happens after at most
/// diameter steps and never later than the (d-1)-th product.
inline CovarianceMatrix covariance_matrix(const Model& model) {
  const RootedTree rooted(model.tree(), 1);
  const WeightedAdjacency adjacency(rooted, model.alphas());
  const std::size_t d = adjacency.size();
  std::vector<double> base(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) base[i * d + j] = adjacency(i, j);

  std::vector<double> power = base;
  for (std::size_t k = 2; k <= d; ++k) {
    std::vector<double> next = max_product(power, base, d);
    if (next == power) break;
    power = std::move(next);
  }

  CovarianceMatrix cov;
  cov.d = d;
  cov.lambda = model.lambda();
  cov.values.assign(d * d, 0.0);
  const auto labels = adjacency.labels();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      cov.values[(labels[i] - 1) * d + (labels[j] - 1)] = model.lambda() * power[i * d + j];
  // (u,v) and (v,u) multiply the same alphas in opposite order; mirror the
  // upper triangle so the matrix is exactly symmetric.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) cov.values[j * d + i] = cov.values[i * d + j];
  return cov;
}

/// Pearson correlation: product of alphas along the path.
inline double correlation(const Model& model, Vertex u, Vertex v) {
  double rho = 1.0;
  for (const Edge& e : path(model.tree(), u, v)) rho *= model.alpha(e.u, e.v);
  return rho;
}

}  // namespace mpmrf
