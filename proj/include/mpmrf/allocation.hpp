#pragma once

// Expected allocations E[N_v 1{M = k}], conditional mean shares and Euler
// contributions to the TVaR of M.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mpmrf/aggregate.hpp"
#include "mpmrf/error.hpp"
#include "mpmrf/exact.hpp"
#include "mpmrf/fft.hpp"
#include "mpmrf/model.hpp"
#include "mpmrf/pmf.hpp"
#include "mpmrf/risk.hpp"

namespace mpmrf {

inline constexpr double kShareMassFloor = 1e-13;

struct AllocationTable {
  Vertex vertex = 0;
  /// alloc[k] = E[N_v 1{M = k}], k = 0..n_fft-1.
  std::vector<double> alloc;
  /// pmf of M from the same spectrum pass (tree rooted at vertex).
  PmfVector pmf;
  /// lambda - sum(alloc), relative to lambda.
  double mass_deficit = 0.0;
  /// Chernoff bound on E[N_v 1{M >= n_fft}] / lambda.
  double tail_bound = 0.0;

  /// E[N_v | M = k].
  double share(std::size_t k) const {
    if (k >= alloc.size() || pmf[k] <= kShareMassFloor)
      throw Error(ErrorCode::ZeroMassAtK, "p_M(" + std::to_string(k) + ") is zero at working precision");
    return alloc[k] / pmf[k];
  }
};

/// sum_k E[N_v 1{M = k}] t^k = lambda eta_v(t 1) P_M(t), with eta taken on
/// the tree rooted at v.
template <typename T>
T ogfea_eval(const Model& model, Vertex v, T t) {
  model.tree().check_vertex(v);
  const TopologicalPlan plan = make_plan(model, v);
  std::vector<T> eta;
  eta_into<T>(plan, [&](std::size_t) { return t; }, eta);
  return T(plan.lambda) * eta[0] * std::exp(pgf_exponent<T>(plan, eta));
}

inline AllocationTable expected_allocations_fft(const Model& model, Vertex v, const FftOptions& options = {}) {
  check_nfft(options.n_fft);
  model.tree().check_vertex(v);
  const TopologicalPlan plan = make_plan(model, v);
  const std::size_t n = options.n_fft;
  const double lambda = plan.lambda;

  // One pass produces both spectra: P_M(t_l) and lambda h_v(t_l) P_M(t_l).
  std::vector<Complex> pgf_half(n / 2 + 1);
  auto alloc_half = detail::half_spectrum(n, options.threads, [&](std::size_t l, Complex t, std::vector<Complex>& eta) {
    eta_into<Complex>(plan, [&](std::size_t) { return t; }, eta);
    const Complex phi = std::exp(pgf_exponent<Complex>(plan, eta));
    pgf_half[l] = phi;
    return Complex(lambda) * eta[0] * phi;
  });

  auto log_pm = [&](double u) { return log_pgf_sum_real(plan, std::exp(u)); };
  const double pm_tail = detail::chernoff_tail(n, log_pm);
  AllocationTable table;
  table.vertex = v;
  table.pmf = detail::finish_pmf(fft::inverse_real_dft(pgf_half, n), pm_tail, options.aliasing_tolerance);

  table.alloc = fft::inverse_real_dft(alloc_half, n);
  detail::clean_fft_output(table.alloc, lambda);
  double total = 0.0;
  for (double a : table.alloc) total += a;
  table.mass_deficit = std::max(0.0, (lambda - total) / lambda);
  table.tail_bound = detail::chernoff_tail(n, [&](double u) {
    const double s = std::exp(u);
    std::vector<double> eta;
    eta_into<double>(plan, [&](std::size_t) { return s; }, eta);
    return std::log(eta[0]) + pgf_exponent<double>(plan, eta);
  });
  if (std::max(table.mass_deficit, table.tail_bound) > options.aliasing_tolerance)
    throw Error(ErrorCode::AliasingTolerance, "allocation mass beyond n_fft is not negligible; raise n_fft");
  return table;
}

/// pmf of H_v, the number of vertices reached by an event born at v: the
/// inverse DFT of t -> eta_v(t 1) on the tree rooted at v. Degree <= d.
inline std::vector<double> splatter_pmf(const Model& model, Vertex v) {
  model.tree().check_vertex(v);
  const TopologicalPlan plan = make_plan(model, v);
  const std::size_t n = fft::next_power_of_two(std::max<std::size_t>(2, model.size() + 1));
  std::vector<Complex> spectrum(n);
  std::vector<Complex> eta;
  for (std::size_t l = 0; l < n; ++l) {
    eta_into<Complex>(plan, [&](std::size_t) { return fft::unit_root(l, n); }, eta);
    spectrum[l] = eta[0];
  }
  std::vector<Complex> coeffs = fft::dft(spectrum, fft::Direction::Inverse);
  std::vector<double> p(model.size() + 1, 0.0);
  for (std::size_t k = 0; k <= model.size(); ++k) p[k] = std::abs(coeffs[k].real()) < 1e-15 ? 0.0 : coeffs[k].real();
  return p;
}

/// lambda sum_{j <= k} p_H(k - j) p_M(j).
inline double expected_allocation_convolution(const Model& model, Vertex v, std::size_t k,
                                              const FftOptions& options = {}) {
  if (k >= options.n_fft) throw Error(ErrorCode::BadInput, "k must be below n_fft");
  const std::vector<double> p_h = splatter_pmf(model, v);
  const PmfVector p_m = sum_pmf_fft(model, v, options);
  double acc = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    const std::size_t h = k - j;
    if (h < p_h.size()) acc += p_h[h] * p_m[j];
  }
  return model.lambda() * acc;
}

/// E[N_v | M = k].
inline double conditional_mean_share(const Model& model, Vertex v, std::size_t k, const FftOptions& options = {}) {
  return expected_allocations_fft(model, v, options).share(k);
}

struct TvarPart {
  Vertex vertex = 0;
  double contribution = 0.0;
  /// contribution / TVaR.
  double fraction = 0.0;
};

struct TvarContributions {
  double kappa = 0.0;
  std::size_t var = 0;
  double tvar = 0.0;
  std::vector<TvarPart> parts;
};

/// Euler contribution of N_v given its allocations and the pmf of M:
/// (E[N_v] - sum_{i <= VaR} alloc(i) + (F(VaR) - kappa) / p(VaR) alloc(VaR)) / (1 - kappa).
inline double tvar_contribution(const PmfVector& pmf, std::span<const double> alloc, double lambda, double kappa) {
  const std::size_t var = quantile(pmf, kappa);
  if (alloc.size() != pmf.size())
    throw Error(ErrorCode::BadVectorLength, "allocation and pmf lengths differ");
  if (pmf[var] <= 0.0) throw Error(ErrorCode::ZeroMassAtK, "p_M(VaR) is zero");
  double f_var = 0.0, below = 0.0;
  for (std::size_t i = 0; i <= var; ++i) {
    f_var += pmf[i];
    below += alloc[i];
  }
  return (lambda - below + (f_var - kappa) / pmf[var] * alloc[var]) / (1.0 - kappa);
}

/// Contributions for `vertices` (all vertices when empty). VaR, F_M and p_M
/// come from one pmf so the contributions add up to its TVaR.
inline TvarContributions tvar_contributions(const Model& model, double kappa, const FftOptions& options = {},
                                            std::span<const Vertex> vertices = {}) {
  check_kappa(kappa);
  const PmfVector pmf = sum_pmf_fft(model, 1, options);
  TvarContributions out;
  out.kappa = kappa;
  out.var = quantile(pmf, kappa);
  out.tvar = tvar(pmf, kappa);
  std::vector<Vertex> targets(vertices.begin(), vertices.end());
  if (targets.empty())
    for (Vertex v = 1; v <= model.size(); ++v) targets.push_back(v);
  for (Vertex v : targets) {
    const AllocationTable table = expected_allocations_fft(model, v, options);
    const double c = tvar_contribution(pmf, table.alloc, model.lambda(), kappa);
    out.parts.push_back({v, c, c / out.tvar});
  }
  return out;
}

}  // namespace mpmrf
