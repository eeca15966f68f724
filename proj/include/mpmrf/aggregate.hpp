#pragma once

// Distribution of M = sum_v N_v. M is compound Poisson; its pmf is recovered
// by evaluating the pgf on the n-th roots of unity and inverting the DFT.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "mpmrf/error.hpp"
#include "mpmrf/exact.hpp"
#include "mpmrf/fft.hpp"
#include "mpmrf/model.hpp"
#include "mpmrf/parallel.hpp"
#include "mpmrf/pmf.hpp"
#include "mpmrf/tree.hpp"

namespace mpmrf {

using Complex = std::complex<double>;

struct CompoundCharacteristics {
  /// Rate of the primary Poisson variable.
  double lambda_M = 0.0;
  /// E[C_M], the mean batch size.
  double mean_secondary = 0.0;
};

inline CompoundCharacteristics compound_params(const Model& model) {
  const double d = static_cast<double>(model.size());
  const double excess = d - model.alpha_sum();
  // Edges number d - 1 and each alpha is at most 1.
  if (!(excess >= 1.0 - 1e-12)) throw Error(ErrorCode::BadInput, "alpha sum exceeds d - 1");
  return {model.lambda() * excess, d / excess};
}

struct FftOptions {
  std::size_t n_fft = std::size_t{1} << 15;
  double aliasing_tolerance = 1e-10;
  std::size_t threads = 0;
};

inline void check_nfft(std::size_t n) {
  if (n < 2 || !fft::is_power_of_two(n))
    throw Error(ErrorCode::BadNfft, "n_fft must be a power of two >= 2, got " + std::to_string(n));
}

namespace detail {

/// Evaluates spectrum(l, t_l, scratch) for l = 0..n/2 in parallel blocks; each
/// block owns its scratch buffer and writes only its own indices.
template <typename Spectrum>
std::vector<Complex> half_spectrum(std::size_t n, std::size_t threads, Spectrum&& spectrum) {
  const std::size_t m = n / 2 + 1;
  constexpr std::size_t kBlock = 256;
  std::vector<Complex> out(m);
  parallel_for_blocks((m + kBlock - 1) / kBlock, threads, [&](std::size_t b) {
    std::vector<Complex> scratch;
    const std::size_t end = std::min(m, (b + 1) * kBlock);
    for (std::size_t l = b * kBlock; l < end; ++l) out[l] = spectrum(l, fft::unit_root(l, n), scratch);
  });
  return out;
}

/// Chernoff bound on the mass at or beyond n of a nonnegative sequence with
/// generating function G: min over s >= 1 of G(s) / s^n. log_g(u) returns
/// ln G(e^u); it is convex in u, so a golden-section search suffices.
template <typename LogG>
double chernoff_tail(std::size_t n, LogG&& log_g) {
  auto objective = [&](double u) {
    const double v = log_g(u) - static_cast<double>(n) * u;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  double lo = 0.0, hi = 8.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = objective(a), fb = objective(b);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = objective(b);
    }
  }
  const double best = std::min({objective(lo), fa, fb, objective(0.0)});
  return std::min(1.0, std::exp(best));
}

/// Shared tail: turns a cleaned inverse DFT into a PmfVector and enforces
/// the aliasing tolerance.
inline PmfVector finish_pmf(std::vector<double> raw, double tail_bound, double tolerance) {
  clean_fft_output(raw, 1.0);
  PmfVector pmf = PmfVector::from_probs(std::move(raw));
  pmf.tail_bound = tail_bound;
  pmf.noise_floor = kRoundOffFloor;
  if (std::max(pmf.mass_deficit, pmf.tail_bound) > tolerance)
    throw Error(ErrorCode::AliasingTolerance,
                "mass beyond n_fft may reach " + std::to_string(std::max(pmf.mass_deficit, pmf.tail_bound)) +
                    "; raise n_fft");
  return pmf;
}

}  // namespace detail

/// ln P_M(e^u) for real u, via the eta recursion at a real argument. The pgf
/// of M is entire, so u > 0 is allowed.
inline double log_pgf_sum_real(const TopologicalPlan& plan, double s) {
  std::vector<double> eta;
  eta_into<double>(plan, [&](std::size_t) { return s; }, eta);
  return pgf_exponent<double>(plan, eta);
}

inline double log_pgf_sum_real(const Model& model, double s) {
  return log_pgf_sum_real(make_plan(model, 1), s);
}

template <typename T>
T pgf_sum(const Model& model, T t) {
  const TopologicalPlan plan = make_plan(model, 1);
  std::vector<T> eta;
  eta_into<T>(plan, [&](std::size_t) { return t; }, eta);
  return std::exp(pgf_exponent<T>(plan, eta));
}

/// (1/rho) ln E[exp(rho M)] from the pgf itself, free of truncation.
inline double entropic_exact(const Model& model, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::BadInput, "rho must be positive");
  return log_pgf_sum_real(model, std::exp(rho)) / rho;
}

inline PmfVector sum_pmf_fft(const Model& model, Vertex root, const FftOptions& options = {}) {
  check_nfft(options.n_fft);
  model.tree().check_vertex(root);
  const TopologicalPlan plan = make_plan(model, root);
  auto spectrum = detail::half_spectrum(options.n_fft, options.threads, [&](std::size_t, Complex t, std::vector<Complex>& eta) {
    eta_into<Complex>(plan, [&](std::size_t) { return t; }, eta);
    return std::exp(pgf_exponent<Complex>(plan, eta));
  });
  const double tail = detail::chernoff_tail(options.n_fft, [&](double u) { return log_pgf_sum_real(plan, std::exp(u)); });
  return detail::finish_pmf(fft::inverse_real_dft(spectrum, options.n_fft), tail, options.aliasing_tolerance);
}

inline PmfVector sum_pmf_fft(const Model& model, Vertex root, std::size_t n_fft) {
  FftOptions options;
  options.n_fft = n_fft;
  return sum_pmf_fft(model, root, options);
}

// ---------------------------------------------------------------------------
// Secondary variable C_M

/// P_{C_M}(t) = sum_v (1 - alpha_v) eta_v(t) / (d - sum alpha), any rooting.
template <typename T>
T secondary_pgf(const TopologicalPlan& plan, T t, std::vector<T>& eta) {
  eta_into<T>(plan, [&](std::size_t) { return t; }, eta);
  double weight_total = 0.0;
  T acc(0.0);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    acc += T(1.0 - plan.alpha[i]) * eta[i];
    weight_total += 1.0 - plan.alpha[i];
  }
  return acc / T(weight_total);
}

template <typename T>
T secondary_pgf(const Model& model, T t) {
  std::vector<T> eta;
  return secondary_pgf<T>(make_plan(model, 1), t, eta);
}

/// pmf of C_M on 0..n_fft-1. Its support is 1..d, so n_fft > d is exact up
/// to round-off.
inline PmfVector secondary_pmf_fft(const Model& model, const FftOptions& options = {}) {
  check_nfft(options.n_fft);
  const TopologicalPlan plan = make_plan(model, 1);
  auto spectrum = detail::half_spectrum(options.n_fft, options.threads, [&](std::size_t, Complex t, std::vector<Complex>& eta) {
    return secondary_pgf<Complex>(plan, t, eta);
  });
  const double tail = options.n_fft > model.size() ? 0.0 : 1.0;
  return detail::finish_pmf(fft::inverse_real_dft(spectrum, options.n_fft), tail, options.aliasing_tolerance);
}

namespace detail {

template <typename T>
T ipow(T base, std::size_t e) {
  T result(1.0);
  while (e > 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

}  // namespace detail

/// psi^{k}(t): y <- t (1 - alpha + alpha y)^chi applied k times from y = t.
template <typename T>
T psi_compose(std::size_t k, T t, double alpha, std::size_t chi) {
  T y = t;
  for (std::size_t i = 0; i < k; ++i) y = t * detail::ipow(T(1.0 - alpha) + T(alpha) * y, chi);
  return y;
}

/// Closed-form P_{C_M}(t) for the canonical shapes with a common alpha.
template <typename T>
T secondary_pgf_closed_form(const TreeShape& shape, double alpha, T t) {
  Model::check_alpha(alpha);
  const std::size_t size = shape_size(shape);
  const double d = static_cast<double>(size);
  const double q = 1.0 - alpha;
  const double norm = alpha + q * d;
  using detail::ipow;

  if (const auto* s = std::get_if<Star>(&shape)) {
    if (s->d == 1) return t;
    const T inner = T(q) + T(alpha) * t;
    return (t * ipow(inner, s->d - 1) + T(q * (d - 1.0)) * t) / T(norm);
  }
  if (const auto* s = std::get_if<Series>(&shape)) {
    const std::size_t n = s->d;
    T total(0.0);
    for (std::size_t i = 1; i <= n; ++i) {
      T inner(0.0);
      T tj = t;
      double alpha_pow = 1.0;
      for (std::size_t j = 1; j <= i; ++j) {
        inner += T(ipow(q, std::min<std::size_t>(1, i - j)) * alpha_pow) * tj;
        tj *= t;
        alpha_pow *= alpha;
      }
      total += T(ipow(q, std::min<std::size_t>(1, n - i)) / norm) * inner;
    }
    return total;
  }
  const auto& c = std::get<ChiNary>(shape);
  T total(0.0);
  T psi = t;
  for (std::size_t i = 0; i <= c.xi; ++i) {
    if (i > 0) psi = t * ipow(T(q) + T(alpha) * psi, c.chi);
    const double weight =
        ipow(static_cast<double>(c.chi), c.xi - i) * ipow(q, std::min<std::size_t>(1, c.xi - i)) / norm;
    total += T(weight) * psi;
  }
  return total;
}

}  // namespace mpmrf
