#pragma once

// Functionals of a count distribution held as a PmfVector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "mpmrf/aggregate.hpp"
#include "mpmrf/error.hpp"
#include "mpmrf/pmf.hpp"

namespace mpmrf {

inline void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw Error(ErrorCode::BadInput, "kappa must lie in [0, 1)");
}

inline double mean(const PmfVector& pmf) {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf.probs[k];
  return m;
}

inline double variance(const PmfVector& pmf) {
  const double mu = mean(pmf);
  double v = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double dev = static_cast<double>(k) - mu;
    v += dev * dev * pmf.probs[k];
  }
  return v;
}

/// F(0), ..., F(k_max).
inline std::vector<double> cdf(const PmfVector& pmf) {
  std::vector<double> f(pmf.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) f[k] = acc += pmf.probs[k];
  return f;
}

/// inf{k : F(k) >= kappa}, taken over the support so that kappa = 0 gives
/// the lowest attainable value rather than 0.
inline std::size_t quantile(const PmfVector& pmf, double kappa) {
  check_kappa(kappa);
  if (pmf.mass_deficit >= 1.0 - kappa)
    throw Error(ErrorCode::UnresolvableQuantile, "missing mass exceeds 1 - kappa");
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf.probs[k];
    if (acc >= kappa && pmf.probs[k] > 0.0) return k;
  }
  throw Error(ErrorCode::UnresolvableQuantile, "cumulative mass never reaches kappa");
}

/// (E[X 1{X > VaR}] + (F(VaR) - kappa) VaR) / (1 - kappa).
inline double tvar(const PmfVector& pmf, double kappa) {
  const std::size_t var = quantile(pmf, kappa);
  double f_var = 0.0, upper = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (k <= var)
      f_var += pmf.probs[k];
    else
      upper += static_cast<double>(k) * pmf.probs[k];
  }
  return (upper + (f_var - kappa) * static_cast<double>(var)) / (1.0 - kappa);
}

/// (1/rho) ln sum_k e^{rho k} p(k). Refused when the mass the vector cannot
/// see, weighted by e^{rho k} at the edge of the resolved support, is not
/// negligible against the result.
inline double entropic(const PmfVector& pmf, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::BadInput, "rho must be positive");
  double top = kNegInf;
  for (std::size_t k = 0; k < pmf.size(); ++k)
    if (pmf.probs[k] > 0.0) top = std::max(top, rho * static_cast<double>(k) + std::log(pmf.probs[k]));
  if (top == kNegInf) throw Error(ErrorCode::BadInput, "pmf has no positive mass");
  double scaled = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k)
    if (pmf.probs[k] > 0.0) scaled += std::exp(rho * static_cast<double>(k) + std::log(pmf.probs[k]) - top);
  const double log_mgf = top + std::log(scaled);

  const double unresolved = std::max({pmf.mass_deficit, pmf.tail_bound, pmf.noise_floor});
  if (unresolved > 0.0) {
    const double edge = rho * static_cast<double>(pmf.last_support() + 1);
    const double log_ratio = edge + std::log(unresolved) - log_mgf;
    if (log_ratio > std::log(1e-8))
      throw Error(ErrorCode::TailDominates, "truncated support cannot resolve E[exp(rho X)] at this rho");
  }
  return log_mgf / rho;
}

/// E[max(X - x, 0)].
inline double stop_loss(const PmfVector& pmf, double x) {
  double s = 0.0;
  for (std::size_t k = pmf.size(); k-- > 0;) {
    const double excess = static_cast<double>(k) - x;
    if (excess <= 0.0) break;
    s += excess * pmf.probs[k];
  }
  return s;
}

enum class ConvexOrder { Ordered, Incomparable };

/// Necessary conditions for a <=cx b: equal means and dominated stop-loss
/// transforms on the grid.
inline ConvexOrder convex_order_check(const PmfVector& a, const PmfVector& b, std::span<const double> grid) {
  if (std::abs(mean(a) - mean(b)) > 1e-6) return ConvexOrder::Incomparable;
  for (double x : grid)
    if (stop_loss(a, x) > stop_loss(b, x) + 1e-9) return ConvexOrder::Incomparable;
  return ConvexOrder::Ordered;
}

struct RiskReport {
  double variance = 0.0;
  std::map<double, std::size_t> var_levels;
  std::map<double, double> tvar_levels;
  std::map<double, double> entropic;
};

/// When a model is supplied the entropic values come from its pgf; otherwise
/// from the pmf, which may raise TailDominates.
inline RiskReport risk_report(const PmfVector& pmf, std::span<const double> kappas, std::span<const double> rhos,
                              const Model* model = nullptr) {
  RiskReport report;
  report.variance = variance(pmf);
  for (double kappa : kappas) {
    report.var_levels[kappa] = quantile(pmf, kappa);
    report.tvar_levels[kappa] = tvar(pmf, kappa);
  }
  for (double rho : rhos) report.entropic[rho] = model ? entropic_exact(*model, rho) : entropic(pmf, rho);
  return report;
}

}  // namespace mpmrf
