#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mpmrf/error.hpp"

namespace mpmrf {

/// Probabilities p(0), ..., p(k_max) of a count variable.
struct PmfVector {
  std::vector<double> probs;
  /// 1 - sum(probs), never negative.
  double mass_deficit = 0.0;
  /// Upper bound on the mass at or beyond probs.size(); 0 when unknown or
  /// when the vector is exact.
  double tail_bound = 0.0;
  /// Entries below this magnitude were indistinguishable from round-off and
  /// stored as 0.
  double noise_floor = 0.0;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t k) const { return k < probs.size() ? probs[k] : 0.0; }

  /// Index of the last nonzero entry (0 for an all-zero vector).
  std::size_t last_support() const {
    for (std::size_t k = probs.size(); k-- > 0;)
      if (probs[k] != 0.0) return k;
    return 0;
  }

  static PmfVector from_probs(std::vector<double> p) {
    PmfVector pmf;
    double total = 0.0;
    for (double x : p) total += x;
    pmf.probs = std::move(p);
    pmf.mass_deficit = std::max(0.0, 1.0 - total);
    return pmf;
  }

  static PmfVector degenerate(std::size_t c) {
    std::vector<double> p(c + 1, 0.0);
    p[c] = 1.0;
    return from_probs(std::move(p));
  }
};

namespace detail {

inline constexpr double kNegativeClamp = 1e-12;
inline constexpr double kRoundOffFloor = 1e-14;

/// Cleans inverse-DFT output whose exact values are nonnegative and sum to
/// `scale`: entries in (-1e-12 scale, 0) and entries below the round-off
/// floor become 0; anything more negative means the spectrum was not a
/// valid generating function at this resolution.
inline void clean_fft_output(std::vector<double>& values, double scale) {
  const double floor = kRoundOffFloor * scale;
  for (std::size_t k = 0; k < values.size(); ++k) {
    double& v = values[k];
    if (v < -kNegativeClamp * scale)
      throw Error(ErrorCode::AliasingTolerance,
                  "inverse DFT produced " + std::to_string(v) + " at index " + std::to_string(k));
    if (std::abs(v) < floor) v = 0.0;
  }
}

}  // namespace detail

}  // namespace mpmrf
