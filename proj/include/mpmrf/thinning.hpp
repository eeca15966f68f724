#pragma once

// Binomial thinning: alpha o X is the number of successes among X
// independent Bernoulli(alpha) trials.

#include <cstdint>
#include <random>

#include "mpmrf/model.hpp"

namespace mpmrf {

using Count = std::uint64_t;

struct ThinningDraw {
  double alpha = 0.0;
  Count input_count = 0;
  Count output_count = 0;
};

template <typename Rng>
Count thin(double alpha, Count x, Rng& rng) {
  Model::check_alpha(alpha);
  if (alpha == 0.0 || x == 0) return 0;
  if (alpha == 1.0) return x;
  std::binomial_distribution<Count> binomial(x, alpha);
  return binomial(rng);
}

template <typename Rng>
ThinningDraw thin_draw(double alpha, Count x, Rng& rng) {
  return {alpha, x, thin(alpha, x, rng)};
}

/// P_{alpha o X}(t) = P_X(1 - alpha + alpha t).
template <typename Pgf, typename T>
auto thinned_pgf_point(double alpha, Pgf&& base_pgf, T t) {
  Model::check_alpha(alpha);
  return base_pgf(T(1.0 - alpha) + T(alpha) * t);
}

template <typename Rng>
Count poisson_draw(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<Count> poisson(mean);
  return poisson(rng);
}

}  // namespace mpmrf
