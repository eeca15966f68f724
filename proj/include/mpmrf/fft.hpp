#pragma once

// Thin RAII layer over FFTW3. Sign convention: forward uses exp(-2 pi i kl/n),
// inverse uses exp(+2 pi i kl/n) and divides by n.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace mpmrf::fft {

namespace detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct BufferDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using Buffer = std::unique_ptr<T[], BufferDeleter>;

template <typename T>
Buffer<T> allocate(std::size_t n) {
  return Buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

}  // namespace detail

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

enum class Direction { Forward, Inverse };

inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> input, Direction dir) {
  const std::size_t n = input.size();
  if (n == 0) return {};
  auto in = detail::allocate<fftw_complex>(n);
  auto out = detail::allocate<fftw_complex>(n);
  detail::Plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(),
                                dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = input[i].real();
    in[i][1] = input[i].imag();
  }
  fftw_execute(plan.get());
  std::vector<std::complex<double>> result(n);
  const double scale = dir == Direction::Inverse ? 1.0 / static_cast<double>(n) : 1.0;
  for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0] * scale, out[i][1] * scale};
  return result;
}

/// Inverse DFT of a Hermitian spectrum given by its first n/2 + 1 entries.
/// Returns the n real samples, normalised by 1/n.
inline std::vector<double> inverse_real_dft(std::span<const std::complex<double>> half, std::size_t n) {
  const std::size_t m = n / 2 + 1;
  auto in = detail::allocate<fftw_complex>(m);
  auto out = detail::allocate<double>(n);
  detail::Plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < m; ++i) {
    in[i][0] = half[i].real();
    in[i][1] = half[i].imag();
  }
  fftw_execute(plan.get());
  std::vector<double> result(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = out[i] * scale;
  return result;
}

/// Point l of the DFT of the unit impulse at index 1: exp(-2 pi i l / n).
inline std::complex<double> unit_root(std::size_t l, std::size_t n) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::polar(1.0, -kTwoPi * static_cast<double>(l) / static_cast<double>(n));
}

}  // namespace mpmrf::fft
