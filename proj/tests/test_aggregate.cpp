#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "mpmrf/aggregate.hpp"
#include "mpmrf/risk.hpp"
#include "mpmrf/sampler.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mpmrf;
using C = std::complex<double>;

namespace {

FftOptions with_n(std::size_t n) {
  FftOptions o;
  o.n_fft = n;
  return o;
}

}  // namespace

TEST(CompoundParams, ExampleTree) {
  const double betas[] = {0.0, 0.3, 0.7, 0.9};
  const double lm[] = {50.0, 35.3, 15.7, 5.9};
  const double ec[] = {1.0, 1.416, 3.185, 8.475};
  for (int i = 0; i < 4; ++i) {
    auto cp = compound_params(new_model(example_tree_50(), 1.0, betas[i]));
    EXPECT_NEAR(cp.lambda_M, lm[i], 5e-4);
    EXPECT_NEAR(cp.mean_secondary, ec[i], 5e-4);
    EXPECT_NEAR(cp.lambda_M * cp.mean_secondary, 50.0, 1e-12);
  }
}

TEST(CompoundParams, ComonotoneStillPositive) {
  auto cp = compound_params(new_model(star(6), 2.0, 1.0));
  EXPECT_DOUBLE_EQ(cp.lambda_M, 2.0);
  EXPECT_DOUBLE_EQ(cp.mean_secondary, 6.0);
}

TEST(SumPmfFft, IndependenceIsPoisson) {
  Model m = new_model(oracle::seven_vertex_tree(), 1.3, 0.0);
  PmfVector pmf = sum_pmf_fft(m, 1, with_n(256));
  const auto ref = oracle::poisson_pmf(1.3 * 7, 255);
  for (std::size_t k = 0; k < 256; ++k) ASSERT_NEAR(pmf[k], ref[k], 1e-10) << k;
}

TEST(SumPmfFft, ComonotoneIsScaledPoisson) {
  Model m = new_model(star(5), 1.0, 1.0);
  PmfVector pmf = sum_pmf_fft(m, 2, with_n(512));
  const auto ref = oracle::poisson_pmf(1.0, 511);
  for (std::size_t k = 0; k < 512; ++k) ASSERT_NEAR(pmf[k], k % 5 == 0 ? ref[k / 5] : 0.0, 1e-10) << k;
}

TEST(SumPmfFft, ZeroMassMatchesPrimaryRate) {
  for (double beta : {0.0, 0.3, 0.7, 0.9}) {
    Model m = new_model(example_tree_50(), 1.0, beta);
    PmfVector pmf = sum_pmf_fft(m, 1);
    EXPECT_NEAR(pmf[0], std::exp(-compound_params(m).lambda_M), 1e-12);
  }
}

TEST(SumPmfFft, MeanAndVarianceIdentities) {
  for (double beta : {0.0, 0.3, 0.7, 0.9}) {
    Model m = new_model(example_tree_50(), 1.0, beta);
    PmfVector pmf = sum_pmf_fft(m, 1);
    EXPECT_NEAR(mean(pmf), 50.0, 1e-6);
    EXPECT_NEAR(variance(pmf), covariance_matrix(m).grand_sum(), 1e-6);
    double total = 0.0;
    for (double p : pmf.probs) {
      EXPECT_GE(p, -1e-12);
      total += p;
    }
    EXPECT_LE(total, 1.0 + 1e-9);
    EXPECT_LE(std::max(pmf.mass_deficit, pmf.tail_bound), 1e-10);
  }
}

TEST(SumPmfFft, RootAndThreadIndependence) {
  Model m = new_model(oracle::seven_vertex_tree(), 2.0, 0.55);
  FftOptions one = with_n(1024), many = with_n(1024);
  one.threads = 1;
  many.threads = 3;
  PmfVector a = sum_pmf_fft(m, 1, one), b = sum_pmf_fft(m, 1, many), c = sum_pmf_fft(m, 6, one);
  EXPECT_EQ(a.probs, b.probs);
  for (std::size_t k = 0; k < 1024; ++k) ASSERT_NEAR(a[k], c[k], 1e-14);
}

TEST(SumPmfFft, Errors) {
  Model m = new_model(example_tree_50(), 1.0, 0.9);
  expect_code(ErrorCode::BadNfft, [&] { sum_pmf_fft(m, 1, with_n(1000)); });
  expect_code(ErrorCode::BadNfft, [&] { sum_pmf_fft(m, 1, with_n(1)); });
  expect_code(ErrorCode::AliasingTolerance, [&] { sum_pmf_fft(m, 1, with_n(128)); });
  expect_code(ErrorCode::BadIndex, [&] { sum_pmf_fft(m, 51, with_n(1024)); });
}

// Brute-force pmf of M on a small model by summing the joint pmf.
TEST(SumPmfFft, MatchesJointPmfSummation) {
  Model m = new_model(build_tree(4, {{1, 2}, {2, 3}, {2, 4}}), 0.8, {{1, 2, 0.3}, {2, 3, 0.9}, {2, 4, 0.6}});
  PmfVector pmf = sum_pmf_fft(m, 3, with_n(128));
  for (Count k = 0; k <= 10; ++k) EXPECT_NEAR(pmf[k], oracle::allocation_by_summation(m, 1, k).second, 1e-12) << k;
}

TEST(SumPmfFft, MonteCarloChiSquare) {
  Model m = new_model(example_tree_50(), 1.0, 0.7);
  PmfVector pmf = sum_pmf_fft(m, 1);
  constexpr std::size_t n = 100000;
  SamplePanel p = sample(m, 1, n, 31);
  std::vector<double> hist(pmf.size(), 0.0);
  for (Count s : p.row_sums()) hist[s] += 1.0;
  EXPECT_GT(oracle::chi_square_gof(hist, pmf.probs, n).p_value, 0.01);
}

TEST(PsiCompose, Examples) {
  EXPECT_EQ(psi_compose<double>(0, 0.3, 0.7, 3), 0.3);
  for (std::size_t k : {1u, 2u, 5u}) EXPECT_DOUBLE_EQ(psi_compose<double>(k, 0.3, 0.0, 3), 0.3);
  EXPECT_DOUBLE_EQ(psi_compose<double>(1, 0.5, 0.5, 2), 0.28125);
}

TEST(SecondaryClosedForm, Trivial) {
  const std::vector<TreeShape> shapes{Star{6}, Series{5}, ChiNary{3, 2}, ChiNary{1, 4}, Star{1}};
  for (const auto& shape : shapes) {
    for (double t : {0.0, 0.3, -0.8}) EXPECT_NEAR(secondary_pgf_closed_form<double>(shape, 0.0, t), t, 1e-15);
    for (double a : {0.2, 0.9}) EXPECT_NEAR(secondary_pgf_closed_form<double>(shape, a, 1.0), 1.0, 1e-14);
  }
  expect_code(ErrorCode::BadShapeParam, [] { secondary_pgf_closed_form<double>(Star{0}, 0.3, 0.5); });
  expect_code(ErrorCode::BadShapeParam, [] { secondary_pgf_closed_form<double>(ChiNary{0, 3}, 0.3, 0.5); });
}

// The chi-nary closed form weights generation-depth terms by
// chi^{xi-i} (1-alpha)^{min(1, xi-i)} / (alpha + (1-alpha) d).
TEST(SecondaryClosedForm, ChiNaryWeights) {
  const std::size_t chi = 2, xi = 3;
  const double a = 0.4;
  const double d = 15.0, norm = a + (1 - a) * d;
  std::vector<C> spectrum(64);
  for (std::size_t l = 0; l < 64; ++l)
    spectrum[l] = secondary_pgf_closed_form<C>(ChiNary{chi, xi}, a, fft::unit_root(l, 64));
  auto coeffs = fft::dft(spectrum, fft::Direction::Inverse);
  double t1 = 0.0;
  for (std::size_t i = 0; i <= xi; ++i) {
    // psi^i has no constant term, so its t^1 coefficient is (1-a)^chi for i >= 1.
    const double psi_t1 = i == 0 ? 1.0 : std::pow(1 - a, double(chi));
    t1 += std::pow(double(chi), double(xi - i)) * (i == xi ? 1.0 : (1 - a)) / norm * psi_t1;
  }
  EXPECT_NEAR(coeffs[1].real(), t1, 1e-12);
}

TEST(SecondaryClosedForm, MatchesGenericPgf) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> r(0.0, 1.0), th(0.0, 2 * M_PI);
  const std::vector<TreeShape> shapes{Star{1}, Star{2}, Star{7}, Series{1}, Series{2}, Series{6}, ChiNary{2, 3}, ChiNary{3, 2}, ChiNary{1, 5}};
  for (const auto& shape : shapes) {
    for (double a : {0.0, 0.25, 0.6, 1.0}) {
      Model m = new_model(generate(shape), 1.0, a);
      for (int rep = 0; rep < 5; ++rep) {
        const C t = std::polar(std::sqrt(r(rng)), th(rng));
        EXPECT_NEAR(std::abs(secondary_pgf_closed_form<C>(shape, a, t) - secondary_pgf<C>(m, t)), 0.0, 1e-12);
      }
    }
  }
}

// M is compound Poisson(lambda_M, C_M): inverting exp(lambda_M (P_C(t) - 1))
// with the closed-form P_C must reproduce the generic FFT pmf.
TEST(SecondaryClosedForm, CompoundConsistency) {
  const std::vector<TreeShape> shapes{Star{8}, Series{8}, ChiNary{2, 3}, ChiNary{3, 2}};
  constexpr std::size_t n = 1024;
  for (const auto& shape : shapes) {
    for (double a : {0.3, 0.8}) {
      Model m = new_model(generate(shape), 1.2, a);
      const double lm = compound_params(m).lambda_M;
      std::vector<C> spectrum(n);
      for (std::size_t l = 0; l < n; ++l)
        spectrum[l] = std::exp(lm * (secondary_pgf_closed_form<C>(shape, a, fft::unit_root(l, n)) - 1.0));
      auto inv = fft::dft(spectrum, fft::Direction::Inverse);
      PmfVector pmf = sum_pmf_fft(m, 1, with_n(n));
      for (std::size_t k = 0; k < n; ++k) ASSERT_NEAR(inv[k].real(), pmf[k], 1e-9) << k;
    }
  }
}

TEST(SecondaryPmf, SupportAndMean) {
  for (double beta : {0.0, 0.3, 0.9}) {
    Model m = new_model(example_tree_50(), 1.0, beta);
    PmfVector c = secondary_pmf_fft(m, with_n(64));
    EXPECT_EQ(c[0], 0.0);
    for (std::size_t k = 51; k < 64; ++k) EXPECT_EQ(c[k], 0.0);
    EXPECT_NEAR(mean(c), compound_params(m).mean_secondary, 1e-10);
  }
}

TEST(EntropicExact, PoissonClosedForm) {
  Model m = new_model(example_tree_50(), 1.0, 0.0);
  EXPECT_NEAR(entropic_exact(m, 0.1), 50.0 / 0.1 * (std::exp(0.1) - 1.0), 1e-9);
  expect_code(ErrorCode::BadInput, [&] { entropic_exact(m, 0.0); });
}

TEST(EntropicExact, AgreesWithPmfWhereResolvable) {
  Model m = new_model(series(4), 1.0, 0.5);
  PmfVector pmf = sum_pmf_fft(m, 1, with_n(256));
  EXPECT_NEAR(entropic(pmf, 0.2), entropic_exact(m, 0.2), 1e-9);
}
