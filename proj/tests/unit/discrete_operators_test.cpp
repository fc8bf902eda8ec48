#include "lrsep/discrete_operators.hpp"
#include "lrsep/frac_laplacian.hpp"
#include "lrsep/test_functions.hpp"
#include "oracles/spectral_frac_laplacian.hpp"
#include "oracles/zeta_brute.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace {

const lrsep::JumpLaw& law15() {
  static const auto law = lrsep::build_jump_law(1.5);
  return law;
}

TEST(DiscreteOperators, ReservoirTablesAreTails) {
  const auto ops = lrsep::build_discrete_operators(law15(), 100);
  EXPECT_EQ(ops.r_minus(50), law15().tail(50));
  EXPECT_EQ(ops.r_plus(50), law15().tail(50));
  EXPECT_NEAR(ops.r_minus(1), 0.5, 1e-15);
  for (int z = 1; z <= 99; ++z) EXPECT_EQ(ops.r_minus(z), ops.r_plus(100 - z));
}

TEST(DiscreteOperators, ReservoirLimitAtMidpoint) {
  const double c = oracle::brute_c_gamma(1.5);
  EXPECT_NEAR(lrsep::r_minus_limit(1.5, law15().c_gamma(), 0.5), c / 1.5 * std::pow(2.0, 1.5), 1e-13);
  EXPECT_NEAR(lrsep::r_minus_limit(1.5, law15().c_gamma(), 0.5), 0.702809, 1e-6);
}

TEST(DiscreteOperators, KNOfZeroIsZero) {
  const auto ops = lrsep::build_discrete_operators(law15(), 32);
  const std::vector<double> f(33, 0.0);
  for (int x = 1; x <= 31; ++x) EXPECT_EQ(ops.apply_K_N(f, x), 0.0);
}

TEST(DiscreteOperators, KNOnPlateau) {
  // Constant on [1/4, 3/4], zero elsewhere: at the plateau centre K_N F equals
  // -sum_{|y-x| > N/4} p(y-x) F(x).
  const int n = 64;
  const auto ops = lrsep::build_discrete_operators(law15(), n);
  std::vector<double> f(n + 1, 0.0);
  for (int z = 16; z <= 48; ++z) f[static_cast<std::size_t>(z)] = 1.0;
  const double v = ops.apply_K_N(f, 32);
  EXPECT_NEAR(v, -2.0 * law15().tail(17), 1e-14);
  EXPECT_LT(v, 0.0);
}

TEST(DiscreteOperators, KNRejectsNonCompactSamples) {
  const auto ops = lrsep::build_discrete_operators(law15(), 8);
  std::vector<double> f(9, 1.0);
  EXPECT_THROW(ops.apply_K_N(f, 3), std::invalid_argument);
  std::vector<double> short_f(5, 0.0);
  EXPECT_THROW(ops.apply_K_N(short_f, 3), std::invalid_argument);
}

TEST(FracLaplacian, ZeroFunction) {
  EXPECT_EQ(lrsep::frac_laplacian_1d([](double) { return 0.0; }, 0.4, 1.5, 1.0), 0.0);
}

TEST(FracLaplacian, MatchesSpectralOracle) {
  // Symbol |xi|^g pins the constant; compare at grid points of the oracle.
  for (double g : {1.25, 1.5, 1.75}) {
    const auto bump = lrsep::mollifier(0.3, 0.7);
    const oracle::SpectralGrid grid;
    const auto spec = oracle::spectral_frac_laplacian(bump, g, grid);
    const double c = oracle::canonical_frac_constant(g);
    lrsep::Exterior ext;
    ext.kinks = {bump.lo, bump.hi};
    for (double q : {0.5, 0.375, 0.3125, 0.625, 0.25, 0.875}) {
      const double lib = lrsep::frac_laplacian_1d(bump, q, g, c, ext);
      const double ref = spec[static_cast<std::size_t>(grid.index(q))];
      EXPECT_NEAR(lib, ref, 1e-9 * std::max(1.0, std::abs(ref))) << "g=" << g << " q=" << q;
    }
  }
}

TEST(FracLaplacian, OddPartAboutQCancels) {
  // Adding a function odd about q leaves the value unchanged.
  const auto bump = lrsep::mollifier(0.3, 0.7);
  auto skew = [&](double y) { return bump(y) + 0.3 * (y - 0.5) * bump(y); };
  lrsep::Exterior ext;
  ext.kinks = {0.3, 0.7};
  const double even = lrsep::frac_laplacian_1d(bump, 0.5, 1.5, 1.0, ext);
  EXPECT_NEAR(lrsep::frac_laplacian_1d(skew, 0.5, 1.5, 1.0, ext), even, 1e-10 * std::abs(even));
}

TEST(FracLaplacian, SplitRadiusInsensitive) {
  const auto bump = lrsep::mollifier(0.3, 0.7);
  lrsep::Exterior ext;
  ext.kinks = {0.3, 0.7};
  const auto v = lrsep::frac_laplacian_checked(bump, 0.45, 1.5, 1.0, ext, 1e-3);
  EXPECT_LT(v.richardson_delta, 1e-9);
  EXPECT_NEAR(lrsep::frac_laplacian_1d(bump, 0.45, 1.5, 1.0, ext, 1e-2), v.value, 1e-8);
}

TEST(OperatorConvergence, TailBoundAndOneOverNDecay) {
  const auto rows = lrsep::convergence_report(law15(), {64, 128, 256, 512}, 0.2);
  ASSERT_EQ(rows.size(), 4U);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].bound_ratio, 1.0);
    if (i == 0) continue;
    const double r = rows[i - 1].sup_err_minus / rows[i].sup_err_minus;
    EXPECT_GT(r, 2.0 / 1.2);
    EXPECT_LT(r, 2.0 * 1.2);
  }
}

TEST(OperatorConvergence, KNApproachesFracLaplacian) {
  for (const auto& bump : lrsep::bump_corpus()) {
    const auto rows = lrsep::convergence_report(law15(), {128, 256, 512, 1024}, 0.2, bump);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].sup_err_K_N, rows[i - 1].sup_err_K_N) << bump.name;
  }
}

TEST(OperatorConvergence, RejectsTinyWindow) {
  EXPECT_THROW(lrsep::convergence_report(law15(), {16}, 0.05), std::invalid_argument);
}

}  // namespace
