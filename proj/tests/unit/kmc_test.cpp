#include "lrsep/alias_table.hpp"
#include "lrsep/experiments/stationary.hpp"
#include "lrsep/kmc.hpp"
#include "lrsep/observables.hpp"
#include "lrsep/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

const lrsep::JumpLaw& law15() {
  static const auto law = lrsep::build_jump_law(1.5, 1 << 16);
  return law;
}

double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected) {
  double chi = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    chi += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++dof;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi));
}

TEST(Philox, KnownAnswers) {
  using P = lrsep::Philox4x32;
  const auto zero = P::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero, (P::Counter{0x6627e8d5U, 0xe169c58dU, 0xbc57ac4cU, 0x9b00dbd8U}));
  const auto ones = P::block({0xffffffffU, 0xffffffffU, 0xffffffffU, 0xffffffffU}, {0xffffffffU, 0xffffffffU});
  EXPECT_EQ(ones, (P::Counter{0x408f276dU, 0x41c83b0eU, 0xa20bc7c6U, 0x6d5451fdU}));
  const auto pi = P::block({0x243f6a88U, 0x85a308d3U, 0x13198a2eU, 0x03707344U}, {0xa4093822U, 0x299f31d0U});
  EXPECT_EQ(pi, (P::Counter{0xd16cfe09U, 0x94fdccebU, 0x5001e420U, 0x24126ea1U}));
}

TEST(CounterRng, SeekAndStreamsAreIndependent) {
  lrsep::CounterRng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 5; ++i) a();
  b.seek(5);
  EXPECT_EQ(a(), b());
  lrsep::CounterRng a2(42, 7);
  EXPECT_NE(a2(), c());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(a.uniform_pos(), 0.0);
    ASSERT_LT(a.below(7), 7U);
  }
}

TEST(AliasTable, ChiSquare) {
  const int n = 64;
  std::vector<double> w;
  for (int k = 1; k <= n - 2; ++k) w.push_back((n - 1 - k) * law15().p(k));
  const lrsep::AliasTable table(w);
  lrsep::CounterRng rng(2024, 1);
  const int draws = 1'000'000;
  std::vector<double> obs(w.size(), 0.0), exp(w.size(), 0.0);
  double total = 0.0;
  for (double v : w) total += v;
  for (int i = 0; i < draws; ++i) obs[table.sample(rng)] += 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) exp[i] = draws * w[i] / total;
  EXPECT_GT(chi_square_p(obs, exp), 1e-3);
}

TEST(AliasTable, RejectsBadWeights) {
  EXPECT_THROW(lrsep::AliasTable(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(lrsep::AliasTable(std::vector<double>{1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(lrsep::AliasTable(std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST(Kmc, ChannelFrequenciesMatchCatalog) {
  const int n = 16;
  const lrsep::RateCatalog cat(law15(), n, 0.2, 0.8);
  // categories: gap k (n-2), left flip at z (n-1), right flip at z (n-1)
  const std::size_t gaps = n - 2, sites = n - 1;
  std::vector<double> expected(gaps + 2 * sites, 0.0), observed(expected.size(), 0.0);
  const double steps = 1e6;
  for (std::size_t k = 0; k < gaps; ++k) expected[k] = steps * cat.gap_weights()[k] / cat.grand_total();
  for (int z = 1; z <= n - 1; ++z) {
    const double r = cat.flip_bound_rates()[z - 1] / cat.grand_total();
    expected[gaps + z - 1] = steps * r * cat.left_share(z);
    expected[gaps + sites + z - 1] = steps * r * (1.0 - cat.left_share(z));
  }
  lrsep::TrajectoryState st;
  st.config = lrsep::Configuration(n, 0.2, 0.8);
  st.rng = lrsep::CounterRng(17, 3);
  for (int i = 0; i < static_cast<int>(steps); ++i) {
    const auto ev = lrsep::kmc_step(st, cat);
    switch (ev.kind) {
      case lrsep::EventKind::pair: observed[ev.b - ev.a - 1] += 1.0; break;
      case lrsep::EventKind::left_flip: observed[gaps + ev.a - 1] += 1.0; break;
      case lrsep::EventKind::right_flip: observed[gaps + sites + ev.a - 1] += 1.0; break;
    }
  }
  EXPECT_GT(chi_square_p(observed, expected), 1e-3);
  EXPECT_GE(st.counters.acceptance_fraction(), 0.0);
  EXPECT_LE(st.counters.acceptance_fraction(), 1.0);
  EXPECT_EQ(st.counters.events(), static_cast<std::uint64_t>(steps));
}

TEST(Kmc, HoldingTimesAreExponential) {
  const lrsep::RateCatalog cat(law15(), 10, 0.3, 0.6);
  lrsep::TrajectoryState st;
  st.config = lrsep::Configuration(10, 0.3, 0.6);
  st.rng = lrsep::CounterRng(5, 5);
  const int m = 200000;
  double sum = 0.0, sum2 = 0.0, prev = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto ev = lrsep::kmc_step(st, cat);
    ASSERT_GE(st.clock, prev);
    prev = st.clock;
    sum += ev.holding;
    sum2 += ev.holding * ev.holding;
  }
  const double mean = sum / m;
  const double var = sum2 / m - mean * mean;
  const double target = 1.0 / cat.grand_total();
  EXPECT_NEAR(mean, target, 4.0 * target / std::sqrt(m));
  EXPECT_NEAR(std::sqrt(var), target, 0.02 * target);
}

TEST(Kmc, FullStateWithUnitReservoirsStaysFull) {
  const int n = 9;
  const lrsep::RateCatalog cat(law15(), n, 1.0, 1.0);
  lrsep::TrajectoryState st;
  st.config = lrsep::Configuration(n, 1.0, 1.0);
  for (int z = 1; z < n; ++z) st.config.set(z, 1);
  const auto start = st.config;
  st.rng = lrsep::CounterRng(1, 1);
  for (int i = 0; i < 20000; ++i) lrsep::kmc_step(st, cat);
  EXPECT_EQ(st.config, start);
  EXPECT_EQ(st.counters.left_accepted + st.counters.right_accepted, 0U);
}

TEST(Kmc, CatalogMismatchRejected) {
  const lrsep::RateCatalog cat(law15(), 8, 0.2, 0.8);
  lrsep::TrajectoryState st;
  st.config = lrsep::Configuration(9, 0.2, 0.8);
  lrsep::ProfileObserver prof;
  lrsep::TrajectoryObserver* obs[] = {&prof};
  EXPECT_THROW(lrsep::run_trajectory(st, cat, 0.0, 1.0, obs), std::invalid_argument);
}

TEST(Kmc, ZeroMeasurementTimeFlagsInvalid) {
  const auto ops = lrsep::build_discrete_operators(law15(), 6);
  const lrsep::RateCatalog cat(ops, 0.2, 0.8);
  lrsep::TrajectoryState st;
  st.config = lrsep::Configuration(6, 0.2, 0.8);
  lrsep::CurrentObserver cur(ops);
  lrsep::TrajectoryObserver* obs[] = {&cur};
  const auto run = lrsep::run_trajectory(st, cat, 1.0, 0.0, obs);
  ASSERT_FALSE(run.empty());
  for (const auto& e : run) EXPECT_FALSE(e.valid);
}

TEST(Kmc, CheckpointRoundTripResumesBitExactly) {
  const lrsep::RateCatalog cat(law15(), 12, 0.2, 0.8);
  lrsep::TrajectoryState a;
  a.config = lrsep::Configuration(12, 0.2, 0.8);
  a.rng = lrsep::CounterRng(99, 12);
  for (int i = 0; i < 12345; ++i) lrsep::kmc_step(a, cat);
  const auto j = lrsep::save_checkpoint(a, 1.5);
  double g = 0.0;
  auto b = lrsep::load_checkpoint(nlohmann::json::parse(j.dump()), &g);
  EXPECT_EQ(g, 1.5);
  EXPECT_EQ(a.config, b.config);
  EXPECT_EQ(a.clock, b.clock);
  EXPECT_EQ(a.counters, b.counters);
  for (int i = 0; i < 5000; ++i) {
    lrsep::kmc_step(a, cat);
    lrsep::kmc_step(b, cat);
  }
  EXPECT_EQ(a.config, b.config);
  EXPECT_EQ(a.clock, b.clock);
  EXPECT_EQ(j["occupancy_hex"], lrsep::save_checkpoint(lrsep::load_checkpoint(j), 1.5)["occupancy_hex"]);
}

TEST(Kmc, SameSeedIsBitIdentical) {
  lrsep::experiments::KmcBudget b;
  b.events = 2e5;
  b.replicas = 2;
  b.seed = 314;
  const auto x = lrsep::experiments::kmc_stationary(law15(), 10, 0.2, 0.8, b);
  b.threads = 2;
  const auto y = lrsep::experiments::kmc_stationary(law15(), 10, 0.2, 0.8, b);
  EXPECT_EQ(x.w1.mean, y.w1.mean);
  EXPECT_EQ(x.w1.std_error, y.w1.std_error);
  for (int z = 1; z < 10; ++z) EXPECT_EQ(x.mean(z), y.mean(z));
  b.seed = 315;
  const auto w = lrsep::experiments::kmc_stationary(law15(), 10, 0.2, 0.8, b);
  EXPECT_NE(x.w1.mean, w.w1.mean);
}

TEST(Kmc, DoublingMeasureTimeShrinksErrorBySqrtTwo) {
  lrsep::experiments::KmcBudget b;
  b.replicas = 16;
  b.seed = 77;
  const lrsep::RateCatalog cat(law15(), 8, 0.2, 0.8);
  const double t = 2e5 / cat.grand_total();
  b.t_measure = t;
  const auto short_run = lrsep::experiments::kmc_stationary(law15(), 8, 0.2, 0.8, b);
  b.t_measure = 2.0 * t;
  const auto long_run = lrsep::experiments::kmc_stationary(law15(), 8, 0.2, 0.8, b);
  // merged error is sqrt(sum se_i^2)/R, i.e. the RMS replica error over sqrt(R)
  const double ratio = short_run.w1.std_error / long_run.w1.std_error;
  EXPECT_NEAR(ratio, std::sqrt(2.0), 0.3 * std::sqrt(2.0));
  double site_ratio = 0.0;
  for (int z = 1; z < 8; ++z) site_ratio += short_run.stderr_at(z) / long_run.stderr_at(z) / 7.0;
  EXPECT_NEAR(site_ratio, std::sqrt(2.0), 0.3 * std::sqrt(2.0));
}

TEST(Kmc, MatchesExactSolveAtN6) {
  const auto ex = lrsep::experiments::exact_stationary(law15(), 6, 0.2, 0.8);
  lrsep::experiments::KmcBudget b;
  b.events = 3e6;
  b.seed = 2718;
  const auto mc = lrsep::experiments::kmc_stationary(law15(), 6, 0.2, 0.8, b);
  double zmax = std::abs(mc.w1.mean - ex.w1.mean) / mc.w1.std_error;
  for (int z = 1; z < 6; ++z) zmax = std::max(zmax, std::abs(mc.mean(z) - ex.mean(z)) / mc.stderr_at(z));
  EXPECT_LE(zmax, 4.0);
  EXPECT_NEAR(mc.w1_flux.mean, ex.w1.mean, 4.0 * mc.w1_flux.std_error);
  EXPECT_LT(mc.max_resync_drift, 1e-9);
}

TEST(Kmc, EquilibriumCurrentIsZero) {
  lrsep::experiments::KmcBudget b;
  b.events = 2e6;
  b.seed = 11;
  const auto mc = lrsep::experiments::kmc_stationary(law15(), 10, 0.4, 0.4, b);
  EXPECT_LE(std::abs(mc.w1.mean), 3.0 * mc.w1.std_error + 1e-12);
  for (int z = 1; z < 10; ++z) EXPECT_LE(std::abs(mc.mean(z) - 0.4), 4.0 * mc.stderr_at(z));
}

}  // namespace
