#include "lrsep/generator.hpp"
#include "lrsep/observables.hpp"
#include "lrsep/rng.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <map>

namespace {

using lrsep::Configuration;
using lrsep::GeneratorPart;

const lrsep::JumpLaw& law(double g) {
  static std::map<double, lrsep::JumpLaw> cache;
  auto it = cache.find(g);
  if (it == cache.end()) it = cache.emplace(g, lrsep::build_jump_law(g, 1 << 16)).first;
  return it->second;
}

Configuration random_eta(int n, double a, double b, lrsep::CounterRng& rng) {
  const double rho = rng.uniform();
  return lrsep::random_configuration(n, a, b, [rho](int) { return rho; }, rng);
}

auto site(int z) {
  return [z](const Configuration& e) { return static_cast<double>(e[z]); };
}

TEST(Generator, KillsConstants) {
  lrsep::CounterRng rng(3, 1);
  for (int n : {3, 6, 11}) {
    const auto ops = lrsep::build_discrete_operators(law(1.5), n);
    for (int s = 0; s < 20; ++s) {
      const auto eta = random_eta(n, 0.3, 0.7, rng);
      EXPECT_EQ(lrsep::apply_generator(ops, eta, [](const Configuration&) { return 1.0; }), 0.0);
    }
  }
}

TEST(Generator, FullStateWithUnitReservoirsIsAbsorbing) {
  const int n = 7;
  Configuration eta(n, 1.0, 1.0);
  for (int z = 1; z < n; ++z) eta.set(z, 1);
  const auto ops = lrsep::build_discrete_operators(law(1.5), n);
  for (int x = 1; x < n; ++x) EXPECT_EQ(lrsep::apply_generator(ops, eta, site(x)), 0.0);
}

TEST(Generator, ContinuityIdentity) {
  lrsep::CounterRng rng(11, 2);
  for (double g : {1.25, 1.5, 1.75}) {
    for (int n : {4, 8, 12}) {
      const auto ops = lrsep::build_discrete_operators(law(g), n);
      for (int s = 0; s < 100; ++s) {
        const auto eta = random_eta(n, rng.uniform(), rng.uniform(), rng);
        for (int x = 1; x < n; ++x) {
          const double lhs = lrsep::apply_generator(ops, eta, site(x));
          const double rhs = -(lrsep::current_W(ops, eta, x + 1) - lrsep::current_W(ops, eta, x));
          ASSERT_NEAR(lhs, rhs, 1e-12) << "g=" << g << " n=" << n << " x=" << x;
        }
      }
    }
  }
}

TEST(Generator, ProductIdentityPerPart) {
  lrsep::CounterRng rng(5, 3);
  for (double g : {1.25, 1.75}) {
    for (int n : {5, 9}) {
      const auto ops = lrsep::build_discrete_operators(law(g), n);
      for (int s = 0; s < 200; ++s) {
        const auto eta = random_eta(n, rng.uniform(), rng.uniform(), rng);
        const int j = 1 + static_cast<int>(rng.below(n - 1));
        int k = 1 + static_cast<int>(rng.below(n - 2));
        if (k >= j) ++k;
        auto prod = [j, k](const Configuration& e) { return static_cast<double>(e[j] * e[k]); };
        for (auto part : {GeneratorPart::bulk, GeneratorPart::left, GeneratorPart::right}) {
          const double lhs = lrsep::apply_generator(ops, eta, prod, part);
          double rhs = eta[j] * lrsep::apply_generator(ops, eta, site(k), part) +
                       eta[k] * lrsep::apply_generator(ops, eta, site(j), part);
          if (part == GeneratorPart::bulk) rhs -= ops.p(k - j) * (eta[k] - eta[j]) * (eta[k] - eta[j]);
          ASSERT_NEAR(lhs, rhs, 1e-13);
        }
      }
    }
  }
}

TEST(Generator, PartsSumToFull) {
  lrsep::CounterRng rng(9, 4);
  const auto ops = lrsep::build_discrete_operators(law(1.5), 9);
  for (int s = 0; s < 50; ++s) {
    const auto eta = random_eta(9, 0.25, 0.6, rng);
    auto f = [](const Configuration& e) { return static_cast<double>(e[2] + 3 * e[5] * e[7]); };
    const double parts = lrsep::apply_generator(ops, eta, f, GeneratorPart::bulk) +
                         lrsep::apply_generator(ops, eta, f, GeneratorPart::left) +
                         lrsep::apply_generator(ops, eta, f, GeneratorPart::right);
    EXPECT_NEAR(parts, lrsep::apply_generator(ops, eta, f), 1e-14);
  }
}

TEST(ExactGenerator, RowsSumToZeroAndMatchApplyGenerator) {
  const int n = 7;
  const auto ops = lrsep::build_discrete_operators(law(1.5), n);
  const auto gen = lrsep::build_exact_generator(ops, 0.2, 0.8);
  EXPECT_LT(gen.max_row_sum(), 1e-14);
  // (Q f)(s) for f = eta_3 agrees with the generator applied to the function.
  for (std::uint64_t s = 0; s < gen.states(); ++s) {
    double qf = 0.0;
    for (lrsep::RateMatrix::InnerIterator it(gen.rates(), static_cast<int>(s)); it; ++it) {
      qf += it.value() * static_cast<double>((static_cast<std::uint64_t>(it.col()) >> 2U) & 1U);
    }
    const auto eta = Configuration::from_index(n, 0.2, 0.8, s);
    EXPECT_NEAR(qf, lrsep::apply_generator(ops, eta, site(3)), 1e-14);
  }
}

TEST(ExactGenerator, RejectsLargeN) {
  EXPECT_THROW(lrsep::build_exact_generator(lrsep::kExactMaxN + 1, law(1.5), 0.2, 0.8), std::invalid_argument);
}

TEST(ExactGenerator, TwoStateBalance) {
  const auto ops = lrsep::build_discrete_operators(law(1.5), 2);
  const auto mu = lrsep::solve_stationary(lrsep::build_exact_generator(ops, 0.2, 0.8));
  const double sm = ops.r_minus(1), sp = ops.r_plus(1);
  EXPECT_NEAR(mu.site_means[1], (0.2 * sm + 0.8 * sp) / (sm + sp), 1e-14);
}

TEST(ExactGenerator, BernoulliIsStationaryAtEqualDensities) {
  for (int n : {4, 6, 9, 12}) {
    for (double rho : {0.3, 0.5}) {
      const auto gen = lrsep::build_exact_generator(n, law(1.5), rho, rho);
      EXPECT_LT(gen.bernoulli_residual(rho), 1e-12);
    }
  }
  const auto mu = lrsep::solve_stationary(lrsep::build_exact_generator(6, law(1.5), 0.3, 0.3));
  for (std::uint64_t s = 0; s < mu.mu.size(); ++s) {
    const int k = std::popcount(s);
    EXPECT_NEAR(mu.mu[s], std::pow(0.3, k) * std::pow(0.7, 5 - k), 1e-10);
  }
}

TEST(ExactGenerator, BernoulliDetailedBalanceOfBulk) {
  // nu_rho(eta) p(y-x) = nu_rho(eta^{xy}) p(y-x) for every exchange.
  const auto gen = lrsep::build_exact_generator(8, law(1.5), 0.5, 0.5);
  const double rho = 0.37;
  auto nu = [&](std::uint64_t s) {
    const int k = std::popcount(s);
    return std::pow(rho, k) * std::pow(1.0 - rho, 7 - k);
  };
  const auto& q = gen.rates();
  for (int i = 0; i < q.outerSize(); ++i) {
    for (lrsep::RateMatrix::InnerIterator it(q, i); it; ++it) {
      const auto a = static_cast<std::uint64_t>(i), b = static_cast<std::uint64_t>(it.col());
      if (a == b || std::popcount(a) != std::popcount(b)) continue;
      EXPECT_NEAR(nu(a) * it.value(), nu(b) * q.coeff(static_cast<int>(b), static_cast<int>(a)), 1e-16);
    }
  }
}

TEST(SolveStationary, ProbabilityVectorWithSmallResidual) {
  for (int n : {4, 8, 12, 14}) {
    const auto mu = lrsep::solve_stationary(lrsep::build_exact_generator(n, law(1.5), 0.2, 0.8));
    double total = 0.0;
    for (double v : mu.mu) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT(mu.residual, 1e-10) << "n=" << n;
  }
}

TEST(SolveStationary, ProfileMonotoneAtN8) {
  const auto mu = lrsep::solve_stationary(lrsep::build_exact_generator(8, law(1.5), 0.2, 0.8));
  for (int z = 2; z < 8; ++z) EXPECT_GT(mu.site_means[z], mu.site_means[z - 1]);
  EXPECT_GT(mu.site_means[1], 0.2);
  EXPECT_LT(mu.site_means[7], 0.8);
  // particle-hole plus reflection symmetry
  for (int z = 1; z < 8; ++z) EXPECT_NEAR(mu.site_means[z] + mu.site_means[8 - z], 1.0, 1e-10);
}

TEST(SolveStationary, MeanCurrentIsConstant) {
  for (int n : {5, 8, 12}) {
    const auto ops = lrsep::build_discrete_operators(law(1.5), n);
    const auto mu = lrsep::solve_stationary(lrsep::build_exact_generator(ops, 0.2, 0.8));
    const auto w = lrsep::mean_currents(ops, mu.site_means, 0.2, 0.8);
    for (int x = 2; x <= n; ++x) EXPECT_NEAR(w[x], w[1], 1e-9);
    EXPECT_LT(w[1], 0.0);
  }
}

}  // namespace
