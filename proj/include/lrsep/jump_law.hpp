#pragma once

/**
 * @file jump_law.hpp
 * @brief Heavy-tailed symmetric step distribution p(z) = c |z|^{-(1+gamma)}.
 *
 * The normalization c makes p a probability on Z \ {0}:
 *     c = 1 / (2 zeta(1 + gamma)).
 *
 * Tail sums T(k) = sum_{j>=k} p(j) and moment tails Tm(k) = sum_{j>=k} j p(j)
 * are tabulated up to a horizon K_max and continued beyond it by the
 * Euler-Maclaurin expansion of sum_{j>=k} j^{-s}:
 *
 *     k^{1-s}/(s-1) + k^{-s}/2 + s k^{-s-1}/12 - s(s+1)(s+2) k^{-s-3}/720
 *
 * which is accurate to O(k^{-s-5}).
 */

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrsep {

/// Default tail-table horizon.
inline constexpr std::int64_t kDefaultTailHorizon = std::int64_t{1} << 20;

namespace detail {

/// Euler-Maclaurin estimate of sum_{j>=k} j^{-s} for s > 1 and k >= 1.
inline double power_tail_sum(double s, double k) {
  const double ks = std::pow(k, -s);
  return k * ks / (s - 1.0) + 0.5 * ks + s * ks / (12.0 * k) -
         s * (s + 1.0) * (s + 2.0) * ks / (720.0 * k * k * k);
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline void check_gamma(double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw std::invalid_argument("jump exponent gamma must lie in (1,2), got " +
                                std::to_string(gamma));
  }
}

}  // namespace detail

/// zeta(s) for s > 1 from the partial sum up to `terms - 1` plus the
/// Euler-Maclaurin remainder at `terms`.
inline double zeta_partial_sum(double s, std::int64_t terms) {
  detail::CompensatedSum acc;
  for (std::int64_t j = terms - 1; j >= 1; --j) {
    acc.add(std::pow(static_cast<double>(j), -s));
  }
  acc.add(detail::power_tail_sum(s, static_cast<double>(terms)));
  return acc.value();
}

/// c_gamma = 1 / (2 zeta(1+gamma)). The default horizon is enough for full
/// double precision; callers that only need c_gamma can use a much smaller one.
inline double jump_normalization(double gamma, std::int64_t terms = 4096) {
  detail::check_gamma(gamma);
  return 0.5 / zeta_partial_sum(1.0 + gamma, terms);
}

/// The step law with its tail tables. Immutable after construction.
class JumpLaw {
 public:
  double gamma() const { return gamma_; }
  double c_gamma() const { return c_gamma_; }
  std::int64_t horizon() const { return k_max_; }

  /// p(z); p(0) = 0 and p(-z) = p(z).
  double p(std::int64_t z) const {
    if (z == 0) return 0.0;
    const double a = std::abs(static_cast<double>(z));
    return c_gamma_ * std::pow(a, -1.0 - gamma_);
  }

  /// T(k) = sum_{j>=k} p(j).
  double tail(std::int64_t k) const {
    if (k < 1) throw std::out_of_range("tail index must be >= 1");
    if (k <= k_max_) return tail_[static_cast<std::size_t>(k)];
    return c_gamma_ * detail::power_tail_sum(1.0 + gamma_, static_cast<double>(k));
  }

  /// Tm(k) = sum_{j>=k} j p(j).
  double moment_tail(std::int64_t k) const {
    if (k < 1) throw std::out_of_range("moment tail index must be >= 1");
    if (k <= k_max_) return moment_tail_[static_cast<std::size_t>(k)];
    return c_gamma_ * detail::power_tail_sum(gamma_, static_cast<double>(k));
  }

  /// Continuum tail c k^{-gamma} / gamma, the leading term of T(k).
  double tail_leading(double k) const { return c_gamma_ * std::pow(k, -gamma_) / gamma_; }

  friend JumpLaw build_jump_law(double gamma, std::int64_t k_max);

 private:
  JumpLaw() = default;

  double gamma_ = 1.5;
  double c_gamma_ = 0.0;
  std::int64_t k_max_ = 0;
  std::vector<double> tail_;         // index k in [1, k_max]; slot 0 unused
  std::vector<double> moment_tail_;  // same layout
};

/// Builds the law and its tables. Tables are accumulated from the horizon
/// downwards with compensated summation so T(1) reproduces 1/2.
inline JumpLaw build_jump_law(double gamma, std::int64_t k_max = kDefaultTailHorizon) {
  detail::check_gamma(gamma);
  if (k_max < 4) throw std::invalid_argument("tail horizon K_max must be >= 4");

  JumpLaw law;
  law.gamma_ = gamma;
  law.k_max_ = k_max;
  const double s = 1.0 + gamma;

  // Unnormalized tails first; c follows from the full sum.
  const auto n = static_cast<std::size_t>(k_max) + 1;
  law.tail_.assign(n, 0.0);
  law.moment_tail_.assign(n, 0.0);

  detail::CompensatedSum t;
  detail::CompensatedSum tm;
  t.add(detail::power_tail_sum(s, static_cast<double>(k_max + 1)));
  tm.add(detail::power_tail_sum(gamma, static_cast<double>(k_max + 1)));
  for (std::int64_t k = k_max; k >= 1; --k) {
    const double kd = static_cast<double>(k);
    const double term = std::pow(kd, -s);
    t.add(term);
    tm.add(term * kd);
    law.tail_[static_cast<std::size_t>(k)] = t.value();
    law.moment_tail_[static_cast<std::size_t>(k)] = tm.value();
  }

  const double zeta = law.tail_[1];
  law.c_gamma_ = 0.5 / zeta;
  for (std::size_t k = 1; k < n; ++k) {
    law.tail_[k] *= law.c_gamma_;
    law.moment_tail_[k] *= law.c_gamma_;
  }
  law.tail_[0] = law.tail_[1];
  law.moment_tail_[0] = law.moment_tail_[1];
  return law;
}

}  // namespace lrsep
