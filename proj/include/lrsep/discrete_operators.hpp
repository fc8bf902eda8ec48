#pragma once

/**
 * @file discrete_operators.hpp
 * @brief Per-site reservoir tails and the lattice operators acting on test functions.
 *
 * For a system of size N and site z in {1, ..., N-1}:
 *     r_minus(z)  = sum_{y >= z}   p(y)   = T(z)        (reach of the left reservoir)
 *     r_plus(z)   = sum_{y <= z-N} p(y)   = T(N - z)    (reach of the right reservoir)
 *     rt_minus(z) = sum_{y >= z}   y p(y) = Tm(z)
 *     rt_plus(z)  = -sum_{y <= z-N} y p(y) = Tm(N - z)
 * Slots z = 0 and z = N copy their nearest interior neighbour.
 */

#include "lrsep/frac_laplacian.hpp"
#include "lrsep/jump_law.hpp"
#include "lrsep/test_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace lrsep {

class DiscreteOperatorTable {
 public:
  DiscreteOperatorTable() = default;
  DiscreteOperatorTable(const JumpLaw& law, int n) : n_(n), gamma_(law.gamma()), c_gamma_(law.c_gamma()) {
    if (n < 2) throw std::invalid_argument("system size N must be >= 2");
    const auto sz = static_cast<std::size_t>(n) + 1;
    p_.assign(sz, 0.0);
    r_minus_.assign(sz, 0.0);
    r_plus_.assign(sz, 0.0);
    rt_minus_.assign(sz, 0.0);
    rt_plus_.assign(sz, 0.0);
    for (int k = 1; k <= n; ++k) p_[static_cast<std::size_t>(k)] = law.p(k);
    for (int z = 1; z <= n - 1; ++z) {
      const auto i = static_cast<std::size_t>(z);
      r_minus_[i] = law.tail(z);
      r_plus_[i] = law.tail(n - z);
      rt_minus_[i] = law.moment_tail(z);
      rt_plus_[i] = law.moment_tail(n - z);
    }
    for (auto* v : {&r_minus_, &r_plus_, &rt_minus_, &rt_plus_}) {
      (*v)[0] = (*v)[1];
      (*v)[sz - 1] = (*v)[sz - 2];
    }
  }

  int size() const { return n_; }
  double gamma() const { return gamma_; }
  double c_gamma() const { return c_gamma_; }

  /// p(k) for |k| <= N.
  double p(int k) const { return p_[static_cast<std::size_t>(std::abs(k))]; }
  double r_minus(int z) const { return r_minus_[static_cast<std::size_t>(z)]; }
  double r_plus(int z) const { return r_plus_[static_cast<std::size_t>(z)]; }
  double rt_minus(int z) const { return rt_minus_[static_cast<std::size_t>(z)]; }
  double rt_plus(int z) const { return rt_plus_[static_cast<std::size_t>(z)]; }

  std::span<const double> r_minus_table() const { return r_minus_; }
  std::span<const double> r_plus_table() const { return r_plus_; }

  /// (L_N F)(x/N) = sum_{y in Lambda_N} p(y-x) [F(y/N) - F(x/N)].
  double apply_L_N(std::span<const double> f, int x) const {
    check_samples(f, x);
    const double fx = f[static_cast<std::size_t>(x)];
    double acc = 0.0;
    for (int y = 1; y <= n_ - 1; ++y) {
      if (y != x) acc += p(y - x) * (f[static_cast<std::size_t>(y)] - fx);
    }
    return acc;
  }

  /// (K_N F)(x/N) = sum_{y in Z} p(y-x) [F(y/N) - F(x/N)] for F vanishing at and
  /// beyond the endpoints, evaluated as L_N F - (r_minus + r_plus) F.
  double apply_K_N(std::span<const double> f, int x) const {
    check_samples(f, x);
    if (f.front() != 0.0 || f.back() != 0.0) {
      throw std::invalid_argument("K_N requires F to vanish at 0 and 1 (compact support in (0,1))");
    }
    const double fx = f[static_cast<std::size_t>(x)];
    return apply_L_N(f, x) - (r_minus(x) + r_plus(x)) * fx;
  }

  /// Test-only hook: perturbs one reservoir tail entry so fault-injection
  /// checks can confirm the identity suites notice.
  void corrupt_r_minus(int z, double delta) { r_minus_[static_cast<std::size_t>(z)] += delta; }

 private:
  void check_samples(std::span<const double> f, int x) const {
    if (f.size() != static_cast<std::size_t>(n_) + 1) {
      throw std::invalid_argument("sampled function must have N+1 entries on {0, 1/N, ..., 1}");
    }
    if (x < 1 || x > n_ - 1) throw std::out_of_range("site outside Lambda_N");
  }

  int n_ = 0;
  double gamma_ = 0.0;
  double c_gamma_ = 0.0;
  std::vector<double> p_;
  std::vector<double> r_minus_, r_plus_, rt_minus_, rt_plus_;
};

inline DiscreteOperatorTable build_discrete_operators(const JumpLaw& law, int n) {
  return DiscreteOperatorTable(law, n);
}

/// Continuum limits r^-(q) = c q^{-gamma}/gamma and r^+(q) = c (1-q)^{-gamma}/gamma.
inline double r_minus_limit(double gamma, double c_gamma, double q) {
  return c_gamma * std::pow(q, -gamma) / gamma;
}
inline double r_plus_limit(double gamma, double c_gamma, double q) {
  return c_gamma * std::pow(1.0 - q, -gamma) / gamma;
}

/// Samples F at {0, 1/N, ..., 1}.
template <class F>
std::vector<double> sample_on_grid(const F& f, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int z = 0; z <= n; ++z) out[static_cast<std::size_t>(z)] = f(static_cast<double>(z) / n);
  return out;
}

struct ConvergenceRow {
  int N = 0;
  double sup_err_minus = 0.0;
  double sup_err_plus = 0.0;
  /// max over sites of |N^g r_N^-(q) - r^-(q)| / (c N^{-1} q^{-g-1}), same for the + side.
  double bound_ratio = 0.0;
  /// sup over the bump support of |N^g (K_N F)(q) + (-Delta)^{g/2} F(q)|.
  double sup_err_K_N = 0.0;
};

/// Sup-norm distances between the rescaled lattice operators and their limits
/// on q in [a, 1-a], for each N in n_list.
inline std::vector<ConvergenceRow> convergence_report(const JumpLaw& law,
                                                      const std::vector<int>& n_list, double a,
                                                      const TestFunction& bump = mollifier(0.3, 0.7)) {
  if (n_list.empty()) return {};
  if (!(a > 0.0 && a < 0.5)) throw std::invalid_argument("a must lie in (0, 1/2)");
  const int n_min = *std::min_element(n_list.begin(), n_list.end());
  if (a < 2.0 / n_min) throw std::invalid_argument("a is below 2/min(N); the window has too few sites");
  if (!bump.compact) throw std::invalid_argument("operator convergence needs a compactly supported bump");

  const double g = law.gamma();
  const double c = law.c_gamma();
  Exterior ext;
  ext.kinks = {bump.lo, bump.hi};
  std::map<double, double> frac_cache;
  auto frac = [&](double q) {
    auto it = frac_cache.find(q);
    if (it != frac_cache.end()) return it->second;
    const double v = frac_laplacian_1d(bump, q, g, c, ext);
    frac_cache.emplace(q, v);
    return v;
  };

  std::vector<ConvergenceRow> rows;
  for (int n : n_list) {
    const auto table = build_discrete_operators(law, n);
    const double ng = std::pow(static_cast<double>(n), g);
    ConvergenceRow row;
    row.N = n;
    for (int z = 1; z <= n - 1; ++z) {
      const double q = static_cast<double>(z) / n;
      if (q < a || q > 1.0 - a) continue;
      const double em = std::abs(ng * table.r_minus(z) - r_minus_limit(g, c, q));
      const double ep = std::abs(ng * table.r_plus(z) - r_plus_limit(g, c, q));
      row.sup_err_minus = std::max(row.sup_err_minus, em);
      row.sup_err_plus = std::max(row.sup_err_plus, ep);
      const double bm = c / n * std::pow(q, -g - 1.0);
      const double bp = c / n * std::pow(1.0 - q, -g - 1.0);
      row.bound_ratio = std::max({row.bound_ratio, em / bm, ep / bp});
    }
    const auto samples = sample_on_grid(bump, n);
    for (int z = 1; z <= n - 1; ++z) {
      const double q = static_cast<double>(z) / n;
      if (q <= bump.lo || q >= bump.hi) continue;
      const double lattice = ng * table.apply_K_N(samples, z);
      row.sup_err_K_N = std::max(row.sup_err_K_N, std::abs(lattice + frac(q)));
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "N,sup_err_minus,sup_err_plus,bound_ratio,sup_err_K_N\n";
  os.precision(12);
  for (const auto& r : rows) {
    os << r.N << ',' << r.sup_err_minus << ',' << r.sup_err_plus << ',' << r.bound_ratio << ','
       << r.sup_err_K_N << '\n';
  }
}

}  // namespace lrsep
