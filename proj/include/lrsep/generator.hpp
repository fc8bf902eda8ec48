#pragma once

/**
 * @file generator.hpp
 * @brief Generator of the boundary-driven long-jump exclusion process.
 *
 *   (L0 f)(eta) = sum_{x<y} p(y-x) [f(eta^{xy}) - f(eta)]
 *   (Lr f)(eta) = sum_x r_plus(x)  [eta_x (1-beta)  + (1-eta_x) beta ] [f(eta^x) - f(eta)]
 *   (Ll f)(eta) = sum_x r_minus(x) [eta_x (1-alpha) + (1-eta_x) alpha] [f(eta^x) - f(eta)]
 *
 * Two realizations: pointwise action on a test function (any N where the
 * O(N^2) transition enumeration is affordable), and the full sparse rate
 * matrix over {0,1}^{N-1} for small N with its stationary law.
 */

#include "lrsep/configuration.hpp"
#include "lrsep/discrete_operators.hpp"
#include "lrsep/jump_law.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrsep {

enum class GeneratorPart : unsigned { bulk = 1U, right = 2U, left = 4U, all = 7U };

inline bool has_part(GeneratorPart set, GeneratorPart p) {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(p)) != 0U;
}

/// (L f)(eta) restricted to the selected parts. `ops` must match eta.size().
template <class F>
double apply_generator(const DiscreteOperatorTable& ops, const Configuration& eta, const F& f,
                       GeneratorPart part = GeneratorPart::all) {
  const int n = eta.size();
  if (ops.size() != n) throw std::invalid_argument("operator table built for a different N");
  const double f0 = f(eta);
  Configuration work = eta;
  double acc = 0.0;
  if (has_part(part, GeneratorPart::bulk)) {
    for (int x = 1; x <= n - 1; ++x) {
      for (int y = x + 1; y <= n - 1; ++y) {
        if (eta[x] == eta[y]) continue;  // eta^{xy} = eta
        work.swap(x, y);
        acc += ops.p(y - x) * (f(work) - f0);
        work.swap(x, y);
      }
    }
  }
  const bool right = has_part(part, GeneratorPart::right);
  const bool left = has_part(part, GeneratorPart::left);
  if (right || left) {
    for (int x = 1; x <= n - 1; ++x) {
      const int e = eta[x];
      double rate = 0.0;
      if (right) rate += ops.r_plus(x) * (e ? 1.0 - eta.beta() : eta.beta());
      if (left) rate += ops.r_minus(x) * (e ? 1.0 - eta.alpha() : eta.alpha());
      work.flip(x);
      acc += rate * (f(work) - f0);
      work.flip(x);
    }
  }
  return acc;
}

/// Convenience overload building the operator table from the law.
template <class F>
double apply_generator_to_function(const Configuration& eta, const JumpLaw& law, const F& f,
                                   GeneratorPart part = GeneratorPart::all) {
  return apply_generator(build_discrete_operators(law, eta.size()), eta, f, part);
}

inline constexpr int kExactMaxN = 14;

using RateMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Rate matrix of the chain on {0,1}^{N-1}; state index bit z-1 is eta_z.
class ExactGenerator {
 public:
  int size() const { return n_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::size_t states() const { return std::size_t{1} << static_cast<unsigned>(n_ - 1); }
  const RateMatrix& rates() const { return q_; }
  const DiscreteOperatorTable& operators() const { return ops_; }

  /// max_i |sum_j Q_ij|.
  double max_row_sum() const {
    double worst = 0.0;
    for (int i = 0; i < q_.outerSize(); ++i) {
      double s = 0.0;
      for (RateMatrix::InnerIterator it(q_, i); it; ++it) s += it.value();
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  }

  /// || nu_rho Q ||_inf for the Bernoulli(rho) product vector nu_rho.
  double bernoulli_residual(double rho) const {
    const auto m = states();
    std::vector<double> nu(m);
    for (std::size_t s = 0; s < m; ++s) {
      const int k = std::popcount(static_cast<std::uint64_t>(s));
      nu[s] = std::pow(rho, k) * std::pow(1.0 - rho, (n_ - 1) - k);
    }
    std::vector<double> out(m, 0.0);
    for (int i = 0; i < q_.outerSize(); ++i) {
      for (RateMatrix::InnerIterator it(q_, i); it; ++it) {
        out[static_cast<std::size_t>(it.col())] += nu[static_cast<std::size_t>(i)] * it.value();
      }
    }
    double worst = 0.0;
    for (double v : out) worst = std::max(worst, std::abs(v));
    return worst;
  }

  friend ExactGenerator build_exact_generator(int n, const JumpLaw& law, double alpha, double beta, int n_max);
  friend ExactGenerator build_exact_generator(const DiscreteOperatorTable& ops, double alpha, double beta,
                                              int n_max);

 private:
  int n_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  DiscreteOperatorTable ops_;
  RateMatrix q_;
};

inline ExactGenerator build_exact_generator(const DiscreteOperatorTable& ops, double alpha, double beta,
                                            int n_max = kExactMaxN) {
  const int n = ops.size();
  if (n < 2) throw std::invalid_argument("system size N must be >= 2");
  if (n > n_max) {
    throw std::invalid_argument("N = " + std::to_string(n) + " exceeds the exact-solve limit " +
                                std::to_string(n_max) + "; use the kinetic Monte Carlo path");
  }
  ExactGenerator g;
  g.n_ = n;
  g.alpha_ = alpha;
  g.beta_ = beta;
  g.ops_ = ops;

  const std::size_t m = g.states();
  const int sites = n - 1;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m * static_cast<std::size_t>(sites * (sites + 1) / 2 + 1));
  for (std::size_t s = 0; s < m; ++s) {
    double out = 0.0;
    for (int x = 1; x <= sites; ++x) {
      const std::uint64_t bx = std::uint64_t{1} << static_cast<unsigned>(x - 1);
      const bool ex = (s & bx) != 0;
      for (int y = x + 1; y <= sites; ++y) {
        const std::uint64_t by = std::uint64_t{1} << static_cast<unsigned>(y - 1);
        if (ex == ((s & by) != 0)) continue;
        const double r = ops.p(y - x);
        trip.emplace_back(static_cast<int>(s), static_cast<int>(s ^ (bx | by)), r);
        out += r;
      }
      const double r = ops.r_minus(x) * (ex ? 1.0 - alpha : alpha) + ops.r_plus(x) * (ex ? 1.0 - beta : beta);
      if (r > 0.0) {
        trip.emplace_back(static_cast<int>(s), static_cast<int>(s ^ bx), r);
        out += r;
      }
    }
    trip.emplace_back(static_cast<int>(s), static_cast<int>(s), -out);
  }
  g.q_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  g.q_.setFromTriplets(trip.begin(), trip.end());
  return g;
}

inline ExactGenerator build_exact_generator(int n, const JumpLaw& law, double alpha, double beta,
                                            int n_max = kExactMaxN) {
  if (n > n_max) {
    throw std::invalid_argument("N = " + std::to_string(n) + " exceeds the exact-solve limit " +
                                std::to_string(n_max) + "; use the kinetic Monte Carlo path");
  }
  return build_exact_generator(build_discrete_operators(law, n), alpha, beta, n_max);
}

/// Stationary law of an ExactGenerator together with its one-point marginals.
struct StationaryLaw {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> mu;          // over state indices
  std::vector<double> site_means;  // index z = 1..N-1; slot 0 unused
  double residual = 0.0;           // || mu Q ||_inf

  /// E_mu[f] for f a function of the state index.
  template <class F>
  double expect(const F& f) const {
    double acc = 0.0;
    for (std::size_t s = 0; s < mu.size(); ++s) acc += mu[s] * f(static_cast<std::uint64_t>(s));
    return acc;
  }
};

/// Solves mu Q = 0 with sum(mu) = 1 on Q^T with one balance equation replaced
/// by the normalization. Restarted GMRES (Jacobi preconditioned) is tried
/// first; if it stalls, sparse LU takes over. Throws when neither produces a
/// probability vector up to round-off.
inline StationaryLaw solve_stationary(const ExactGenerator& gen) {
  const auto m = static_cast<Eigen::Index>(gen.states());
  const RateMatrix& q = gen.rates();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(q.nonZeros() + m));
  for (int i = 0; i < q.outerSize(); ++i) {
    for (RateMatrix::InnerIterator it(q, i); it; ++it) {
      if (it.col() == m - 1) continue;
      trip.emplace_back(static_cast<int>(it.col()), i, it.value());
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) trip.emplace_back(static_cast<int>(m - 1), static_cast<int>(j), 1.0);
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;

  Eigen::VectorXd x;
  {
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> gmres;
    gmres.setTolerance(1e-14);
    gmres.setMaxIterations(20000);
    gmres.set_restart(200);
    gmres.compute(a);
    x = gmres.solve(rhs);
    if (gmres.info() != Eigen::Success || (q.transpose() * x).cwiseAbs().maxCoeff() > 1e-12) x.resize(0);
  }
  if (x.size() == 0) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("stationary solve: sparse LU factorization failed (" + lu.lastErrorMessage() + ")");
    }
    x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("stationary solve: back substitution failed");
  }

  StationaryLaw out;
  out.n = gen.size();
  out.alpha = gen.alpha();
  out.beta = gen.beta();
  out.mu.resize(static_cast<std::size_t>(m));
  for (Eigen::Index s = 0; s < m; ++s) {
    if (!(x(s) > -1e-12)) throw std::runtime_error("stationary solve produced a negative probability");
    out.mu[static_cast<std::size_t>(s)] = std::max(0.0, x(s));
  }
  const Eigen::VectorXd r = q.transpose() * x;
  out.residual = r.cwiseAbs().maxCoeff();

  out.site_means.assign(static_cast<std::size_t>(gen.size()), 0.0);
  for (std::size_t s = 0; s < out.mu.size(); ++s) {
    for (int z = 1; z <= gen.size() - 1; ++z) {
      if ((s >> static_cast<unsigned>(z - 1)) & 1U) out.site_means[static_cast<std::size_t>(z)] += out.mu[s];
    }
  }
  return out;
}

}  // namespace lrsep
