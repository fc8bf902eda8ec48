#pragma once

/**
 * @file observables.hpp
 * @brief Current functional, empirical measures, and trajectory observers.
 *
 * The current through bond (x-1, x) is evaluated in its all-finite form
 *   W_x = sum_{1<=y<=x-1<z<=N-1} p(z-y)(eta_y - eta_z)
 *       + sum_{z=x}^{N-1} T(z)(alpha - eta_z) - sum_{y=1}^{x-1} T(N-y)(beta - eta_y).
 * W is linear in eta, so the same routine evaluates stationary means from
 * one-point marginals.
 */

#include "lrsep/configuration.hpp"
#include "lrsep/discrete_operators.hpp"
#include "lrsep/estimates.hpp"
#include "lrsep/jump_law.hpp"
#include "lrsep/kmc.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrsep {

/// W_x for an occupation accessor occ(z) on z in 1..N-1 (values may be
/// fractional, e.g. stationary means).
template <class Occ>
double current_W_generic(const DiscreteOperatorTable& ops, const Occ& occ, double alpha, double beta, int x) {
  const int n = ops.size();
  if (x < 1 || x > n) throw std::out_of_range("current_W: x must lie in 1..N");
  double acc = 0.0;
  for (int y = 1; y <= x - 1; ++y) {
    const double ey = occ(y);
    for (int z = x; z <= n - 1; ++z) acc += ops.p(z - y) * (ey - occ(z));
  }
  for (int z = x; z <= n - 1; ++z) acc += ops.r_minus(z) * (alpha - occ(z));
  for (int y = 1; y <= x - 1; ++y) acc -= ops.r_plus(y) * (beta - occ(y));
  return acc;
}

inline double current_W(const DiscreteOperatorTable& ops, const Configuration& eta, int x) {
  return current_W_generic(ops, [&](int z) { return static_cast<double>(eta[z]); }, eta.alpha(), eta.beta(), x);
}

inline double current_W(const Configuration& eta, const JumpLaw& law, int x) {
  return current_W(build_discrete_operators(law, eta.size()), eta, x);
}

/// <W_x> for x = 1..N from one-point means (slot 0 unused).
inline std::vector<double> mean_currents(const DiscreteOperatorTable& ops, std::span<const double> site_means,
                                         double alpha, double beta) {
  const int n = ops.size();
  auto occ = [&](int z) { return site_means[static_cast<std::size_t>(z)]; };
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  for (int x = 1; x <= n; ++x) w[static_cast<std::size_t>(x)] = current_W_generic(ops, occ, alpha, beta, x);
  return w;
}

/// W_1 = sum_z T(z)(alpha - eta_z) with O(1) updates along a trajectory.
class CurrentEvaluator {
 public:
  CurrentEvaluator() = default;
  explicit CurrentEvaluator(const DiscreteOperatorTable& ops) : n_(ops.size()) {
    tail_.assign(static_cast<std::size_t>(n_), 0.0);
    for (int z = 1; z <= n_ - 1; ++z) tail_[static_cast<std::size_t>(z)] = ops.r_minus(z);
  }

  double full(const Configuration& eta) const {
    double acc = 0.0;
    for (int z = 1; z <= n_ - 1; ++z) acc += tail_[static_cast<std::size_t>(z)] * (eta.alpha() - eta[z]);
    return acc;
  }

  void reset(const Configuration& eta) { value_ = full(eta); }
  double value() const { return value_; }

  /// Change of W_1 caused by `ev`, evaluated on the pre-event configuration.
  double delta(const Configuration& pre, const EventRecord& ev) const {
    if (!ev.changed) return 0.0;
    if (ev.kind == EventKind::pair) {
      return (pre[ev.a] - pre[ev.b]) * (tail(ev.a) - tail(ev.b));
    }
    return pre[ev.a] ? tail(ev.a) : -tail(ev.a);
  }

  void apply(const Configuration& pre, const EventRecord& ev) { value_ += delta(pre, ev); }

  double tail(int z) const { return tail_[static_cast<std::size_t>(z)]; }

 private:
  int n_ = 0;
  std::vector<double> tail_;
  double value_ = 0.0;
};

// Empirical measures pi^N = (N-1)^{-1} sum_x eta_x delta_{x/N} and the pair
// measure with weights (N-1)^{-2} eta_x eta_y, acting on test functions.

struct EmpiricalMeasures {
  static double pi_action(const Configuration& eta, const std::function<double(double)>& h) {
    const int n = eta.size();
    double acc = 0.0;
    for (int x = 1; x <= n - 1; ++x) {
      if (eta[x]) acc += h(static_cast<double>(x) / n);
    }
    return acc / (n - 1);
  }

  /// <pi^N, H> for fractional occupations (e.g. time-averaged profiles, slot 0 unused).
  static double pi_action(std::span<const double> means, int n, const std::function<double(double)>& h) {
    double acc = 0.0;
    for (int x = 1; x <= n - 1; ++x) acc += means[static_cast<std::size_t>(x)] * h(static_cast<double>(x) / n);
    return acc / (n - 1);
  }

  /// <pi_hat^N, H (x) G> = (N-1)^{-2} sum_{x != y} eta_x eta_y H(x/N) G(y/N).
  static double pair_action(const Configuration& eta, const std::function<double(double)>& h,
                            const std::function<double(double)>& g) {
    const int n = eta.size();
    double sh = 0.0;
    double sg = 0.0;
    double diag = 0.0;
    for (int x = 1; x <= n - 1; ++x) {
      if (!eta[x]) continue;
      const double q = static_cast<double>(x) / n;
      const double hv = h(q);
      const double gv = g(q);
      sh += hv;
      sg += gv;
      diag += hv * gv;
    }
    const double m = n - 1;
    return (sh * sg - diag) / (m * m);
  }
};

/// phi_N(z/N) for z = 1..N-1 (slots 0 and N unused):
///   N^g [-(z/N) T(z) + (1 - 1/N - z/N) T(N-z)] + N^{g-1} [Tm(z) - Tm(N-z)].
inline std::vector<double> phi_N_table(const JumpLaw& law, int n) {
  if (n < 4) throw std::invalid_argument("phi_N_table needs N >= 4");
  const double g = law.gamma();
  const double ng = std::pow(static_cast<double>(n), g);
  const double ng1 = ng / n;
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int z = 1; z <= n - 1; ++z) {
    const double q = static_cast<double>(z) / n;
    out[static_cast<std::size_t>(z)] = ng * (-q * law.tail(z) + (1.0 - 1.0 / n - q) * law.tail(n - z)) +
                                       ng1 * (law.moment_tail(z) - law.moment_tail(n - z));
  }
  return out;
}

/// phi(q) = c/(g(1-g)) [(1-q)^{1-g} - q^{1-g}].
inline double phi_limit(double gamma, double c_gamma, double q) {
  return c_gamma / (gamma * (1.0 - gamma)) * (std::pow(1.0 - q, 1.0 - gamma) - std::pow(q, 1.0 - gamma));
}

/// theta_N = (alpha/(N-1)) sum_{z=1}^{N-1} z T(z) - (beta/(N-1)) sum_{y=1}^{N-1} (N-1-y) T(N-y).
inline double theta_N(const JumpLaw& law, int n, double alpha, double beta) {
  if (n < 4) throw std::invalid_argument("theta_N needs N >= 4");
  detail::CompensatedSum a;
  detail::CompensatedSum b;
  for (int z = 1; z <= n - 1; ++z) {
    a.add(z * law.tail(z));
    b.add((n - 1 - z) * law.tail(n - z));
  }
  return (alpha * a.value() - beta * b.value()) / (n - 1);
}

/// (1/(N-1)) sum_{x=1}^{N-1} <W_x> split by where the jump starts and ends:
///   left  = (1/(N-1)) sum_z z (alpha - m_z) T(z)
///   right = (1/(N-1)) sum_y (N-1-y) (m_y - beta) T(N-y)
///   bulk  = (1/(N-1)) sum_{y<z} (z-y) p(z-y) (m_y - m_z)
/// A jump from y to z crosses the bonds x with y < x <= z, which gives the weights.
struct CurrentDecomposition {
  double left = 0.0;
  double right = 0.0;
  double bulk = 0.0;
  double total() const { return left + right + bulk; }
};

/// Evaluates the decomposition from one-point means (slot 0 unused).
inline CurrentDecomposition current_decomposition(const DiscreteOperatorTable& ops, std::span<const double> m,
                                                  double alpha, double beta) {
  const int n = ops.size();
  auto at = [&](int z) { return m[static_cast<std::size_t>(z)]; };
  CurrentDecomposition d;
  for (int z = 1; z <= n - 1; ++z) d.left += z * (alpha - at(z)) * ops.r_minus(z);
  for (int y = 1; y <= n - 1; ++y) d.right += (n - 1 - y) * (at(y) - beta) * ops.r_plus(y);
  for (int y = 1; y <= n - 1; ++y) {
    for (int z = y + 1; z <= n - 1; ++z) d.bulk += (z - y) * ops.p(z - y) * (at(y) - at(z));
  }
  const double inv = 1.0 / (n - 1);
  d.left *= inv;
  d.right *= inv;
  d.bulk *= inv;
  return d;
}

// Trajectory observers.

/// Time average of W_1 (primary) and the net left-reservoir particle flux
/// (cross-check) over equal-time batches.
class CurrentObserver final : public TrajectoryObserver {
 public:
  static constexpr std::uint64_t kResyncEvery = 100000;

  explicit CurrentObserver(const DiscreteOperatorTable& ops) : eval_(ops) {}

  void begin(const Configuration& initial, double t_measure, int batches) override {
    eval_.reset(initial);
    timer_ = BatchTimer(t_measure, batches);
    w_sum_.assign(static_cast<std::size_t>(batches), 0.0);
    flux_.assign(static_cast<std::size_t>(batches), 0.0);
    t_measure_ = t_measure;
    events_ = 0;
    max_drift_ = 0.0;
  }

  void on_event(double holding, const Configuration& pre, const EventRecord& ev) override {
    if (++events_ % kResyncEvery == 0) {
      const double exact = eval_.full(pre);
      max_drift_ = std::max(max_drift_, std::abs(exact - eval_.value()));
      eval_.reset(pre);
    }
    accumulate(holding);
    if (ev.kind == EventKind::left_flip && ev.changed) {
      // events landing exactly on a batch edge count toward the next batch
      const int b = std::min(timer_.current(), timer_.batches() - 1);
      flux_[static_cast<std::size_t>(b)] += pre[ev.a] ? -1.0 : 1.0;
    }
    eval_.apply(pre, ev);
  }

  void finish(double holding, const Configuration& last) override {
    accumulate(holding);
    timer_.finish([](int, double) {});
    const double drift = std::abs(eval_.full(last) - eval_.value());
    max_drift_ = std::max(max_drift_, drift);
  }

  std::vector<RunEstimate> estimates(std::uint64_t replica) const override {
    std::vector<double> w;
    std::vector<double> f;
    if (!w_sum_.empty() && t_measure_ > 0.0) {
      const double len = timer_.length();
      for (std::size_t b = 0; b < w_sum_.size(); ++b) {
        w.push_back(w_sum_[b] / len);
        f.push_back(flux_[b] / len);
      }
    }
    return {batch_means_estimate("W1", std::move(w), t_measure_, replica),
            batch_means_estimate("W1_flux", std::move(f), t_measure_, replica)};
  }

  double max_resync_drift() const { return max_drift_; }
  std::uint64_t events() const { return events_; }
  double current_value() const { return eval_.value(); }

 private:
  void accumulate(double dt) {
    const double w = eval_.value();
    timer_.advance(
        dt, [&](int b, double piece) { w_sum_[static_cast<std::size_t>(b)] += w * piece; }, [](int, double) {});
  }

  CurrentEvaluator eval_;
  BatchTimer timer_;
  std::vector<double> w_sum_;
  std::vector<double> flux_;
  double t_measure_ = 0.0;
  std::uint64_t events_ = 0;
  double max_drift_ = 0.0;
};

/// Time-averaged occupation of every site, accumulated lazily: a site is
/// only touched when it changes or a batch closes.
class ProfileObserver final : public TrajectoryObserver {
 public:
  void begin(const Configuration& initial, double t_measure, int batches) override {
    n_ = initial.size();
    timer_ = BatchTimer(t_measure, batches);
    t_measure_ = t_measure;
    sums_.assign(static_cast<std::size_t>(batches) * static_cast<std::size_t>(n_ - 1), 0.0);
    last_.assign(static_cast<std::size_t>(n_ - 1), 0.0);
    t_ = 0.0;
  }

  void on_event(double holding, const Configuration& pre, const EventRecord& ev) override {
    advance(holding, pre);
    if (!ev.changed) return;
    settle(pre, ev.a);
    if (ev.kind == EventKind::pair) settle(pre, ev.b);
  }

  void finish(double holding, const Configuration& last) override {
    advance(holding, last);
    timer_.finish([&](int b, double) { close_batch(last, b, t_); });
  }

  std::vector<RunEstimate> estimates(std::uint64_t replica) const override {
    std::vector<RunEstimate> out;
    const int sites = n_ > 0 ? n_ - 1 : 0;
    const int nb = timer_.batches();
    for (int z = 1; z <= sites; ++z) {
      std::vector<double> bm;
      if (t_measure_ > 0.0) {
        for (int b = 0; b < nb; ++b) bm.push_back(sum(b, z) / timer_.length());
      }
      out.push_back(batch_means_estimate("eta_" + std::to_string(z), std::move(bm), t_measure_, replica));
    }
    return out;
  }

 private:
  double& sum(int b, int z) {
    return sums_[static_cast<std::size_t>(b) * static_cast<std::size_t>(n_ - 1) + static_cast<std::size_t>(z - 1)];
  }
  double sum(int b, int z) const {
    return sums_[static_cast<std::size_t>(b) * static_cast<std::size_t>(n_ - 1) + static_cast<std::size_t>(z - 1)];
  }

  void settle(const Configuration& eta, int z) {
    auto& last = last_[static_cast<std::size_t>(z - 1)];
    const int b = std::min(timer_.current(), timer_.batches() - 1);
    if (eta[z]) sum(b, z) += t_ - last;
    last = t_;
  }

  void close_batch(const Configuration& eta, int b, double t_end) {
    for (int z = 1; z <= n_ - 1; ++z) {
      auto& last = last_[static_cast<std::size_t>(z - 1)];
      if (eta[z]) sum(b, z) += t_end - last;
      last = t_end;
    }
  }

  void advance(double dt, const Configuration& eta) {
    timer_.advance(dt, [](int, double) {}, [&](int b, double t_end) { close_batch(eta, b, t_end); });
    t_ = timer_.now();
  }

  int n_ = 0;
  BatchTimer timer_;
  double t_measure_ = 0.0;
  std::vector<double> sums_;  // batch-major
  std::vector<double> last_;
  double t_ = 0.0;
};

/// The W1 estimate out of a run_trajectory result set.
inline RunEstimate stationary_current_estimate(const std::vector<RunEstimate>& run) {
  for (const auto& e : run) {
    if (e.name == "W1") return e;
  }
  throw std::invalid_argument("run has no W1 estimate; attach a CurrentObserver");
}

inline RunEstimate current_flux_estimate(const std::vector<RunEstimate>& run) {
  for (const auto& e : run) {
    if (e.name == "W1_flux") return e;
  }
  throw std::invalid_argument("run has no W1_flux estimate; attach a CurrentObserver");
}

struct ProfileEstimate {
  std::vector<RunEstimate> sites;  // sites[z-1] for z = 1..N-1
  std::vector<double> means;       // slot 0 unused

  /// <pi^N, H> of the time-averaged profile with its batch-means error.
  RunEstimate pi_action(const std::function<double(double)>& h, const std::string& name = "pi_H") const {
    const int n = static_cast<int>(sites.size()) + 1;
    if (sites.empty()) return {};
    const int nb = sites.front().batches;
    std::vector<double> bm(static_cast<std::size_t>(nb), 0.0);
    for (int z = 1; z <= n - 1; ++z) {
      const double hz = h(static_cast<double>(z) / n) / (n - 1);
      const auto& s = sites[static_cast<std::size_t>(z - 1)];
      for (int b = 0; b < nb && b < static_cast<int>(s.batch_means.size()); ++b) {
        bm[static_cast<std::size_t>(b)] += hz * s.batch_means[static_cast<std::size_t>(b)];
      }
    }
    return batch_means_estimate(name, std::move(bm), sites.front().total_time, sites.front().replica);
  }
};

/// The per-site occupation estimates out of a run_trajectory result set.
inline ProfileEstimate profile_estimate(const std::vector<RunEstimate>& run) {
  ProfileEstimate p;
  for (const auto& e : run) {
    if (e.name.rfind("eta_", 0) == 0) p.sites.push_back(e);
  }
  p.means.assign(p.sites.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.sites.size(); ++i) p.means[i + 1] = p.sites[i].mean;
  return p;
}

}  // namespace lrsep
