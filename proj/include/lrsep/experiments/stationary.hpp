#pragma once

// Stationary averages for one system size: dense solve for small N, replicated
// kinetic Monte Carlo above, both at the seam.

#include "lrsep/configuration.hpp"
#include "lrsep/discrete_operators.hpp"
#include "lrsep/estimates.hpp"
#include "lrsep/experiments/config.hpp"
#include "lrsep/experiments/parallel.hpp"
#include "lrsep/generator.hpp"
#include "lrsep/jump_law.hpp"
#include "lrsep/kmc.hpp"
#include "lrsep/observables.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lrsep::experiments {

struct StationaryEstimate {
  int n = 0;
  std::string method;  // "exact" or "kmc"
  ProfileEstimate profile;
  RunEstimate w1;
  RunEstimate w1_flux;
  // kmc bookkeeping
  double t_burn = 0.0;
  double t_measure = 0.0;
  std::uint64_t events = 0;
  double max_resync_drift = 0.0;
  std::vector<std::uint64_t> streams;

  double mean(int z) const { return profile.means.at(static_cast<std::size_t>(z)); }
  double stderr_at(int z) const { return profile.sites.at(static_cast<std::size_t>(z - 1)).std_error; }
  bool low_confidence() const {
    if (w1.low_confidence) return true;
    for (const auto& s : profile.sites) {
      if (s.low_confidence) return true;
    }
    return false;
  }
  /// <pi^N, H> with its error (zero for an exact solve).
  RunEstimate pi_action(const std::function<double(double)>& h, const std::string& name) const {
    if (method == "exact") {
      RunEstimate e;
      e.name = name;
      e.mean = EmpiricalMeasures::pi_action(profile.means, n, h);
      e.valid = true;
      e.low_confidence = false;
      return e;
    }
    return profile.pi_action(h, name);
  }
};

namespace detail {

inline RunEstimate exact_value(std::string name, double v) {
  RunEstimate e;
  e.name = std::move(name);
  e.mean = v;
  e.valid = true;
  e.low_confidence = false;
  return e;
}

}  // namespace detail

inline StationaryEstimate exact_stationary(const JumpLaw& law, int n, double alpha, double beta,
                                           int n_max = kExactMaxN) {
  const auto ops = build_discrete_operators(law, n);
  const auto mu = solve_stationary(build_exact_generator(ops, alpha, beta, n_max));
  StationaryEstimate s;
  s.n = n;
  s.method = "exact";
  s.profile.means = mu.site_means;
  for (int z = 1; z <= n - 1; ++z) {
    s.profile.sites.push_back(detail::exact_value("eta_" + std::to_string(z), mu.site_means[static_cast<std::size_t>(z)]));
  }
  const double w = mean_currents(ops, mu.site_means, alpha, beta)[1];
  s.w1 = detail::exact_value("W1", w);
  s.w1_flux = detail::exact_value("W1_flux", w);
  return s;
}

/// Stream ids: replica r at size N runs on (N << 32) | r; its initial
/// configuration is drawn from the same id with the top bit set.
inline std::uint64_t replica_stream(int n, int r) {
  return (static_cast<std::uint64_t>(n) << 32U) | static_cast<std::uint64_t>(r);
}

struct KmcBudget {
  double events = 2e7;             // measured events per replica when t_measure is unset
  std::optional<double> t_measure;
  std::optional<double> t_burn;    // empty: default_burn_in
  int batches = kDefaultBatches;
  int replicas = 1;
  int threads = 1;
  std::uint64_t seed = 1;
};

inline StationaryEstimate kmc_stationary(const JumpLaw& law, int n, double alpha, double beta, const KmcBudget& b) {
  const auto ops = build_discrete_operators(law, n);
  const RateCatalog cat(ops, alpha, beta);
  const double t_measure = b.t_measure ? *b.t_measure : b.events / cat.grand_total();
  const double t_burn = b.t_burn ? *b.t_burn : default_burn_in(cat);

  struct Replica {
    std::vector<RunEstimate> run;
    std::uint64_t events = 0;
    double drift = 0.0;
  };
  auto reps = parallel_map<Replica>(static_cast<std::size_t>(b.replicas), b.threads, [&](std::size_t r) {
    const auto stream = replica_stream(n, static_cast<int>(r));
    CounterRng init(b.seed, stream | (std::uint64_t{1} << 63U));
    TrajectoryState st;
    const double rho0 = 0.5 * (alpha + beta);
    st.config = random_configuration(n, alpha, beta, [rho0](int) { return rho0; }, init);
    st.rng = CounterRng(b.seed, stream);
    CurrentObserver cur(ops);
    ProfileObserver prof;
    TrajectoryObserver* obs[] = {&cur, &prof};
    Replica out;
    const auto before = st.counters.events();
    out.run = run_trajectory(st, cat, t_burn, t_measure, obs, b.batches);
    out.events = st.counters.events() - before;
    out.drift = cur.max_resync_drift();
    return out;
  });

  StationaryEstimate s;
  s.n = n;
  s.method = "kmc";
  s.t_burn = t_burn;
  s.t_measure = t_measure;
  std::vector<RunEstimate> w, f;
  std::vector<std::vector<RunEstimate>> sites(static_cast<std::size_t>(n - 1));
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& rep = reps[r];
    w.push_back(stationary_current_estimate(rep.run));
    f.push_back(current_flux_estimate(rep.run));
    const auto p = profile_estimate(rep.run);
    for (int z = 1; z <= n - 1; ++z) sites[static_cast<std::size_t>(z - 1)].push_back(p.sites[static_cast<std::size_t>(z - 1)]);
    s.events += rep.events;
    s.max_resync_drift = std::max(s.max_resync_drift, rep.drift);
    s.streams.push_back(replica_stream(n, static_cast<int>(r)));
  }
  s.w1 = merge_replicas(w);
  s.w1_flux = merge_replicas(f);
  s.profile.means.assign(static_cast<std::size_t>(n), 0.0);
  for (int z = 1; z <= n - 1; ++z) {
    s.profile.sites.push_back(merge_replicas(sites[static_cast<std::size_t>(z - 1)]));
    s.profile.means[static_cast<std::size_t>(z)] = s.profile.sites.back().mean;
  }
  return s;
}

inline KmcBudget budget_for(const ExperimentConfig& c, std::size_t n_index) {
  KmcBudget b;
  b.events = c.events_for(n_index);
  b.t_measure = c.t_measure;
  b.t_burn = c.t_burn;
  b.batches = c.batches;
  b.replicas = c.replicas;
  b.threads = c.threads;
  b.seed = c.seed;
  return b;
}

/// Exact solve when N <= exact_max, otherwise KMC with the configured budget.
inline StationaryEstimate estimate_stationary(const JumpLaw& law, const ExperimentConfig& c, std::size_t n_index) {
  const int n = c.n_list.at(n_index);
  if (n <= c.exact_max) return exact_stationary(law, n, c.alpha, c.beta, std::max(c.exact_max, kExactMaxN));
  return kmc_stationary(law, n, c.alpha, c.beta, budget_for(c, n_index));
}

struct SeamReport {
  int n = 0;
  bool pass = true;
  double max_z = 0.0;  // largest |kmc - exact| / se over all observables
  int observables = 0;
  int outside = 0;
};

/// Runs both paths at N = exact_max and compares every site mean and W1 at `sigma`.
inline SeamReport seam_check(const JumpLaw& law, const ExperimentConfig& c) {
  SeamReport rep;
  rep.n = c.exact_max;
  const auto ex = exact_stationary(law, c.exact_max, c.alpha, c.beta, std::max(c.exact_max, kExactMaxN));
  KmcBudget b = budget_for(c, 0);
  b.events = c.seam_events;
  const auto mc = kmc_stationary(law, c.exact_max, c.alpha, c.beta, b);
  auto cmp = [&](double exact, const RunEstimate& e) {
    ++rep.observables;
    const double z = e.std_error > 0.0 ? std::abs(e.mean - exact) / e.std_error
                                       : (e.mean == exact ? 0.0 : INFINITY);
    rep.max_z = std::max(rep.max_z, z);
    if (z > c.sigma) ++rep.outside;
  };
  for (int z = 1; z <= c.exact_max - 1; ++z) cmp(ex.mean(z), mc.profile.sites[static_cast<std::size_t>(z - 1)]);
  cmp(ex.w1.mean, mc.w1);
  rep.pass = rep.outside == 0;
  return rep;
}

inline nlohmann::json to_json(const SeamReport& s) {
  return {{"N", s.n}, {"pass", s.pass}, {"max_abs_z", s.max_z}, {"observables", s.observables},
          {"outside_sigma", s.outside}};
}

}  // namespace lrsep::experiments
