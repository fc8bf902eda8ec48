#pragma once

/**
 * @file kmc.hpp
 * @brief Event-driven simulation of the boundary-driven long-jump exclusion process.
 *
 * The bulk part runs on pair clocks: every unordered pair x < y in Lambda_N
 * rings at rate p(y-x) and exchanges the two occupations (a no-op when they
 * agree). Reservoir flips are thinned: site z proposes at rate
 * r_minus(z) + r_plus(z), picks a side proportionally, and accepts with
 * probability eta(1-rho) + (1-eta)rho for that side's density rho. The total
 * proposal rate is constant, so holding times are i.i.d. exponentials.
 */

#include "lrsep/alias_table.hpp"
#include "lrsep/configuration.hpp"
#include "lrsep/discrete_operators.hpp"
#include "lrsep/estimates.hpp"
#include "lrsep/jump_law.hpp"
#include "lrsep/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrsep {

class RateCatalog {
 public:
  RateCatalog() = default;
  RateCatalog(const DiscreteOperatorTable& ops, double alpha, double beta) : n_(ops.size()), alpha_(alpha), beta_(beta) {
    const int n = n_;
    gap_weights_.assign(static_cast<std::size_t>(n > 2 ? n - 2 : 0), 0.0);
    for (int k = 1; k <= n - 2; ++k) {
      gap_weights_[static_cast<std::size_t>(k - 1)] = (n - 1 - k) * ops.p(k);
      pair_total_ += gap_weights_[static_cast<std::size_t>(k - 1)];
    }
    if (!gap_weights_.empty()) gap_sampler_ = AliasTable(gap_weights_);

    flip_rates_.assign(static_cast<std::size_t>(n - 1), 0.0);
    left_share_.assign(static_cast<std::size_t>(n - 1), 0.0);
    for (int z = 1; z <= n - 1; ++z) {
      const double rm = ops.r_minus(z);
      const double rp = ops.r_plus(z);
      const auto i = static_cast<std::size_t>(z - 1);
      flip_rates_[i] = rm + rp;
      left_share_[i] = rm / (rm + rp);
      flip_total_ += flip_rates_[i];
    }
    site_sampler_ = AliasTable(flip_rates_);
    grand_total_ = pair_total_ + flip_total_;
    pair_share_ = pair_total_ / grand_total_;
  }
  RateCatalog(const JumpLaw& law, int n, double alpha, double beta)
      : RateCatalog(build_discrete_operators(law, n), alpha, beta) {}

  int size() const { return n_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double pair_total_rate() const { return pair_total_; }
  double flip_bound_total() const { return flip_total_; }
  double grand_total() const { return grand_total_; }
  double pair_share() const { return pair_share_; }
  std::span<const double> gap_weights() const { return gap_weights_; }
  std::span<const double> flip_bound_rates() const { return flip_rates_; }
  double left_share(int z) const { return left_share_[static_cast<std::size_t>(z - 1)]; }
  const AliasTable& gap_sampler() const { return gap_sampler_; }
  const AliasTable& site_sampler() const { return site_sampler_; }

 private:
  int n_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::vector<double> gap_weights_;  // index k-1
  std::vector<double> flip_rates_;   // index z-1
  std::vector<double> left_share_;   // index z-1
  AliasTable gap_sampler_;
  AliasTable site_sampler_;
  double pair_total_ = 0.0;
  double flip_total_ = 0.0;
  double grand_total_ = 0.0;
  double pair_share_ = 0.0;
};

inline RateCatalog build_rate_catalog(const JumpLaw& law, int n, double alpha, double beta) {
  return RateCatalog(law, n, alpha, beta);
}

struct EventCounters {
  std::uint64_t pair_proposals = 0;
  std::uint64_t pair_exchanges = 0;  // swaps that changed the configuration
  std::uint64_t left_proposals = 0;
  std::uint64_t left_accepted = 0;
  std::uint64_t right_proposals = 0;
  std::uint64_t right_accepted = 0;

  std::uint64_t events() const { return pair_proposals + left_proposals + right_proposals; }
  double acceptance_fraction() const {
    const auto e = events();
    return e == 0 ? 0.0 : static_cast<double>(pair_proposals + left_accepted + right_accepted) / static_cast<double>(e);
  }
  friend bool operator==(const EventCounters&, const EventCounters&) = default;
};

struct TrajectoryState {
  Configuration config;
  double clock = 0.0;
  CounterRng rng;
  EventCounters counters;
};

enum class EventKind { pair, left_flip, right_flip };

struct EventRecord {
  double holding = 0.0;
  EventKind kind = EventKind::pair;
  int a = 0;  // x for a pair, z for a flip
  int b = 0;  // y for a pair, 0 for a flip
  bool accepted = false;
  bool changed = false;  // the configuration differs after the event
};

/// Draws the next holding time and event for the current configuration
/// without applying it.
inline EventRecord propose_event(TrajectoryState& st, const RateCatalog& cat) {
  EventRecord ev;
  ev.holding = st.rng.exponential(cat.grand_total());
  const Configuration& eta = st.config;
  if (st.rng.uniform() < cat.pair_share()) {
    const int k = static_cast<int>(cat.gap_sampler().sample(st.rng)) + 1;
    const int x = 1 + static_cast<int>(st.rng.below(static_cast<std::uint64_t>(cat.size() - 1 - k)));
    ev.kind = EventKind::pair;
    ev.a = x;
    ev.b = x + k;
    ev.accepted = true;
    ev.changed = eta[x] != eta[x + k];
    return ev;
  }
  const int z = static_cast<int>(cat.site_sampler().sample(st.rng)) + 1;
  const bool left = st.rng.uniform() < cat.left_share(z);
  const double rho = left ? cat.alpha() : cat.beta();
  const double accept = eta[z] ? 1.0 - rho : rho;
  ev.kind = left ? EventKind::left_flip : EventKind::right_flip;
  ev.a = z;
  ev.accepted = st.rng.uniform() < accept;
  ev.changed = ev.accepted;
  return ev;
}

/// Applies a proposed event and advances the clock by its holding time.
inline void apply_event(TrajectoryState& st, const EventRecord& ev) {
  st.clock += ev.holding;
  switch (ev.kind) {
    case EventKind::pair:
      ++st.counters.pair_proposals;
      if (ev.changed) {
        ++st.counters.pair_exchanges;
        st.config.swap(ev.a, ev.b);
      }
      break;
    case EventKind::left_flip:
      ++st.counters.left_proposals;
      if (ev.accepted) {
        ++st.counters.left_accepted;
        st.config.flip(ev.a);
      }
      break;
    case EventKind::right_flip:
      ++st.counters.right_proposals;
      if (ev.accepted) {
        ++st.counters.right_accepted;
        st.config.flip(ev.a);
      }
      break;
  }
}

inline void check_catalog(const TrajectoryState& st, const RateCatalog& cat) {
  if (st.config.size() != cat.size() || st.config.alpha() != cat.alpha() || st.config.beta() != cat.beta()) {
    throw std::invalid_argument("rate catalog does not match the trajectory's N, alpha, beta");
  }
}

inline EventRecord kmc_step(TrajectoryState& st, const RateCatalog& cat) {
  const EventRecord ev = propose_event(st, cat);
  apply_event(st, ev);
  return ev;
}

/// Receives (holding time, pre-event configuration, event) for every event in
/// the measurement window; `finish` gets the truncated final interval.
class TrajectoryObserver {
 public:
  virtual ~TrajectoryObserver() = default;
  virtual void begin(const Configuration& initial, double t_measure, int batches) = 0;
  virtual void on_event(double holding, const Configuration& pre, const EventRecord& ev) = 0;
  virtual void finish(double holding, const Configuration& last) = 0;
  virtual std::vector<RunEstimate> estimates(std::uint64_t replica) const = 0;
};

/// Heuristic burn-in time 10 N^2 / pair_total_rate.
inline double default_burn_in(const RateCatalog& cat) {
  const double n = cat.size();
  return cat.pair_total_rate() > 0.0 ? 10.0 * n * n / cat.pair_total_rate() : 10.0 * n * n / cat.grand_total();
}

/// Runs the chain for `duration` time units without observation.
inline void advance_for(TrajectoryState& st, const RateCatalog& cat, double duration) {
  const double stop = st.clock + duration;
  for (;;) {
    const EventRecord ev = propose_event(st, cat);
    if (st.clock + ev.holding >= stop) {
      st.clock = stop;
      return;
    }
    apply_event(st, ev);
  }
}

/// Burn-in followed by an observed window split into `batches` equal-time
/// batches. A non-positive measurement time yields estimates flagged invalid.
inline std::vector<RunEstimate> run_trajectory(TrajectoryState& st, const RateCatalog& cat, double t_burn,
                                               double t_measure, std::span<TrajectoryObserver* const> observers,
                                               int batches = kDefaultBatches) {
  check_catalog(st, cat);
  if (t_burn < 0.0) throw std::invalid_argument("burn-in time must be >= 0");
  if (t_burn > 0.0) advance_for(st, cat, t_burn);
  std::vector<RunEstimate> out;
  if (!(t_measure > 0.0)) {
    for (auto* o : observers) {
      for (auto e : o->estimates(st.rng.stream())) {
        e.valid = false;
        out.push_back(std::move(e));
      }
    }
    return out;
  }
  for (auto* o : observers) o->begin(st.config, t_measure, batches);
  double elapsed = 0.0;
  for (;;) {
    const EventRecord ev = propose_event(st, cat);
    if (elapsed + ev.holding >= t_measure) {
      const double rest = t_measure - elapsed;
      for (auto* o : observers) o->finish(rest, st.config);
      st.clock += rest;
      break;
    }
    for (auto* o : observers) o->on_event(ev.holding, st.config, ev);
    elapsed += ev.holding;
    apply_event(st, ev);
  }
  for (auto* o : observers) {
    for (auto& e : o->estimates(st.rng.stream())) out.push_back(std::move(e));
  }
  return out;
}

// Checkpoints: enough to resume a trajectory bit-exactly.

inline nlohmann::json save_checkpoint(const TrajectoryState& st, double gamma) {
  nlohmann::json j;
  j["N"] = st.config.size();
  j["gamma"] = gamma;
  j["alpha"] = st.config.alpha();
  j["beta"] = st.config.beta();
  j["seed"] = st.rng.seed();
  j["stream"] = st.rng.stream();
  j["rng_draws"] = st.rng.draws();
  j["clock"] = st.clock;
  j["occupancy_hex"] = st.config.to_hex();
  const auto& c = st.counters;
  j["counters"] = {{"pair_proposals", c.pair_proposals}, {"pair_exchanges", c.pair_exchanges},
                   {"left_proposals", c.left_proposals}, {"left_accepted", c.left_accepted},
                   {"right_proposals", c.right_proposals}, {"right_accepted", c.right_accepted}};
  return j;
}

inline TrajectoryState load_checkpoint(const nlohmann::json& j, double* gamma = nullptr) {
  TrajectoryState st;
  const int n = j.at("N").get<int>();
  st.config = Configuration::from_hex(n, j.at("alpha").get<double>(), j.at("beta").get<double>(),
                                      j.at("occupancy_hex").get<std::string>());
  st.clock = j.at("clock").get<double>();
  st.rng = CounterRng(j.at("seed").get<std::uint64_t>(), j.at("stream").get<std::uint64_t>());
  st.rng.seek(j.at("rng_draws").get<std::uint64_t>());
  const auto& c = j.at("counters");
  st.counters.pair_proposals = c.at("pair_proposals").get<std::uint64_t>();
  st.counters.pair_exchanges = c.at("pair_exchanges").get<std::uint64_t>();
  st.counters.left_proposals = c.at("left_proposals").get<std::uint64_t>();
  st.counters.left_accepted = c.at("left_accepted").get<std::uint64_t>();
  st.counters.right_proposals = c.at("right_proposals").get<std::uint64_t>();
  st.counters.right_accepted = c.at("right_accepted").get<std::uint64_t>();
  if (gamma != nullptr) *gamma = j.at("gamma").get<double>();
  return st;
}

}  // namespace lrsep
