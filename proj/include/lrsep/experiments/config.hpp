#pragma once

// Experiment configuration read from INI files, with CLI and environment overrides.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrsep::experiments {

/// Thrown for malformed configurations and command lines (exit status 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { hydrostatics, fick_scaling, operator_convergence, validate, profile_table, fick_constant };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::hydrostatics: return "hydrostatics";
    case ExperimentKind::fick_scaling: return "fick-scaling";
    case ExperimentKind::operator_convergence: return "operator-convergence";
    case ExperimentKind::validate: return "validate";
    case ExperimentKind::profile_table: return "profile-table";
    case ExperimentKind::fick_constant: return "fick-constant";
  }
  return "unknown";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::hydrostatics, ExperimentKind::fick_scaling, ExperimentKind::operator_convergence,
                 ExperimentKind::validate, ExperimentKind::profile_table, ExperimentKind::fick_constant}) {
    if (to_string(k) == s) return k;
  }
  throw UsageError("unknown experiment kind '" + s + "'");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::validate;
  double gamma = 1.5;
  double alpha = 0.2;
  double beta = 0.8;
  std::vector<int> n_list{8, 16, 32, 64};
  std::uint64_t seed = 1;
  int replicas = 1;
  int threads = 1;
  std::string out = "out";

  // simulation
  int exact_max = 12;
  int batches = 32;
  std::optional<double> t_burn;              // empty: 10 N^2 / pair rate
  std::optional<double> t_measure;           // measured time per replica
  std::vector<double> events{2e7};           // per replica; one entry or one per N
  bool seam_check = true;
  double seam_events = 2e7;                  // per replica at N = exact_max

  // quadrature
  int profile_nodes = 257;
  double frac_eps = 1e-3;

  // checks
  double sigma = 3.0;
  double sup_tol = 0.05;
  double weak_tol = 0.02;
  double delta_tol = 0.1;
  double route_tol = 1e-4;
  double x_spread_tol = 2e-5;
  double window_lo = 0.1;  // sup-distance window [lo, 1 - lo]

  // operator convergence
  double window_a = 0.2;
  double decay_factor_tol = 1.2;

  // fick constant grid
  std::vector<double> gammas{1.25, 1.5, 1.75};
  std::vector<std::pair<double, double>> pairs{{0.2, 0.8}, {0.8, 0.2}, {0.1, 0.5}, {0.3, 0.9}};
  std::vector<double> x_points{0.25, 0.5, 0.75};

  // profile table
  int table_points = 201;

  // validate
  std::string inject_fault = "none";  // none | corrupt_tail

  /// Measurement budget (events per replica) for the i-th entry of n_list.
  double events_for(std::size_t i) const { return events.size() == 1 ? events.front() : events.at(i); }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': '" + s + "' is not a number");
  }
}

inline std::uint64_t to_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(what + ": '" + s + "' is not an unsigned 64-bit integer");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + s + "' is out of range");
  }
}

inline int to_int(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  if (v != static_cast<double>(static_cast<int>(v))) throw UsageError("config key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

inline std::vector<double> to_doubles(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(to_double(t, key));
  return out;
}

}  // namespace detail

/// Rejects configurations outside the experiment contract.
inline void validate_config(const ExperimentConfig& c) {
  if (!(c.gamma > 1.0 && c.gamma < 2.0)) throw UsageError("gamma must lie in (1,2)");
  if (!(c.alpha > 0.0 && c.alpha < 1.0) || !(c.beta > 0.0 && c.beta < 1.0)) {
    throw UsageError("alpha and beta must lie in (0,1)");
  }
  if (c.n_list.empty()) throw UsageError("N list is empty");
  if (!std::is_sorted(c.n_list.begin(), c.n_list.end()) ||
      std::adjacent_find(c.n_list.begin(), c.n_list.end()) != c.n_list.end()) {
    throw UsageError("N list must be strictly ascending");
  }
  if (c.n_list.front() < 2) throw UsageError("every N must be >= 2");
  if (c.replicas < 1) throw UsageError("replica count must be >= 1");
  if (c.threads < 1) throw UsageError("thread count must be >= 1");
  if (c.batches < 2) throw UsageError("batches must be >= 2");
  if (c.events.empty() || (c.events.size() != 1 && c.events.size() != c.n_list.size())) {
    throw UsageError("events must hold one value or one value per N");
  }
  for (double e : c.events) {
    if (!(e > 0.0)) throw UsageError("event budgets must be positive");
  }
  if (!(c.seam_events > 0.0)) throw UsageError("seam_events must be positive");
  if (c.t_measure && !(*c.t_measure > 0.0)) throw UsageError("t_measure must be positive");
  if (c.t_burn && *c.t_burn < 0.0) throw UsageError("t_burn must be >= 0");
  if (c.profile_nodes < 5 || c.profile_nodes % 2 == 0) throw UsageError("profile_nodes must be odd and >= 5");
  if (!(c.window_a > 0.0 && c.window_a < 0.5)) throw UsageError("operator window a must lie in (0, 1/2)");
  for (double g : c.gammas) {
    if (!(g > 1.0 && g < 2.0)) throw UsageError("fick-constant gammas must lie in (1,2)");
  }
  for (const auto& [a, b] : c.pairs) {
    if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) throw UsageError("fick-constant densities must lie in (0,1)");
  }
  for (double x : c.x_points) {
    if (!(x > 0.0 && x < 1.0)) throw UsageError("x_points must lie in (0,1)");
  }
  if (c.table_points < 2) throw UsageError("profile-table points must be >= 2");
  if (c.inject_fault != "none" && c.inject_fault != "corrupt_tail") {
    throw UsageError("inject_fault must be 'none' or 'corrupt_tail'");
  }
}

/// Parses an INI stream. Unknown keys are rejected so typos do not pass silently.
inline ExperimentConfig parse_config(std::istream& in, std::optional<ExperimentKind> kind = std::nullopt) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  if (kind) c.kind = *kind;
  for (const auto& [section, body] : tree) {
    for (const auto& [k, node] : body) {
      const std::string key = section + "." + k;
      const std::string v = detail::trim(node.get_value<std::string>());
      using namespace detail;
      if (key == "experiment.kind") {
        const auto parsed = parse_kind(v);
        if (kind && parsed != *kind) {
          throw UsageError("config is for '" + v + "' but the subcommand is '" + to_string(*kind) + "'");
        }
        c.kind = parsed;
      } else if (key == "experiment.gamma") {
        c.gamma = to_double(v, key);
      } else if (key == "experiment.alpha") {
        c.alpha = to_double(v, key);
      } else if (key == "experiment.beta") {
        c.beta = to_double(v, key);
      } else if (key == "experiment.N") {
        c.n_list.clear();
        for (const auto& t : split(v, ',')) c.n_list.push_back(to_int(t, key));
      } else if (key == "experiment.seed") {
        c.seed = to_u64(v, key);
      } else if (key == "experiment.replicas") {
        c.replicas = to_int(v, key);
      } else if (key == "experiment.threads") {
        c.threads = to_int(v, key);
      } else if (key == "experiment.out") {
        c.out = v;
      } else if (key == "simulation.exact_max") {
        c.exact_max = to_int(v, key);
      } else if (key == "simulation.batches") {
        c.batches = to_int(v, key);
      } else if (key == "simulation.t_burn") {
        if (v == "auto") {
          c.t_burn.reset();
        } else {
          c.t_burn = to_double(v, key);
        }
      } else if (key == "simulation.t_measure") {
        c.t_measure = to_double(v, key);
      } else if (key == "simulation.events") {
        c.events = to_doubles(v, key);
      } else if (key == "simulation.seam_events") {
        c.seam_events = to_double(v, key);
      } else if (key == "simulation.seam_check") {
        c.seam_check = v == "true" || v == "1" || v == "yes";
      } else if (key == "quadrature.profile_nodes") {
        c.profile_nodes = to_int(v, key);
      } else if (key == "quadrature.frac_eps") {
        c.frac_eps = to_double(v, key);
      } else if (key == "checks.sigma") {
        c.sigma = to_double(v, key);
      } else if (key == "checks.sup_tol") {
        c.sup_tol = to_double(v, key);
      } else if (key == "checks.weak_tol") {
        c.weak_tol = to_double(v, key);
      } else if (key == "checks.delta_tol") {
        c.delta_tol = to_double(v, key);
      } else if (key == "checks.route_tol") {
        c.route_tol = to_double(v, key);
      } else if (key == "checks.x_spread_tol") {
        c.x_spread_tol = to_double(v, key);
      } else if (key == "checks.window_lo") {
        c.window_lo = to_double(v, key);
      } else if (key == "operator.a") {
        c.window_a = to_double(v, key);
      } else if (key == "operator.decay_factor_tol") {
        c.decay_factor_tol = to_double(v, key);
      } else if (key == "fick_constant.gammas") {
        c.gammas = to_doubles(v, key);
      } else if (key == "fick_constant.pairs") {
        c.pairs.clear();
        for (const auto& t : split(v, ',')) {
          const auto ab = split(t, ':');
          if (ab.size() != 2) throw UsageError("fick_constant.pairs entries look like alpha:beta");
          c.pairs.emplace_back(to_double(ab[0], key), to_double(ab[1], key));
        }
      } else if (key == "fick_constant.x_points") {
        c.x_points = to_doubles(v, key);
      } else if (key == "profile_table.points") {
        c.table_points = to_int(v, key);
      } else if (key == "validate.inject_fault") {
        c.inject_fault = v;
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> kind = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  return parse_config(in, kind);
}

/// Seed precedence: command line, then LRSEP_SEED, then the config file.
inline void apply_seed_overrides(ExperimentConfig& c, const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) {
    c.seed = *cli_seed;
    return;
  }
  if (const char* env = std::getenv("LRSEP_SEED"); env != nullptr && *env != '\0') {
    c.seed = detail::to_u64(env, "LRSEP_SEED");
  }
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = to_string(c.kind);
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["N"] = c.n_list;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["threads"] = c.threads;
  j["out"] = c.out;
  j["simulation"] = {{"exact_max", c.exact_max},
                     {"batches", c.batches},
                     {"t_burn", c.t_burn ? nlohmann::json(*c.t_burn) : nlohmann::json("auto")},
                     {"t_measure", c.t_measure ? nlohmann::json(*c.t_measure) : nlohmann::json(nullptr)},
                     {"events", c.events},
                     {"seam_check", c.seam_check},
                     {"seam_events", c.seam_events}};
  j["quadrature"] = {{"profile_nodes", c.profile_nodes}, {"frac_eps", c.frac_eps}};
  j["checks"] = {{"sigma", c.sigma},         {"sup_tol", c.sup_tol},           {"weak_tol", c.weak_tol},
                 {"delta_tol", c.delta_tol}, {"route_tol", c.route_tol},       {"x_spread_tol", c.x_spread_tol},
                 {"window_lo", c.window_lo}};
  j["operator"] = {{"a", c.window_a}, {"decay_factor_tol", c.decay_factor_tol}};
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back({a, b});
  j["fick_constant"] = {{"gammas", c.gammas}, {"pairs", pairs}, {"x_points", c.x_points}};
  j["profile_table"] = {{"points", c.table_points}};
  j["validate"] = {{"inject_fault", c.inject_fault}};
  return j;
}

}  // namespace lrsep::experiments
