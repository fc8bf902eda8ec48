#pragma once

// Named pass/fail verdicts and the per-run manifest.

#include "lrsep/continuum.hpp"
#include "lrsep/experiments/config.hpp"
#include "lrsep/experiments/io.hpp"
#include "lrsep/generator.hpp"
#include "lrsep/jump_law.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#ifndef LRSEP_VERSION
#define LRSEP_VERSION "1.0.0"
#endif

namespace lrsep::experiments {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
  bool skipped = false;  // not applicable to this configuration; counts as a pass
};

inline nlohmann::json to_json(const Check& c) {
  nlohmann::json j{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  if (c.skipped) j["skipped"] = true;
  return j;
}

struct DriverResult {
  std::vector<Check> checks;
  nlohmann::json report;  // driver-specific summary
  std::vector<std::filesystem::path> files;
  std::vector<std::uint64_t> streams;  // replica streams used, in order

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  Check& add(std::string name, bool pass, double value, double tolerance, std::string detail = {}) {
    checks.push_back({std::move(name), pass, value, tolerance, std::move(detail)});
    return checks.back();
  }

  nlohmann::json checks_json() const {
    auto a = nlohmann::json::array();
    for (const auto& c : checks) a.push_back(to_json(c));
    return a;
  }
};

/// Writes manifest.json, which depends only on the configuration and the
/// build. Wall-clock time goes to timing.json so the manifest stays
/// byte-identical across repeated runs.
inline void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& c, const DriverResult& r,
                           double wall_seconds) {
  nlohmann::json m;
  auto cfg = to_json(c);
  cfg.erase("out");
  cfg.erase("threads");
  m["config"] = cfg;
  m["code_version"] = LRSEP_VERSION;
  m["c_gamma"] = jump_normalization(c.gamma);
  m["c_gamma_convention"] = "probability normalization 1/(2 zeta(1+gamma))";
  m["tail_horizon"] = kDefaultTailHorizon;
  m["exact_solver_max_N"] = std::max(c.exact_max, kExactMaxN);
  m["time_scale"] = "unscaled generator time";
  m["burn_in"] = c.t_burn ? nlohmann::json(*c.t_burn) : nlohmann::json("10 N^2 / pair_total_rate heuristic");
  nlohmann::json tol;
  tol["profile_rel_tol"] = kProfileRelTol;
  tol["frac_laplacian_split"] = c.frac_eps;
  tol["checks"] = to_json(c)["checks"];
  m["tolerances"] = tol;
  auto streams = nlohmann::json::array();
  for (auto s : r.streams) streams.push_back(s);
  m["replica_streams"] = streams;
  m["seed"] = c.seed;
  m["pass"] = r.pass();
  auto files = nlohmann::json::array();
  for (const auto& f : r.files) files.push_back(f.filename().string());
  m["outputs"] = files;
  write_json(dir / "manifest.json", m);
  write_json(dir / "timing.json", {{"wall_seconds", wall_seconds}, {"threads", c.threads}});
}

}  // namespace lrsep::experiments
