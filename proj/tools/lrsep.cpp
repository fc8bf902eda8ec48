// Command-line front end: one subcommand per experiment.
// Exit status: 0 all checks pass, 1 a check failed, 2 usage error.

#include "lrsep/experiments/config.hpp"
#include "lrsep/experiments/drivers.hpp"
#include "lrsep/experiments/plots.hpp"
#include "lrsep/experiments/report.hpp"
#include "lrsep/experiments/validate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace lx = lrsep::experiments;

namespace {

struct Flags {
  std::string config;
  std::string seed;
  std::string out;
  int replicas = 0;
  int threads = 0;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "master seed (overrides LRSEP_SEED and the config)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--replicas", f.replicas, "independent KMC replicas per size")->check(CLI::PositiveNumber);
  sub->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

lx::ExperimentConfig resolve(lx::ExperimentKind kind, const Flags& f) {
  lx::ExperimentConfig c;
  if (!f.config.empty()) {
    c = lx::load_config(f.config, kind);
  }
  c.kind = kind;
  std::optional<std::uint64_t> seed;
  if (!f.seed.empty()) seed = lx::detail::to_u64(f.seed, "--seed");
  lx::apply_seed_overrides(c, seed);
  if (!f.out.empty()) c.out = f.out;
  if (f.replicas > 0) c.replicas = f.replicas;
  if (f.threads > 0) c.threads = f.threads;
  lx::validate_config(c);
  return c;
}

lx::DriverResult dispatch(const lx::ExperimentConfig& c) {
  switch (c.kind) {
    case lx::ExperimentKind::hydrostatics: return lx::run_hydrostatics(c);
    case lx::ExperimentKind::fick_scaling: return lx::run_fick_scaling(c);
    case lx::ExperimentKind::operator_convergence: return lx::run_operator_convergence(c);
    case lx::ExperimentKind::validate: return lx::run_validate(c);
    case lx::ExperimentKind::profile_table: return lx::run_profile_table(c);
    case lx::ExperimentKind::fick_constant: return lx::run_fick_constant(c);
  }
  throw lx::UsageError("unhandled experiment kind");
}

int run(lx::ExperimentKind kind, const Flags& f) {
  const auto c = resolve(kind, f);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = dispatch(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  lx::write_manifest(c.out, c, r, wall);
  for (const auto& ck : r.checks) {
    std::printf("%-4s %-32s value=%-14.6g tol=%-10.3g %s\n", ck.skipped ? "SKIP" : (ck.pass ? "PASS" : "FAIL"),
                ck.name.c_str(), ck.value, ck.tolerance, ck.detail.c_str());
  }
  std::printf("%s: %s (%.1f s, outputs in %s)\n", lx::to_string(kind).c_str(), r.pass() ? "pass" : "FAIL", wall,
              c.out.c_str());
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-driven exclusion process with long jumps: experiments and checks"};
  app.require_subcommand(1);
  Flags flags;
  std::string plot_dir;
  std::vector<std::pair<CLI::App*, lx::ExperimentKind>> subs;
  for (auto [name, kind, help] : {
           std::tuple{"validate", lx::ExperimentKind::validate, "run every property suite at small scale"},
           std::tuple{"hydrostatics", lx::ExperimentKind::hydrostatics, "stationary profile vs the continuum profile"},
           std::tuple{"fick-scaling", lx::ExperimentKind::fick_scaling, "current scaling in N and its limit"},
           std::tuple{"operator-convergence", lx::ExperimentKind::operator_convergence,
                      "lattice operators vs their continuum limits"},
           std::tuple{"profile-table", lx::ExperimentKind::profile_table, "tabulate the continuum profile"},
           std::tuple{"fick-constant", lx::ExperimentKind::fick_constant, "limit current on a parameter grid"},
       }) {
    auto* sub = app.add_subcommand(name, help);
    add_flags(sub, flags);
    subs.emplace_back(sub, kind);
  }
  auto* plots = app.add_subcommand("plots", "render SVG figures from the CSV files in a directory");
  plots->add_option("dir", plot_dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (plots->parsed()) {
      for (const auto& p : lx::emit_plots(plot_dir)) std::printf("%s\n", p.string().c_str());
      return 0;
    }
    for (const auto& [sub, kind] : subs) {
      if (sub->parsed()) return run(kind, flags);
    }
  } catch (const lx::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
