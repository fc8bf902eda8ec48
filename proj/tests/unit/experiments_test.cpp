#include "lrsep/experiments/analysis.hpp"
#include "lrsep/experiments/config.hpp"
#include "lrsep/experiments/drivers.hpp"
#include "lrsep/experiments/io.hpp"
#include "lrsep/experiments/plots.hpp"
#include "lrsep/experiments/report.hpp"
#include "lrsep/experiments/validate.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
namespace lx = lrsep::experiments;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("lrsep_unit_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

lx::ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return lx::parse_config(in);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LRSEP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, ParsesEverySection) {
  const auto c = parse(
      "[experiment]\nkind = fick-scaling\ngamma = 1.25\nalpha = 0.1\nbeta = 0.7\nN = 8, 16, 32\nseed = 99\n"
      "replicas = 3\n[simulation]\nevents = 1e6\nexact_max = 8\nt_burn = 5\n[checks]\nsigma = 2.5\n");
  EXPECT_EQ(c.kind, lx::ExperimentKind::fick_scaling);
  EXPECT_EQ(c.gamma, 1.25);
  EXPECT_EQ(c.n_list, (std::vector<int>{8, 16, 32}));
  EXPECT_EQ(c.seed, 99U);
  EXPECT_EQ(c.replicas, 3);
  EXPECT_EQ(c.exact_max, 8);
  ASSERT_TRUE(c.t_burn.has_value());
  EXPECT_EQ(*c.t_burn, 5.0);
  EXPECT_EQ(c.sigma, 2.5);
  EXPECT_NO_THROW(lx::validate_config(c));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse("[experiment]\ngama = 1.5\n"), lx::UsageError);
  EXPECT_THROW(parse("[experiment]\ngamma = one\n"), lx::UsageError);
  EXPECT_THROW(parse("[experiment]\nkind = sweep\n"), lx::UsageError);
  EXPECT_THROW(parse("[experiment\ngamma = 1.5\n"), lx::UsageError);
  EXPECT_THROW(parse("[experiment]\nseed = -4\n"), lx::UsageError);
  std::istringstream in("[experiment]\nkind = validate\n");
  EXPECT_THROW(lx::parse_config(in, lx::ExperimentKind::hydrostatics), lx::UsageError);
  EXPECT_THROW(lx::load_config("/nonexistent/lrsep.ini"), lx::UsageError);
}

TEST(Config, RejectsOutOfContractValues) {
  for (const char* text : {"[experiment]\ngamma = 2.0\n", "[experiment]\nalpha = 0\n", "[experiment]\nbeta = 1\n",
                           "[experiment]\nN = 16, 8\n", "[experiment]\nN = 8, 8\n", "[experiment]\nreplicas = 0\n",
                           "[experiment]\nN = 8, 16\n[simulation]\nevents = 1, 2, 3\n",
                           "[validate]\ninject_fault = everything\n"}) {
    EXPECT_THROW(lx::validate_config(parse(text)), lx::UsageError) << text;
  }
}

TEST(Config, SeedPrecedence) {
  auto c = parse("[experiment]\nseed = 5\n");
  ::setenv("LRSEP_SEED", "6", 1);
  lx::apply_seed_overrides(c, std::nullopt);
  EXPECT_EQ(c.seed, 6U);
  lx::apply_seed_overrides(c, 7);
  EXPECT_EQ(c.seed, 7U);
  ::unsetenv("LRSEP_SEED");
}

TEST(Config, BundledConfigsAreValid) {
  for (const auto& e : fs::directory_iterator(LRSEP_CONFIG_DIR)) {
    if (e.path().extension() != ".ini") continue;
    lx::ExperimentConfig c;
    ASSERT_NO_THROW(c = lx::load_config(e.path().string())) << e.path();
    EXPECT_NO_THROW(lx::validate_config(c)) << e.path();
  }
}

TEST(Csv, RoundTrip) {
  const auto dir = scratch("csv");
  lx::CsvTable t({"N", "value", "tag"});
  t.row().add(8).add(0.125).add("exact");
  t.row().add(16).add(-1e-7).add("kmc");
  lx::write_text(dir / "t.csv", t.str());
  const auto d = lx::read_csv(dir / "t.csv");
  EXPECT_EQ(d.header, (std::vector<std::string>{"N", "value", "tag"}));
  EXPECT_EQ(d.numbers("N"), (std::vector<double>{8, 16}));
  EXPECT_EQ(d.numbers("value")[1], -1e-7);
  EXPECT_THROW(d.column("missing"), std::out_of_range);
  fs::remove_all(dir);
}

TEST(Analysis, PowerLawFitRecoversExponent) {
  std::vector<double> n{8, 16, 32, 64, 128}, y;
  for (double v : n) y.push_back(-3.0 * std::pow(v, -0.5));
  const auto f = lx::fit_power_law(n, y);
  EXPECT_NEAR(f.exponent(), 0.5, 1e-12);
  EXPECT_NEAR(f.at(10.0), 3.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-10);
  EXPECT_THROW(lx::fit_power_law({1.0}, {1.0}), std::invalid_argument);
}

TEST(Plots, EmptyDirectoryWritesNothing) {
  const auto dir = scratch("plots_empty");
  EXPECT_TRUE(lx::emit_plots(dir).empty());
  EXPECT_TRUE(fs::is_empty(dir));
  EXPECT_TRUE(lx::emit_plots(dir / "missing").empty());
  fs::remove_all(dir);
}

TEST(Plots, ScalingFigureCarriesTheFittedSlope) {
  const auto dir = scratch("plots_fick");
  lx::CsvTable t({"N", "W1_mean", "W1_stderr"});
  for (int n : {8, 16, 32, 64}) t.row().add(n).add(-0.5 * std::pow(n, -0.47)).add(1e-4);
  lx::write_text(dir / "fick_scaling.csv", t.str());
  lx::write_text(dir / "notes.csv", "a,b\n1,2\n");
  const auto files = lx::emit_plots(dir);
  ASSERT_EQ(files.size(), 1U);
  const auto svg = slurp(files[0]);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  const auto fit = lx::fick_fit(lx::read_csv(dir / "fick_scaling.csv"));
  EXPECT_NEAR(fit.exponent(), 0.47, 1e-9);
  EXPECT_NE(svg.find(lx::delta_label(fit)), std::string::npos);
  // pure function of the inputs
  lx::emit_plots(dir);
  EXPECT_EQ(slurp(files[0]), svg);
  fs::remove_all(dir);
}

TEST(Drivers, ProfileTableAndManifestAreDeterministic) {
  const auto a = scratch("table_a"), b = scratch("table_b");
  auto c = parse("[experiment]\nkind = profile-table\n[profile_table]\npoints = 41\n");
  c.out = a.string();
  const auto ra = lx::run_profile_table(c);
  EXPECT_TRUE(ra.pass());
  lx::write_manifest(a, c, ra, 1.0);
  c.out = b.string();
  c.threads = 4;
  const auto rb = lx::run_profile_table(c);
  lx::write_manifest(b, c, rb, 2.0);
  EXPECT_EQ(slurp(a / "profile_table.csv"), slurp(b / "profile_table.csv"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
  EXPECT_NE(slurp(a / "timing.json"), slurp(b / "timing.json"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_NEAR(m["c_gamma"].get<double>(), 0.372720648144, 1e-12);
  EXPECT_TRUE(m.contains("tolerances"));
  EXPECT_TRUE(m.contains("code_version"));
  const auto d = lx::read_csv(a / "profile_table.csv");
  EXPECT_EQ(d.rows.size(), 41U);
  EXPECT_EQ(d.numbers("rho_bar").front(), 0.2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Drivers, EquilibriumScalingSkipsTheFit) {
  const auto dir = scratch("fick_eq");
  auto c = parse("[experiment]\nkind = fick-scaling\nalpha = 0.5\nbeta = 0.5\nN = 6, 10, 16\nseed = 3\n"
                 "[simulation]\nexact_max = 10\nevents = 1e6\nseam_check = false\n");
  c.out = dir.string();
  const auto r = lx::run_fick_scaling(c);
  bool skipped = false;
  for (const auto& ck : r.checks) {
    if (ck.name == "delta_fit") skipped = ck.skipped;
  }
  EXPECT_TRUE(skipped);
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(fs::exists(dir / "fick_scaling.csv"));
  fs::remove_all(dir);
}

TEST(Drivers, EquilibriumHydrostaticsIsFlat) {
  const auto dir = scratch("hydro_eq");
  auto c = parse("[experiment]\nkind = hydrostatics\nalpha = 0.5\nbeta = 0.5\nN = 24\nseed = 4\n"
                 "[simulation]\nevents = 2e6\nseam_check = false\n");
  c.out = dir.string();
  const auto r = lx::run_hydrostatics(c);
  EXPECT_TRUE(r.pass());
  const auto d = lx::read_csv(dir / "profile_N24.csv");
  const auto mean = d.numbers("mean"), se = d.numbers("stderr");
  for (std::size_t i = 0; i < mean.size(); ++i) EXPECT_LE(std::abs(mean[i] - 0.5), 4.0 * se[i]);
  EXPECT_TRUE(fs::exists(dir / "profile_N24.svg"));
  fs::remove_all(dir);
}

TEST(Validate, SeedChangeKeepsVerdicts) {
  auto c = parse("[experiment]\nkind = validate\n");
  c.out = scratch("validate_a").string();
  c.seed = 7;
  const auto a = lx::run_validate(c);
  c.out = scratch("validate_b").string();
  c.seed = 8;
  const auto b = lx::run_validate(c);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].name, b.checks[i].name);
    EXPECT_TRUE(a.checks[i].pass) << a.checks[i].name;
    EXPECT_EQ(a.checks[i].pass, b.checks[i].pass) << a.checks[i].name;
  }
}

TEST(Validate, CorruptedTailTripsContinuity) {
  auto c = parse("[experiment]\nkind = validate\n[validate]\ninject_fault = corrupt_tail\n");
  c.out = scratch("validate_fault").string();
  const auto r = lx::run_validate(c);
  EXPECT_FALSE(r.pass());
  for (const auto& ck : r.checks) {
    if (ck.name == "continuity_identity") {
      EXPECT_FALSE(ck.pass);
    } else {
      EXPECT_TRUE(ck.pass) << ck.name;
    }
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const std::string cfg = std::string(LRSEP_CONFIG_DIR);
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("profile-table --seed banana --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("profile-table --config /nonexistent.ini"), 2);
  EXPECT_EQ(run_cli("hydrostatics --config " + cfg + "/profile_table.ini"), 2);
  EXPECT_EQ(run_cli("profile-table --config " + cfg + "/profile_table.ini --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "profile_table.csv"));
  EXPECT_EQ(run_cli("plots " + dir.string()), 0);
  EXPECT_EQ(run_cli("validate --config " + cfg + "/validate_fault.ini --out " + (dir / "fault").string()), 1);
  const auto report = nlohmann::json::parse(slurp(dir / "fault" / "validate.json"));
  bool named = false;
  for (const auto& ck : report["checks"]) {
    if (ck["name"] == "continuity_identity") named = !ck["pass"].get<bool>();
  }
  EXPECT_TRUE(named);
  fs::remove_all(dir);
}

}  // namespace
