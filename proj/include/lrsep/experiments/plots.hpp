#pragma once

// SVG figures built only from the CSV files a run leaves behind.

#include "lrsep/experiments/analysis.hpp"
#include "lrsep/experiments/io.hpp"
#include "lrsep/experiments/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <string>
#include <vector>

namespace lrsep::experiments {

/// Slope label shared by the driver report and the figure.
inline std::string delta_label(const PowerFit& fit) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "fit delta = %.4f", fit.exponent());
  return buf;
}

/// Power-law fit of |W1_mean| against N as stored in a scaling CSV.
inline PowerFit fick_fit(const CsvData& d) { return fit_power_law(d.numbers("N"), d.numbers("W1_mean")); }

inline PlotSpec profile_plot(const CsvData& d, const std::string& n_label) {
  PlotSpec p;
  p.title = "stationary profile, N = " + n_label;
  p.xlabel = "q = z/N";
  p.ylabel = "density";
  Series sim{"simulation", d.numbers("q"), d.numbers("mean"), d.numbers("stderr"), "#1f77b4", false, true};
  Series lim{"continuum profile", d.numbers("q"), d.numbers("rho_bar"), {}, "#d62728", true, false, true};
  p.series = {std::move(sim), std::move(lim)};
  return p;
}

inline PlotSpec fick_plot(const CsvData& d) {
  PlotSpec p;
  p.title = "stationary current scaling";
  p.xlabel = "N";
  p.ylabel = "|<W_1>|";
  p.logx = p.logy = true;
  const auto n = d.numbers("N");
  auto w = d.numbers("W1_mean");
  for (auto& v : w) v = std::abs(v);
  Series pts{"measured", n, w, d.numbers("W1_stderr"), "#1f77b4", false, true};
  p.series.push_back(pts);
  if (n.size() >= 2 && std::none_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
    const auto fit = fick_fit(d);
    Series line{"power-law fit", {n.front(), n.back()}, {fit.at(n.front()), fit.at(n.back())}, {}, "#d62728",
                true, false, true};
    p.series.push_back(std::move(line));
    p.notes.push_back(delta_label(fit));
  }
  return p;
}

inline PlotSpec operator_plot(const CsvData& d) {
  PlotSpec p;
  p.title = "operator convergence";
  p.xlabel = "N";
  p.ylabel = "sup error";
  p.logx = p.logy = true;
  const auto n = d.numbers("N");
  const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728"};
  int i = 0;
  for (const char* col : {"sup_err_minus", "sup_err_plus", "sup_err_K_N"}) {
    if (d.has(col)) p.series.push_back({col, n, d.numbers(col), {}, colors[i % 3], true, true});
    ++i;
  }
  if (!n.empty() && d.has("sup_err_minus")) {
    const double e0 = d.numbers("sup_err_minus").front();
    std::vector<double> ref;
    for (double v : n) ref.push_back(e0 * n.front() / v);
    p.series.push_back({"1/N reference", n, ref, {}, "#7f7f7f", true, false, true});
  }
  return p;
}

/// Writes one SVG per recognized CSV in `dir` and returns the files written.
/// A directory with no recognized CSVs produces nothing.
inline std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  if (!fs::is_directory(dir)) return written;
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
  }
  std::sort(csvs.begin(), csvs.end());
  static const std::regex profile_re("profile_N([0-9]+)\\.csv");
  for (const auto& path : csvs) {
    const std::string name = path.filename().string();
    std::smatch m;
    PlotSpec spec;
    if (std::regex_match(name, m, profile_re)) {
      spec = profile_plot(read_csv(path), m[1].str());
    } else if (name == "fick_scaling.csv") {
      spec = fick_plot(read_csv(path));
    } else if (name == "operator_convergence.csv") {
      spec = operator_plot(read_csv(path));
    } else {
      continue;
    }
    auto out = path;
    out.replace_extension(".svg");
    write_text(out, render_svg(spec));
    written.push_back(out);
  }
  return written;
}

}  // namespace lrsep::experiments
