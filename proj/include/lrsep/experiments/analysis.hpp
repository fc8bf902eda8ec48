#pragma once

// Log-log fitting shared by the scaling driver and its plot.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrsep::experiments {

struct PowerFit {
  double slope = 0.0;      // d log|y| / d log x
  double intercept = 0.0;  // log|y| at log x = 0
  double slope_se = 0.0;   // from the residual scatter
  int points = 0;
  double exponent() const { return -slope; }
  double at(double x) const { return std::exp(intercept + slope * std::log(x)); }
};

/// Ordinary least squares of log|y| on log x.
inline PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("power-law fit needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || y[i] == 0.0) throw std::invalid_argument("power-law fit needs x > 0 and y != 0");
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  PowerFit f;
  f.points = static_cast<int>(x.size());
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = std::log(std::abs(y[i])) - (f.intercept + f.slope * std::log(x[i]));
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2) * n / den);
  }
  return f;
}

}  // namespace lrsep::experiments
