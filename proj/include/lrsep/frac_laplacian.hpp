#pragma once

/**
 * @file frac_laplacian.hpp
 * @brief Pointwise evaluation of the fractional Laplacian in one dimension.
 *
 *     (-Delta)^{gamma/2} F(q) = c PV int (F(q) - F(y)) / |y - q|^{1+gamma} dy
 *                             = c int_0^inf (2F(q) - F(q+h) - F(q-h)) h^{-1-gamma} dh
 *
 * The folded (second-difference) form has an integrable h^{1-gamma} singularity
 * at h = 0, so no principal value is needed. On [0, eps] the quotient
 * g(h) = (2F(q) - F(q+h) - F(q-h)) / h^2 is even and smooth; it is fitted by
 * g0 + g2 h^2 + g4 h^4 through h = eps, eps/2, eps/4 and integrated exactly
 * against h^{1-gamma}. This avoids catastrophic cancellation at tiny h.
 * [eps, H] is integrated by tanh-sinh on geometric pieces (plus any kinks of
 * F), and beyond H the integrand is the exact power tail of the exterior
 * constants.
 */

#include "lrsep/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrsep {

/// Describes F outside [lo, hi]: F = left_value on (-inf, lo], right_value on [hi, inf).
/// `kinks` lists interior points where F is not smooth (e.g. the edges of a
/// Holder boundary layer) so quadrature breaks there.
struct Exterior {
  double left_value = 0.0;
  double right_value = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> kinks;
};

struct FracLaplacianValue {
  double value = 0.0;
  /// |value(eps) - value(eps/2)|, a consistency check on the near-field fit.
  double richardson_delta = 0.0;
};

namespace detail {

template <class F>
double frac_laplacian_folded(const F& f, double q, double gamma, const Exterior& ext, double eps) {
  const double fq = f(q);
  auto second_diff = [&](double h) { return 2.0 * fq - f(q + h) - f(q - h); };

  // Kinks closer than eps shrink the near field.
  std::vector<double> dists;
  for (double k : ext.kinks) dists.push_back(std::abs(k - q));
  dists.push_back(std::abs(q - ext.lo));
  dists.push_back(std::abs(ext.hi - q));
  for (double d : dists) {
    if (d > 0.0 && d <= eps) eps = 0.5 * d;
  }

  // Near field.
  const double e2 = eps * eps;
  const double s[3] = {e2, e2 / 4.0, e2 / 16.0};
  const double g[3] = {second_diff(eps) / s[0], second_diff(0.5 * eps) / s[1],
                       second_diff(0.25 * eps) / s[2]};
  // Quadratic in s = h^2 through (s_i, g_i): g(s) = a0 + a1 s + a2 s^2.
  const double d01 = (g[1] - g[0]) / (s[1] - s[0]);
  const double d12 = (g[2] - g[1]) / (s[2] - s[1]);
  const double a2 = (d12 - d01) / (s[2] - s[0]);
  const double a1 = d01 - a2 * (s[0] + s[1]);
  const double a0 = g[0] - a1 * s[0] - a2 * s[0] * s[0];
  const double near = a0 * std::pow(eps, 2.0 - gamma) / (2.0 - gamma) +
                      a1 * std::pow(eps, 4.0 - gamma) / (4.0 - gamma) +
                      a2 * std::pow(eps, 6.0 - gamma) / (6.0 - gamma);

  // Far field up to the point where both q+h and q-h sit in the exterior.
  const double h_max = std::max(q - ext.lo, ext.hi - q);
  std::vector<double> breaks{eps};
  for (double h = 8.0 * eps; h < h_max; h *= 8.0) breaks.push_back(h);
  for (double d : dists) {
    if (d > eps && d < h_max) breaks.push_back(d);
  }
  breaks.push_back(h_max);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double h) { return second_diff(h) * std::pow(h, -1.0 - gamma); };
  double far = 0.0;
  if (h_max > eps) far = quad::tanh_sinh_pieces(integrand, breaks, 1e-11);

  const double tail =
      (2.0 * fq - ext.left_value - ext.right_value) * std::pow(h_max, -gamma) / gamma;
  return near + far + tail;
}

}  // namespace detail

/// (-Delta)^{gamma/2} F(q) with normalization c_gamma. F must be C^2 near q
/// (not checked). Returns the value at eps_split together with the change
/// observed when the split radius is halved.
template <class F>
FracLaplacianValue frac_laplacian_checked(const F& f, double q, double gamma, double c_gamma,
                                          const Exterior& ext = {}, double eps_split = 1e-3) {
  if (!(eps_split > 0.0)) throw std::invalid_argument("eps_split must be positive");
  if (!(ext.hi > ext.lo)) throw std::invalid_argument("exterior interval is empty");
  const double v1 = detail::frac_laplacian_folded(f, q, gamma, ext, eps_split);
  const double v2 = detail::frac_laplacian_folded(f, q, gamma, ext, 0.5 * eps_split);
  return {c_gamma * v1, c_gamma * std::abs(v1 - v2)};
}

template <class F>
double frac_laplacian_1d(const F& f, double q, double gamma, double c_gamma,
                         const Exterior& ext = {}, double eps_split = 1e-3) {
  if (!(eps_split > 0.0)) throw std::invalid_argument("eps_split must be positive");
  return c_gamma * detail::frac_laplacian_folded(f, q, gamma, ext, eps_split);
}

}  // namespace lrsep
