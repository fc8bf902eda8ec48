#pragma once

/**
 * @file continuum.hpp
 * @brief Continuum objects: the stable Poisson kernel of (0,1), the stationary
 *        profile, and the fractional Fick constant.
 *
 * The profile is the harmonic extension of the exterior data (alpha on the left,
 * beta on the right):
 *     rho(q) = alpha + (beta - alpha) Psi(q),   Psi(q) = int_{y>1} P(q, y) dy,
 * with P the Poisson kernel of the ball of radius 1/2 centred at 1/2.
 */

#include "lrsep/frac_laplacian.hpp"
#include "lrsep/jump_law.hpp"
#include "lrsep/quadrature.hpp"
#include "lrsep/test_functions.hpp"

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lrsep {

struct PoissonKernel {
  double gamma = 1.5;
  double c_gamma = 0.0;  // Gamma(1/2) pi^{-3/2} sin(pi gamma/2) = sin(pi gamma/2)/pi
  double radius = 0.5;
  double center = 0.5;

  explicit PoissonKernel(double g)
      : gamma(g), c_gamma(std::tgamma(0.5) * std::pow(std::numbers::pi, -1.5) * std::sin(std::numbers::pi * g / 2)) {
    detail::check_gamma(g);
  }

  /// C [(r^2 - (q-c)^2) / ((y-c)^2 - r^2)]^{g/2} / |q - y| for y outside [0,1], else 0.
  double operator()(double q, double y) const {
    if (!(q > 0.0 && q < 1.0)) {
      throw std::invalid_argument("Poisson kernel needs 0 < q < 1; use rho(0) = alpha, rho(1) = beta");
    }
    if (y >= 0.0 && y <= 1.0) return 0.0;
    const double a = q * (1.0 - q);  // r^2 - (q - c)^2
    const double b = y * (y - 1.0);  // (y - c)^2 - r^2
    return c_gamma * std::pow(a / b, gamma / 2) / std::abs(q - y);
  }
};

inline double poisson_kernel(double gamma, double q, double y) { return PoissonKernel(gamma)(q, y); }

namespace detail {

// int_{y>1} P(q, y) dy. With y = 1 + s the integrand is
//   C (q(1-q))^{g/2} [s(1+s)]^{-g/2} / (1 + s - q).
// On s in (0,1) put s = u^m, m = 2/(2-g), which cancels the s^{-g/2} edge
// singularity; on s in (1,inf) put s = 1/t.
inline double exit_right(double gamma, double q, double rel_tol) {
  const double m = 2.0 / (2.0 - gamma);
  const double h = gamma / 2;
  auto near = [=](double u) {
    const double s = std::pow(u, m);
    return m * std::pow(1.0 + s, -h) / (1.0 - q + s);
  };
  auto far = [=](double t) { return std::pow(t, gamma - 1.0) * std::pow(1.0 + t, -h) / (1.0 + t * (1.0 - q)); };
  std::vector<double> br{0.0, 1.0};
  const double u_star = std::pow(1.0 - q, 1.0 / m);  // where s = 1 - q
  if (u_star < 0.5) {
    br = {0.0, u_star / 4, u_star, 4 * u_star < 1.0 ? 4 * u_star : 0.5, 1.0};
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
  }
  const double a = quad::tanh_sinh_pieces(near, br, rel_tol);
  const double b = quad::tanh_sinh(far, 0.0, 1.0, rel_tol);
  const double pref = std::sin(std::numbers::pi * gamma / 2) / std::numbers::pi * std::pow(q * (1.0 - q), h);
  return pref * (a + b);
}

}  // namespace detail

inline constexpr double kProfileRelTol = 1e-13;

/// Psi(q): probability that the stable process started at q leaves (0,1) to the right.
inline double exit_probability(double gamma, double q) {
  detail::check_gamma(gamma);
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  if (q > 0.5) return 1.0 - detail::exit_right(gamma, 1.0 - q, kProfileRelTol);
  return detail::exit_right(gamma, q, kProfileRelTol);
}

/// int P(q, y) dy over both exterior half-lines.
inline double kernel_mass(double gamma, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("kernel mass needs 0 < q < 1");
  return detail::exit_right(gamma, q, kProfileRelTol) + detail::exit_right(gamma, 1.0 - q, kProfileRelTol);
}

inline double profile_rho_bar(double gamma, double alpha, double beta, double q) {
  if (q <= 0.0) return alpha;
  if (q >= 1.0) return beta;
  if (alpha == beta) return alpha;
  return alpha + (beta - alpha) * exit_probability(gamma, q);
}

/// Stationary profile with a cached Chebyshev grid. Nodes q_i = (1 - cos(theta_i))/2,
/// theta_i = pi i / (n-1). On q <= 1/2 the smooth ratio Psi(q) / q^{g/2} is
/// interpolated monotonically in theta; the other half follows from
/// Psi(q) = 1 - Psi(1-q).
class Profile {
 public:
  static constexpr int kDefaultNodes = 257;

  Profile(double gamma, double alpha, double beta, int nodes = kDefaultNodes)
      : gamma_(gamma), alpha_(alpha), beta_(beta) {
    detail::check_gamma(gamma);
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("reservoir densities must lie in [0,1]");
    }
    if (nodes < 5 || nodes % 2 == 0) throw std::invalid_argument("profile cache needs an odd node count >= 5");
    const double h = gamma / 2;
    nodes_.resize(static_cast<std::size_t>(nodes));
    psi_nodes_.resize(static_cast<std::size_t>(nodes));
    std::vector<double> theta;
    std::vector<double> ratio;
    for (int i = 0; i < nodes; ++i) {
      const double t = std::numbers::pi * i / (nodes - 1);
      double q = 0.5 * (1.0 - std::cos(t));
      if (i == 0) q = 0.0;
      if (i == nodes - 1) q = 1.0;
      if (2 * i == nodes - 1) q = 0.5;
      nodes_[static_cast<std::size_t>(i)] = q;
      // a few nodes past the midpoint keep the end slopes of the interpolant accurate
      if (4 * i <= 3 * (nodes - 1)) {
        const double psi = exit_probability(gamma, q);
        if (2 * i <= nodes - 1) psi_nodes_[static_cast<std::size_t>(i)] = psi;
        theta.push_back(t);
        // Psi(q) ~ q^{g/2} / (h B(h, h)) as q -> 0
        ratio.push_back(i == 0 ? 1.0 / (h * std::beta(h, h)) : psi / std::pow(q, h));
      }
    }
    for (int i = (nodes + 1) / 2; i < nodes; ++i) {
      psi_nodes_[static_cast<std::size_t>(i)] = 1.0 - psi_nodes_[static_cast<std::size_t>(nodes - 1 - i)];
    }
    interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(theta),
                                                                                      std::move(ratio));
  }

  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Cached value at node i.
  double node_value(std::size_t i) const { return alpha_ + (beta_ - alpha_) * psi_nodes_.at(i); }

  /// Interpolated exit probability.
  double psi(double q) const {
    if (q <= 0.0) return 0.0;
    if (q >= 1.0) return 1.0;
    if (q > 0.5) return 1.0 - psi(1.0 - q);
    return (*interp_)(std::acos(1.0 - 2.0 * q)) * std::pow(q, gamma_ / 2);
  }

  /// Interpolated profile; exterior values outside (0,1).
  double operator()(double q) const {
    if (q <= 0.0) return alpha_;
    if (q >= 1.0) return beta_;
    return alpha_ + (beta_ - alpha_) * psi(q);
  }

  /// Direct quadrature, no interpolation.
  double exact(double q) const { return profile_rho_bar(gamma_, alpha_, beta_, q); }

 private:
  double gamma_;
  double alpha_;
  double beta_;
  std::vector<double> nodes_;
  std::vector<double> psi_nodes_;
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

/// -<rho, (-Delta)^{g/2} H> + <alpha r^- + beta r^+, H> for a compactly supported H.
inline double check_weak_solution(const Profile& profile, const TestFunction& h, double c_gamma) {
  if (!h.compact) throw std::invalid_argument("weak-form test function must be compactly supported in (0,1)");
  if (!(h.lo > 0.0 && h.hi < 1.0)) throw std::invalid_argument("test function support must lie inside (0,1)");
  const double g = profile.gamma();
  Exterior ext;
  ext.kinks = {h.lo, h.hi};
  auto lap = [&](double q) { return frac_laplacian_1d(h, q, g, c_gamma, ext); };
  auto rho = [&](double q) { return profile.exact(q); };

  // Off the support (-Delta)^{g/2} H(q) = -c int H(y) |q-y|^{-1-g} dy, a smooth integral.
  auto lap_outside = [&](double q) {
    auto f = [&](double y) { return h(y) * std::pow(std::abs(q - y), -1.0 - g); };
    return -c_gamma * quad::tanh_sinh(f, h.lo, h.hi, 1e-12);
  };
  const double left = quad::tanh_sinh([&](double q) { return rho(q) * lap_outside(q); }, 0.0, h.lo, 1e-10);
  const double right = quad::tanh_sinh([&](double q) { return rho(q) * lap_outside(q); }, h.hi, 1.0, 1e-10);
  const double inside = quad::gauss_kronrod([&](double q) { return rho(q) * lap(q); }, h.lo, h.hi, {1e-10, 12});

  const double a = profile.alpha();
  const double b = profile.beta();
  auto source = [&](double q) {
    return (a * c_gamma * std::pow(q, -g) / g + b * c_gamma * std::pow(1.0 - q, -g) / g) * h(q);
  };
  const double src = quad::gauss_kronrod(source, h.lo, h.hi, {1e-12, 15});
  return -(left + inside + right) + src;
}

/// c(alpha - beta)/(g(2-g)).
inline double theta_limit(double gamma, double c_gamma, double alpha, double beta) {
  return c_gamma * (alpha - beta) / (gamma * (2.0 - gamma));
}

/**
 * Right-hand side of the fractional Fick law at a cut x in (0,1):
 *     c int_{y<x} int_{z>x} (rho(y) - rho(z)) / (z-y)^{1+g} dz dy + c (beta - alpha)/(g(g-1)).
 * Integrating out the distance along the anti-diagonal reduces the double
 * integral to (1/g) int_0^inf (rho(x-u) - rho(x+u)) u^{-g} du, which is split at
 * min(x, 1-x) and max(x, 1-x); beyond the latter both values are exterior data.
 */
inline double fick_rhs(double gamma, double c_gamma, double alpha, double beta, double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("fick_rhs needs 0 < x < 1");
  detail::check_gamma(gamma);
  const double constant = c_gamma * (beta - alpha) / (gamma * (gamma - 1.0));
  if (alpha == beta) return 0.0;
  auto rho = [&](double q) { return profile_rho_bar(gamma, alpha, beta, q); };
  auto f = [&](double u) { return (rho(x - u) - rho(x + u)) * std::pow(u, -gamma); };
  const double lo = std::min(x, 1.0 - x);
  const double hi = std::max(x, 1.0 - x);

  // Near u = 0 the difference is odd in u and suffers cancellation, so d(u)/u is
  // replaced by its quadratic interpolant in u^2 through delta, delta/2, delta/4
  // and integrated exactly against u^{1-g}.
  const double delta = lo / 16;
  const double s1 = delta * delta, s2 = s1 / 4, s3 = s1 / 16;
  const double g1 = f(delta) * std::pow(delta, gamma - 1.0);
  const double g2 = f(delta / 2) * std::pow(delta / 2, gamma - 1.0);
  const double g3 = f(delta / 4) * std::pow(delta / 4, gamma - 1.0);
  const double f12 = (g2 - g1) / (s2 - s1);
  const double f23 = (g3 - g2) / (s3 - s2);
  const double a2 = (f23 - f12) / (s3 - s1);
  const double a1 = f12 - a2 * (s1 + s2);
  const double a0 = g1 - f12 * s1 + a2 * s1 * s2;
  double integral = a0 * std::pow(delta, 2.0 - gamma) / (2.0 - gamma) +
                    a1 * std::pow(delta, 4.0 - gamma) / (4.0 - gamma) +
                    a2 * std::pow(delta, 6.0 - gamma) / (6.0 - gamma);

  integral += quad::tanh_sinh(f, delta, lo, 1e-12);
  if (hi > lo) integral += quad::tanh_sinh(f, lo, hi, 1e-12);
  integral += (alpha - beta) * std::pow(hi, 1.0 - gamma) / (gamma - 1.0);
  return c_gamma * integral / gamma + constant;
}

inline double fick_rhs(double gamma, double alpha, double beta, double x) {
  return fick_rhs(gamma, jump_normalization(gamma), alpha, beta, x);
}

/// int_0^1 rho(q) phi(q) dq + theta limit.
inline double fick_via_phi(double gamma, double c_gamma, double alpha, double beta) {
  detail::check_gamma(gamma);
  if (alpha == beta) return 0.0;
  // Folded onto (0, 1/2) so that both edge singularities sit at s = 0.
  const double k = c_gamma / (gamma * (1.0 - gamma));
  auto f = [&](double s) {
    const double d = profile_rho_bar(gamma, alpha, beta, s) - profile_rho_bar(gamma, alpha, beta, 1.0 - s);
    return k * d * (std::pow(1.0 - s, 1.0 - gamma) - std::pow(s, 1.0 - gamma));
  };
  const double integral = quad::tanh_sinh(f, 0.0, 0.5, 1e-12);
  return integral + theta_limit(gamma, c_gamma, alpha, beta);
}

inline double fick_via_phi(double gamma, double alpha, double beta) {
  return fick_via_phi(gamma, jump_normalization(gamma), alpha, beta);
}

struct FickConstant {
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double c_gamma = 0.0;
  double value = 0.0;                // J_infinity, taken from the double-integral route at x = 1/2
  double route_double_integral = 0.0;
  double route_phi = 0.0;
  std::vector<std::pair<double, double>> per_x;  // (x, fick_rhs(x))
  double x_spread = 0.0;                           // max - min over per_x
};

inline FickConstant fick_constant(double gamma, double alpha, double beta,
                                  const std::vector<double>& xs = {0.25, 0.5, 0.75}) {
  FickConstant fc;
  fc.gamma = gamma;
  fc.alpha = alpha;
  fc.beta = beta;
  fc.c_gamma = jump_normalization(gamma);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = fick_rhs(gamma, fc.c_gamma, alpha, beta, xs[i]);
    fc.per_x.emplace_back(xs[i], v);
    lo = i == 0 ? v : std::min(lo, v);
    hi = i == 0 ? v : std::max(hi, v);
  }
  fc.x_spread = hi - lo;
  fc.route_double_integral = fick_rhs(gamma, fc.c_gamma, alpha, beta, 0.5);
  fc.route_phi = fick_via_phi(gamma, fc.c_gamma, alpha, beta);
  fc.value = fc.route_double_integral;
  return fc;
}

/// (-Delta)^{g/2} rho(q) at an interior point, with the exterior extension.
inline FracLaplacianValue profile_frac_laplacian(const Profile& profile, double c_gamma, double q,
                                                 double eps = 1e-3) {
  Exterior ext;
  ext.left_value = profile.alpha();
  ext.right_value = profile.beta();
  auto rho = [&](double y) { return profile.exact(y); };
  return frac_laplacian_checked(rho, q, profile.gamma(), c_gamma, ext, eps);
}

struct HolderFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::pair<double, double>> points;  // (eps, rho(eps) - alpha)
};

/// Least-squares slope of log|rho(eps) - alpha| against log eps over eps = 2^{-k}.
inline HolderFit holder_fit(double gamma, double alpha, double beta, int k_min = 10, int k_max = 20) {
  if (alpha == beta) throw std::invalid_argument("Holder fit needs alpha != beta");
  HolderFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int k = k_min; k <= k_max; ++k) {
    const double e = std::ldexp(1.0, -k);
    const double d = std::abs(profile_rho_bar(gamma, alpha, beta, e) - alpha);
    fit.points.emplace_back(e, d);
    const double lx = std::log(e);
    const double ly = std::log(d);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace lrsep
