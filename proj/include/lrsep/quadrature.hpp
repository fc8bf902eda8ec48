#pragma once

// Thin wrappers over Boost.Math quadrature. Smooth pieces go through adaptive
// Gauss-Kronrod; pieces with algebraic endpoint singularities go through
// tanh-sinh, which clusters nodes double-exponentially at both ends.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

namespace lrsep::quad {

struct Options {
  double rel_tol = 1e-12;
  unsigned max_depth = 18;
};

template <class F>
double gauss_kronrod(F&& f, double a, double b, const Options& opt = {}) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      std::forward<F>(f), a, b, opt.max_depth, opt.rel_tol);
}

/// tanh-sinh on a finite interval; f is never evaluated at the endpoints.
template <class F>
double tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-12) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  return integrator.integrate(std::forward<F>(f), a, b, rel_tol);
}

/// Sums tanh-sinh integrals over consecutive pieces [x_i, x_{i+1}].
template <class F>
double tanh_sinh_pieces(F&& f, const std::vector<double>& breaks, double rel_tol = 1e-12) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) total += tanh_sinh(f, breaks[i], breaks[i + 1], rel_tol);
  }
  return total;
}

}  // namespace lrsep::quad
