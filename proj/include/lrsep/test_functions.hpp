#pragma once

// Test functions H used against empirical measures and fractional operators.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace lrsep {

struct TestFunction {
  std::string name;
  std::function<double(double)> fn;
  // Support [lo, hi]; fn vanishes outside. For non-compact functions this is [0,1].
  double lo = 0.0;
  double hi = 1.0;
  bool compact = false;

  double operator()(double q) const { return fn(q); }
};

/// Standard mollifier exp(-1/(1-t^2)) rescaled to (lo, hi), with peak height e^{-1}.
inline TestFunction mollifier(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  TestFunction t;
  t.name = "bump(" + std::to_string(lo).substr(0, 4) + "," + std::to_string(hi).substr(0, 4) + ")";
  t.fn = [mid, half](double q) {
    const double u = (q - mid) / half;
    const double d = 1.0 - u * u;
    return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
  };
  t.lo = lo;
  t.hi = hi;
  t.compact = true;
  return t;
}

/// Compactly supported bumps used for operator-convergence and weak-form checks.
inline std::vector<TestFunction> bump_corpus() {
  return {mollifier(0.3, 0.7), mollifier(0.2, 0.55), mollifier(0.4, 0.8)};
}

/// Five-function corpus for weak-form profile comparison on [0,1].
inline std::vector<TestFunction> hydrostatics_corpus() {
  std::vector<TestFunction> out;
  out.push_back({"one", [](double) { return 1.0; }});
  out.push_back(mollifier(0.2, 0.6));
  out.push_back(mollifier(0.4, 0.9));
  out.push_back({"q", [](double q) { return q; }});
  out.push_back({"q2(1-q)", [](double q) { return 4.0 * q * q * (1.0 - q); }});
  return out;
}

}  // namespace lrsep
