#pragma once

#include <cmath>
#include <functional>

namespace cifuse {

struct ScalarOpt {
  double x;
  double fx;
  int iterations;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi]. Stops
/// when the bracket is shorter than tol or after max_iter steps.
ScalarOpt golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double tol, int max_iter);

inline ScalarOpt golden_section_max(const std::function<double(double)>& f, double lo,
                                    double hi, double tol, int max_iter) {
  ScalarOpt r = golden_section_min([&](double x) { return -f(x); }, lo, hi, tol, max_iter);
  r.fx = -r.fx;
  return r;
}

/// Bisection for a sign change of f on [lo, hi] with f(lo) > 0 > f(hi) or the
/// reverse. Returns the midpoint of the final bracket.
ScalarOpt bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iter = 200);

}  // namespace cifuse
