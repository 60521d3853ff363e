#pragma once

#include <functional>
#include <string>

namespace alignbounds {

struct QuadratureResult {
  double value = 0.0;
  bool converged = true;
};

// Adaptive Simpson with interval bisection and Richardson correction.
// Absolute tolerance; recursion is depth-limited. A non-converged result
// still carries the partial estimate.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth = 60);

// Throws std::runtime_error carrying the partial estimate on failure.
double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth = 60,
                          const std::string& what = "integral");

}  // namespace alignbounds
