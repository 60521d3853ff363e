#include "alignbounds/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace alignbounds {

namespace {

double simpson(double fa, double fm, double fb, double h6) {
  return h6 * (fa + 4.0 * fm + fb);
}

// Tolerance halves per side; eps_floor is a machine-precision stop so
// integrable endpoint singularities, where the Richardson correction and
// the split tolerance shrink at the same rate, do not burn the whole depth
// budget without ever passing the relative test.
double recurse(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double whole, double tol,
               double eps_floor, int depth, bool& converged) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, (m - a) / 6.0);
  const double right = simpson(fm, frm, fb, (b - m) / 6.0);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= std::max(15.0 * tol, eps_floor))
    return left + right + delta / 15.0;
  if (depth <= 0) {
    converged = false;
    return left + right + delta / 15.0;
  }
  return recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, eps_floor, depth - 1,
                 converged) +
         recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, eps_floor, depth - 1,
                 converged);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  int max_depth) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (a == b) return {0.0, true};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson(fa, fm, fb, (b - a) / 6.0);
  const double eps_floor =
      std::numeric_limits<double>::epsilon() * (std::fabs(whole) + 1.0);
  QuadratureResult result;
  result.value = recurse(f, a, b, fa, fm, fb, whole, abs_tol, eps_floor,
                         max_depth, result.converged);
  if (!std::isfinite(result.value)) result.converged = false;
  return result;
}

double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth,
                          const std::string& what) {
  const QuadratureResult r = adaptive_simpson(f, a, b, abs_tol, max_depth);
  if (!r.converged)
    throw std::runtime_error("quadrature did not converge for " + what +
                             " (partial estimate " + std::to_string(r.value) +
                             ")");
  return r.value;
}

}  // namespace alignbounds
