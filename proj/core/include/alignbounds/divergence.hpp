#pragma once

#include <functional>
#include <span>
#include <string>

#include "alignbounds/continuous_law.hpp"
#include "alignbounds/finite_dist.hpp"

namespace alignbounds {

// Convex generator of an f-divergence, normalized so f(1) = 0.
// at_zero is lim_{t->0+} f(t); slope_at_inf is lim_{t->inf} f(t)/t.
// Either limit may be +inf; they drive the zero-mass conventions of f_div.
class FGenerator {
 public:
  static FGenerator kl();          // t log t
  static FGenerator chi2();        // (t - 1)^2
  static FGenerator tv();          // |t - 1| / 2
  static FGenerator hellinger();   // (1 - sqrt(t))^2
  static FGenerator forward_kl();  // -log t
  static FGenerator by_name(const std::string& name);

  // Custom generators are validated: f(1) must vanish exactly and the
  // midpoint convexity inequality must hold on a spot grid (tol 1e-9).
  static FGenerator custom(std::string name, std::function<double(double)> f,
                           double at_zero, double slope_at_inf);

  double operator()(double t) const { return f_(t); }

  // f(e^{log_t}) for ratios given in the log domain, so integrands keep
  // their tails where t itself would underflow. Builtins use closed forms;
  // custom generators fall back to f(exp(log_t)).
  double eval_log(double log_t) const { return f_log_(log_t); }

  double at_zero() const { return at_zero_; }
  double slope_at_inf() const { return slope_at_inf_; }
  const std::string& name() const { return name_; }

 private:
  FGenerator(std::string name, std::function<double(double)> f,
             std::function<double(double)> f_log, double at_zero,
             double slope_at_inf);

  std::string name_;
  std::function<double(double)> f_;
  std::function<double(double)> f_log_;
  double at_zero_;
  double slope_at_inf_;
};

// All log-based divergences are reported in nats. value is nonnegative up
// to rounding and may be the +inf sentinel; it is never NaN. exact marks
// finite sums and closed forms, as opposed to quadrature or extrapolation.
struct DivergenceValue {
  std::string kind;
  double alpha = 0.0;  // meaningful when kind == "renyi"
  double value = 0.0;
  bool exact = true;
};

// Sum q_i f(p_i / q_i) with the conventions 0 f(0/0) = 0,
// q_i = 0 < p_i contributing p_i * slope_at_inf, and p_i = 0 < q_i
// contributing q_i * at_zero.
DivergenceValue f_div(const FiniteDist& p, const FiniteDist& q,
                      const FGenerator& gen);

// Order-alpha divergence; alpha within 1e-6 of 1 delegates to KL.
DivergenceValue renyi(const FiniteDist& p, const FiniteDist& q, double alpha);

double kl(const FiniteDist& p, const FiniteDist& q);

// lim_{a->0+} D_a(P||Q)/a via Richardson extrapolation over
// a in {1e-2, 1e-3, 1e-4}; the limit equals KL(Q||P). Throws when the
// extrapolation sequence does not stabilize.
DivergenceValue renyi_over_alpha_limit(const FiniteDist& p,
                                       const FiniteDist& q);

// Quadrature on the substituted domain u = F_q(x) in (0, 1), with the two
// clipped tail ranges recovered through v = F_p(x) so a p heavier than the
// reference is not undercounted.
DivergenceValue f_div_continuous(const ContinuousLaw& p, const ContinuousLaw& q,
                                 const FGenerator& gen, double abs_tol = 1e-10);
DivergenceValue renyi_continuous(const ContinuousLaw& p, const ContinuousLaw& q,
                                 double alpha, double abs_tol = 1e-10);

// Closed form between two Gaussians; +inf when the mixed variance
// (1-alpha) var_p + alpha var_q is not positive.
double renyi_gaussian(double mean_p, double var_p, double mean_q, double var_q,
                      double alpha);

struct DualBoundResult {
  double lambda = 0.0;
  double value = 0.0;
};

// Variational objective for D_alpha(P||Q)/alpha maximized over the scalar
// witness family h = lambda * r: a log grid plus local refinement. Always a
// lower bound; tight when log(p/q) is proportional to r up to a constant.
DualBoundResult renyi_dual_lower_bound(const FiniteDist& p, const FiniteDist& q,
                                       double alpha, const RewardMap& witness);

// Probability-level kernels shared by laws over values.
double kl_probs(std::span<const double> p, std::span<const double> q);
double f_div_probs(std::span<const double> p, std::span<const double> q,
                   const FGenerator& gen);
double renyi_probs(std::span<const double> p, std::span<const double> q,
                   double alpha);

}  // namespace alignbounds
