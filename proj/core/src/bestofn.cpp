#include "alignbounds/bestofn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "alignbounds/divergence.hpp"
#include "alignbounds/quadrature.hpp"
#include "alignbounds/tilt.hpp"

namespace alignbounds {

namespace {

// x^n with the log-domain route below 1e-3, where pow underflows sooner
// than exp(n log x) loses accuracy for the n in play here.
double pow_n(double x, double n) {
  if (x <= 0.0) return 0.0;
  if (x < 1e-3) return std::exp(n * std::log(x));
  return std::pow(x, n);
}

// F^n - G^n for 0 <= G <= F, written as F^n * (1 - (G/F)^n) so nearby
// cumulative masses do not cancel.
double power_gap(double f_hi, double g_lo, double n) {
  const double fn = pow_n(f_hi, n);
  if (g_lo <= 0.0) return fn;
  return fn * (-std::expm1(n * (std::log(g_lo) - std::log(f_hi))));
}

}  // namespace

BestOfNPolicy bestofn_exact(const FiniteDist& base, const RewardMap& reward,
                            std::size_t n) {
  if (n == 0) throw std::invalid_argument("best-of-n requires n >= 1");
  if (reward.size() != base.size())
    throw std::invalid_argument("reward/support mismatch");
  // n = 1 is the identity policy; returning the base law unchanged keeps
  // KL(law, base) exactly zero instead of within log/expm1 roundoff of it.
  if (n == 1) return {1, base, reward, base};

  const std::size_t k = base.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return reward[a] < reward[b];
                   });

  // Total recomputed in class order so the top cumulative ratio is exactly 1.
  double total = 0.0;
  for (std::size_t idx : order) total += base.prob(idx);

  const double nn = static_cast<double>(n);
  std::vector<double> law(k, 0.0);
  double cum_below = 0.0;
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    double class_mass = 0.0;
    while (j < k && reward[order[j]] == reward[order[i]]) {
      class_mass += base.prob(order[j]);
      ++j;
    }
    if (class_mass > 0.0) {
      const double f_hi = (cum_below + class_mass) / total;
      const double g_lo = cum_below / total;
      const double selected = power_gap(f_hi, g_lo, nn);
      for (std::size_t t = i; t < j; ++t)
        law[order[t]] = base.prob(order[t]) / class_mass * selected;
      cum_below += class_mass;
    }
    i = j;
  }

  return {n, base, reward, FiniteDist(base.support(), std::move(law))};
}

double improvement(const BestOfNPolicy& policy) {
  return policy.law.expectation(policy.reward) -
         policy.base.expectation(policy.reward);
}

double exp_reference_kl(std::size_t n) {
  if (n == 0) throw std::invalid_argument("best-of-n requires n >= 1");
  const double nn = static_cast<double>(n);
  return std::log(nn) - (nn - 1.0) / nn;
}

BoundReport bestofn_kl(const FiniteDist& base, const RewardMap& reward,
                       std::size_t n) {
  const BestOfNPolicy policy = bestofn_exact(base, reward, n);
  const double achieved = kl(policy.law, base);
  const double bound = exp_reference_kl(n);
  return {"kl", n, achieved, bound, bound - achieved};
}

double f_bound_generic(const FGenerator& gen, std::size_t n, double abs_tol) {
  if (n == 0) throw std::invalid_argument("best-of-n requires n >= 1");
  const double nn = static_cast<double>(n);
  // The density ratio n u^{n-1} underflows near u = 0 long before its
  // f-image stops mattering (the forward-KL tail), so the generator is fed
  // the exact log ratio instead.
  auto integrand = [&](double u) {
    const double uc = std::min(std::max(u, 1e-15), 1.0);
    return gen.eval_log(std::log(nn) + (nn - 1.0) * std::log(uc));
  };
  return integrate_or_throw(integrand, 0.0, 1.0, abs_tol, 60,
                            "best-of-n f bound");
}

double f_bound_closed(const std::string& name, std::size_t n) {
  if (n == 0) throw std::invalid_argument("best-of-n requires n >= 1");
  const double nn = static_cast<double>(n);
  if (n == 1) {
    FGenerator::by_name(name);  // still reject unknown names
    return 0.0;
  }
  if (name == "kl") return std::log(nn) - (nn - 1.0) / nn;
  if (name == "chi2") return (nn - 1.0) * (nn - 1.0) / (2.0 * nn - 1.0);
  if (name == "tv")
    return std::pow(1.0 / nn, 1.0 / (nn - 1.0)) -
           std::pow(1.0 / nn, nn / (nn - 1.0));
  if (name == "hellinger") {
    const double s = 1.0 - std::sqrt(nn);
    return 2.0 * s * s / (nn + 1.0);
  }
  if (name == "fkl" || name == "forward_kl") return nn - 1.0 - std::log(nn);
  throw std::invalid_argument("unknown divergence generator: " + name);
}

double renyi_bound_closed(double alpha, std::size_t n) {
  if (n == 0) throw std::invalid_argument("best-of-n requires n >= 1");
  if (!std::isfinite(alpha) || alpha <= 0.0)
    throw std::invalid_argument("alpha must be positive");
  if (n == 1) return 0.0;
  const double nn = static_cast<double>(n);
  if (std::fabs(alpha - 1.0) <= 1e-6) return exp_reference_kl(n);
  return (alpha * std::log(nn) - std::log(alpha * (nn - 1.0) + 1.0)) /
         (alpha - 1.0);
}

DominanceReport dominance_check(const FiniteDist& base, const RewardMap& reward,
                                std::size_t n) {
  const BestOfNPolicy policy = bestofn_exact(base, reward, n);
  const ScalarDist before = pushforward(base, reward);
  const ScalarDist after = pushforward(policy.law, reward);

  DominanceReport report;
  report.dominates = true;
  report.mean_gap = after.mean() - before.mean();

  // Jump levels of either CDF; the quantile order must hold at each.
  std::vector<double> levels;
  auto collect = [&levels](const ScalarDist& d) {
    double c = 0.0;
    for (double p : d.probs()) {
      c += p;
      levels.push_back(std::min(c, 1.0));
    }
  };
  collect(before);
  collect(after);
  std::sort(levels.begin(), levels.end());
  for (double t : levels) {
    if (!(t > 0.0)) continue;
    if (after.quantile(t) < before.quantile(t)) {
      report.dominates = false;
      report.has_violation = true;
      report.first_violation_t = t;
      break;
    }
  }

  report.min_tvar_gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 20; ++k) {
    const double p = static_cast<double>(k) / 20.0;
    report.min_tvar_gap =
        std::min(report.min_tvar_gap, after.tvar(p) - before.tvar(p));
  }
  if (report.min_tvar_gap < -1e-12 || report.mean_gap < -1e-12)
    report.dominates = false;
  return report;
}

BoundReport bnrl_gap(const FiniteDist& base, const RewardMap& reward,
                     double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("delta must be finite and nonnegative");
  const auto n = static_cast<std::size_t>(std::ceil(std::exp(delta)));
  const ConstraintSolveResult solved = solve_lambda(base, reward, delta);
  const TiltedPolicy constrained = tilt(base, reward, solved.beta);
  const BestOfNPolicy policy = bestofn_exact(base, reward, n);
  const double achieved = kl(policy.law, constrained.law);
  const double m = reward.max_abs();
  const double bound = std::sqrt(2.0 * M_PI) * m * solved.beta *
                       std::expm1(2.0 * m * solved.beta) *
                       std::exp(-delta / 2.0);
  return {"bnrl_gap", n, achieved, bound, bound - achieved};
}

}  // namespace alignbounds
