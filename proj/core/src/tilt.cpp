#include "alignbounds/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "alignbounds/divergence.hpp"

namespace alignbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double weighted_max_feasible(const std::vector<PromptInstance>& prompts) {
  double acc = 0.0;
  for (const auto& pr : prompts)
    acc += pr.weight * max_feasible_kl(pr.base, pr.reward);
  return acc;
}

struct SolveCurve {
  // Averaged KL(tilted || base) as a function of beta; nondecreasing.
  std::function<double(double)> kl_of;
  double delta;
};

ConstraintSolveResult bisect_constraint(const SolveCurve& curve) {
  const double delta = curve.delta;
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("delta must be finite and nonnegative");
  if (delta == 0.0) return {0.0, 0.0, kInf, 0.0, 0};

  const double tol = 1e-9 * std::max(1.0, delta);
  double lo = 0.0;
  double hi = 1.0;
  int iters = 0;
  while (curve.kl_of(hi) < delta) {
    lo = hi;
    hi *= 2.0;
    if (++iters > 80)
      throw std::runtime_error("constraint bracket did not close");
  }
  double beta = hi;
  double achieved = curve.kl_of(hi);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double k = curve.kl_of(mid);
    ++iters;
    if (std::fabs(k - delta) <= tol) {
      beta = mid;
      achieved = k;
      break;
    }
    if (k < delta) {
      lo = mid;
    } else {
      hi = mid;
      beta = mid;
      achieved = k;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  const double residual = std::fabs(achieved - delta);
  if (residual > tol)
    throw std::runtime_error("constraint solve did not reach tolerance");
  return {delta, beta, 1.0 / beta, residual, iters};
}

}  // namespace

TiltedPolicy tilt(const FiniteDist& base, const RewardMap& reward,
                  double beta) {
  if (reward.size() != base.size())
    throw std::invalid_argument("reward/support mismatch");
  if (!std::isfinite(beta))
    throw std::invalid_argument("beta must be finite");
  // Zero tilt is the identity policy; bypassing the softmax keeps the law
  // bit-equal to the base instead of within exp/log roundoff of it.
  if (beta == 0.0) return {base, reward, 0.0, base, 0.0};

  const std::size_t k = base.size();
  std::vector<double> logits(k, -kInf);
  double max_logit = -kInf;
  for (std::size_t i = 0; i < k; ++i) {
    if (base.prob(i) <= 0.0) continue;
    logits[i] = std::log(base.prob(i)) + beta * reward[i];
    max_logit = std::max(max_logit, logits[i]);
  }
  if (!std::isfinite(max_logit))
    throw std::invalid_argument("base distribution has no mass");

  std::vector<double> weights(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (logits[i] == -kInf) continue;
    weights[i] = std::exp(logits[i] - max_logit);
  }
  const double z = detail::stable_sum(weights);
  std::vector<double> law(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) law[i] = weights[i] / z;

  TiltedPolicy policy{base, reward, beta,
                      FiniteDist(base.support(), std::move(law)),
                      max_logit + std::log(z)};
  return policy;
}

double improvement(const TiltedPolicy& policy) {
  return policy.law.expectation(policy.reward) -
         policy.base.expectation(policy.reward);
}

double policy_kl(const TiltedPolicy& policy) {
  return kl(policy.law, policy.base);
}

double max_feasible_kl(const FiniteDist& base, const RewardMap& reward) {
  if (reward.size() != base.size())
    throw std::invalid_argument("reward/support mismatch");
  double top = -kInf;
  for (std::size_t i = 0; i < base.size(); ++i)
    if (base.prob(i) > 0.0) top = std::max(top, reward[i]);
  double mass = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i)
    if (base.prob(i) > 0.0 && reward[i] == top) mass += base.prob(i);
  return -std::log(mass);
}

ConstraintSolveResult solve_lambda(const FiniteDist& base,
                                   const RewardMap& reward, double delta) {
  const double kl_max = max_feasible_kl(base, reward);
  if (delta > 0.0 && delta >= kl_max)
    throw std::runtime_error(
        "infeasible constraint: delta >= max feasible KL");
  SolveCurve curve{
      [&](double beta) { return policy_kl(tilt(base, reward, beta)); }, delta};
  return bisect_constraint(curve);
}

ConstraintSolveResult solve_lambda_avg(
    const std::vector<PromptInstance>& prompts, double delta) {
  if (prompts.empty()) throw std::invalid_argument("no prompts given");
  double wsum = 0.0;
  for (const auto& pr : prompts) {
    if (!(pr.weight > 0.0)) throw std::invalid_argument("weights must be positive");
    wsum += pr.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("prompt weights must sum to 1 within 1e-12");
  const double kl_max = weighted_max_feasible(prompts);
  if (delta > 0.0 && delta >= kl_max)
    throw std::runtime_error(
        "infeasible constraint: delta >= max feasible KL");
  SolveCurve curve{[&](double beta) {
                     double acc = 0.0;
                     for (const auto& pr : prompts)
                       acc += pr.weight *
                              policy_kl(tilt(pr.base, pr.reward, beta));
                     return acc;
                   },
                   delta};
  return bisect_constraint(curve);
}

GaussianTiltResult gaussian_tilt_oracle(double variance, double beta) {
  if (!(variance > 0.0)) throw std::invalid_argument("variance must be positive");
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  return {beta * variance, beta * beta * variance / 2.0};
}

}  // namespace alignbounds
