#pragma once

#include <cstddef>
#include <vector>

#include "alignbounds/finite_dist.hpp"

namespace alignbounds {

// Exponentially tilted policy: law_i proportional to base_i * exp(beta r_i).
// Computed with max-subtracted logits, so any finite beta is safe.
struct TiltedPolicy {
  FiniteDist base;
  RewardMap reward;
  double beta = 0.0;
  FiniteDist law;
  double log_partition = 0.0;  // log E_base exp(beta r)
};

TiltedPolicy tilt(const FiniteDist& base, const RewardMap& reward, double beta);

double improvement(const TiltedPolicy& policy);
double policy_kl(const TiltedPolicy& policy);  // KL(law || base)

// Supremum of KL(tilted || base) over beta >= 0: -log of the base mass on
// the top reward class.
double max_feasible_kl(const FiniteDist& base, const RewardMap& reward);

struct ConstraintSolveResult {
  double delta = 0.0;
  double beta = 0.0;
  double lambda = 0.0;  // 1 / beta; +inf when beta = 0
  double residual = 0.0;
  int iterations = 0;
};

// Finds beta >= 0 with KL(tilted || base) = delta by monotone bisection.
// Residual tolerance 1e-9 * max(1, delta). Throws "infeasible constraint"
// when delta >= max_feasible_kl.
ConstraintSolveResult solve_lambda(const FiniteDist& base,
                                   const RewardMap& reward, double delta);

// One prompt of a weighted mixture. Weights must be positive and sum to 1
// within 1e-12.
struct PromptInstance {
  double weight = 1.0;
  FiniteDist base;
  RewardMap reward;
};

// Shared-beta solve for the weighted-average KL constraint
// sum_x w_x KL(tilted_x || base_x) = delta.
ConstraintSolveResult solve_lambda_avg(const std::vector<PromptInstance>& prompts,
                                       double delta);

struct GaussianTiltResult {
  double improvement = 0.0;
  double kl = 0.0;
};

// Tilting N(0, variance) by beta * r with r the identity shifts the mean by
// beta * variance at KL cost beta^2 * variance / 2; the transport bound
// sqrt(2 * variance * KL) is met with equality.
GaussianTiltResult gaussian_tilt_oracle(double variance, double beta);

}  // namespace alignbounds
