#pragma once

#include <cstddef>
#include <string>

#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/tilt.hpp"

namespace alignbounds {

// Exact law of selecting the highest-reward draw out of n iid samples from
// base, with ties between samples broken uniformly over sample indices. On
// a reward-equality class C with mass P and inclusive cumulative mass F,
// each member y receives (p_y / P) * (F^n - (F - P)^n).
struct BestOfNPolicy {
  std::size_t n = 1;
  FiniteDist base;
  RewardMap reward;
  FiniteDist law;
};

BestOfNPolicy bestofn_exact(const FiniteDist& base, const RewardMap& reward,
                            std::size_t n);

double improvement(const BestOfNPolicy& policy);

struct BoundReport {
  std::string name;
  std::size_t n = 1;
  double achieved_value = 0.0;
  double bound_value = 0.0;
  double slack = 0.0;  // bound_value - achieved_value
};

// Exact KL(law || base) against the reference cap log n - (n-1)/n.
BoundReport bestofn_kl(const FiniteDist& base, const RewardMap& reward,
                       std::size_t n);

// KL between the max of n iid Exp(1) draws and Exp(1): log n - (n-1)/n.
double exp_reference_kl(std::size_t n);

// Upper bound on D_f(best-of-n || base) for any base: the integral of
// f(n u^{n-1}) over u in (0, 1), by adaptive quadrature.
double f_bound_generic(const FGenerator& gen, std::size_t n,
                       double abs_tol = 1e-10);

// Closed forms of the same integral for the named generators.
double f_bound_closed(const std::string& name, std::size_t n);

// (alpha log n - log(alpha (n-1) + 1)) / (alpha - 1); alpha within 1e-6 of
// 1 takes the KL limit.
double renyi_bound_closed(double alpha, std::size_t n);

struct DominanceReport {
  bool dominates = false;
  bool has_violation = false;
  double first_violation_t = 0.0;  // quantile level of the first failure
  double mean_gap = 0.0;           // E_law r - E_base r
  double min_tvar_gap = 0.0;       // min over the p grid of tvar gaps
};

// First-order stochastic dominance of the best-of-n reward law over the
// base reward law: quantile comparison on every jump level, a TVAR grid,
// and the mean gap.
DominanceReport dominance_check(const FiniteDist& base, const RewardMap& reward,
                                std::size_t n);

// Pairs best-of-ceil(exp(delta)) with the KL-constrained tilted policy at
// the same budget and bounds their exact KL gap by
// sqrt(2 pi) * M * beta * (exp(2 M beta) - 1) * exp(-delta / 2),
// where M = max |r| and beta = 1 / lambda_delta.
BoundReport bnrl_gap(const FiniteDist& base, const RewardMap& reward,
                     double delta);

}  // namespace alignbounds
