#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alignbounds/bestofn.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/rng.hpp"
#include "alignbounds/tilt.hpp"

namespace alignbounds {

struct TailModel {
  enum class Kind { subgauss, subgamma };
  Kind kind = Kind::subgauss;
  double sigma2 = 0.0;
  double scale = 0.0;  // subgamma only

  static TailModel subgauss(double sigma2) {
    return {Kind::subgauss, sigma2, 0.0};
  }
  static TailModel subgamma(double sigma2, double scale) {
    return {Kind::subgamma, sigma2, scale};
  }
};

// Grid evaluation of psi(lambda) = log E exp(lambda (X - EX)) against the
// model envelope. subgauss checks lambda^2 sigma2 / 2 on the whole grid;
// subgamma checks lambda^2 sigma2 / (2 (1 - scale lambda)) on the right
// tail 0 < lambda < 1/scale (mirrored to |lambda| when two_sided), grid
// points outside that range are skipped and counted.
struct TailCertificate {
  TailModel model;
  double max_violation = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  bool passed = false;
};

// [-20, 20] with 4001 linear points, log-refined near zero.
const std::vector<double>& default_lambda_grid();

TailCertificate certify_tail(const ScalarDist& dist, TailModel model,
                             std::span<const double> grid = {},
                             bool two_sided = false);
TailCertificate certify_tail(const std::function<double(double)>& log_mgf,
                             TailModel model, std::span<const double> grid = {},
                             bool two_sided = false);

// Smallest sigma2 whose subgauss certificate passes on the grid, found by
// bisection; a grid-limited infimum.
double min_subgauss_sigma2(const ScalarDist& dist,
                           std::span<const double> grid = {});
double min_subgauss_sigma2(const std::function<double(double)>& log_mgf,
                           std::span<const double> grid = {});

// sqrt(2 sigma2 kl) for subgauss; sqrt(2 sigma2 kl) + scale * kl for
// subgamma.
double transport_bound(double kl, TailModel model);

// Looser comparison bound via the sup norm of the reward; kept only to
// contrast with the variance-sensitive route above.
double pinsker_bound(double reward_sup_norm, double kl);

// Chain improvement <= sqrt(2 sigma2 KL) <= sqrt(2 sigma2 cap) for a policy
// with KL budget cap (best-of-n: log n - (n-1)/n; tilted: the constraint
// delta, or the achieved KL when unconstrained). model defaults to
// subgauss(min_subgauss_sigma2); the certificate must pass.
struct Corollary1Report {
  std::string policy_name;
  double improvement = 0.0;
  double kl = 0.0;
  double cap = 0.0;
  double sigma2 = 0.0;
  double kl_bound = 0.0;
  double cap_bound = 0.0;
  bool chain_holds = false;
};

Corollary1Report check_corollary1(const TiltedPolicy& policy,
                                  std::optional<TailModel> model = {},
                                  std::optional<double> delta = {});
Corollary1Report check_corollary1(const BestOfNPolicy& policy,
                                  std::optional<TailModel> model = {});

// Bound sqrt(2 ((1-alpha) sigma2_pi + alpha sigma2_ref) D_alpha / alpha)
// minimized over an alpha grid in (0, 1) together with both endpoint
// limits: alpha -> 1 gives sqrt(2 sigma2_ref KL(pi||base)), alpha -> 0
// gives sqrt(2 sigma2_pi KL(base||pi)).
struct TailAdaptivePoint {
  double alpha = 0.0;
  double d_alpha = 0.0;
  double bound = 0.0;
  bool finite = true;
};

struct TailAdaptiveResult {
  std::vector<TailAdaptivePoint> grid;
  double best_alpha = 1.0;
  double best_bound = 0.0;
  double endpoint_alpha1 = 0.0;  // KL(pi || base) route
  double endpoint_alpha0 = 0.0;  // KL(base || pi) route
  double improvement = 0.0;
};

std::span<const double> default_alpha_grid();

TailAdaptiveResult tail_adaptive_bound(const FiniteDist& pi,
                                       const FiniteDist& base,
                                       const RewardMap& reward,
                                       double sigma2_pi, double sigma2_ref,
                                       std::span<const double> alpha_grid = {});

// Same bound driven by a closed-form alpha -> D_alpha map, for laws given
// analytically.
TailAdaptiveResult tail_adaptive_bound_fn(
    const std::function<double(double)>& d_alpha_fn, double kl_forward,
    double kl_reverse, double sigma2_pi, double sigma2_ref,
    std::span<const double> alpha_grid = {});

// Monte Carlo check of the m-sample high-probability transfer bound at
// order beta > 1: threshold sqrt(2 sigma2_ref KL) + (D_beta - KL)/beta
// + 2 t0 versus failure mass exp(-m t0^2 / (2 sigma2_ref)) +
// exp(-m (beta-1) t0). Trials run on disjoint substreams, so the count is
// identical for any worker budget.
struct HighProbResult {
  double threshold = 0.0;
  double kl = 0.0;
  double d_beta = 0.0;
  double sigma2_ref = 0.0;
  std::size_t violations = 0;
  std::size_t trials = 0;
  double empirical_rate = 0.0;
  double theoretical_rate = 0.0;
};

HighProbResult high_prob_trial(const FiniteDist& base, const RewardMap& reward,
                               double beta, std::size_t m, double t0,
                               std::size_t trials, RngSeed seed,
                               std::optional<double> sigma2_ref = {});

}  // namespace alignbounds
