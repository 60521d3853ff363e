#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alignbounds/finite_dist.hpp"
#include "alignbounds/transport.hpp"

namespace alignbounds {

// Proxy and golden rewards on a shared support. eps is recomputed from the
// inputs, never trusted.
struct RewardPair {
  RewardMap proxy;
  RewardMap golden;
  double eps = 0.0;  // max_i |proxy_i - golden_i|
};

RewardPair make_reward_pair(RewardMap proxy, RewardMap golden);

// Exact two-sided check of the tilted transfer inequality
//   E_{pi_{b,r}} r* - E_base r*
//     <= (E_{pi_{b,r}} r - E_base r) - interpolation_term,
// where the interpolation term is (1/b) log E_{pi_{b,r*}}
// exp(b (r - r* - (E_base r - E_base r*))).
struct RlTransferReport {
  double beta = 0.0;
  double lhs = 0.0;  // golden improvement of the proxy-tilted policy
  double rhs = 0.0;
  double proxy_improvement = 0.0;
  double interpolation_term = 0.0;
  double kl_proxy_policy = 0.0;   // KL(pi_{b,r} || base)
  double kl_golden_policy = 0.0;  // KL(pi_{b,r*} || base)
  bool holds = false;
};

RlTransferReport rl_transfer_check(const FiniteDist& base,
                                   const RewardPair& pair, double beta);

// Under the hypothesis interpolation_term >= delta * KL(pi_{b,r*} || base),
// golden improvement <= sqrt(2 sigma2_ref KL(pi_{b,r} || base))
//                        - delta * KL(pi_{b,r*} || base).
// The hypothesis is verified numerically; when it fails the report is
// flagged and no bound is asserted.
struct RlTransferDeltaReport {
  double beta = 0.0;
  double delta = 0.0;
  bool hypothesis_holds = false;
  double max_valid_delta = 0.0;  // interpolation_term / KL(pi_{b,r*} || base)
  double golden_improvement = 0.0;
  double bound = 0.0;
  double sigma2_ref = 0.0;
  bool bound_holds = false;
};

RlTransferDeltaReport rl_transfer_delta_bound(const FiniteDist& base,
                                              const RewardPair& pair,
                                              double beta, double delta,
                                              std::optional<double> sigma2_ref = {});

double max_valid_delta(const FiniteDist& base, const RewardPair& pair,
                       double beta);

// Golden improvement of the proxy best-of-n policy against
// sqrt(2 sigma2_ref (log n - (n-1)/n)) + 2 eps tv_bound(n).
struct BonTransferReport {
  std::size_t n = 1;
  double golden_improvement = 0.0;
  double transport_term = 0.0;
  double tv_term = 0.0;
  double eps = 0.0;
  double bound = 0.0;
  bool holds = false;
};

BonTransferReport bon_transfer_bound(const FiniteDist& base,
                                     const RewardPair& pair, std::size_t n,
                                     std::optional<double> sigma2_ref = {});

// Proxy/golden improvement curves with their bounds along an optimization-
// pressure grid. Synthetic finite-alphabet analogue of reward-overfitting
// plots; emitted with a synthetic marker in CLI metadata.
struct OveroptRow {
  double control = 0.0;  // beta or n
  double kl = 0.0;
  double proxy_improvement = 0.0;
  double golden_improvement = 0.0;
  double proxy_bound = 0.0;
  double golden_bound = 0.0;
};

struct OveroptCurve {
  std::string control_kind;  // "beta" or "n"
  double sigma2_ref = 0.0;
  std::vector<OveroptRow> rows;
};

OveroptCurve overopt_curve_beta(const FiniteDist& base, const RewardPair& pair,
                                std::span<const double> betas,
                                std::optional<double> sigma2_ref = {});
OveroptCurve overopt_curve_n(const FiniteDist& base, const RewardPair& pair,
                             std::span<const std::size_t> ns,
                             std::optional<double> sigma2_ref = {});

}  // namespace alignbounds
