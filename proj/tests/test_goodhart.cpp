#include <cmath>
#include <cstdint>
#include <vector>

#include <stdexcept>

#include "doctest.h"

#include "alignbounds/bestofn.hpp"
#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/goodhart.hpp"
#include "alignbounds/rng.hpp"
#include "alignbounds/tilt.hpp"
#include "alignbounds/transport.hpp"

using namespace alignbounds;

namespace {

FiniteDist random_dist(RngStream& rng, std::size_t k) {
  std::vector<std::string> sup(k);
  std::vector<double> probs(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sup[i] = "s" + std::to_string(i);
    probs[i] = 0.05 + rng.next_double();
    total += probs[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    probs[i] /= total;
    acc += probs[i];
  }
  probs[k - 1] = 1.0 - acc;
  return FiniteDist(std::move(sup), std::move(probs));
}

RewardPair random_pair(RngStream& rng, std::size_t k) {
  std::vector<double> proxy(k), golden(k);
  for (std::size_t i = 0; i < k; ++i) {
    golden[i] = 4.0 * rng.next_double() - 2.0;
    proxy[i] = golden[i] + (rng.next_double() - 0.5);
  }
  return make_reward_pair(RewardMap(proxy), RewardMap(golden));
}

// Fixture shared by the transfer tests; proxy overrates the top atom.
const FiniteDist kBase({"a", "b", "c"}, {0.7, 0.2, 0.1});
const RewardPair kPair =
    make_reward_pair(RewardMap({0.0, 1.3, 3.0}), RewardMap({0.0, 1.0, 2.0}));

}  // namespace

TEST_SUITE_BEGIN("goodhart");

TEST_CASE("reward pair recomputes the gap") {
  const auto pair =
      make_reward_pair(RewardMap({0.0, 1.5}), RewardMap({0.2, 1.0}));
  CHECK(pair.eps == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(
      make_reward_pair(RewardMap({0.0}), RewardMap({0.0, 1.0})),
      std::invalid_argument);
}

TEST_CASE("transfer inequality on the fixture") {
  const auto rep = rl_transfer_check(kBase, kPair, 1.0);
  CHECK(rep.holds);
  CHECK(rep.lhs == doctest::Approx(0.980126871034).epsilon(1e-9));
  CHECK(rep.interpolation_term == doctest::Approx(0.39178275111).epsilon(1e-9));
  CHECK(rep.kl_proxy_policy == doctest::Approx(0.791381287476).epsilon(1e-9));
  CHECK(rep.kl_golden_policy == doctest::Approx(0.335233970655).epsilon(1e-9));
  CHECK(rep.rhs ==
        doctest::Approx(rep.proxy_improvement - rep.interpolation_term)
            .epsilon(1e-12));
  CHECK_THROWS_AS(rl_transfer_check(kBase, kPair, 0.0), std::invalid_argument);
}

TEST_CASE("transfer inequality holds on random pairs") {
  RngStream rng(RngSeed{606});
  for (int trial = 0; trial < 300; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const std::size_t k = 2 + static_cast<std::size_t>(child.next_u64() % 7);
    const auto base = random_dist(child, k);
    const auto pair = random_pair(child, k);
    const double beta = 0.1 + 2.9 * child.next_double();
    const auto rep = rl_transfer_check(base, pair, beta);
    CHECK(rep.holds);
    CHECK(rep.lhs <= rep.rhs + 1e-9);
  }
}

TEST_CASE("identical rewards give a zero interpolation term") {
  const auto same =
      make_reward_pair(RewardMap({0.0, 1.0, 2.0}), RewardMap({0.0, 1.0, 2.0}));
  CHECK(same.eps == 0.0);
  const auto rep = rl_transfer_check(kBase, same, 1.7);
  CHECK(rep.interpolation_term == 0.0);
  CHECK(rep.lhs == rep.proxy_improvement);
  CHECK(rep.rhs == rep.proxy_improvement);
  CHECK(rep.holds);
}

TEST_CASE("interpolation term limits in beta") {
  // Small beta: the term collapses to the base mean of the centered gap,
  // which is zero by construction.
  const auto small = rl_transfer_check(kBase, kPair, 1e-4);
  CHECK(std::fabs(small.interpolation_term) < 1e-3);
  // Large beta: (max over the support of r - c0) minus max golden reward.
  const double c0 =
      kBase.expectation(kPair.proxy) - kBase.expectation(kPair.golden);
  const double limit = 3.0 - c0 - 2.0;
  const auto large = rl_transfer_check(kBase, kPair, 200.0);
  CHECK(large.interpolation_term == doctest::Approx(limit).epsilon(1e-2));
}

TEST_CASE("delta hypothesis bound on the fixture") {
  const double dmax = max_valid_delta(kBase, kPair, 1.0);
  CHECK(dmax == doctest::Approx(1.1686845171).epsilon(1e-6));
  for (double delta : {0.0, 0.5, 1.0}) {
    const auto rep = rl_transfer_delta_bound(kBase, kPair, 1.0, delta);
    CHECK(rep.hypothesis_holds);
    CHECK(rep.bound_holds);
    CHECK(rep.golden_improvement <= rep.bound + 1e-9);
    CHECK(rep.max_valid_delta == doctest::Approx(dmax).epsilon(1e-12));
    // The bound is the proxy transport term minus the delta rebate.
    const double expected =
        std::sqrt(2.0 * rep.sigma2_ref * 0.791381287476) -
        delta * 0.335233970655;
    CHECK(rep.bound == doctest::Approx(expected).epsilon(1e-6));
  }
  const auto unmet = rl_transfer_delta_bound(kBase, kPair, 1.0, 1.5);
  CHECK_FALSE(unmet.hypothesis_holds);
}

TEST_CASE("delta bound accepts an explicit variance proxy") {
  const auto rep = rl_transfer_delta_bound(kBase, kPair, 1.0, 0.5, 2.0);
  CHECK(rep.sigma2_ref == 2.0);
  CHECK(rep.bound_holds);
  CHECK_THROWS_AS(rl_transfer_delta_bound(kBase, kPair, 1.0, 0.5, -1.0),
                  std::invalid_argument);
}

TEST_CASE("best-of-n transfer bound") {
  for (std::size_t n : {1, 2, 8, 64}) {
    const auto rep = bon_transfer_bound(kBase, kPair, n);
    CHECK(rep.holds);
    CHECK(rep.golden_improvement <= rep.bound + 1e-9);
    CHECK(rep.eps == kPair.eps);
    CHECK(rep.bound ==
          doctest::Approx(rep.transport_term + rep.tv_term).epsilon(1e-12));
  }
  // n = 1 is the identity policy: no improvement, and the budget is zero.
  const auto trivial = bon_transfer_bound(kBase, kPair, 1);
  CHECK(trivial.golden_improvement == 0.0);
  CHECK(trivial.transport_term == 0.0);
  CHECK(trivial.tv_term == 0.0);
}

TEST_CASE("zero reward gap collapses the transfer bound") {
  const auto same =
      make_reward_pair(RewardMap({0.0, 1.0, 2.0}), RewardMap({0.0, 1.0, 2.0}));
  const auto rep = bon_transfer_bound(kBase, same, 16);
  CHECK(rep.tv_term == 0.0);
  CHECK(rep.bound == rep.transport_term);
  CHECK(rep.holds);
}

TEST_CASE("transfer bounds hold on random pairs") {
  RngStream rng(RngSeed{909});
  for (int trial = 0; trial < 200; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const std::size_t k = 2 + static_cast<std::size_t>(child.next_u64() % 7);
    const auto base = random_dist(child, k);
    const auto pair = random_pair(child, k);
    const std::size_t n = 1 + static_cast<std::size_t>(child.next_u64() % 64);
    // Bounded rewards always admit the range-based variance proxy.
    const auto push = pushforward(base, pair.proxy);
    const double range = push.max() - push.min();
    const auto rep =
        bon_transfer_bound(base, pair, n, range * range / 4.0);
    CHECK(rep.holds);
  }
}

TEST_CASE("overoptimization curve along beta") {
  const auto base = FiniteDist({"safe", "clever", "gamed"}, {0.52, 0.45, 0.03});
  const auto pair =
      make_reward_pair(RewardMap({0.0, 2.0, 3.0}), RewardMap({0.0, 3.0, -1.0}));
  std::vector<double> betas;
  for (int i = 0; i <= 40; ++i) betas.push_back(0.1 * i);
  const auto curve = overopt_curve_beta(base, pair, betas);
  REQUIRE(curve.rows.size() == betas.size());
  CHECK(curve.control_kind == "beta");

  // beta = 0 rows are identically zero.
  CHECK(curve.rows[0].kl == 0.0);
  CHECK(curve.rows[0].proxy_improvement == 0.0);
  CHECK(curve.rows[0].proxy_bound == 0.0);
  CHECK(curve.rows[0].golden_bound == 0.0);

  double peak = -1e300;
  for (std::size_t i = 1; i < curve.rows.size(); ++i) {
    const auto& row = curve.rows[i];
    // KL grows with pressure; both bounds stay valid.
    CHECK(row.kl >= curve.rows[i - 1].kl - 1e-12);
    CHECK(row.proxy_improvement <= row.proxy_bound + 1e-9);
    CHECK(row.golden_improvement <= row.golden_bound + 1e-9);
    peak = std::max(peak, row.golden_improvement);
  }
  // The proxy keeps climbing while the golden reward peaks and collapses.
  const auto& last = curve.rows.back();
  CHECK(last.proxy_improvement > curve.rows[10].proxy_improvement);
  CHECK(peak > 0.5);
  CHECK(last.golden_improvement < 0.0);
  CHECK(peak - last.golden_improvement > 1.0);
}

TEST_CASE("identical rewards collapse the beta curve bounds") {
  const auto same =
      make_reward_pair(RewardMap({0.0, 1.0, 2.0}), RewardMap({0.0, 1.0, 2.0}));
  const std::vector<double> betas = {0.0, 0.5, 1.0, 2.0};
  const auto curve = overopt_curve_beta(kBase, same, betas);
  for (const auto& row : curve.rows) {
    CHECK(row.golden_bound == row.proxy_bound);
    CHECK(row.golden_improvement == row.proxy_improvement);
  }
}

TEST_CASE("overoptimization curve along n") {
  const auto base = FiniteDist({"safe", "clever", "gamed"}, {0.52, 0.45, 0.03});
  const auto pair =
      make_reward_pair(RewardMap({0.0, 2.0, 3.0}), RewardMap({0.0, 3.0, -1.0}));
  const std::vector<std::size_t> ns = {1, 2, 4, 8, 16, 32, 64};
  const auto curve = overopt_curve_n(base, pair, ns);
  REQUIRE(curve.rows.size() == ns.size());
  CHECK(curve.control_kind == "n");
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& row = curve.rows[i];
    CHECK(row.control == static_cast<double>(ns[i]));
    CHECK(row.proxy_improvement <= row.proxy_bound + 1e-9);
    CHECK(row.golden_improvement <= row.golden_bound + 1e-9);
    // The golden bound splits into the transport term plus the gap term.
    CHECK(row.golden_bound ==
          doctest::Approx(row.proxy_bound +
                          2.0 * pair.eps * f_bound_closed("tv", ns[i]))
              .epsilon(1e-12));
    if (i > 0) CHECK(row.kl >= curve.rows[i - 1].kl - 1e-12);
  }
  // The same collapse happens at n = 1: identity policy, zero everything.
  CHECK(curve.rows[0].kl == 0.0);
  CHECK(curve.rows[0].proxy_improvement == 0.0);
}

TEST_CASE("explicit variance proxy threads through the curves") {
  const std::vector<double> betas = {0.5, 1.0};
  const auto curve = overopt_curve_beta(kBase, kPair, betas, 2.5);
  CHECK(curve.sigma2_ref == 2.5);
  const std::vector<std::size_t> ns = {2, 4};
  const auto ncurve = overopt_curve_n(kBase, kPair, ns, 2.5);
  CHECK(ncurve.sigma2_ref == 2.5);
  // Proxy bounds scale with the variance: sqrt(2 sigma2 cap).
  CHECK(ncurve.rows[0].proxy_bound ==
        doctest::Approx(std::sqrt(2.0 * 2.5 * (std::log(2.0) - 0.5)))
            .epsilon(1e-12));
}

TEST_SUITE_END();
