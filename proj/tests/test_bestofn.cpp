#include <cmath>
#include <limits>
#include <vector>

#include <stdexcept>

#include "doctest.h"

#include "alignbounds/bestofn.hpp"
#include "alignbounds/continuous_law.hpp"
#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/rng.hpp"

using namespace alignbounds;

namespace {

// Direct enumeration of all k^n draws with ties split uniformly over the
// sample slots. Exponential in n; keep the sizes tiny.
std::vector<double> brute_force_law(const FiniteDist& base, const RewardMap& r,
                                    std::size_t n) {
  const std::size_t k = base.size();
  std::vector<double> law(k, 0.0);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    double prob = 1.0;
    for (auto i : idx) prob *= base.prob(i);
    double best = -std::numeric_limits<double>::infinity();
    for (auto i : idx) best = std::max(best, r[i]);
    std::size_t ties = 0;
    for (auto i : idx)
      if (r[i] == best) ++ties;
    for (auto i : idx)
      if (r[i] == best) law[i] += prob / static_cast<double>(ties);
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == k) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return law;
}

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

RewardMap random_reward(RngStream& rng, std::size_t k, bool force_ties) {
  std::vector<double> r(k);
  for (auto& x : r) {
    x = 4.0 * rng.next_double() - 2.0;
    // Coarse rounding makes reward collisions likely, exercising the
    // equality-class path.
    if (force_ties) x = std::round(x * 2.0) / 2.0;
  }
  return RewardMap(r);
}

}  // namespace

TEST_SUITE_BEGIN("bestofn");

TEST_CASE("uniform three-point law at n = 2") {
  const auto base = FiniteDist::uniform({"a", "b", "c"});
  const RewardMap r({0.0, 1.0, 2.0});
  const auto policy = bestofn_exact(base, r, 2);
  CHECK(policy.law.prob(0) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(policy.law.prob(1) == doctest::Approx(3.0 / 9.0).epsilon(1e-14));
  CHECK(policy.law.prob(2) == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(kl(policy.law, base) ==
        doctest::Approx(0.16172398112909378).epsilon(1e-13));
  CHECK(improvement(policy) ==
        doctest::Approx(13.0 / 9.0 - 1.0).epsilon(1e-13));
}

TEST_CASE("n = 1 returns the base law unchanged") {
  const auto base = FiniteDist({"a", "b"}, {0.3, 0.7});
  const RewardMap r({1.0, 0.0});
  const auto policy = bestofn_exact(base, r, 1);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(policy.law.prob(i) == base.prob(i));
  CHECK(kl(policy.law, base) == 0.0);
  CHECK(bestofn_kl(base, r, 1).achieved_value == 0.0);
}

TEST_CASE("matches direct enumeration on small instances") {
  RngStream rng(RngSeed{2024});
  std::uint64_t task = 0;
  for (std::size_t k = 2; k <= 5; ++k) {
    for (std::size_t n = 1; n <= 4; ++n) {
      for (bool ties : {false, true}) {
        auto child = rng.split(task++);
        const auto base = random_dist(child, k);
        const auto r = random_reward(child, k, ties);
        const auto policy = bestofn_exact(base, r, n);
        const auto oracle = brute_force_law(base, r, n);
        for (std::size_t i = 0; i < k; ++i)
          CHECK(policy.law.prob(i) ==
                doctest::Approx(oracle[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("constant rewards leave the law untouched") {
  const auto base = FiniteDist({"a", "b", "c"}, {0.2, 0.5, 0.3});
  const RewardMap r({1.5, 1.5, 1.5});
  for (std::size_t n : {2, 5, 100}) {
    const auto policy = bestofn_exact(base, r, n);
    for (std::size_t i = 0; i < base.size(); ++i)
      CHECK(policy.law.prob(i) ==
            doctest::Approx(base.prob(i)).epsilon(1e-14));
  }
}

TEST_CASE("zero-mass atoms stay at zero") {
  const auto base = FiniteDist({"a", "b", "dead"}, {0.5, 0.5, 0.0});
  const RewardMap r({0.0, 1.0, 5.0});
  const auto policy = bestofn_exact(base, r, 3);
  CHECK(policy.law.prob(2) == 0.0);
  const double total = policy.law.prob(0) + policy.law.prob(1);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  // The dead atom carries the top reward but no mass, so it must not leak
  // into the divergence either.
  CHECK(std::isfinite(kl(policy.law, base)));
}

TEST_CASE("kl never exceeds the reference cap") {
  RngStream rng(RngSeed{77});
  for (int trial = 0; trial < 200; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const std::size_t k = 2 + static_cast<std::size_t>(child.next_u64() % 15);
    const std::size_t n = 1 + static_cast<std::size_t>(child.next_u64() % 64);
    const auto base = random_dist(child, k);
    const auto r = random_reward(child, k, (trial % 3) == 0);
    const auto report = bestofn_kl(base, r, n);
    CHECK(report.achieved_value <= report.bound_value + 1e-9);
    CHECK(report.slack >= -1e-9);
    CHECK(report.bound_value == exp_reference_kl(n));
  }
}

TEST_CASE("improvement is nonnegative and nondecreasing in n") {
  RngStream rng(RngSeed{99});
  for (int trial = 0; trial < 30; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const auto base = random_dist(child, 6);
    const auto r = random_reward(child, 6, trial % 2 == 0);
    double prev = 0.0;
    for (std::size_t n = 1; n <= 8; ++n) {
      const double imp = improvement(bestofn_exact(base, r, n));
      CHECK(imp >= prev - 1e-12);
      prev = imp;
    }
  }
}

TEST_CASE("reference cap values") {
  CHECK(exp_reference_kl(1) == 0.0);
  CHECK(exp_reference_kl(2) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-15));
  CHECK(exp_reference_kl(10) ==
        doctest::Approx(std::log(10.0) - 0.9).epsilon(1e-15));
  CHECK_THROWS_AS(exp_reference_kl(0), std::invalid_argument);
}

TEST_CASE("closed bound values at n = 2") {
  CHECK(f_bound_closed("kl", 2) ==
        doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-15));
  CHECK(f_bound_closed("chi2", 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(f_bound_closed("tv", 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f_bound_closed("hellinger", 2) ==
        doctest::Approx(2.0 * std::pow(1.0 - std::sqrt(2.0), 2) / 3.0)
            .epsilon(1e-15));
  CHECK(f_bound_closed("fkl", 2) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
  for (const char* name : {"kl", "chi2", "tv", "hellinger", "fkl"})
    CHECK(f_bound_closed(name, 1) == 0.0);
  CHECK_THROWS_AS(f_bound_closed("nonsense", 2), std::invalid_argument);
  CHECK_THROWS_AS(f_bound_closed("nonsense", 1), std::invalid_argument);
}

TEST_CASE("generic quadrature bound matches the closed forms") {
  for (const char* name : {"kl", "chi2", "tv", "hellinger", "fkl"}) {
    const auto gen = FGenerator::by_name(name);
    for (std::size_t n : {2, 3, 10, 50}) {
      const double closed = f_bound_closed(name, n);
      const double quad = f_bound_generic(gen, n);
      CHECK(std::fabs(closed - quad) <= 1e-8);
    }
  }
}

TEST_CASE("renyi bound closed form") {
  // alpha -> 1 recovers the KL cap, including the snapping window.
  for (std::size_t n : {2, 7, 31}) {
    CHECK(renyi_bound_closed(1.0, n) == exp_reference_kl(n));
    CHECK(renyi_bound_closed(1.0 + 5e-7, n) == exp_reference_kl(n));
    // Nondecreasing in alpha.
    double prev = 0.0;
    for (double alpha : {0.25, 0.5, 0.9, 1.0, 2.0, 4.0}) {
      const double v = renyi_bound_closed(alpha, n);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
  CHECK(renyi_bound_closed(2.0, 1) == 0.0);
  CHECK_THROWS_AS(renyi_bound_closed(-1.0, 2), std::invalid_argument);
  // Independent quadrature route through the continuous reference pair.
  const double quad =
      renyi_continuous(exp_order_stat_law(4), exponential_law(), 0.5).value;
  CHECK(std::fabs(renyi_bound_closed(0.5, 4) - quad) <= 1e-7);
}

TEST_CASE("renyi bound dominates the achieved divergence") {
  RngStream rng(RngSeed{123});
  for (int trial = 0; trial < 100; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const auto base = random_dist(child, 5);
    const auto r = random_reward(child, 5, trial % 2 == 0);
    const std::size_t n = 2 + static_cast<std::size_t>(child.next_u64() % 30);
    const auto policy = bestofn_exact(base, r, n);
    for (double alpha : {0.5, 2.0, 4.0}) {
      const double achieved = renyi(policy.law, base, alpha).value;
      CHECK(achieved <= renyi_bound_closed(alpha, n) + 1e-9);
    }
  }
}

TEST_CASE("best-of-n dominates the base reward law") {
  RngStream rng(RngSeed{321});
  for (int trial = 0; trial < 50; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const auto base = random_dist(child, 6);
    const auto r = random_reward(child, 6, trial % 2 == 0);
    const std::size_t n = 2 + static_cast<std::size_t>(child.next_u64() % 16);
    const auto report = dominance_check(base, r, n);
    CHECK(report.dominates);
    CHECK_FALSE(report.has_violation);
    CHECK(report.mean_gap >= -1e-12);
    CHECK(report.min_tvar_gap >= -1e-12);
  }
}

TEST_CASE("policy gap to the tilted family") {
  // Zero budget pairs best-of-1 with the zero tilt; both are the base law.
  const auto base = FiniteDist({"a", "b", "c"}, {0.75, 0.2, 0.05});
  const RewardMap r({0.0, 1.0, 2.5});
  const auto at_zero = bnrl_gap(base, r, 0.0);
  CHECK(at_zero.n == 1);
  CHECK(at_zero.achieved_value == 0.0);
  CHECK(at_zero.bound_value == 0.0);

  // Feasible budgets: max feasible KL here is -log 0.05, comfortably above.
  for (double delta : {0.5, 1.0, 2.0}) {
    const auto report = bnrl_gap(base, r, delta);
    CHECK(report.n == static_cast<std::size_t>(std::ceil(std::exp(delta))));
    CHECK(report.slack >= 0.0);
    CHECK(report.achieved_value >= 0.0);
  }

  // A uniform binary instance cannot reach KL 1: the top class holds half
  // the mass, so the constraint is infeasible.
  const auto binary = FiniteDist({"lo", "hi"}, {0.5, 0.5});
  CHECK_THROWS_AS(bnrl_gap(binary, RewardMap({-1.0, 1.0}), 1.0),
                  std::runtime_error);
  CHECK_THROWS_AS(bnrl_gap(base, r, -0.5), std::invalid_argument);
}

TEST_SUITE_END();
