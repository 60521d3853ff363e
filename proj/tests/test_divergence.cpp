#include <cmath>
#include <vector>

#include <stdexcept>

#include "doctest.h"

#include "alignbounds/continuous_law.hpp"
#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/rng.hpp"
#include "alignbounds/tilt.hpp"

using namespace alignbounds;

namespace {

const FiniteDist kP({"a", "b"}, {0.75, 0.25});
const FiniteDist kQ({"a", "b"}, {0.5, 0.5});

// Random pair on a shared support; mass gaps get folded into the last atom
// so the 1e-12 budget always holds.
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

}  // namespace

TEST_SUITE_BEGIN("divergence");

TEST_CASE("binary closed forms") {
  // Two-line oracles, written out rather than shared with the library.
  const double kl_pq = 0.75 * std::log(0.75 / 0.5) + 0.25 * std::log(0.25 / 0.5);
  const double kl_qp = 0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25);
  CHECK(kl(kP, kQ) == doctest::Approx(kl_pq).epsilon(1e-14));
  CHECK(kl(kQ, kP) == doctest::Approx(kl_qp).epsilon(1e-14));
  CHECK(kl(kP, kQ) == doctest::Approx(0.13081203594113697).epsilon(1e-13));
  CHECK(kl(kQ, kP) == doctest::Approx(0.14384103622589042).epsilon(1e-13));

  CHECK(f_div(kP, kQ, FGenerator::chi2()).value ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f_div(kP, kQ, FGenerator::tv()).value ==
        doctest::Approx(0.25).epsilon(1e-14));
  const double hell = 0.5 * std::pow(1.0 - std::sqrt(1.5), 2) +
                      0.5 * std::pow(1.0 - std::sqrt(0.5), 2);
  CHECK(f_div(kP, kQ, FGenerator::hellinger()).value ==
        doctest::Approx(hell).epsilon(1e-14));
  CHECK(f_div(kP, kQ, FGenerator::forward_kl()).value ==
        doctest::Approx(kl_qp).epsilon(1e-14));

  const double renyi2 = std::log(0.75 * 0.75 / 0.5 + 0.25 * 0.25 / 0.5);
  CHECK(renyi(kP, kQ, 2.0).value == doctest::Approx(renyi2).epsilon(1e-14));
}

TEST_CASE("kl and f_div agree through the generator route") {
  const auto v = f_div(kP, kQ, FGenerator::kl());
  CHECK(v.value == doctest::Approx(kl(kP, kQ)).epsilon(1e-14));
  CHECK(v.exact);
  CHECK(v.kind == "kl");
}

TEST_CASE("support mismatch is rejected") {
  const FiniteDist other({"x", "y"}, {0.5, 0.5});
  CHECK_THROWS_AS(kl(kP, other), std::invalid_argument);
  const FiniteDist longer({"a", "b", "c"}, {0.4, 0.3, 0.3});
  CHECK_THROWS_AS(f_div(kP, longer, FGenerator::tv()), std::invalid_argument);
}

TEST_CASE("zero-mass conventions") {
  const FiniteDist p({"a", "b"}, {1.0, 0.0});
  const FiniteDist q({"a", "b"}, {0.5, 0.5});
  // p puts no mass where q does: t log t -> 0 at t = 0, so KL stays finite.
  CHECK(kl(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // q puts no mass where p does: the slope at infinity takes over.
  CHECK(kl(q, p) == INFINITY);
  CHECK(f_div(q, p, FGenerator::chi2()).value == INFINITY);
  // Bounded generators stay finite on disjoint parts.
  CHECK(f_div(q, p, FGenerator::tv()).value ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(f_div(q, p, FGenerator::hellinger()).value ==
        doctest::Approx(0.5 * std::pow(1.0 - std::sqrt(2.0), 2) + 0.5)
            .epsilon(1e-14));
  // Forward KL explodes when p misses mass that q has.
  CHECK(f_div(p, q, FGenerator::forward_kl()).value == INFINITY);
}

TEST_CASE("nonnegativity over random pairs") {
  RngStream rng(RngSeed{101});
  for (int trial = 0; trial < 200; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const std::size_t k = 2 + static_cast<std::size_t>(child.next_u64() % 7);
    const auto p = random_dist(child, k);
    const auto q = random_dist(child, k);
    for (const char* name : {"kl", "chi2", "tv", "hellinger", "fkl"}) {
      const double v = f_div(p, q, FGenerator::by_name(name)).value;
      CHECK(v >= -1e-12);
    }
    CHECK(renyi(p, q, 0.5).value >= -1e-12);
    CHECK(renyi(p, q, 3.0).value >= -1e-12);
  }
}

TEST_CASE("renyi is nondecreasing in alpha and hits KL at 1") {
  RngStream rng(RngSeed{7});
  for (int trial = 0; trial < 50; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const auto p = random_dist(child, 5);
    const auto q = random_dist(child, 5);
    double prev = 0.0;
    bool first = true;
    for (double alpha : {0.25, 0.5, 0.9, 1.0, 1.5, 2.0, 4.0}) {
      const double v = renyi(p, q, alpha).value;
      if (!first) CHECK(v >= prev - 1e-12);
      prev = v;
      first = false;
    }
    CHECK(renyi(p, q, 1.0).value == doctest::Approx(kl(p, q)).epsilon(1e-12));
    // Orders within 1e-6 of 1 are delegated to KL outright.
    CHECK(renyi(p, q, 1.0 + 5e-7).value == kl(p, q));
  }
}

TEST_CASE("small-order limit recovers the reversed KL") {
  // D_alpha(P||Q) / alpha -> KL(Q||P) as alpha -> 0+.
  const auto v = renyi_over_alpha_limit(kP, kQ);
  CHECK(v.value == doctest::Approx(kl(kQ, kP)).epsilon(1e-9));
  CHECK_FALSE(v.exact);

  RngStream rng(RngSeed{33});
  for (int trial = 0; trial < 20; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const auto p = random_dist(child, 4);
    const auto q = random_dist(child, 4);
    CHECK(renyi_over_alpha_limit(p, q).value ==
          doctest::Approx(kl(q, p)).epsilon(1e-7));
  }
}

TEST_CASE("custom generators run through the same conventions") {
  // f(t) = (t-1)^2 matched against the builtin chi2.
  const auto custom = FGenerator::custom(
      "sq", [](double t) { return (t - 1.0) * (t - 1.0); }, 1.0, INFINITY);
  CHECK(f_div(kP, kQ, custom).value ==
        doctest::Approx(f_div(kP, kQ, FGenerator::chi2()).value)
            .epsilon(1e-14));
  CHECK(custom.at_zero() == 1.0);
  // The log-domain path falls back to f(exp(log t)).
  CHECK(custom.eval_log(std::log(3.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(FGenerator::by_name("nonsense"), std::invalid_argument);
}

TEST_CASE("builtin log-domain forms match the direct forms") {
  for (const char* name : {"kl", "chi2", "tv", "hellinger", "fkl"}) {
    const auto gen = FGenerator::by_name(name);
    for (double t : {1e-8, 0.3, 1.0, 2.5, 1e6}) {
      CHECK(gen.eval_log(std::log(t)) ==
            doctest::Approx(gen(t)).epsilon(1e-12));
    }
    // Deep log domain stays finite where t itself would underflow.
    CHECK(std::isfinite(gen.eval_log(-800.0)));
  }
}

TEST_CASE("gaussian continuous divergences against closed forms") {
  // KL(N(0,1) || N(1,1)) = 1/2.
  const auto p = gaussian_law(0.0, 1.0);
  const auto q = gaussian_law(1.0, 1.0);
  CHECK(f_div_continuous(p, q, FGenerator::kl()).value ==
        doctest::Approx(0.5).epsilon(1e-8));
  // KL(N(0,2) || N(0,1)) = (2 - 1 - log 2) / 2.
  const auto wide = gaussian_law(0.0, 2.0);
  CHECK(f_div_continuous(wide, gaussian_law(0.0, 1.0), FGenerator::kl()).value ==
        doctest::Approx(0.5 * (2.0 - 1.0 - std::log(2.0))).epsilon(1e-8));
  // Renyi between Gaussians: quadrature against the closed form.
  for (double alpha : {0.25, 0.5, 2.0, 3.0}) {
    const double closed = renyi_gaussian(0.0, 1.0, 1.0, 1.0, alpha);
    const auto quad = renyi_continuous(p, q, alpha);
    CHECK(quad.value == doctest::Approx(closed).epsilon(1e-7));
    CHECK_FALSE(quad.exact);
  }
  // Mixed variance (1-alpha) var_p + alpha var_q <= 0 has no finite value.
  CHECK(renyi_gaussian(0.0, 4.0, 0.0, 1.0, 2.0) == INFINITY);
}

TEST_CASE("gamma continuous divergence against the closed form") {
  // KL(Gamma(1,1) || Gamma(1,2)) = log 2 - 1/2; Exp(1) against Exp(1/2).
  CHECK(f_div_continuous(gamma_law(1.0, 1.0), gamma_law(1.0, 2.0),
                         FGenerator::kl())
            .value == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-8));
}

TEST_CASE("max of n exponentials against the reference identity") {
  const auto exp1 = exponential_law();
  for (std::size_t n : {2, 7, 31}) {
    const double nn = static_cast<double>(n);
    const double expect = std::log(nn) - (nn - 1.0) / nn;
    CHECK(f_div_continuous(exp_order_stat_law(n), exp1, FGenerator::kl()).value ==
          doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("dual witness family lower-bounds the scaled renyi") {
  RngStream rng(RngSeed{55});
  for (int trial = 0; trial < 30; ++trial) {
    auto child = rng.split(static_cast<std::uint64_t>(trial));
    const auto q = random_dist(child, 4);
    std::vector<double> rv(4);
    for (auto& x : rv) x = 2.0 * child.next_double() - 1.0;
    const RewardMap reward(rv);
    const auto p = tilt(q, reward, 1.0 + child.next_double()).law;
    for (double alpha : {0.5, 2.0}) {
      const auto dual = renyi_dual_lower_bound(p, q, alpha, reward);
      const double direct = renyi(p, q, alpha).value / alpha;
      CHECK(dual.value <= direct + 1e-9);
    }
  }
  // Exponential-family pair with the matching witness: the bound is tight.
  const auto q = FiniteDist({"a", "b", "c"}, {0.5, 0.3, 0.2});
  const RewardMap reward({0.0, 1.0, 2.0});
  const auto p = tilt(q, reward, 1.0).law;
  const auto dual = renyi_dual_lower_bound(p, q, 2.0, reward);
  const double direct = renyi(p, q, 2.0).value / 2.0;
  CHECK(dual.value == doctest::Approx(direct).epsilon(1e-6));
  CHECK(dual.lambda == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_SUITE_END();
