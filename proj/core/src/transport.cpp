#include "alignbounds/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "alignbounds/divergence.hpp"
#include "alignbounds/parallel.hpp"

namespace alignbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCertTol = 1e-12;

std::vector<double> build_default_grid() {
  std::vector<double> grid;
  grid.reserve(4001 + 2 * 241);
  for (int i = 0; i <= 4000; ++i)
    grid.push_back(-20.0 + 40.0 * static_cast<double>(i) / 4000.0);
  // Log refinement near zero; the envelope is tight there for symmetric laws.
  // The top magnitude rounds a hair past the linear span, so clamp it.
  for (int i = 0; i <= 240; ++i) {
    const double mag = std::min(
        20.0, std::pow(10.0, -6.0 + (std::log10(20.0) + 6.0) * i / 240.0));
    grid.push_back(mag);
    grid.push_back(-mag);
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

double envelope(TailModel model, double lambda) {
  if (model.kind == TailModel::Kind::subgauss)
    return lambda * lambda * model.sigma2 / 2.0;
  const double a = std::fabs(lambda);
  if (a * model.scale >= 1.0) return -1.0;  // outside the admissible range
  return lambda * lambda * model.sigma2 / (2.0 * (1.0 - model.scale * a));
}

TailCertificate certify_impl(const std::function<double(double)>& psi,
                             TailModel model, std::span<const double> grid,
                             bool two_sided) {
  TailCertificate cert;
  cert.model = model;
  cert.max_violation = -kInf;
  for (double lambda : grid) {
    if (model.kind == TailModel::Kind::subgamma) {
      if (lambda < 0.0 && !two_sided) {
        ++cert.skipped;
        continue;
      }
      if (std::fabs(lambda) * model.scale >= 1.0) {
        ++cert.skipped;
        continue;
      }
    }
    const double v = psi(lambda) - envelope(model, lambda);
    ++cert.evaluated;
    cert.max_violation = std::max(cert.max_violation, v);
  }
  cert.passed = cert.evaluated > 0 && cert.max_violation <= kCertTol;
  return cert;
}

std::span<const double> grid_or_default(std::span<const double> grid) {
  return grid.empty() ? std::span<const double>(default_lambda_grid()) : grid;
}

double min_sigma2_impl(const std::function<double(double)>& psi,
                       std::span<const double> grid, double hi_start) {
  // Evaluate psi once; bisect sigma2 against the cached grid values.
  std::vector<std::pair<double, double>> points;
  points.reserve(grid.size());
  for (double lambda : grid) {
    if (lambda == 0.0) continue;
    points.emplace_back(lambda, psi(lambda));
  }
  auto passes = [&points](double sigma2) {
    double worst = -kInf;
    for (const auto& [lambda, value] : points)
      worst = std::max(worst, value - lambda * lambda * sigma2 / 2.0);
    return worst <= kCertTol;
  };
  double hi = std::max(hi_start, 1e-12);
  int guard = 0;
  while (!passes(hi)) {
    hi *= 2.0;
    if (++guard > 80)
      throw std::runtime_error("tail hypothesis not established");
  }
  double lo = 0.0;
  if (passes(0.0)) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

Corollary1Report corollary_impl(const FiniteDist& base, const RewardMap& reward,
                                const FiniteDist& law, double cap,
                                std::string name,
                                std::optional<TailModel> model_opt) {
  const ScalarDist push = pushforward(base, reward);
  TailModel model = model_opt ? *model_opt
                              : TailModel::subgauss(min_subgauss_sigma2(push));
  const TailCertificate cert = certify_tail(push, model);
  if (!cert.passed)
    throw std::runtime_error("tail hypothesis not established");

  Corollary1Report report;
  report.policy_name = std::move(name);
  report.improvement = law.expectation(reward) - base.expectation(reward);
  report.kl = kl(law, base);
  report.cap = cap;
  report.sigma2 = model.sigma2;
  report.kl_bound = transport_bound(report.kl, model);
  report.cap_bound = transport_bound(report.cap, model);
  report.chain_holds = report.improvement >= -1e-9 &&
                       report.improvement <= report.kl_bound + 1e-9 &&
                       report.kl_bound <= report.cap_bound + 1e-9;
  return report;
}

const std::vector<double>& default_alphas() {
  static const std::vector<double> alphas = [] {
    std::vector<double> a;
    for (int i = 1; i <= 49; ++i) a.push_back(static_cast<double>(i) / 50.0);
    a.push_back(0.005);
    a.push_back(0.995);
    std::sort(a.begin(), a.end());
    return a;
  }();
  return alphas;
}

}  // namespace

const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> grid = build_default_grid();
  return grid;
}

std::span<const double> default_alpha_grid() { return default_alphas(); }

TailCertificate certify_tail(const ScalarDist& dist, TailModel model,
                             std::span<const double> grid, bool two_sided) {
  return certify_impl([&dist](double l) { return dist.log_mgf_centered(l); },
                      model, grid_or_default(grid), two_sided);
}

TailCertificate certify_tail(const std::function<double(double)>& log_mgf,
                             TailModel model, std::span<const double> grid,
                             bool two_sided) {
  return certify_impl(log_mgf, model, grid_or_default(grid), two_sided);
}

double min_subgauss_sigma2(const ScalarDist& dist,
                           std::span<const double> grid) {
  const double range = dist.max() - dist.min();
  if (range == 0.0) return 0.0;
  return min_sigma2_impl([&dist](double l) { return dist.log_mgf_centered(l); },
                         grid_or_default(grid), range * range / 4.0);
}

double min_subgauss_sigma2(const std::function<double(double)>& log_mgf,
                           std::span<const double> grid) {
  return min_sigma2_impl(log_mgf, grid_or_default(grid), 1.0);
}

double transport_bound(double kl, TailModel model) {
  if (kl < 0.0) throw std::invalid_argument("kl must be nonnegative");
  const double base = std::sqrt(2.0 * model.sigma2 * kl);
  if (model.kind == TailModel::Kind::subgauss) return base;
  return base + model.scale * kl;
}

double pinsker_bound(double reward_sup_norm, double kl) {
  if (kl < 0.0) throw std::invalid_argument("kl must be nonnegative");
  return std::sqrt(2.0 * reward_sup_norm * reward_sup_norm * kl);
}

Corollary1Report check_corollary1(const TiltedPolicy& policy,
                                  std::optional<TailModel> model,
                                  std::optional<double> delta) {
  const double achieved = policy_kl(policy);
  return corollary_impl(policy.base, policy.reward, policy.law,
                        delta.value_or(achieved), "tilt", model);
}

Corollary1Report check_corollary1(const BestOfNPolicy& policy,
                                  std::optional<TailModel> model) {
  return corollary_impl(policy.base, policy.reward, policy.law,
                        exp_reference_kl(policy.n), "bestofn", model);
}

TailAdaptiveResult tail_adaptive_bound_fn(
    const std::function<double(double)>& d_alpha_fn, double kl_forward,
    double kl_reverse, double sigma2_pi, double sigma2_ref,
    std::span<const double> alpha_grid) {
  if (!(sigma2_pi >= 0.0) || !(sigma2_ref >= 0.0))
    throw std::invalid_argument("variance proxies must be nonnegative");
  std::span<const double> grid =
      alpha_grid.empty() ? default_alpha_grid() : alpha_grid;

  // Divergences are nonnegative; a no-op policy can still round a hair
  // below zero, which would poison the square roots.
  kl_forward = std::max(kl_forward, 0.0);
  kl_reverse = std::max(kl_reverse, 0.0);

  TailAdaptiveResult result;
  result.endpoint_alpha1 =
      std::isfinite(kl_forward) ? std::sqrt(2.0 * sigma2_ref * kl_forward) : kInf;
  result.endpoint_alpha0 =
      std::isfinite(kl_reverse) ? std::sqrt(2.0 * sigma2_pi * kl_reverse) : kInf;

  result.best_alpha = 1.0;
  result.best_bound = result.endpoint_alpha1;
  if (result.endpoint_alpha0 < result.best_bound) {
    result.best_alpha = 0.0;
    result.best_bound = result.endpoint_alpha0;
  }
  for (double alpha : grid) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("alpha grid must lie inside (0, 1)");
    TailAdaptivePoint pt;
    pt.alpha = alpha;
    pt.d_alpha = std::max(d_alpha_fn(alpha), 0.0);
    if (!std::isfinite(pt.d_alpha)) {
      pt.finite = false;
      pt.bound = kInf;
    } else {
      const double mix = (1.0 - alpha) * sigma2_pi + alpha * sigma2_ref;
      pt.bound = std::sqrt(2.0 * mix * pt.d_alpha / alpha);
      if (pt.bound < result.best_bound) {
        result.best_bound = pt.bound;
        result.best_alpha = alpha;
      }
    }
    result.grid.push_back(pt);
  }
  return result;
}

TailAdaptiveResult tail_adaptive_bound(const FiniteDist& pi,
                                       const FiniteDist& base,
                                       const RewardMap& reward,
                                       double sigma2_pi, double sigma2_ref,
                                       std::span<const double> alpha_grid) {
  TailAdaptiveResult result = tail_adaptive_bound_fn(
      [&](double alpha) { return renyi(pi, base, alpha).value; },
      kl(pi, base), kl(base, pi), sigma2_pi, sigma2_ref, alpha_grid);
  result.improvement = pi.expectation(reward) - base.expectation(reward);
  return result;
}

HighProbResult high_prob_trial(const FiniteDist& base, const RewardMap& reward,
                               double beta, std::size_t m, double t0,
                               std::size_t trials, RngSeed seed,
                               std::optional<double> sigma2_ref) {
  if (!(beta > 1.0))
    throw std::invalid_argument("high-probability bound requires beta > 1");
  if (m == 0 || trials == 0)
    throw std::invalid_argument("sample and trial counts must be positive");
  if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");

  const TiltedPolicy policy = tilt(base, reward, beta);
  const ScalarDist push_ref = pushforward(base, reward);
  const ScalarDist push_tilt = pushforward(policy.law, reward);

  const double s2 = sigma2_ref ? *sigma2_ref : min_subgauss_sigma2(push_ref);
  const TailCertificate cert = certify_tail(push_ref, TailModel::subgauss(s2));
  if (!cert.passed)
    throw std::runtime_error("tail hypothesis not established");

  HighProbResult result;
  result.kl = kl(policy.law, base);
  result.d_beta = renyi(policy.law, base, beta).value;
  result.sigma2_ref = s2;
  result.threshold = std::sqrt(2.0 * s2 * result.kl) +
                     (result.d_beta - result.kl) / beta + 2.0 * t0;
  result.trials = trials;

  const RngStream root(seed);
  std::vector<unsigned char> violated(trials, 0);
  const double inv_m = 1.0 / static_cast<double>(m);
  parallel_for(trials, [&](std::size_t t) {
    const RngSeed tilt_seed = root.split(2 * t).seed();
    const RngSeed ref_seed = root.split(2 * t + 1).seed();
    double mean_tilt = 0.0;
    for (double v : push_tilt.sample_values(m, tilt_seed)) mean_tilt += v;
    double mean_ref = 0.0;
    for (double v : push_ref.sample_values(m, ref_seed)) mean_ref += v;
    mean_tilt *= inv_m;
    mean_ref *= inv_m;
    violated[t] = (mean_tilt - mean_ref > result.threshold) ? 1 : 0;
  });
  for (unsigned char flag : violated) result.violations += flag;
  result.empirical_rate =
      static_cast<double>(result.violations) / static_cast<double>(trials);
  result.theoretical_rate =
      std::exp(-static_cast<double>(m) * t0 * t0 / (2.0 * s2)) +
      std::exp(-static_cast<double>(m) * (beta - 1.0) * t0);
  return result;
}

}  // namespace alignbounds
