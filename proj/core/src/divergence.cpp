#include "alignbounds/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "alignbounds/quadrature.hpp"

namespace alignbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaOneTol = 1e-6;
constexpr double kUClamp = 1e-15;
// Chart boundary between the reference-quantile and p-quantile reads of a
// continuous divergence. The reference chart turns singular when p carries
// heavier tails, so the outer 1e-6 of reference mass goes to the p chart,
// whose conjugate integrand stays mild there.
constexpr double kTailCut = 1e-6;

double logsumexp(const std::vector<double>& terms) {
  if (terms.empty()) return -kInf;
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

void check_supports(const FiniteDist& p, const FiniteDist& q) {
  if (!p.same_support(q)) throw std::invalid_argument("support mismatch");
}

// Generator value at a density ratio, with the t -> 0+ limit spelled out.
// A clamped evaluation stands in when the limit itself is infinite, so
// quadrature over integrable endpoint singularities stays finite.
double eval_generator(const FGenerator& gen, double t) {
  if (t > 0.0) return gen(t);
  if (std::isfinite(gen.at_zero())) return gen.at_zero();
  return gen(1e-300);
}

// The same mass read against the p measure: (q/p) f(p/q) at s = q/p, with
// the s -> 0+ limit equal to lim f(t)/t.
double eval_conjugate(const FGenerator& gen, double s) {
  if (s > 0.0) return s * gen(1.0 / s);
  return gen.slope_at_inf();
}

double validate_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0)
    throw std::invalid_argument(
        "alpha must be positive; the alpha -> 0 limit has its own routine");
  return alpha;
}

}  // namespace

FGenerator::FGenerator(std::string name, std::function<double(double)> f,
                       std::function<double(double)> f_log, double at_zero,
                       double slope_at_inf)
    : name_(std::move(name)),
      f_(std::move(f)),
      f_log_(std::move(f_log)),
      at_zero_(at_zero),
      slope_at_inf_(slope_at_inf) {}

FGenerator FGenerator::kl() {
  return FGenerator(
      "kl", [](double t) { return t * std::log(t); },
      [](double lt) { return std::exp(lt) * lt; }, 0.0, kInf);
}

FGenerator FGenerator::chi2() {
  return FGenerator(
      "chi2", [](double t) { return (t - 1.0) * (t - 1.0); },
      [](double lt) {
        const double d = std::expm1(lt);
        return d * d;
      },
      1.0, kInf);
}

FGenerator FGenerator::tv() {
  return FGenerator(
      "tv", [](double t) { return 0.5 * std::fabs(t - 1.0); },
      [](double lt) { return 0.5 * std::fabs(std::expm1(lt)); }, 0.5, 0.5);
}

FGenerator FGenerator::hellinger() {
  return FGenerator(
      "hellinger",
      [](double t) {
        const double s = 1.0 - std::sqrt(t);
        return s * s;
      },
      [](double lt) {
        const double s = -std::expm1(0.5 * lt);
        return s * s;
      },
      1.0, 1.0);
}

FGenerator FGenerator::forward_kl() {
  return FGenerator(
      "fkl", [](double t) { return -std::log(t); },
      [](double lt) { return -lt; }, kInf, 0.0);
}

FGenerator FGenerator::by_name(const std::string& name) {
  if (name == "kl") return kl();
  if (name == "chi2") return chi2();
  if (name == "tv") return tv();
  if (name == "hellinger") return hellinger();
  if (name == "fkl" || name == "forward_kl") return forward_kl();
  throw std::invalid_argument("unknown divergence generator: " + name);
}

FGenerator FGenerator::custom(std::string name,
                              std::function<double(double)> f, double at_zero,
                              double slope_at_inf) {
  if (f(1.0) != 0.0)
    throw std::invalid_argument("generator must satisfy f(1) = 0 exactly");
  // Midpoint convexity spot check on a log-spaced grid.
  for (double a = 1.0 / 64.0; a <= 64.0; a *= 2.0) {
    for (double b = a; b <= 64.0; b *= 4.0) {
      const double mid = 0.5 * (a + b);
      if (f(mid) > 0.5 * (f(a) + f(b)) + 1e-9)
        throw std::invalid_argument("generator failed convexity spot check");
    }
  }
  auto f_log = [f](double lt) { return f(std::exp(lt)); };
  return FGenerator(std::move(name), std::move(f), std::move(f_log), at_zero,
                    slope_at_inf);
}

double kl_probs(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

double f_div_probs(std::span<const double> p, std::span<const double> q,
                   const FGenerator& gen) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > 0.0) {
      if (p[i] == 0.0) {
        if (gen.at_zero() == 0.0) continue;
        if (!std::isfinite(gen.at_zero())) return kInf;
        acc += q[i] * gen.at_zero();
      } else {
        acc += q[i] * gen(p[i] / q[i]);
      }
    } else if (p[i] > 0.0) {
      if (!std::isfinite(gen.slope_at_inf())) return kInf;
      acc += p[i] * gen.slope_at_inf();
    }
  }
  return acc;
}

double renyi_probs(std::span<const double> p, std::span<const double> q,
                   double alpha) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (alpha > 1.0) return kInf;
      continue;  // q^{1-alpha} vanishes for alpha < 1
    }
    terms.push_back(alpha * std::log(p[i]) + (1.0 - alpha) * std::log(q[i]));
  }
  if (terms.empty()) return kInf;  // essentially disjoint supports
  return logsumexp(terms) / (alpha - 1.0);
}

DivergenceValue f_div(const FiniteDist& p, const FiniteDist& q,
                      const FGenerator& gen) {
  check_supports(p, q);
  return {gen.name(), 0.0, f_div_probs(p.probs(), q.probs(), gen), true};
}

double kl(const FiniteDist& p, const FiniteDist& q) {
  check_supports(p, q);
  return kl_probs(p.probs(), q.probs());
}

DivergenceValue renyi(const FiniteDist& p, const FiniteDist& q, double alpha) {
  check_supports(p, q);
  validate_alpha(alpha);
  if (std::fabs(alpha - 1.0) <= kAlphaOneTol)
    return {"renyi", alpha, kl_probs(p.probs(), q.probs()), true};
  return {"renyi", alpha, renyi_probs(p.probs(), q.probs(), alpha), true};
}

DivergenceValue renyi_over_alpha_limit(const FiniteDist& p,
                                       const FiniteDist& q) {
  check_supports(p, q);
  const double alphas[3] = {1e-2, 1e-3, 1e-4};
  double g[3];
  for (int k = 0; k < 3; ++k) {
    const double d = renyi_probs(p.probs(), q.probs(), alphas[k]);
    if (!std::isfinite(d))
      throw std::runtime_error("limit did not stabilize: divergence infinite");
    g[k] = d / alphas[k];
  }
  // g(alpha) = KL(Q||P) + c1 alpha + c2 alpha^2 + ...; two Richardson
  // levels over the ratio-10 nodes remove the linear and quadratic terms.
  const double r1 = (10.0 * g[1] - g[0]) / 9.0;
  const double r2 = (10.0 * g[2] - g[1]) / 9.0;
  const double extrapolated = (100.0 * r2 - r1) / 99.0;
  const double scale =
      std::max({std::fabs(g[0]), std::fabs(g[1]), std::fabs(g[2])});
  const bool tiny = scale <= 1e-7;
  const bool contracting =
      std::fabs(g[2] - g[1]) <= 0.5 * std::fabs(g[1] - g[0]) + 1e-12;
  if (!tiny && !contracting)
    throw std::runtime_error("limit did not stabilize");
  return {"renyi_over_alpha_limit", 0.0, extrapolated, false};
}

DivergenceValue f_div_continuous(const ContinuousLaw& p, const ContinuousLaw& q,
                                 const FGenerator& gen, double abs_tol) {
  // Bulk of the mass through u = F_q(x), where the integrand is f(p/q).
  auto from_q = [&](double u) {
    const double uc = std::min(std::max(u, kUClamp), 1.0 - kUClamp);
    const double x = q.quantile(uc);
    const double qd = q.density(x);
    if (!(qd > 0.0)) return 0.0;
    return eval_generator(gen, p.density(x) / qd);
  };
  // The u window clips q's extreme quantiles, which undercounts a p that is
  // heavier out there. Reread those two x ranges through v = F_p(x), where
  // the same mass is (q/p) f(p/q) dv and stays bounded.
  auto from_p = [&](double v) {
    const double vc = std::min(std::max(v, kUClamp), 1.0 - kUClamp);
    const double x = p.quantile(vc);
    const double pd = p.density(x);
    if (!(pd > 0.0)) return 0.0;
    return eval_conjugate(gen, q.density(x) / pd);
  };
  double value = integrate_or_throw(from_q, kTailCut, 1.0 - kTailCut, abs_tol,
                                    60, "f-divergence");
  const double v_lo = p.cdf(q.quantile(kTailCut));
  const double v_hi = p.cdf(q.quantile(1.0 - kTailCut));
  if (v_lo > 0.0)
    value +=
        integrate_or_throw(from_p, 0.0, v_lo, abs_tol, 60, "f-divergence");
  if (v_hi < 1.0)
    value +=
        integrate_or_throw(from_p, v_hi, 1.0, abs_tol, 60, "f-divergence");
  return {gen.name(), 0.0, value, false};
}

DivergenceValue renyi_continuous(const ContinuousLaw& p, const ContinuousLaw& q,
                                 double alpha, double abs_tol) {
  validate_alpha(alpha);
  if (std::fabs(alpha - 1.0) <= kAlphaOneTol)
    return {"renyi", alpha, f_div_continuous(p, q, FGenerator::kl(), abs_tol).value,
            false};
  // Same two-chart split as f_div_continuous: p^alpha q^(1-alpha) reads as
  // t^alpha du through u = F_q(x) and as s^(1-alpha) dv through v = F_p(x).
  auto from_q = [&](double u) {
    const double uc = std::min(std::max(u, kUClamp), 1.0 - kUClamp);
    const double x = q.quantile(uc);
    const double qd = q.density(x);
    if (!(qd > 0.0)) return 0.0;
    const double t = p.density(x) / qd;
    return t > 0.0 ? std::pow(t, alpha) : 0.0;
  };
  auto from_p = [&](double v) {
    const double vc = std::min(std::max(v, kUClamp), 1.0 - kUClamp);
    const double x = p.quantile(vc);
    const double pd = p.density(x);
    if (!(pd > 0.0)) return 0.0;
    const double ratio = q.density(x) / pd;
    if (ratio > 0.0) return std::pow(ratio, 1.0 - alpha);
    return alpha < 1.0 ? 0.0 : kInf;
  };
  double s = integrate_or_throw(from_q, kTailCut, 1.0 - kTailCut, abs_tol, 60,
                                "renyi integral");
  const double v_lo = p.cdf(q.quantile(kTailCut));
  const double v_hi = p.cdf(q.quantile(1.0 - kTailCut));
  if (v_lo > 0.0)
    s += integrate_or_throw(from_p, 0.0, v_lo, abs_tol, 60, "renyi integral");
  if (v_hi < 1.0)
    s += integrate_or_throw(from_p, v_hi, 1.0, abs_tol, 60, "renyi integral");
  if (!(s > 0.0)) return {"renyi", alpha, kInf, false};
  return {"renyi", alpha, std::log(s) / (alpha - 1.0), false};
}

double renyi_gaussian(double mean_p, double var_p, double mean_q, double var_q,
                      double alpha) {
  validate_alpha(alpha);
  if (!(var_p > 0.0) || !(var_q > 0.0))
    throw std::invalid_argument("variances must be positive");
  if (std::fabs(alpha - 1.0) <= kAlphaOneTol) {
    const double d = mean_p - mean_q;
    return 0.5 * (var_p / var_q + d * d / var_q - 1.0 + std::log(var_q / var_p));
  }
  const double mixed = alpha * var_q + (1.0 - alpha) * var_p;
  if (!(mixed > 0.0)) return kInf;
  const double d = mean_p - mean_q;
  const double mean_term = alpha * d * d / (2.0 * mixed);
  const double log_term =
      (std::log(mixed) - (1.0 - alpha) * std::log(var_p) -
       alpha * std::log(var_q)) /
      (2.0 * (1.0 - alpha));
  return mean_term + log_term;
}

DualBoundResult renyi_dual_lower_bound(const FiniteDist& p, const FiniteDist& q,
                                       double alpha, const RewardMap& witness) {
  check_supports(p, q);
  validate_alpha(alpha);
  if (std::fabs(alpha - 1.0) <= kAlphaOneTol)
    throw std::invalid_argument(
        "dual objective requires alpha bounded away from 1");
  if (witness.size() != p.size())
    throw std::invalid_argument("reward/support mismatch");

  auto objective = [&](double lambda) {
    std::vector<double> ta, tb;
    ta.reserve(p.size());
    tb.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double h = lambda * witness[i];
      if (p.prob(i) > 0.0)
        ta.push_back(std::log(p.prob(i)) + (alpha - 1.0) * h);
      if (q.prob(i) > 0.0) tb.push_back(std::log(q.prob(i)) + alpha * h);
    }
    return logsumexp(ta) / (alpha - 1.0) - logsumexp(tb) / alpha;
  };

  double best_lambda = 0.0;
  double best_value = objective(0.0);
  auto consider = [&](double lambda) {
    const double v = objective(lambda);
    if (std::isfinite(v) && v > best_value) {
      best_value = v;
      best_lambda = lambda;
    }
  };
  for (int k = 0; k <= 70; ++k) {
    const double mag = std::pow(10.0, -4.0 + 7.0 * k / 70.0);
    consider(mag);
    consider(-mag);
  }
  // Local refinement: repeated linear grids shrinking around the incumbent.
  double width = std::max(std::fabs(best_lambda), 1e-2);
  for (int round = 0; round < 10; ++round) {
    const double center = best_lambda;
    for (int j = -20; j <= 20; ++j)
      consider(center + width * static_cast<double>(j) / 20.0);
    width /= 10.0;
  }
  return {best_lambda, best_value};
}

}  // namespace alignbounds
