#include "alignbounds/finite_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace alignbounds {

namespace {

constexpr double kMassTol = 1e-12;

std::vector<double> inclusive_cumsum(const std::vector<double>& probs) {
  std::vector<double> cum(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cum.begin());
  return cum;
}

std::size_t inverse_cdf_index(const std::vector<double>& cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return cum.size() - 1;
  return static_cast<std::size_t>(it - cum.begin());
}

double logsumexp_terms(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace

RewardMap::RewardMap(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empty reward map");
  for (double v : values_) {
    if (!std::isfinite(v))
      throw std::invalid_argument("reward values must be finite");
  }
}

double RewardMap::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

FiniteDist::FiniteDist(std::vector<std::string> support,
                       std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.size() != probs_.size())
    throw std::invalid_argument("support and probs must have equal length");
  if (support_.empty()) throw std::invalid_argument("empty support");
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument(
          "probabilities must be nonnegative and finite");
  }
  const double total = detail::stable_sum(probs_);
  if (std::fabs(total - 1.0) > kMassTol)
    throw std::invalid_argument("probabilities must sum to 1 within 1e-12");
  std::unordered_set<std::string> seen;
  for (const auto& id : support_) {
    if (!seen.insert(id).second)
      throw std::invalid_argument("duplicate support identifier: " + id);
  }
  cum_ = inclusive_cumsum(probs_);
}

FiniteDist FiniteDist::uniform(std::vector<std::string> support) {
  if (support.empty()) throw std::invalid_argument("empty support");
  std::vector<double> probs(support.size(),
                            1.0 / static_cast<double>(support.size()));
  return FiniteDist(std::move(support), std::move(probs));
}

double FiniteDist::expectation(const RewardMap& reward) const {
  if (reward.size() != size())
    throw std::invalid_argument("reward/support mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += probs_[i] * reward[i];
  return acc;
}

bool FiniteDist::same_support(const FiniteDist& other) const {
  return support_ == other.support_;
}

std::vector<std::size_t> FiniteDist::sample_indices(std::size_t m,
                                                    RngSeed seed) const {
  if (m == 0) throw std::invalid_argument("sample count must be positive");
  RngStream rng(seed);
  std::vector<std::size_t> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k)
    out.push_back(inverse_cdf_index(cum_, rng.next_double()));
  return out;
}

std::vector<std::string> FiniteDist::sample(std::size_t m, RngSeed seed) const {
  std::vector<std::string> out;
  out.reserve(m);
  for (std::size_t idx : sample_indices(m, seed)) out.push_back(support_[idx]);
  return out;
}

ScalarDist::ScalarDist(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  if (values_.size() != probs_.size())
    throw std::invalid_argument("values and probs must have equal length");
  if (values_.empty()) throw std::invalid_argument("empty support");
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    if (!(values_[i] < values_[i + 1]))
      throw std::invalid_argument("values must be strictly ascending");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("values must be finite");
  }
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument(
          "probabilities must be nonnegative and finite");
  }
  const double total = detail::stable_sum(probs_);
  if (std::fabs(total - 1.0) > kMassTol)
    throw std::invalid_argument("probabilities must sum to 1 within 1e-12");
  cum_ = inclusive_cumsum(probs_);
}

double ScalarDist::cdf(double x) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

double ScalarDist::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  if (p == 0.0) return values_.front();
  auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
  if (it == cum_.end()) return values_.back();
  return values_[static_cast<std::size_t>(it - cum_.begin())];
}

double ScalarDist::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += probs_[i] * values_[i];
  return acc;
}

double ScalarDist::variance() const {
  const double mu = mean();
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = values_[i] - mu;
    acc += probs_[i] * d * d;
  }
  return acc;
}

double ScalarDist::tvar(double p) const {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("tvar level must lie in (0, 1]");
  double acc = 0.0;
  double t_prev = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double seg = std::min(cum_[i], p);
    if (seg > t_prev) {
      acc += values_[i] * (seg - t_prev);
      t_prev = seg;
    }
    if (t_prev >= p) break;
  }
  if (t_prev < p) acc += values_.back() * (p - t_prev);
  return acc / p;
}

double ScalarDist::log_mgf_centered(double lambda) const {
  const double mu = mean();
  std::vector<double> terms;
  terms.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (probs_[i] <= 0.0) continue;
    terms.push_back(std::log(probs_[i]) + lambda * (values_[i] - mu));
  }
  return logsumexp_terms(terms);
}

std::vector<double> ScalarDist::sample_values(std::size_t m,
                                              RngSeed seed) const {
  if (m == 0) throw std::invalid_argument("sample count must be positive");
  RngStream rng(seed);
  std::vector<double> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k)
    out.push_back(values_[inverse_cdf_index(cum_, rng.next_double())]);
  return out;
}

ScalarDist pushforward(const FiniteDist& dist, const RewardMap& reward) {
  if (reward.size() != dist.size())
    throw std::invalid_argument("reward/support mismatch");
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return reward[a] < reward[b];
  });
  std::vector<double> values;
  std::vector<double> probs;
  for (std::size_t idx : order) {
    if (!values.empty() && values.back() == reward[idx]) {
      probs.back() += dist.prob(idx);
    } else {
      values.push_back(reward[idx]);
      probs.push_back(dist.prob(idx));
    }
  }
  return ScalarDist(std::move(values), std::move(probs));
}

}  // namespace alignbounds
