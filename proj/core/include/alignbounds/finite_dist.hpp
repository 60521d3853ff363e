#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "alignbounds/rng.hpp"

namespace alignbounds {

namespace detail {

// Neumaier-compensated sum; keeps mass checks honest for large supports.
inline double stable_sum(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace detail

// Rewards indexed against a FiniteDist support. Entries must be finite.
class RewardMap {
 public:
  explicit RewardMap(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  double max_abs() const;

 private:
  std::vector<double> values_;
};

// Probability law on a finite alphabet of named symbols. Immutable.
// Probabilities must be nonnegative and sum to 1 within 1e-12; inputs
// outside that tolerance are rejected, never renormalized.
class FiniteDist {
 public:
  FiniteDist(std::vector<std::string> support, std::vector<double> probs);
  static FiniteDist uniform(std::vector<std::string> support);

  std::size_t size() const { return probs_.size(); }
  const std::vector<std::string>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(std::size_t i) const { return probs_[i]; }

  double expectation(const RewardMap& reward) const;
  bool same_support(const FiniteDist& other) const;

  // Inverse-CDF sampling; identical seeds give identical draws.
  std::vector<std::size_t> sample_indices(std::size_t m, RngSeed seed) const;
  std::vector<std::string> sample(std::size_t m, RngSeed seed) const;

 private:
  std::vector<std::string> support_;
  std::vector<double> probs_;
  std::vector<double> cum_;
};

// Law of a real random variable on finitely many points: the pushforward of
// a FiniteDist through a reward. Values are strictly ascending; symbols with
// bit-equal rewards are merged. Total mass is carried over, not renormalized.
class ScalarDist {
 public:
  ScalarDist(std::vector<double> values, std::vector<double> probs);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  double cdf(double x) const;       // right-continuous step CDF
  double quantile(double p) const;  // inf{v : cdf(v) >= p} for p in [0,1]
  double mean() const;
  double variance() const;
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  // (1/p) * integral of the quantile over (0, p]; p = 1 gives the mean.
  double tvar(double p) const;

  // log E exp(lambda * (X - E X)), evaluated in the log domain.
  double log_mgf_centered(double lambda) const;

  std::vector<double> sample_values(std::size_t m, RngSeed seed) const;

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cum_;
};

ScalarDist pushforward(const FiniteDist& dist, const RewardMap& reward);

}  // namespace alignbounds
