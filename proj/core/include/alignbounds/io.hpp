#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alignbounds/finite_dist.hpp"

namespace alignbounds {

// Raised for malformed configuration or instance files; the CLI maps it to
// exit code 2, as opposed to computation failures which map to 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Instance {
  FiniteDist dist;
  std::optional<RewardMap> reward;
  std::optional<RewardMap> golden;
};

struct WeightedInstance {
  double weight = 1.0;
  Instance instance;
};

// Either a single instance or a weighted multi-prompt list. Unknown JSON
// keys are rejected. Weights must be positive and sum to 1 within 1e-12.
struct InstanceFile {
  bool multi = false;
  std::vector<WeightedInstance> prompts;

  const Instance& single() const;
};

InstanceFile parse_instance_json(const std::string& text);
InstanceFile load_instance_file(const std::string& path);

const RewardMap& require_reward(const Instance& inst);
const RewardMap& require_golden(const Instance& inst);

// One row per symbol: symbol, prob, reward, golden_reward when present.
std::string instance_to_csv(const Instance& inst);

// Doubles rendered with 12 significant digits; inf and nan spelled out.
std::string format_sig(double v, int digits = 12);

std::uint64_t fnv1a64(std::string_view text);
std::string hex16(std::uint64_t value);

// Accumulates rows and closes with the trailing metadata comment
// "# version=... seed=... config-hash=... [extras]".
class CsvBuilder {
 public:
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  std::string finish(std::uint64_t seed, std::uint64_t config_hash,
                     const std::string& extra = "") const;

 private:
  std::string body_;
  std::size_t columns_ = 0;
};

}  // namespace alignbounds
