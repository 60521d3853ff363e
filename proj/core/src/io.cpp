#include "alignbounds/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "alignbounds/version.hpp"

namespace alignbounds {

namespace {

using nlohmann::json;

std::vector<double> number_array(const json& node, const std::string& key) {
  if (!node.is_array()) throw ConfigError(key + " must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) throw ConfigError(key + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> string_array(const json& node,
                                      const std::string& key) {
  if (!node.is_array()) throw ConfigError(key + " must be an array");
  std::vector<std::string> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_string()) throw ConfigError(key + " must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Instance parse_instance(const json& node, bool allow_weight) {
  if (!node.is_object()) throw ConfigError("instance must be a JSON object");
  for (const auto& [key, value] : node.items()) {
    (void)value;
    const bool known = key == "support" || key == "probs" ||
                       key == "reward" || key == "golden_reward" ||
                       (allow_weight && key == "weight");
    if (!known) throw ConfigError("unknown key: " + key);
  }
  if (!node.contains("support") || !node.contains("probs"))
    throw ConfigError("instance requires support and probs");

  std::vector<std::string> support = string_array(node["support"], "support");
  std::vector<double> probs = number_array(node["probs"], "probs");
  Instance inst{FiniteDist(std::move(support), std::move(probs)), {}, {}};
  if (node.contains("reward"))
    inst.reward = RewardMap(number_array(node["reward"], "reward"));
  if (node.contains("golden_reward"))
    inst.golden = RewardMap(number_array(node["golden_reward"], "golden_reward"));
  if (inst.reward && inst.reward->size() != inst.dist.size())
    throw ConfigError("reward length does not match support");
  if (inst.golden && inst.golden->size() != inst.dist.size())
    throw ConfigError("golden_reward length does not match support");
  return inst;
}

}  // namespace

const Instance& InstanceFile::single() const {
  if (multi)
    throw ConfigError("this command takes a single-prompt instance file");
  return prompts.front().instance;
}

InstanceFile parse_instance_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  InstanceFile file;
  try {
    if (root.is_object() && root.contains("prompts")) {
      for (const auto& [key, value] : root.items()) {
        (void)value;
        if (key != "prompts") throw ConfigError("unknown key: " + key);
      }
      if (!root["prompts"].is_array() || root["prompts"].empty())
        throw ConfigError("prompts must be a nonempty array");
      file.multi = true;
      double total = 0.0;
      for (const auto& node : root["prompts"]) {
        WeightedInstance wi{1.0, parse_instance(node, true)};
        if (node.contains("weight")) {
          if (!node["weight"].is_number())
            throw ConfigError("weight must be a number");
          wi.weight = node["weight"].get<double>();
        }
        if (!(wi.weight > 0.0)) throw ConfigError("weights must be positive");
        total += wi.weight;
        file.prompts.push_back(std::move(wi));
      }
      if (std::fabs(total - 1.0) > 1e-12)
        throw ConfigError("weights must sum to 1");
    } else {
      file.prompts.push_back({1.0, parse_instance(root, false)});
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    // Distribution validation failures in a config file are config errors.
    throw ConfigError(e.what());
  }
  return file;
}

InstanceFile load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance_json(buf.str());
}

const RewardMap& require_reward(const Instance& inst) {
  if (!inst.reward) throw ConfigError("instance file has no reward");
  return *inst.reward;
}

const RewardMap& require_golden(const Instance& inst) {
  if (!inst.golden) throw ConfigError("instance file has no golden_reward");
  return *inst.golden;
}

std::string instance_to_csv(const Instance& inst) {
  CsvBuilder csv;
  std::vector<std::string> header{"symbol", "prob"};
  if (inst.reward) header.push_back("reward");
  if (inst.golden) header.push_back("golden_reward");
  csv.header(header);
  for (std::size_t i = 0; i < inst.dist.size(); ++i) {
    std::vector<std::string> cells{inst.dist.support()[i],
                                   format_sig(inst.dist.prob(i))};
    if (inst.reward) cells.push_back(format_sig((*inst.reward)[i]));
    if (inst.golden) cells.push_back(format_sig((*inst.golden)[i]));
    csv.row(cells);
  }
  return csv.finish(0, fnv1a64("instance"));
}

std::string format_sig(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

void CsvBuilder::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) body_ += ',';
    body_ += columns[i];
  }
  body_ += '\n';
}

void CsvBuilder::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::logic_error("csv row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

std::string CsvBuilder::finish(std::uint64_t seed, std::uint64_t config_hash,
                               const std::string& extra) const {
  std::string out = body_;
  out += "# version=";
  out += kVersion;
  out += " seed=";
  out += std::to_string(seed);
  out += " config-hash=";
  out += hex16(config_hash);
  if (!extra.empty()) {
    out += ' ';
    out += extra;
  }
  out += '\n';
  return out;
}

}  // namespace alignbounds
