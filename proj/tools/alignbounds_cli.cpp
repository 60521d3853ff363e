// Command line front end. All output is assembled in memory and written in
// one shot, so a failing run never leaves partial output behind. Exit codes:
// 0 success, 1 computation failure, 2 bad configuration or arguments.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alignbounds/bestofn.hpp"
#include "alignbounds/continuous_law.hpp"
#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/goodhart.hpp"
#include "alignbounds/io.hpp"
#include "alignbounds/tilt.hpp"
#include "alignbounds/transport.hpp"
#include "alignbounds/version.hpp"

namespace {

using alignbounds::ConfigError;
using json = nlohmann::json;

// Non-finite doubles become strings; nlohmann would emit null otherwise.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

json law_json(const alignbounds::FiniteDist& d) {
  json probs = json::array();
  for (double p : d.probs()) probs.push_back(num(p));
  return json{{"support", d.support()}, {"probs", probs}};
}

// Resolved option values in a fixed order; their hash goes into the output
// metadata so identical configs are recognizable across runs.
struct RunContext {
  std::string out_path;
  std::uint64_t seed = 0;
  std::vector<std::string> config;

  void kv(const std::string& key, const std::string& value) {
    config.push_back(key + "=" + value);
  }
  void kvd(const std::string& key, double value) {
    kv(key, alignbounds::format_sig(value));
  }
  void kvu(const std::string& key, std::uint64_t value) {
    kv(key, std::to_string(value));
  }
  std::uint64_t hash() const {
    std::string all;
    for (const auto& entry : config) {
      all += entry;
      all += '\n';
    }
    return alignbounds::fnv1a64(all);
  }
  json meta() const {
    return json{{"config_hash", alignbounds::hex16(hash())},
                {"seed", seed},
                {"version", alignbounds::kVersion}};
  }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

alignbounds::InstanceFile load_instance(const std::string& path,
                                        RunContext& ctx, const char* key) {
  const std::string bytes = slurp(path);
  ctx.kv(std::string(key) + "-path", path);
  ctx.kv(std::string(key) + "-hash",
         alignbounds::hex16(alignbounds::fnv1a64(bytes)));
  try {
    return alignbounds::parse_instance_json(bytes);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + out_path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + out_path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + ": " + s);
  }
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size() || s.empty() || s[0] == '-') throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + ": " + s);
  }
}

// "auto" defers to the certified minimum; anything else is a number.
std::optional<double> parse_sigma2(const std::string& s) {
  if (s == "auto") return std::nullopt;
  const double v = parse_double(s, "--sigma2");
  if (!(v >= 0.0)) throw ConfigError("--sigma2 must be nonnegative or auto");
  return v;
}

std::optional<alignbounds::TailModel> parse_tail(const std::string& s) {
  if (s == "auto") return std::nullopt;
  const auto parts = split(s, ':');
  if (parts.size() == 2 && parts[0] == "subgauss") {
    const double s2 = parse_double(parts[1], "--tail sigma2");
    if (!(s2 >= 0.0)) throw ConfigError("--tail sigma2 must be nonnegative");
    return alignbounds::TailModel::subgauss(s2);
  }
  if (parts.size() == 2 && parts[0] == "subgamma") {
    const auto nums = split(parts[1], ',');
    if (nums.size() == 2) {
      const double s2 = parse_double(nums[0], "--tail sigma2");
      const double c = parse_double(nums[1], "--tail scale");
      if (!(s2 >= 0.0) || !(c >= 0.0))
        throw ConfigError("--tail subgamma parameters must be nonnegative");
      return alignbounds::TailModel::subgamma(s2, c);
    }
  }
  throw ConfigError("--tail must be subgauss:S2, subgamma:S2,C, or auto");
}

const std::vector<std::string> kFKinds = {"kl", "chi2", "tv", "hellinger",
                                          "fkl"};

// ---------------------------------------------------------------- div ----

struct DivArgs {
  std::string p_path, q_path;
  std::string kind = "kl";
  double alpha = 2.0;
};

std::string run_div(const DivArgs& a, RunContext& ctx) {
  ctx.kv("cmd", "div");
  const auto pf = load_instance(a.p_path, ctx, "p");
  const auto qf = load_instance(a.q_path, ctx, "q");
  ctx.kv("kind", a.kind);
  const auto& p = pf.single().dist;
  const auto& q = qf.single().dist;
  if (!p.same_support(q))
    throw ConfigError("--p and --q must share the same support");

  alignbounds::DivergenceValue v;
  json out;
  if (a.kind == "renyi") {
    ctx.kvd("alpha", a.alpha);
    v = alignbounds::renyi(p, q, a.alpha);
    out["alpha"] = num(v.alpha);
  } else {
    v = alignbounds::f_div(p, q, alignbounds::FGenerator::by_name(a.kind));
  }
  out["kind"] = v.kind;
  out["value"] = num(v.value);
  out["exact"] = v.exact;
  out["meta"] = ctx.meta();
  return dump(out);
}

// ---------------------------------------------------------------- bon ----

struct BonArgs {
  std::string dist_path;
  std::size_t n = 1;
  bool all_bounds = false;
  double renyi_alpha = 2.0;
};

std::string run_bon(const BonArgs& a, RunContext& ctx) {
  ctx.kv("cmd", "bon");
  const auto file = load_instance(a.dist_path, ctx, "dist");
  ctx.kvu("n", a.n);
  ctx.kv("all-bounds", a.all_bounds ? "1" : "0");
  const auto& inst = file.single();
  const auto& reward = alignbounds::require_reward(inst);

  const auto policy = alignbounds::bestofn_exact(inst.dist, reward, a.n);
  const auto klrep = alignbounds::bestofn_kl(inst.dist, reward, a.n);

  json out;
  out["n"] = a.n;
  out["improvement"] = num(alignbounds::improvement(policy));
  out["kl"] = num(klrep.achieved_value);
  out["kl_bound"] = num(klrep.bound_value);
  out["kl_slack"] = num(klrep.slack);
  out["law"] = law_json(policy.law);
  if (a.all_bounds) {
    ctx.kvd("renyi-alpha", a.renyi_alpha);
    json bounds = json::array();
    for (const auto& kind : kFKinds) {
      const double achieved =
          alignbounds::f_div(policy.law, inst.dist,
                             alignbounds::FGenerator::by_name(kind))
              .value;
      const double bound = alignbounds::f_bound_closed(kind, a.n);
      bounds.push_back(json{{"name", kind},
                            {"achieved", num(achieved)},
                            {"bound", num(bound)},
                            {"slack", num(bound - achieved)}});
    }
    const double achieved =
        alignbounds::renyi(policy.law, inst.dist, a.renyi_alpha).value;
    const double bound =
        alignbounds::renyi_bound_closed(a.renyi_alpha, a.n);
    bounds.push_back(json{{"name", "renyi"},
                          {"alpha", num(a.renyi_alpha)},
                          {"achieved", num(achieved)},
                          {"bound", num(bound)},
                          {"slack", num(bound - achieved)}});
    out["bounds"] = bounds;
  }
  out["meta"] = ctx.meta();
  return dump(out);
}

// --------------------------------------------------------------- tilt ----

struct TiltArgs {
  std::string dist_path;
  std::optional<double> beta;
  std::optional<double> delta;
};

std::string run_tilt(const TiltArgs& a, RunContext& ctx) {
  ctx.kv("cmd", "tilt");
  const auto file = load_instance(a.dist_path, ctx, "dist");
  if (a.beta.has_value() == a.delta.has_value())
    throw ConfigError("tilt takes exactly one of --beta or --delta");

  json out;
  if (file.multi) {
    if (!a.delta)
      throw ConfigError("multi-prompt instances take --delta, not --beta");
    ctx.kvd("delta", *a.delta);
    std::vector<alignbounds::PromptInstance> prompts;
    for (const auto& wp : file.prompts)
      prompts.push_back({wp.weight, wp.instance.dist,
                         alignbounds::require_reward(wp.instance)});
    const auto sol = alignbounds::solve_lambda_avg(prompts, *a.delta);
    json rows = json::array();
    double avg_kl = 0.0;
    for (const auto& prompt : prompts) {
      const auto pol =
          alignbounds::tilt(prompt.base, prompt.reward, sol.beta);
      const double kl = alignbounds::policy_kl(pol);
      avg_kl += prompt.weight * kl;
      rows.push_back(json{{"weight", num(prompt.weight)},
                          {"kl", num(kl)},
                          {"improvement", num(alignbounds::improvement(pol))}});
    }
    out["delta"] = num(sol.delta);
    out["beta"] = num(sol.beta);
    out["lambda"] = num(sol.lambda);
    out["residual"] = num(sol.residual);
    out["iterations"] = sol.iterations;
    out["avg_kl"] = num(avg_kl);
    out["prompts"] = rows;
    out["meta"] = ctx.meta();
    return dump(out);
  }

  const auto& inst = file.single();
  const auto& reward = alignbounds::require_reward(inst);
  double beta = 0.0;
  if (a.delta) {
    ctx.kvd("delta", *a.delta);
    const auto sol = alignbounds::solve_lambda(inst.dist, reward, *a.delta);
    beta = sol.beta;
    out["delta"] = num(sol.delta);
    out["residual"] = num(sol.residual);
    out["iterations"] = sol.iterations;
  } else {
    ctx.kvd("beta", *a.beta);
    beta = *a.beta;
  }
  const auto pol = alignbounds::tilt(inst.dist, reward, beta);
  out["beta"] = num(beta);
  out["lambda"] = num(beta > 0.0 ? 1.0 / beta
                                 : std::numeric_limits<double>::infinity());
  out["log_partition"] = num(pol.log_partition);
  out["kl"] = num(alignbounds::policy_kl(pol));
  out["improvement"] = num(alignbounds::improvement(pol));
  out["max_feasible_kl"] =
      num(alignbounds::max_feasible_kl(inst.dist, reward));
  out["law"] = law_json(pol.law);
  out["meta"] = ctx.meta();
  return dump(out);
}

// ---------------------------------------------------------- transport ----

struct TransportArgs {
  std::string dist_path;
  std::string policy;
  std::string tail = "auto";
};

std::string run_transport(const TransportArgs& a, RunContext& ctx) {
  ctx.kv("cmd", "transport");
  const auto file = load_instance(a.dist_path, ctx, "dist");
  ctx.kv("policy", a.policy);
  ctx.kv("tail", a.tail);
  const auto& inst = file.single();
  const auto& reward = alignbounds::require_reward(inst);
  const auto model = parse_tail(a.tail);

  const auto parts = split(a.policy, ':');
  alignbounds::Corollary1Report report;
  if (parts.size() == 2 && parts[0] == "tilt") {
    const double beta = parse_double(parts[1], "--policy beta");
    report = alignbounds::check_corollary1(
        alignbounds::tilt(inst.dist, reward, beta), model);
  } else if (parts.size() == 2 && parts[0] == "bon") {
    const std::size_t n =
        static_cast<std::size_t>(parse_uint(parts[1], "--policy n"));
    if (n == 0) throw ConfigError("--policy bon:N needs N >= 1");
    report = alignbounds::check_corollary1(
        alignbounds::bestofn_exact(inst.dist, reward, n), model);
  } else {
    throw ConfigError("--policy must be tilt:BETA or bon:N");
  }

  json out;
  out["policy"] = report.policy_name;
  out["improvement"] = num(report.improvement);
  out["kl"] = num(report.kl);
  out["cap"] = num(report.cap);
  out["sigma2"] = num(report.sigma2);
  out["kl_bound"] = num(report.kl_bound);
  out["cap_bound"] = num(report.cap_bound);
  out["chain_holds"] = report.chain_holds;
  out["meta"] = ctx.meta();
  return dump(out);
}

// ----------------------------------------------------------- highprob ----

struct HighProbArgs {
  std::string dist_path;  // empty: built-in uniform binary, rewards 0 and 1
  double beta = 2.0;
  std::size_t m = 100;
  double t0 = 0.1;
  std::size_t trials = 1000;
  std::string sigma2 = "auto";
};

std::string run_highprob(const HighProbArgs& a, RunContext& ctx) {
  ctx.kv("cmd", "highprob");
  std::optional<alignbounds::InstanceFile> file;
  if (!a.dist_path.empty()) file = load_instance(a.dist_path, ctx, "dist");
  ctx.kvd("beta", a.beta);
  ctx.kvu("m", a.m);
  ctx.kvd("t0", a.t0);
  ctx.kvu("trials", a.trials);
  ctx.kv("sigma2", a.sigma2);
  ctx.kvu("seed", ctx.seed);

  const alignbounds::FiniteDist binary({"lo", "hi"}, {0.5, 0.5});
  const alignbounds::RewardMap binary_reward({0.0, 1.0});
  const alignbounds::FiniteDist& base =
      file ? file->single().dist : binary;
  const alignbounds::RewardMap& reward =
      file ? alignbounds::require_reward(file->single()) : binary_reward;

  const auto result = alignbounds::high_prob_trial(
      base, reward, a.beta, a.m, a.t0, a.trials,
      alignbounds::RngSeed{ctx.seed}, parse_sigma2(a.sigma2));

  json out;
  out["beta"] = num(a.beta);
  out["m"] = a.m;
  out["t0"] = num(a.t0);
  out["trials"] = result.trials;
  out["threshold"] = num(result.threshold);
  out["kl"] = num(result.kl);
  out["d_beta"] = num(result.d_beta);
  out["sigma2_ref"] = num(result.sigma2_ref);
  out["violations"] = result.violations;
  out["empirical_rate"] = num(result.empirical_rate);
  out["theoretical_rate"] = num(result.theoretical_rate);
  out["meta"] = ctx.meta();
  return dump(out);
}

// ----------------------------------------------------------- goodhart ----

struct GoodhartArgs {
  std::string dist_path;
  std::string control;
  std::string sigma2 = "auto";
  std::string reports_path;
};

struct GoodhartOutputs {
  std::string csv;
  std::string reports;
};

GoodhartOutputs run_goodhart(const GoodhartArgs& a, RunContext& ctx) {
  ctx.kv("cmd", "goodhart");
  const auto file = load_instance(a.dist_path, ctx, "dist");
  ctx.kv("control", a.control);
  ctx.kv("sigma2", a.sigma2);
  const auto& inst = file.single();
  const auto pair = alignbounds::make_reward_pair(
      alignbounds::require_reward(inst), alignbounds::require_golden(inst));
  const auto sigma2 = parse_sigma2(a.sigma2);

  const auto parts = split(a.control, ':');
  alignbounds::OveroptCurve curve;
  std::vector<double> betas;
  std::vector<std::size_t> ns;
  if (parts.size() == 4 && parts[0] == "beta") {
    const double start = parse_double(parts[1], "--control start");
    const double stop = parse_double(parts[2], "--control stop");
    const std::uint64_t count = parse_uint(parts[3], "--control count");
    if (count < 1) throw ConfigError("--control beta grid needs count >= 1");
    if (!(stop >= start))
      throw ConfigError("--control beta grid needs stop >= start");
    for (std::uint64_t i = 0; i < count; ++i)
      betas.push_back(count == 1 ? start
                                 : start + (stop - start) *
                                               static_cast<double>(i) /
                                               static_cast<double>(count - 1));
    curve = alignbounds::overopt_curve_beta(inst.dist, pair, betas, sigma2);
  } else if (parts.size() == 3 && parts[0] == "n") {
    const std::uint64_t start = parse_uint(parts[1], "--control start");
    const std::uint64_t stop = parse_uint(parts[2], "--control stop");
    if (start < 1 || stop < start)
      throw ConfigError("--control n grid needs 1 <= start <= stop");
    // Doubling grid; the endpoint always closes the sweep.
    for (std::uint64_t n = start; n < stop; n *= 2)
      ns.push_back(static_cast<std::size_t>(n));
    ns.push_back(static_cast<std::size_t>(stop));
    curve = alignbounds::overopt_curve_n(inst.dist, pair, ns, sigma2);
  } else {
    throw ConfigError(
        "--control must be beta:START:STOP:COUNT or n:START:STOP");
  }

  alignbounds::CsvBuilder csv;
  csv.header({"control", "kl", "proxy_improvement", "golden_improvement",
              "proxy_bound", "golden_bound"});
  for (const auto& row : curve.rows)
    csv.row({alignbounds::format_sig(row.control),
             alignbounds::format_sig(row.kl),
             alignbounds::format_sig(row.proxy_improvement),
             alignbounds::format_sig(row.golden_improvement),
             alignbounds::format_sig(row.proxy_bound),
             alignbounds::format_sig(row.golden_bound)});
  const std::string extra =
      "control=" + curve.control_kind +
      " eps=" + alignbounds::format_sig(pair.eps) +
      " sigma2_ref=" + alignbounds::format_sig(curve.sigma2_ref) +
      " synthetic=1";

  GoodhartOutputs outputs;
  outputs.csv = csv.finish(ctx.seed, ctx.hash(), extra);

  if (!a.reports_path.empty()) {
    json reports = json::array();
    if (curve.control_kind == "beta") {
      for (double beta : betas) {
        if (!(beta > 0.0)) continue;
        const auto rep = alignbounds::rl_transfer_check(inst.dist, pair, beta);
        reports.push_back(
            json{{"beta", num(rep.beta)},
                 {"lhs", num(rep.lhs)},
                 {"rhs", num(rep.rhs)},
                 {"proxy_improvement", num(rep.proxy_improvement)},
                 {"interpolation_term", num(rep.interpolation_term)},
                 {"kl_proxy_policy", num(rep.kl_proxy_policy)},
                 {"kl_golden_policy", num(rep.kl_golden_policy)},
                 {"holds", rep.holds}});
      }
    } else {
      for (std::size_t n : ns) {
        const auto rep =
            alignbounds::bon_transfer_bound(inst.dist, pair, n, sigma2);
        reports.push_back(json{{"n", rep.n},
                               {"golden_improvement",
                                num(rep.golden_improvement)},
                               {"transport_term", num(rep.transport_term)},
                               {"tv_term", num(rep.tv_term)},
                               {"eps", num(rep.eps)},
                               {"bound", num(rep.bound)},
                               {"holds", rep.holds}});
      }
    }
    json doc;
    doc["control_kind"] = curve.control_kind;
    doc["eps"] = num(pair.eps);
    doc["sigma2_ref"] = num(curve.sigma2_ref);
    doc["synthetic"] = true;
    doc["reports"] = reports;
    doc["meta"] = ctx.meta();
    outputs.reports = dump(doc);
  }
  return outputs;
}

// ------------------------------------------------------------- table1 ----

struct Table1Args {
  std::string sweep;
  double alpha = 2.0;
};

std::string run_table1(const Table1Args& a, RunContext& ctx) {
  ctx.kv("cmd", "table1");
  ctx.kv("sweep", a.sweep);
  ctx.kvd("alpha", a.alpha);
  const auto parts = split(a.sweep, ':');
  if (parts.size() != 2)
    throw ConfigError("--sweep must be START:STOP with integers >= 1");
  const std::uint64_t start = parse_uint(parts[0], "--sweep start");
  const std::uint64_t stop = parse_uint(parts[1], "--sweep stop");
  if (start < 1 || stop < start)
    throw ConfigError("--sweep needs 1 <= start <= stop");

  alignbounds::CsvBuilder csv;
  csv.header({"kind", "alpha", "n", "closed", "quadrature", "abs_diff"});
  const auto exp1 = alignbounds::exponential_law();
  for (std::uint64_t n = start; n <= stop; ++n) {
    const auto add_row = [&](const std::string& kind, const std::string& alpha,
                             double closed, double quad) {
      const double diff = std::fabs(closed - quad);
      if (!(diff <= 1e-8))
        throw std::runtime_error(
            "closed form and quadrature disagree for " + kind + " at n=" +
            std::to_string(n) + " (diff " + alignbounds::format_sig(diff) +
            ")");
      csv.row({kind, alpha, std::to_string(n),
               alignbounds::format_sig(closed),
               alignbounds::format_sig(quad),
               alignbounds::format_sig(diff)});
    };
    for (const auto& kind : kFKinds) {
      const auto gen = alignbounds::FGenerator::by_name(kind);
      add_row(kind, "", alignbounds::f_bound_closed(kind, n),
              alignbounds::f_bound_generic(gen, n));
    }
    const double closed = alignbounds::renyi_bound_closed(a.alpha, n);
    const double quad =
        n == 1 ? 0.0
               : alignbounds::renyi_continuous(
                     alignbounds::exp_order_stat_law(n), exp1, a.alpha)
                     .value;
    add_row("renyi", alignbounds::format_sig(a.alpha), closed, quad);
  }
  return csv.finish(ctx.seed, ctx.hash(), "sweep=" + a.sweep);
}

std::string error_line(const std::string& message) {
  return json{{"error", message}}.dump() + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact policies and certified bounds for reward optimization "
               "on finite alphabets"};
  app.require_subcommand(1);

  RunContext ctx;
  const auto add_common = [&ctx](CLI::App* sub) {
    sub->add_option("--out", ctx.out_path,
                    "write output to this file instead of stdout");
    sub->add_option("--seed", ctx.seed, "RNG seed stamped into metadata")
        ->capture_default_str();
  };

  DivArgs div_args;
  auto* div = app.add_subcommand(
      "div", "divergence between two finite laws on a shared support");
  div->add_option("--p", div_args.p_path, "instance file for the left law")
      ->required();
  div->add_option("--q", div_args.q_path, "instance file for the right law")
      ->required();
  div->add_option("--kind", div_args.kind, "divergence kind")
      ->check(CLI::IsMember({"kl", "chi2", "tv", "hellinger", "fkl", "renyi"}))
      ->capture_default_str();
  div->add_option("--alpha", div_args.alpha, "order for --kind renyi")
      ->capture_default_str();
  add_common(div);

  BonArgs bon_args;
  auto* bon = app.add_subcommand(
      "bon", "exact best-of-n policy with its divergence bounds");
  bon->add_option("--dist", bon_args.dist_path,
                  "instance file with a reward")
      ->required();
  bon->add_option("--n", bon_args.n, "number of iid draws")
      ->required()
      ->check(CLI::PositiveNumber);
  bon->add_flag("--all-bounds", bon_args.all_bounds,
                "report every bound family, not just KL");
  bon->add_option("--renyi-alpha", bon_args.renyi_alpha,
                  "order for the Renyi row of --all-bounds")
      ->capture_default_str();
  add_common(bon);

  TiltArgs tilt_args;
  double tilt_beta = 0.0, tilt_delta = 0.0;
  auto* tilt = app.add_subcommand(
      "tilt", "exponentially tilted policy at a rate or a KL budget");
  tilt->add_option("--dist", tilt_args.dist_path,
                   "instance file with a reward; may be multi-prompt")
      ->required();
  auto* beta_opt = tilt->add_option("--beta", tilt_beta, "tilt rate");
  auto* delta_opt =
      tilt->add_option("--delta", tilt_delta, "KL budget to solve for");
  beta_opt->excludes(delta_opt);
  add_common(tilt);

  TransportArgs transport_args;
  auto* transport = app.add_subcommand(
      "transport", "improvement bound chain for a policy under a tail model");
  transport->add_option("--dist", transport_args.dist_path,
                        "instance file with a reward")
      ->required();
  transport->add_option("--policy", transport_args.policy,
                        "tilt:BETA or bon:N")
      ->required();
  transport->add_option("--tail", transport_args.tail,
                        "subgauss:S2, subgamma:S2,C, or auto")
      ->capture_default_str();
  add_common(transport);

  HighProbArgs hp_args;
  auto* highprob = app.add_subcommand(
      "highprob", "Monte Carlo check of the m-sample deviation bound");
  highprob->add_option("--beta", hp_args.beta, "divergence order, > 1")
      ->required();
  highprob->add_option("--m", hp_args.m, "samples per trial")
      ->required()
      ->check(CLI::PositiveNumber);
  highprob->add_option("--t0", hp_args.t0, "deviation margin")->required();
  highprob->add_option("--trials", hp_args.trials, "Monte Carlo trials")
      ->required()
      ->check(CLI::PositiveNumber);
  highprob->add_option(
      "--dist", hp_args.dist_path,
      "instance file with a reward (default: uniform binary, rewards 0 and 1)");
  highprob->add_option("--sigma2", hp_args.sigma2,
                       "subgaussian proxy variance, or auto")
      ->capture_default_str();
  add_common(highprob);

  GoodhartArgs gh_args;
  auto* goodhart = app.add_subcommand(
      "goodhart", "proxy versus golden reward curves along a pressure grid");
  goodhart->add_option("--dist", gh_args.dist_path,
                       "instance file with reward and golden_reward")
      ->required();
  goodhart->add_option("--control", gh_args.control,
                       "beta:START:STOP:COUNT or n:START:STOP")
      ->required();
  goodhart->add_option("--sigma2", gh_args.sigma2,
                       "subgaussian proxy variance, or auto")
      ->capture_default_str();
  goodhart->add_option("--reports", gh_args.reports_path,
                       "also write per-point transfer reports to this file");
  add_common(goodhart);

  Table1Args t1_args;
  auto* table1 = app.add_subcommand(
      "table1", "bound catalog over n, closed forms against quadrature");
  table1->add_option("--sweep", t1_args.sweep, "n range START:STOP")
      ->required();
  table1->add_option("--alpha", t1_args.alpha, "order for the Renyi rows")
      ->capture_default_str();
  add_common(table1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::fputs(app.help().c_str(), stdout);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::fputs(error_line(std::string("argument error: ") + e.what()).c_str(),
               stderr);
    return 2;
  }

  try {
    if (div->parsed()) {
      emit(run_div(div_args, ctx), ctx.out_path);
    } else if (bon->parsed()) {
      emit(run_bon(bon_args, ctx), ctx.out_path);
    } else if (tilt->parsed()) {
      if (beta_opt->count() > 0) tilt_args.beta = tilt_beta;
      if (delta_opt->count() > 0) tilt_args.delta = tilt_delta;
      emit(run_tilt(tilt_args, ctx), ctx.out_path);
    } else if (transport->parsed()) {
      emit(run_transport(transport_args, ctx), ctx.out_path);
    } else if (highprob->parsed()) {
      emit(run_highprob(hp_args, ctx), ctx.out_path);
    } else if (goodhart->parsed()) {
      const auto outputs = run_goodhart(gh_args, ctx);
      emit(outputs.csv, ctx.out_path);
      if (!gh_args.reports_path.empty())
        emit(outputs.reports, gh_args.reports_path);
    } else if (table1->parsed()) {
      emit(run_table1(t1_args, ctx), ctx.out_path);
    }
  } catch (const ConfigError& e) {
    std::fputs(error_line(std::string("config error: ") + e.what()).c_str(),
               stderr);
    return 2;
  } catch (const std::exception& e) {
    std::fputs(error_line(e.what()).c_str(), stderr);
    return 1;
  }
  return 0;
}
