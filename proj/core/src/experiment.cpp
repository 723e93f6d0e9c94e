#include "cascade/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

#include "cascade/logging.hpp"
#include "cascade/synthetic.hpp"

namespace cascade {

Algo algo_from_name(const std::string& name) {
  if (name == "cascade_ucb1") return Algo::kCascadeUcb1;
  if (name == "cascade_lin_ts") return Algo::kCascadeLinTs;
  if (name == "cascade_lin_ucb") return Algo::kCascadeLinUcb;
  if (name == "ranked_lin_ts") return Algo::kRankedLinTs;
  throw std::invalid_argument(
      "unknown algo '" + name +
      "' (expected cascade_ucb1, cascade_lin_ts, cascade_lin_ucb, or ranked_lin_ts)");
}

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::kCascadeUcb1: return "cascade_ucb1";
    case Algo::kCascadeLinTs: return "cascade_lin_ts";
    case Algo::kCascadeLinUcb: return "cascade_lin_ucb";
    case Algo::kRankedLinTs: return "ranked_lin_ts";
  }
  return "?";
}

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

long get_long(const json& j, const std::string& origin, const std::string& key,
              long min_value) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    config_error(origin, "'" + key + "' must be an integer");
  }
  const long out = v.get<long>();
  if (out < min_value) {
    config_error(origin, "'" + key + "' must be at least " + std::to_string(min_value));
  }
  return out;
}

std::uint64_t get_seed(const json& j, const std::string& origin, const std::string& key) {
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  config_error(origin, "'" + key + "' must be a non-negative integer");
}

double get_positive(const json& j, const std::string& origin, const std::string& key) {
  const auto& v = j.at(key);
  if (!v.is_number()) config_error(origin, "'" + key + "' must be a number");
  const double out = v.get<double>();
  if (!(out > 0.0)) config_error(origin, "'" + key + "' must be positive");
  return out;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    config_error(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error(origin, "config must be a flat JSON object");

  static const std::set<std::string> known = {
      "algo",          "n_steps",       "runs",
      "K",             "d",             "sigma",
      "c",             "L_max",         "m_max",
      "dataset_path",  "dataset_format", "dataset_rule",
      "dataset_threshold", "synthetic_L", "synthetic_theta_seed",
      "master_seed",   "split_seed",    "out_dir",
      "theta_norm",    "oracle_replay", "workers"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known.find(key) == known.end()) {
      config_error(origin, "unknown config key '" + key + "'");
    }
  }
  for (const char* req : {"algo", "n_steps", "runs", "K", "d"}) {
    if (!j.contains(req)) {
      config_error(origin, std::string("missing required key '") + req + "'");
    }
  }

  ExperimentConfig cfg;
  if (!j.at("algo").is_string()) config_error(origin, "'algo' must be a string");
  cfg.algo = algo_from_name(j.at("algo").get<std::string>());
  cfg.n_steps = get_long(j, origin, "n_steps", 1);
  cfg.runs = static_cast<int>(get_long(j, origin, "runs", 1));
  cfg.k = static_cast<int>(get_long(j, origin, "K", 1));
  cfg.d = static_cast<int>(get_long(j, origin, "d", 1));
  if (j.contains("sigma")) cfg.sigma = get_positive(j, origin, "sigma");
  if (j.contains("c")) cfg.c = get_positive(j, origin, "c");
  if (j.contains("L_max")) cfg.l_max = static_cast<int>(get_long(j, origin, "L_max", 1));
  if (j.contains("m_max")) cfg.m_max = static_cast<int>(get_long(j, origin, "m_max", 1));
  if (j.contains("master_seed")) cfg.master_seed = get_seed(j, origin, "master_seed");
  if (j.contains("split_seed")) cfg.split_seed = get_seed(j, origin, "split_seed");
  if (j.contains("out_dir")) {
    if (!j.at("out_dir").is_string()) config_error(origin, "'out_dir' must be a string");
    cfg.out_dir = j.at("out_dir").get<std::string>();
  }
  if (j.contains("theta_norm")) cfg.theta_norm = get_positive(j, origin, "theta_norm");
  if (j.contains("oracle_replay")) {
    if (!j.at("oracle_replay").is_boolean()) {
      config_error(origin, "'oracle_replay' must be a boolean");
    }
    cfg.oracle_replay = j.at("oracle_replay").get<bool>();
  }
  if (j.contains("workers")) {
    cfg.workers = static_cast<int>(get_long(j, origin, "workers", 1));
  }

  const bool has_dataset = j.contains("dataset_path");
  const bool has_synthetic = j.contains("synthetic_L");
  if (has_dataset == has_synthetic) {
    config_error(origin, "exactly one of 'dataset_path' and 'synthetic_L' is required");
  }
  if (has_dataset) {
    DatasetConfig ds;
    if (!j.at("dataset_path").is_string()) {
      config_error(origin, "'dataset_path' must be a string");
    }
    ds.path = j.at("dataset_path").get<std::string>();
    if (j.contains("dataset_format")) {
      if (!j.at("dataset_format").is_string()) {
        config_error(origin, "'dataset_format' must be a string");
      }
      ds.format = delimiter_from_name(j.at("dataset_format").get<std::string>());
    }
    if (j.contains("dataset_rule")) {
      if (!j.at("dataset_rule").is_string()) {
        config_error(origin, "'dataset_rule' must be a string");
      }
      ds.rule.kind = rule_kind_from_name(j.at("dataset_rule").get<std::string>());
    }
    if (j.contains("dataset_threshold")) {
      if (!j.at("dataset_threshold").is_number()) {
        config_error(origin, "'dataset_threshold' must be a number");
      }
      ds.rule.threshold = j.at("dataset_threshold").get<double>();
    }
    cfg.dataset = std::move(ds);
  } else {
    for (const char* key : {"dataset_format", "dataset_rule", "dataset_threshold"}) {
      if (j.contains(key)) {
        config_error(origin, std::string("'") + key + "' requires 'dataset_path'");
      }
    }
    SyntheticConfig sy;
    sy.items = static_cast<int>(get_long(j, origin, "synthetic_L", 1));
    if (j.contains("synthetic_theta_seed")) {
      sy.theta_seed = get_seed(j, origin, "synthetic_theta_seed");
    }
    cfg.synthetic = sy;
    if (cfg.d > sy.items) config_error(origin, "'d' cannot exceed 'synthetic_L'");
  }
  if (cfg.synthetic.has_value()) {
    for (const char* key : {"L_max", "m_max"}) {
      if (j.contains(key)) {
        config_error(origin, std::string("'") + key + "' requires 'dataset_path'");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), path);
}

BoundResult theorem_bound(long n, int k, int d, double sigma, double theta_norm) {
  if (n < 1 || k < 1 || d < 1 || !(sigma > 0.0) || !(theta_norm > 0.0)) {
    throw std::invalid_argument("theorem_bound: all arguments must be positive");
  }
  const double nk = static_cast<double>(n) * static_cast<double>(k);
  const double s2 = sigma * sigma;
  const double log_term = std::log(1.0 + nk / (static_cast<double>(d) * s2));
  BoundResult out;
  out.c = std::sqrt(static_cast<double>(d) * log_term + 2.0 * std::log(nk)) / sigma +
          theta_norm;
  out.bound = 2.0 * out.c * static_cast<double>(k) *
                  std::sqrt(static_cast<double>(d) * static_cast<double>(n) * log_term /
                            std::log1p(1.0 / s2)) +
              1.0;
  return out;
}

std::vector<long> checkpoint_steps(long n_steps) {
  if (n_steps < 1) {
    throw std::invalid_argument("checkpoint_steps: n_steps must be positive");
  }
  const long stride = std::max<long>(1, n_steps / 1000);
  std::vector<long> steps;
  steps.reserve(static_cast<std::size_t>(n_steps / stride + 1));
  for (long s = stride; s <= n_steps; s += stride) steps.push_back(s);
  if (steps.empty() || steps.back() != n_steps) steps.push_back(n_steps);
  return steps;
}

double resolve_ucb_c(const RunSpec& spec, int d) {
  if (spec.c.has_value()) return *spec.c;
  return theorem_bound(spec.n_steps, spec.k, d, spec.sigma, spec.theta_norm).c;
}

std::unique_ptr<Policy> make_policy(Algo algo, const Environment& env,
                                    const ItemFeatures& feats, int k, double sigma,
                                    double c) {
  switch (algo) {
    case Algo::kCascadeUcb1:
      return std::make_unique<CascadeUcb1Policy>(env.items(), k);
    case Algo::kCascadeLinTs:
      return std::make_unique<CascadeLinTsPolicy>(feats, k, sigma);
    case Algo::kCascadeLinUcb:
      return std::make_unique<CascadeLinUcbPolicy>(feats, k, sigma, c);
    case Algo::kRankedLinTs:
      return std::make_unique<RankedLinTsPolicy>(feats, k, sigma);
  }
  throw std::invalid_argument("make_policy: unhandled algorithm");
}

SingleRun run_single(const Environment& env, const ItemFeatures& feats,
                     const RunSpec& spec, std::uint64_t seed) {
  if (spec.n_steps < 1) {
    throw std::invalid_argument("run_single: n_steps must be positive");
  }
  const bool needs_features = spec.algo != Algo::kCascadeUcb1;
  if (needs_features && feats.items() != env.items()) {
    throw std::invalid_argument("run_single: features cover " +
                                std::to_string(feats.items()) + " items, environment has " +
                                std::to_string(env.items()));
  }
  const double c =
      spec.algo == Algo::kCascadeLinUcb ? resolve_ucb_c(spec, feats.dim()) : 1.0;
  std::unique_ptr<Policy> policy;
  if (!spec.oracle_replay) {
    policy = make_policy(spec.algo, env, feats, spec.k, spec.sigma, c);
  }
  Rng rng(seed);
  const auto steps = checkpoint_steps(spec.n_steps);
  SingleRun out;
  out.steps = steps;
  out.cum_regret.reserve(steps.size());
  out.cum_reward.reserve(steps.size());
  double cum_regret = 0.0;
  double cum_reward = 0.0;
  std::size_t next_cp = 0;
  for (long t = 1; t <= spec.n_steps; ++t) {
    const RecommendationList a =
        spec.oracle_replay ? env.optimal_list() : policy->select(rng);
    const StepOutcome o = env.step(a, rng);
    if (!spec.oracle_replay) policy->update(a, o.click);
    cum_regret += o.regret;
    cum_reward += o.reward;
    if (next_cp < steps.size() && t == steps[next_cp]) {
      out.cum_regret.push_back(cum_regret);
      out.cum_reward.push_back(cum_reward);
      ++next_cp;
    }
  }
  return out;
}

RegretTrace run_bandit(const Environment& env, const ItemFeatures& feats,
                       const RunSpec& spec) {
  if (spec.runs < 1) {
    throw std::invalid_argument("run_bandit: runs must be positive");
  }
  if (spec.algo == Algo::kCascadeLinUcb && !spec.c.has_value()) {
    std::ostringstream msg;
    msg << std::setprecision(12) << "cascade_lin_ucb: c not given, using c = "
        << resolve_ucb_c(spec, feats.dim()) << " from the confidence-bound formula";
    log_info(msg.str());
  }

  const int runs = spec.runs;
  std::vector<SingleRun> results(static_cast<std::size_t>(runs));
  const int workers = std::max(1, std::min(spec.workers, runs));
  if (workers == 1) {
    for (int r = 0; r < runs; ++r) {
      results[static_cast<std::size_t>(r)] =
          run_single(env, feats, spec, derive_seed(spec.master_seed,
                                                   static_cast<std::uint64_t>(r)));
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int wk = 0; wk < workers; ++wk) {
      pool.emplace_back([&, wk] {
        try {
          for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) {
            results[static_cast<std::size_t>(r)] =
                run_single(env, feats, spec,
                           derive_seed(spec.master_seed, static_cast<std::uint64_t>(r)));
          }
        } catch (...) {
          errors[static_cast<std::size_t>(wk)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  RegretTrace trace;
  trace.steps = results.front().steps;
  const std::size_t n_cp = trace.steps.size();
  trace.mean_regret.assign(n_cp, 0.0);
  trace.stderr_regret.assign(n_cp, 0.0);
  trace.mean_reward.assign(n_cp, 0.0);
  for (std::size_t i = 0; i < n_cp; ++i) {
    double mean = 0.0;
    for (const auto& run : results) mean += run.cum_regret[i];
    mean /= runs;
    double mean_reward = 0.0;
    for (const auto& run : results) mean_reward += run.cum_reward[i];
    mean_reward /= runs;
    double ss = 0.0;
    for (const auto& run : results) {
      const double dlt = run.cum_regret[i] - mean;
      ss += dlt * dlt;
    }
    const double se =
        runs > 1 ? std::sqrt(ss / (runs - 1)) / std::sqrt(static_cast<double>(runs)) : 0.0;
    trace.mean_regret[i] = mean;
    trace.stderr_regret[i] = se;
    trace.mean_reward[i] = mean_reward;
  }
  trace.per_run_final.reserve(static_cast<std::size_t>(runs));
  for (const auto& run : results) trace.per_run_final.push_back(run.cum_regret.back());
  return trace;
}

RegretTrace run_experiment(const ExperimentConfig& cfg) {
  if (static_cast<int>(cfg.dataset.has_value()) +
          static_cast<int>(cfg.synthetic.has_value()) !=
      1) {
    throw std::invalid_argument("run_experiment: exactly one of dataset/synthetic");
  }
  RunSpec spec;
  spec.algo = cfg.algo;
  spec.n_steps = cfg.n_steps;
  spec.runs = cfg.runs;
  spec.k = cfg.k;
  spec.sigma = cfg.sigma;
  spec.c = cfg.c;
  spec.theta_norm = cfg.theta_norm;
  spec.master_seed = cfg.master_seed;
  spec.workers = cfg.workers;
  spec.oracle_replay = cfg.oracle_replay;

  if (cfg.synthetic.has_value()) {
    const SyntheticEnv se =
        synthetic_env(cfg.synthetic->items, cfg.d, cfg.k, cfg.synthetic->theta_seed);
    log_info("synthetic environment: L = " + std::to_string(cfg.synthetic->items) +
             ", d = " + std::to_string(cfg.d) + ", optimal expected reward = " +
             std::to_string(se.env->optimal_expected_reward()));
    return run_bandit(*se.env, se.feats, spec);
  }

  const auto triples = load_ratings(cfg.dataset->path, cfg.dataset->format);
  auto bin = binarize(triples, cfg.dataset->rule);
  FeedbackMatrix w = std::move(bin.w);
  if (cfg.l_max.has_value() || cfg.m_max.has_value()) {
    w = select_top(w, cfg.l_max.value_or(w.items()), cfg.m_max.value_or(w.users()));
  }
  if (cfg.k > w.items()) {
    throw std::invalid_argument("run_experiment: K = " + std::to_string(cfg.k) +
                                " exceeds the " + std::to_string(w.items()) +
                                " items left after reduction");
  }
  log_info("feedback matrix: " + std::to_string(w.users()) + " users x " +
           std::to_string(w.items()) + " items");
  FeatureSplit split = split_rows(w, cfg.split_seed);
  const ItemFeatures feats = build_features(split, cfg.d);
  if (feats.all_zero) {
    log_info("warning: train split is all zeros; features carry no signal");
  }
  const MatrixEnvironment env(std::move(split.test), cfg.k);
  return run_bandit(env, feats, spec);
}

void write_trace(const RegretTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << "step,mean_regret,stderr,mean_reward\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    line.str("");
    line << trace.steps[i] << ',' << trace.mean_regret[i] << ','
         << trace.stderr_regret[i] << ',' << trace.mean_reward[i];
    out << line.str() << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace cascade
