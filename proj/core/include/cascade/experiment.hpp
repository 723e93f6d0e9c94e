#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cascade/environment.hpp"
#include "cascade/features.hpp"
#include "cascade/ingestion.hpp"
#include "cascade/policies.hpp"

namespace cascade {

enum class Algo { kCascadeUcb1, kCascadeLinTs, kCascadeLinUcb, kRankedLinTs };

Algo algo_from_name(const std::string& name);
std::string algo_name(Algo algo);

struct DatasetConfig {
  std::string path;
  Delimiter format = Delimiter::kTab;
  BinarizeRule rule;
};

struct SyntheticConfig {
  int items = 0;  // L
  std::uint64_t theta_seed = 0;
};

struct ExperimentConfig {
  Algo algo = Algo::kCascadeLinTs;
  long n_steps = 0;
  int runs = 0;
  int k = 0;
  int d = 0;
  double sigma = 1.0;
  std::optional<double> c;  // CascadeLinUCB only; derived from the
                            // confidence-bound formula when absent
  std::optional<int> l_max;
  std::optional<int> m_max;
  std::optional<DatasetConfig> dataset;    // exactly one of dataset /
  std::optional<SyntheticConfig> synthetic;  // synthetic must be present
  std::uint64_t master_seed = 0;
  std::uint64_t split_seed = 0;
  std::string out_dir = "out";
  double theta_norm = 1.0;
  bool oracle_replay = false;  // debug: always show the environment's A*
  int workers = 1;
};

// Parses a flat JSON object; every key must be known. `origin` names the
// source (file path) in error messages.
ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::string& origin);
ExperimentConfig load_config(const std::string& path);

struct RegretTrace {
  std::vector<long> steps;            // checkpoint step indices
  std::vector<double> mean_regret;    // cumulative regret, mean over runs
  std::vector<double> stderr_regret;  // standard error over runs
  std::vector<double> mean_reward;    // cumulative reward, mean over runs
  std::vector<double> per_run_final;  // final cumulative regret of each run
};

struct BoundResult {
  double c = 0.0;
  double bound = 0.0;
};

// Closed-form confidence radius and n-step regret bound of the linear UCB
// analysis, natural logarithms throughout:
//   c     = (1/sigma) sqrt(d ln(1 + nK/(d sigma^2)) + 2 ln(nK)) + theta_norm
//   bound = 2cK sqrt(d n ln(1 + nK/(d sigma^2)) / ln(1 + 1/sigma^2)) + 1
BoundResult theorem_bound(long n, int k, int d, double sigma, double theta_norm);

// Engine-level run description, independent of where env/features came from.
struct RunSpec {
  Algo algo = Algo::kCascadeLinTs;
  long n_steps = 0;
  int runs = 1;
  int k = 1;
  double sigma = 1.0;
  std::optional<double> c;
  double theta_norm = 1.0;
  std::uint64_t master_seed = 0;
  int workers = 1;
  bool oracle_replay = false;
};

// Checkpoint grid: every max(1, n/1000) steps, final step always included.
std::vector<long> checkpoint_steps(long n_steps);

// The c actually used by CascadeLinUCB under this spec, with features of
// dimension d.
double resolve_ucb_c(const RunSpec& spec, int d);

std::unique_ptr<Policy> make_policy(Algo algo, const Environment& env,
                                    const ItemFeatures& feats, int k, double sigma,
                                    double c);

struct SingleRun {
  std::vector<long> steps;
  std::vector<double> cum_regret;
  std::vector<double> cum_reward;
};

// One policy run against `env` with the given rng seed. Exposed so tests can
// look at individual trajectories.
SingleRun run_single(const Environment& env, const ItemFeatures& feats,
                     const RunSpec& spec, std::uint64_t seed);

// spec.runs independent runs (run r seeded with derive_seed(master_seed, r)),
// executed on up to spec.workers threads, aggregated in run order.
RegretTrace run_bandit(const Environment& env, const ItemFeatures& feats,
                       const RunSpec& spec);

// Full config-driven pipeline: build the environment and features (dataset
// ingestion + SVD split, or the exact linear generator), then run_bandit.
RegretTrace run_experiment(const ExperimentConfig& cfg);

// CSV: header `step,mean_regret,stderr,mean_reward`, one row per checkpoint,
// 17 significant digits, trailing newline; byte-deterministic per trace.
void write_trace(const RegretTrace& trace, const std::string& path);

}  // namespace cascade
