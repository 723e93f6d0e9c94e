#include "cli.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cascade/experiment.hpp"
#include "cascade/features.hpp"
#include "cascade/ingestion.hpp"
#include "cascade/logging.hpp"

namespace cascade {

namespace {

struct RunOpts {
  std::string config;
  std::string algo;
  std::string out;
  std::uint64_t seed = 0;
};

struct FeatureOpts {
  std::string input;
  std::string format = "tab";
  std::string rule = "greater_than_threshold";
  double threshold = 0.0;
  int dim = 0;
  std::string out;
  std::uint64_t split_seed = 0;
};

struct OracleOpts {
  std::string input;
  int k = 0;
};

struct BoundOpts {
  long n = 0;
  int k = 0;
  int d = 0;
  double sigma = 1.0;
  double theta_norm = 1.0;
};

void cmd_run(const CLI::App& sub, RunOpts& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (sub.count("--algo") > 0) cfg.algo = algo_from_name(o.algo);
  if (sub.count("--out") > 0) cfg.out_dir = o.out;
  if (sub.count("--seed") > 0) cfg.master_seed = o.seed;
  const RegretTrace trace = run_experiment(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/trace.csv";
  write_trace(trace, path);
  std::ostringstream msg;
  msg << std::setprecision(12);
  msg << "wrote " << path << "\n";
  msg << "algo " << algo_name(cfg.algo) << ", " << cfg.runs << " runs of "
      << cfg.n_steps << " steps\n";
  msg << "final mean cumulative regret " << trace.mean_regret.back() << " (stderr "
      << trace.stderr_regret.back() << "), final mean cumulative reward "
      << trace.mean_reward.back() << "\n";
  std::cout << msg.str();
}

void cmd_features(const CLI::App& sub, FeatureOpts& o) {
  const auto triples = load_ratings(o.input, delimiter_from_name(o.format));
  BinarizeRule rule;
  rule.kind = rule_kind_from_name(o.rule);
  rule.threshold = o.threshold;
  const auto bin = binarize(triples, rule);
  ItemFeatures feats;
  if (sub.count("--split-seed") > 0) {
    // Features from a random half of the users, as in evaluation runs.
    const FeatureSplit split = split_rows(bin.w, o.split_seed);
    feats = build_features(split, o.dim);
  } else {
    feats = build_features_from_matrix(bin.w, o.dim);
  }
  if (feats.all_zero) {
    log_info("warning: input matrix is all zeros; features carry no signal");
  }
  write_features_csv(feats, o.out);
  std::ostringstream msg;
  msg << std::setprecision(12);
  msg << "wrote " << o.out << " (" << feats.items() << " items, d = " << feats.dim()
      << ", scale " << feats.scale << ")\n";
  std::cout << msg.str();
}

void cmd_oracle(OracleOpts& o) {
  const LoadedMatrix loaded = load_matrix_csv(o.input);
  const RecommendationList astar = greedy_oracle(loaded.w, o.k);
  long covered = 0;
  for (int i = 0; i < loaded.w.users(); ++i) {
    for (int item : astar.items) {
      if (loaded.w.at(i, item)) {
        ++covered;
        break;
      }
    }
  }
  std::ostringstream msg;
  msg << "astar_indices:";
  for (int item : astar.items) msg << ' ' << item;
  msg << "\nastar_items:";
  for (int item : astar.items) msg << ' ' << loaded.item_ids[static_cast<std::size_t>(item)];
  msg << "\ncoverage: " << std::setprecision(12)
      << static_cast<double>(covered) / static_cast<double>(loaded.w.users()) << " ("
      << covered << "/" << loaded.w.users() << " users)\n";
  std::cout << msg.str();
}

void cmd_bound(const BoundOpts& o) {
  const BoundResult r = theorem_bound(o.n, o.k, o.d, o.sigma, o.theta_norm);
  std::ostringstream msg;
  msg << std::setprecision(15);
  msg << "c = " << r.c << "\n";
  msg << "bound = " << r.bound << "\n";
  std::cout << msg.str();
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Cascading bandit simulation and evaluation toolkit"};
  app.require_subcommand(1);

  RunOpts run_opts;
  auto* run = app.add_subcommand("run", "Run a bandit experiment from a JSON config");
  run->add_option("--config", run_opts.config, "Path to the flat JSON config")
      ->required();
  run->add_option("--algo", run_opts.algo,
                  "Override the config's algorithm (cascade_ucb1, cascade_lin_ts, "
                  "cascade_lin_ucb, ranked_lin_ts)");
  run->add_option("--out", run_opts.out, "Override the config's output directory");
  run->add_option("--seed", run_opts.seed, "Override the config's master seed");

  FeatureOpts feat_opts;
  auto* features =
      app.add_subcommand("features", "Build SVD item features from a ratings file");
  features->add_option("--input", feat_opts.input, "Ratings file path")->required();
  features->add_option("--format", feat_opts.format,
                       "Input delimiter: tab, comma, or double-colon");
  features->add_option("--rule", feat_opts.rule,
                       "Binarize rule: greater_than_threshold or presence");
  features->add_option("--threshold", feat_opts.threshold,
                       "Threshold for greater_than_threshold (strict)");
  features->add_option("-d,--dim", feat_opts.dim, "Feature dimension")->required();
  features->add_option("--out", feat_opts.out, "Output CSV path")->required();
  features->add_option("--split-seed", feat_opts.split_seed,
                       "Use only a seeded random half of the users");

  OracleOpts oracle_opts;
  auto* oracle =
      app.add_subcommand("oracle", "Greedy max-coverage list of a 0/1 matrix CSV");
  oracle->add_option("--input", oracle_opts.input, "Matrix CSV path")->required();
  oracle->add_option("-K,--list-length", oracle_opts.k, "List length")->required();

  BoundOpts bound_opts;
  auto* bound = app.add_subcommand(
      "bound", "Evaluate the linear-UCB confidence radius and regret bound");
  bound->add_option("-n,--steps", bound_opts.n, "Number of steps")->required();
  bound->add_option("-K,--list-length", bound_opts.k, "List length")->required();
  bound->add_option("-d,--dim", bound_opts.d, "Feature dimension")->required();
  bound->add_option("--sigma", bound_opts.sigma, "Noise scale (default 1)");
  bound->add_option("--theta-norm", bound_opts.theta_norm,
                    "Bound on the parameter norm (default 1)");

  run->callback([&] { cmd_run(*run, run_opts); });
  features->callback([&] { cmd_features(*features, feat_opts); });
  oracle->callback([&] { cmd_oracle(oracle_opts); });
  bound->callback([&] { cmd_bound(bound_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace cascade
