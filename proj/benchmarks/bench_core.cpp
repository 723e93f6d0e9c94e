// Microbenchmarks for the hot loops of the simulation engine: posterior
// updates, selections, environment steps, feature construction, and the
// greedy oracle.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "cascade/environment.hpp"
#include "cascade/features.hpp"
#include "cascade/numerics.hpp"
#include "cascade/policies.hpp"
#include "cascade/rng.hpp"
#include "cascade/synthetic.hpp"

namespace {

using namespace cascade;

void bm_rank_one_update(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  PDMatrixInverse inv = PDMatrixInverse::identity(d);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.normal();
  x /= x.norm();
  for (auto _ : state) {
    inv = rank_one_update(inv, x, 1.0);
    benchmark::DoNotOptimize(inv.inv.data());
  }
}
BENCHMARK(bm_rank_one_update)->Arg(4)->Arg(20)->Arg(64);

void bm_lin_ts_select(benchmark::State& state) {
  const int items = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  SyntheticEnv env = synthetic_env(items, d, 4, 7);
  LinearState lin = LinearState::init(d, 1.0);
  Rng rng(2);
  for (auto _ : state) {
    RecommendationList a = lin_ts_select(lin, env.feats, 4, rng);
    benchmark::DoNotOptimize(a.items.data());
  }
}
BENCHMARK(bm_lin_ts_select)->Args({64, 4})->Args({256, 20})->Args({1024, 20});

void bm_lin_ucb_select(benchmark::State& state) {
  const int items = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  SyntheticEnv env = synthetic_env(items, d, 4, 7);
  LinearState lin = LinearState::init(d, 1.0);
  for (auto _ : state) {
    RecommendationList a = lin_ucb_select(lin, env.feats, 4, 1.5);
    benchmark::DoNotOptimize(a.items.data());
  }
}
BENCHMARK(bm_lin_ucb_select)->Args({64, 4})->Args({256, 20})->Args({1024, 20});

void bm_lin_update(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  SyntheticEnv env = synthetic_env(64, d, 4, 7);
  LinearState lin = LinearState::init(d, 1.0);
  RecommendationList a{{0, 1, 2, 3}};
  ClickFeedback c = ClickFeedback::at(3);
  for (auto _ : state) {
    lin = lin_update(std::move(lin), a, c, env.feats);
    benchmark::DoNotOptimize(lin.theta_bar.data());
  }
}
BENCHMARK(bm_lin_update)->Arg(4)->Arg(20);

void bm_env_step(benchmark::State& state) {
  SyntheticEnv env = synthetic_env(256, 8, 4, 11);
  RecommendationList a{{5, 80, 130, 200}};
  Rng rng(3);
  for (auto _ : state) {
    StepOutcome out = env.env->step(a, rng);
    benchmark::DoNotOptimize(out.regret);
  }
}
BENCHMARK(bm_env_step);

void bm_matrix_env_step(benchmark::State& state) {
  FeedbackMatrix w = latent_feedback_matrix(1000, 256, 10, 13);
  MatrixEnvironment env(std::move(w), 4);
  RecommendationList a{{5, 80, 130, 200}};
  Rng rng(4);
  for (auto _ : state) {
    StepOutcome out = env.step(a, rng);
    benchmark::DoNotOptimize(out.regret);
  }
}
BENCHMARK(bm_matrix_env_step);

void bm_truncated_svd(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  FeedbackMatrix w = latent_feedback_matrix(1000, 256, 10, 17);
  Eigen::MatrixXd dense = w.to_dense();
  for (auto _ : state) {
    SvdFactors f = truncated_svd(dense, d);
    benchmark::DoNotOptimize(f.s.data());
  }
}
BENCHMARK(bm_truncated_svd)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void bm_greedy_oracle(benchmark::State& state) {
  FeedbackMatrix w = latent_feedback_matrix(1000, 256, 10, 19);
  for (auto _ : state) {
    RecommendationList a = greedy_oracle(w, 4);
    benchmark::DoNotOptimize(a.items.data());
  }
}
BENCHMARK(bm_greedy_oracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
