#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include "doctest.h"

#include "cascade/environment.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

RecommendationList list(std::initializer_list<int> items) {
  return RecommendationList{std::vector<int>(items)};
}

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

// Exhaustive max over all K-subsets of expected coverage, for cross-checking
// the greedy list on small instances.
long best_coverage_exhaustive(const FeedbackMatrix& w, int k) {
  const int items = w.items();
  std::vector<int> pick(k);
  long best = -1;
  // Enumerate combinations via the usual odometer.
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    long covered = 0;
    for (int u = 0; u < w.users(); ++u) {
      bool hit = false;
      for (int e : pick) hit = hit || w.at(u, e);
      covered += hit ? 1 : 0;
    }
    best = std::max(best, covered);
    int j = k - 1;
    while (j >= 0 && pick[j] == items - k + j) --j;
    if (j < 0) break;
    ++pick[j];
    for (int l = j + 1; l < k; ++l) pick[l] = pick[l - 1] + 1;
  }
  return best;
}

long coverage_of(const FeedbackMatrix& w, const RecommendationList& a) {
  long covered = 0;
  for (int u = 0; u < w.users(); ++u) {
    bool hit = false;
    for (int e : a.items) hit = hit || w.at(u, e);
    covered += hit ? 1 : 0;
  }
  return covered;
}

FeedbackMatrix random_matrix(int users, int items, double p, Rng& rng) {
  FeedbackMatrix w(users, items);
  for (int u = 0; u < users; ++u)
    for (int e = 0; e < items; ++e) w.set(u, e, rng.uniform01() < p);
  return w;
}

}  // namespace

TEST_CASE("reward on binary realizations") {
  // No attractive item in the list.
  CHECK(reward(list({0, 1}), vec({0.0, 0.0, 1.0})) == 0.0);
  // One attractive item anywhere in the list saturates the reward.
  CHECK(reward(list({0, 2}), vec({0.0, 0.0, 1.0})) == 1.0);
  CHECK(reward(list({2}), vec({0.0, 0.0, 1.0})) == 1.0);
}

TEST_CASE("reward on probability vectors") {
  // Four items at 0.5 each: 1 - 0.5^4.
  Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.5);
  CHECK(reward(list({0, 1, 2, 3}), w) == doctest::Approx(0.9375).epsilon(1e-15));
  // Adding an item never lowers the reward.
  Eigen::VectorXd probs = vec({0.3, 0.1, 0.4, 0.05});
  double r1 = reward(list({1}), probs);
  double r2 = reward(list({1, 3}), probs);
  double r3 = reward(list({1, 3, 0}), probs);
  CHECK(r1 <= r2);
  CHECK(r2 <= r3);
  // Order does not matter.
  CHECK(reward(list({0, 2}), probs) == doctest::Approx(reward(list({2, 0}), probs)));
}

TEST_CASE("reward rejects out-of-range items") {
  CHECK_THROWS_AS(reward(list({3}), vec({0.5, 0.5})), std::out_of_range);
  CHECK_THROWS_AS(reward(list({-1}), vec({0.5, 0.5})), std::out_of_range);
}

TEST_CASE("simulate_click finds the first attractive position") {
  std::vector<std::uint8_t> row = {0, 1, 0, 1};
  // List order decides the position, not item index order.
  ClickFeedback c = simulate_click(list({0, 1, 2, 3}), row);
  REQUIRE(c.position.has_value());
  CHECK(*c.position == 2);

  c = simulate_click(list({2, 3, 1, 0}), row);
  REQUIRE(c.position.has_value());
  CHECK(*c.position == 2);  // item 3 sits at position 2 here

  c = simulate_click(list({1}), row);
  REQUIRE(c.position.has_value());
  CHECK(*c.position == 1);
}

TEST_CASE("simulate_click with nothing attractive reports no click") {
  std::vector<std::uint8_t> row = {0, 0, 0, 0};
  ClickFeedback c = simulate_click(list({0, 1, 2, 3}), row);
  CHECK_FALSE(c.position.has_value());
  CHECK(c.observed_prefix(4) == 4);
}

TEST_CASE("observed_weights reveals exactly the examined prefix") {
  RecommendationList a = list({7, 3, 9, 5});

  SUBCASE("click at position 2") {
    std::vector<ObservedWeight> obs = observed_weights(a, ClickFeedback::at(2));
    REQUIRE(obs.size() == 2);
    CHECK(obs[0].item == 7);
    CHECK(obs[0].weight == 0);
    CHECK(obs[1].item == 3);
    CHECK(obs[1].weight == 1);
  }

  SUBCASE("no click observes the whole list as zeros") {
    std::vector<ObservedWeight> obs = observed_weights(a, ClickFeedback::none());
    REQUIRE(obs.size() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(obs[k].item == a.items[k]);
      CHECK(obs[k].weight == 0);
    }
  }

  SUBCASE("click at position 1 observes a single weight") {
    std::vector<ObservedWeight> obs = observed_weights(a, ClickFeedback::at(1));
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].item == 7);
    CHECK(obs[0].weight == 1);
  }

  SUBCASE("click position beyond the list is rejected") {
    CHECK_THROWS_AS(observed_weights(a, ClickFeedback::at(5)), std::out_of_range);
    CHECK_THROWS_AS(observed_weights(a, ClickFeedback::at(0)), std::out_of_range);
  }
}

TEST_CASE("attraction_probs are column means") {
  SUBCASE("all ones") {
    FeedbackMatrix w = FeedbackMatrix::from_dense(Eigen::MatrixXd::Ones(5, 3));
    AttractionProbabilities p = attraction_probs(w);
    REQUIRE(p.probs.size() == 3);
    for (int e = 0; e < 3; ++e) CHECK(p.probs(e) == 1.0);
  }
  SUBCASE("all zeros") {
    FeedbackMatrix w = FeedbackMatrix::from_dense(Eigen::MatrixXd::Zero(5, 3));
    AttractionProbabilities p = attraction_probs(w);
    for (int e = 0; e < 3; ++e) CHECK(p.probs(e) == 0.0);
  }
  SUBCASE("mixed column") {
    Eigen::MatrixXd dense(4, 1);
    dense << 1, 0, 1, 0;
    AttractionProbabilities p = attraction_probs(FeedbackMatrix::from_dense(dense));
    CHECK(p.probs(0) == doctest::Approx(0.5));
  }
  SUBCASE("3x2 example") {
    Eigen::MatrixXd dense(3, 2);
    dense << 1, 0, 1, 1, 0, 0;
    AttractionProbabilities p = attraction_probs(FeedbackMatrix::from_dense(dense));
    CHECK(p.probs(0) == doctest::Approx(2.0 / 3.0));
    CHECK(p.probs(1) == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("FeedbackMatrix validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0.5, 1;
  CHECK_THROWS_AS(FeedbackMatrix::from_dense(bad), std::invalid_argument);

  CHECK_THROWS_AS(FeedbackMatrix(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(FeedbackMatrix(3, 0), std::invalid_argument);

  FeedbackMatrix w(2, 3);
  w.set(1, 2, true);
  CHECK(w.at(1, 2));
  CHECK_FALSE(w.at(0, 2));
  std::span<const std::uint8_t> r = w.row(1);
  REQUIRE(r.size() == 3);
  CHECK(r[2] == 1);
  CHECK(r[0] == 0);

  Eigen::MatrixXd round = w.to_dense();
  CHECK(round(1, 2) == 1.0);
  CHECK(round(0, 0) == 0.0);

  std::vector<long> cs = w.column_sums();
  REQUIRE(cs.size() == 3);
  CHECK(cs[2] == 1);
  std::vector<long> rs = w.row_sums();
  REQUIRE(rs.size() == 2);
  CHECK(rs[1] == 1);
}

TEST_CASE("validate_list rejects malformed lists") {
  CHECK_THROWS_AS(validate_list(list({}), 4), std::invalid_argument);
  CHECK_THROWS_AS(validate_list(list({1, 1}), 4), std::invalid_argument);
  CHECK_THROWS_AS(validate_list(list({4}), 4), std::out_of_range);
  CHECK_THROWS_AS(validate_list(list({-1}), 4), std::out_of_range);
  CHECK_NOTHROW(validate_list(list({3, 0, 2}), 4));
}

TEST_CASE("greedy_oracle with K=1 picks the most popular item") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    FeedbackMatrix w = random_matrix(12, 8, 0.3, rng);
    RecommendationList a = greedy_oracle(w, 1);
    REQUIRE(a.size() == 1);
    std::vector<long> cs = w.column_sums();
    long best = *std::max_element(cs.begin(), cs.end());
    CHECK(cs[static_cast<std::size_t>(a.items[0])] == best);
    // Lowest index among maximizers.
    for (int e = 0; e < a.items[0]; ++e) CHECK(cs[static_cast<std::size_t>(e)] < best);
  }
}

TEST_CASE("greedy_oracle covers complementary users") {
  Eigen::MatrixXd dense(3, 2);
  dense << 1, 0, 1, 0, 0, 1;
  FeedbackMatrix w = FeedbackMatrix::from_dense(dense);
  RecommendationList a = greedy_oracle(w, 2);
  REQUIRE(a.size() == 2);
  CHECK(a.items[0] == 0);
  CHECK(a.items[1] == 1);
}

TEST_CASE("greedy_oracle breaks ties toward the lower index") {
  // Columns 1 and 2 have identical coverage; 0 is strictly worse.
  Eigen::MatrixXd dense(4, 3);
  dense << 0, 1, 1,
           0, 1, 1,
           1, 0, 0,
           0, 0, 0;
  FeedbackMatrix w = FeedbackMatrix::from_dense(dense);
  RecommendationList a = greedy_oracle(w, 1);
  CHECK(a.items[0] == 1);

  // After item 1 is taken, items 0 and 2 both add one uncovered user... except
  // 2 adds none. Check the second pick goes to 0.
  a = greedy_oracle(w, 2);
  CHECK(a.items[0] == 1);
  CHECK(a.items[1] == 0);
}

TEST_CASE("greedy_oracle rejects impossible K") {
  FeedbackMatrix w(3, 2);
  CHECK_THROWS_AS(greedy_oracle(w, 3), std::invalid_argument);
  CHECK_THROWS_AS(greedy_oracle(w, 0), std::invalid_argument);
}

TEST_CASE("greedy_oracle approximation quality on small instances") {
  Rng rng(2024);
  int exact_hits = 0;
  const int trials = 30;
  const double guarantee = 1.0 - 1.0 / std::exp(1.0);
  for (int trial = 0; trial < trials; ++trial) {
    int users = 6 + static_cast<int>(rng.uniform_below(8));
    int items = 5 + static_cast<int>(rng.uniform_below(4));
    int k = 2 + static_cast<int>(rng.uniform_below(2));
    FeedbackMatrix w = random_matrix(users, items, 0.25, rng);
    RecommendationList a = greedy_oracle(w, k);
    long got = coverage_of(w, a);
    long best = best_coverage_exhaustive(w, k);
    CHECK(static_cast<double>(got) >= guarantee * static_cast<double>(best) - 1e-9);
    if (got == best) ++exact_hits;
  }
  // Greedy is exact on the overwhelming majority of tiny instances.
  CHECK(exact_hits >= trials * 7 / 10);
}

TEST_CASE("MatrixEnvironment replaying the optimal list has zero regret") {
  Rng seed_rng(5);
  FeedbackMatrix w = random_matrix(30, 10, 0.3, seed_rng);
  MatrixEnvironment env(std::move(w), 3);
  Rng rng(99);
  for (int t = 0; t < 500; ++t) {
    StepOutcome out = env.step(env.optimal_list(), rng);
    CHECK(out.regret == 0.0);
    CHECK((out.reward == 0.0 || out.reward == 1.0));
    if (out.click.position.has_value()) {
      CHECK(out.reward == 1.0);
      CHECK(*out.click.position >= 1);
      CHECK(*out.click.position <= env.optimal_list().size());
    } else {
      CHECK(out.reward == 0.0);
    }
  }
}

TEST_CASE("MatrixEnvironment regret for a known bad list") {
  // Single user attracted only to item 0. Showing {1} always misses while the
  // optimal {0} always hits: regret is exactly 1 every step.
  Eigen::MatrixXd dense(1, 2);
  dense << 1, 0;
  MatrixEnvironment env(FeedbackMatrix::from_dense(dense), 1);
  CHECK(env.optimal_list().items == std::vector<int>{0});
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    StepOutcome out = env.step(list({1}), rng);
    CHECK(out.regret == 1.0);
    CHECK(out.reward == 0.0);
    CHECK_FALSE(out.click.position.has_value());
  }
}

TEST_CASE("MatrixEnvironment steps are deterministic given the generator state") {
  Rng seed_rng(7);
  FeedbackMatrix w = random_matrix(25, 12, 0.35, seed_rng);
  MatrixEnvironment env(std::move(w), 4);
  RecommendationList a = list({2, 7, 0, 11});

  Rng r1(4242), r2(4242);
  for (int t = 0; t < 300; ++t) {
    StepOutcome o1 = env.step(a, r1);
    StepOutcome o2 = env.step(a, r2);
    CHECK(o1.click.position == o2.click.position);
    CHECK(o1.regret == o2.regret);
    CHECK(o1.reward == o2.reward);
  }
}

TEST_CASE("MatrixEnvironment long-run mean reward matches the user average") {
  Rng seed_rng(13);
  FeedbackMatrix w = random_matrix(40, 8, 0.25, seed_rng);
  RecommendationList a = list({1, 4, 6});

  // Expected reward of a fixed list: fraction of users attracted to at least
  // one of its items.
  double expect = static_cast<double>(coverage_of(w, a)) / w.users();

  MatrixEnvironment env(std::move(w), 3);
  Rng rng(31337);
  const int n = 100000;
  double total = 0.0;
  for (int t = 0; t < n; ++t) total += env.step(a, rng).reward;
  double mean = total / n;
  double se = std::sqrt(expect * (1.0 - expect) / n);
  CHECK(std::abs(mean - expect) < 3.0 * se + 1e-9);
}
