#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cascade/environment.hpp"
#include "cascade/features.hpp"
#include "cascade/numerics.hpp"
#include "cascade/rng.hpp"

namespace cascade {

// Shared state of the linear policies: gram-matrix inverse M^-1, response
// accumulator B, and the cached posterior mean theta_bar = sigma^-2 M^-1 B.
struct LinearState {
  PDMatrixInverse minv;
  Eigen::VectorXd b;
  double sigma = 1.0;
  Eigen::VectorXd theta_bar;

  static LinearState init(int dim, double sigma);
  int dim() const { return minv.dim(); }
};

// Per-item click statistics for CascadeUCB1. `t` counts interaction rounds,
// starting at 1 so ln(t) is defined on the first selection.
struct Ucb1State {
  std::vector<long> counts;
  std::vector<double> means;
  long t = 1;

  static Ucb1State init(int items);
  int items() const { return static_cast<int>(counts.size()); }
};

// One independent linear posterior per list position (ranked bandits).
struct RankedState {
  std::vector<LinearState> per_position;

  static RankedState init(int dim, double sigma, int k);
};

// Thompson sampling: draw theta from N(theta_bar, M^-1), rank items by
// x_e . theta, return the top K (ties to the lowest index).
RecommendationList lin_ts_select(const LinearState& state, const ItemFeatures& feats,
                                 int k, Rng& rng);

// Optimism: rank by min{ x_e . theta_bar + c * sqrt(x_e' M^-1 x_e), 1 }.
// The clip to 1 happens before ranking, so saturated items tie.
RecommendationList lin_ucb_select(const LinearState& state, const ItemFeatures& feats,
                                  int k, double c);

// Shared posterior update: every examined position k <= min{C_t, K}
// contributes a rank-one gram update with x_{a_k}; B gains x_{a_k} only at
// the click itself. Positions past the click are untouched (never examined).
LinearState lin_update(LinearState state, const RecommendationList& a,
                       const ClickFeedback& c, const ItemFeatures& feats);

// UCB over per-item means, radius sqrt(1.5 ln(t) / T(e)); never-observed
// items score +infinity so they are explored first.
RecommendationList ucb1_select(const Ucb1State& state, int k);

Ucb1State ucb1_update(Ucb1State state, const RecommendationList& a,
                      const ClickFeedback& c);

// Position k draws from its own posterior and takes the best item not already
// placed at an earlier position; K draws per call, in position order.
RecommendationList ranked_lin_ts_select(const RankedState& state,
                                        const ItemFeatures& feats, int k, Rng& rng);

RankedState ranked_lin_ts_update(RankedState state, const RecommendationList& a,
                                 const ClickFeedback& c, const ItemFeatures& feats);

// Runtime-polymorphic wrapper used by the experiment loop: one instance per
// run, fed by that run's rng stream.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual RecommendationList select(Rng& rng) = 0;
  virtual void update(const RecommendationList& a, const ClickFeedback& c) = 0;
};

class CascadeUcb1Policy final : public Policy {
 public:
  CascadeUcb1Policy(int items, int k);

  RecommendationList select(Rng& rng) override;
  void update(const RecommendationList& a, const ClickFeedback& c) override;

  const Ucb1State& state() const { return state_; }

 private:
  Ucb1State state_;
  int k_;
};

class CascadeLinTsPolicy final : public Policy {
 public:
  CascadeLinTsPolicy(const ItemFeatures& feats, int k, double sigma);

  RecommendationList select(Rng& rng) override;
  void update(const RecommendationList& a, const ClickFeedback& c) override;

  const LinearState& state() const { return state_; }

 private:
  const ItemFeatures& feats_;
  LinearState state_;
  int k_;
};

class CascadeLinUcbPolicy final : public Policy {
 public:
  CascadeLinUcbPolicy(const ItemFeatures& feats, int k, double sigma, double c);

  RecommendationList select(Rng& rng) override;
  void update(const RecommendationList& a, const ClickFeedback& c) override;

  const LinearState& state() const { return state_; }

 private:
  const ItemFeatures& feats_;
  LinearState state_;
  int k_;
  double c_;
};

class RankedLinTsPolicy final : public Policy {
 public:
  RankedLinTsPolicy(const ItemFeatures& feats, int k, double sigma);

  RecommendationList select(Rng& rng) override;
  void update(const RecommendationList& a, const ClickFeedback& c) override;

  const RankedState& state() const { return state_; }

 private:
  const ItemFeatures& feats_;
  RankedState state_;
  int k_;
};

// Uniform-random K-subsets; the no-learning baseline.
class RandomPolicy final : public Policy {
 public:
  RandomPolicy(int items, int k);

  RecommendationList select(Rng& rng) override;
  void update(const RecommendationList&, const ClickFeedback&) override {}

 private:
  int items_;
  int k_;
};

}  // namespace cascade
