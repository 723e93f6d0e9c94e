#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "cascade/environment.hpp"
#include "cascade/features.hpp"

namespace cascade {

// Environment with an independent Bernoulli attraction per item: every step
// draws a fresh weight realization for each item it touches. Independence
// makes the product-form expected reward exact, so the optimal list is the
// plain top-K of wbar (ties to the lowest index).
class BernoulliEnvironment final : public Environment {
 public:
  BernoulliEnvironment(Eigen::VectorXd wbar, int k);

  int items() const override { return static_cast<int>(wbar_.size()); }
  const RecommendationList& optimal_list() const override { return astar_; }
  StepOutcome step(const RecommendationList& a, Rng& rng) const override;

  const Eigen::VectorXd& wbar() const { return wbar_; }
  double optimal_expected_reward() const;

 private:
  Eigen::VectorXd wbar_;
  RecommendationList astar_;
};

struct SyntheticEnv {
  std::unique_ptr<BernoulliEnvironment> env;
  ItemFeatures feats;
  AttractionProbabilities wbar;
  Eigen::VectorXd theta_star;
};

// Exactly linear environment: attraction probabilities w̄(e) = x_e . θ* with
// every ‖x_e‖₂ ≤ 1, ‖θ*‖₂ < 1, and the w̄ spread uniformly over [0.05, 0.95]
// so no arm is degenerate. Deterministic in theta_seed.
SyntheticEnv synthetic_env(int items, int d, int k, std::uint64_t theta_seed);

// Random binary feedback matrix with planted low-rank structure: a per-item
// popularity offset plus user/item latent mixing vectors, pushed through a
// logistic link, then one Bernoulli draw per cell. Meant as input to the SVD
// feature pipeline.
FeedbackMatrix latent_feedback_matrix(int users, int items, int rank,
                                      std::uint64_t seed);

}  // namespace cascade
