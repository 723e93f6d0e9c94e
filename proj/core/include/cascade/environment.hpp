#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cascade/rng.hpp"

namespace cascade {

// Binary user-item attraction matrix W: bit (i, e) says whether user i finds
// item e attractive. Stored row-major so a user row is contiguous.
class FeedbackMatrix {
 public:
  FeedbackMatrix(int users, int items);

  // Validates that every entry of `w` is exactly 0 or 1.
  static FeedbackMatrix from_dense(const Eigen::MatrixXd& w);

  int users() const { return users_; }
  int items() const { return items_; }

  bool at(int user, int item) const { return bits_[index(user, item)] != 0; }
  void set(int user, int item, bool value) {
    bits_[index(user, item)] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> row(int user) const;

  Eigen::MatrixXd to_dense() const;
  std::vector<long> column_sums() const;
  std::vector<long> row_sums() const;

 private:
  std::size_t index(int user, int item) const;

  int users_ = 0;
  int items_ = 0;
  std::vector<std::uint8_t> bits_;
};

// An ordered list of K distinct item indices; position 1 is shown first.
struct RecommendationList {
  std::vector<int> items;

  int size() const { return static_cast<int>(items.size()); }
};

// Throws if the list is empty, holds duplicates, or indexes outside [0, n_items).
void validate_list(const RecommendationList& a, int n_items);

// Click position within a shown list, 1-based. Absent means the user scanned
// the whole list and clicked nothing (C_t = infinity).
struct ClickFeedback {
  std::optional<int> position;

  static ClickFeedback none() { return {}; }
  static ClickFeedback at(int k) { return {k}; }

  // min{C_t, K}: how many leading positions of a length-`list_len` list the
  // user examined, i.e. how many weights were observed.
  int observed_prefix(int list_len) const {
    if (!position.has_value()) return list_len;
    return *position < list_len ? *position : list_len;
  }

  bool clicked_at(int k) const { return position.has_value() && *position == k; }
};

// Column means of W; entry e is the attraction probability of item e.
struct AttractionProbabilities {
  Eigen::VectorXd probs;
};

// f(A, w) = 1 - prod_k (1 - w(a_k)). Works on a binary realization row and on
// a probability vector alike.
double reward(const RecommendationList& a, const Eigen::VectorXd& w);

// First attractive position in the list under the realization `w_row`, or
// no click when the user finds nothing attractive.
ClickFeedback simulate_click(const RecommendationList& a,
                             std::span<const std::uint8_t> w_row);

struct ObservedWeight {
  int item;
  std::uint8_t weight;
};

// The weights revealed by a click: position k of the list is observed for
// k = 1..min{C_t, K}, with weight 1 exactly at the click. Positions after the
// click were never examined and are absent from the result.
std::vector<ObservedWeight> observed_weights(const RecommendationList& a,
                                             const ClickFeedback& c);

AttractionProbabilities attraction_probs(const FeedbackMatrix& w);

// Greedy max-coverage list: repeatedly add the item attractive to the most
// users not yet covered by earlier picks. Ties go to the lowest item index.
RecommendationList greedy_oracle(const FeedbackMatrix& w, int k);

struct StepOutcome {
  ClickFeedback click;
  double regret = 0.0;  // reward(A*, w_t) - reward(A_t, w_t); can be negative
  double reward = 0.0;  // realized reward of the shown list, 0 or 1
};

// One round of interaction: the caller shows a list, the environment draws a
// user (or a weight realization) and reports the click plus the reward gap
// against its own optimal list under the same draw.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int items() const = 0;
  virtual const RecommendationList& optimal_list() const = 0;
  virtual StepOutcome step(const RecommendationList& a, Rng& rng) const = 0;
};

// Environment backed by a fixed feedback matrix: each step picks a user row
// uniformly at random (with replacement). The regret baseline A* is the
// greedy max-coverage list over the same matrix.
class MatrixEnvironment final : public Environment {
 public:
  MatrixEnvironment(FeedbackMatrix w, int k);

  int items() const override { return w_.items(); }
  const RecommendationList& optimal_list() const override { return astar_; }
  StepOutcome step(const RecommendationList& a, Rng& rng) const override;

  const FeedbackMatrix& matrix() const { return w_; }

 private:
  FeedbackMatrix w_;
  RecommendationList astar_;
  // astar_hit_[i] = 1 iff user i is attracted by some item of A*; this is
  // reward(A*, row i) for a binary row, precomputed once.
  std::vector<std::uint8_t> astar_hit_;
};

}  // namespace cascade
