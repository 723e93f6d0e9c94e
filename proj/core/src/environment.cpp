#include "cascade/environment.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cascade {

FeedbackMatrix::FeedbackMatrix(int users, int items)
    : users_(users), items_(items) {
  if (users < 1 || items < 1) {
    throw std::invalid_argument("FeedbackMatrix: need at least one user and one item");
  }
  bits_.assign(static_cast<std::size_t>(users) * static_cast<std::size_t>(items), 0);
}

FeedbackMatrix FeedbackMatrix::from_dense(const Eigen::MatrixXd& w) {
  FeedbackMatrix out(static_cast<int>(w.rows()), static_cast<int>(w.cols()));
  for (int i = 0; i < out.users_; ++i) {
    for (int j = 0; j < out.items_; ++j) {
      const double v = w(i, j);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("FeedbackMatrix: entry at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ") is not 0 or 1");
      }
      if (v == 1.0) out.set(i, j, true);
    }
  }
  return out;
}

std::size_t FeedbackMatrix::index(int user, int item) const {
  if (user < 0 || user >= users_ || item < 0 || item >= items_) {
    throw std::out_of_range("FeedbackMatrix: index (" + std::to_string(user) + ", " +
                            std::to_string(item) + ") outside " +
                            std::to_string(users_) + "x" + std::to_string(items_));
  }
  return static_cast<std::size_t>(user) * static_cast<std::size_t>(items_) +
         static_cast<std::size_t>(item);
}

std::span<const std::uint8_t> FeedbackMatrix::row(int user) const {
  const std::size_t start = index(user, 0);
  return {bits_.data() + start, static_cast<std::size_t>(items_)};
}

Eigen::MatrixXd FeedbackMatrix::to_dense() const {
  Eigen::MatrixXd out(users_, items_);
  for (int i = 0; i < users_; ++i) {
    for (int j = 0; j < items_; ++j) {
      out(i, j) = at(i, j) ? 1.0 : 0.0;
    }
  }
  return out;
}

std::vector<long> FeedbackMatrix::column_sums() const {
  std::vector<long> sums(static_cast<std::size_t>(items_), 0);
  for (int i = 0; i < users_; ++i) {
    const auto r = row(i);
    for (int j = 0; j < items_; ++j) sums[static_cast<std::size_t>(j)] += r[static_cast<std::size_t>(j)];
  }
  return sums;
}

std::vector<long> FeedbackMatrix::row_sums() const {
  std::vector<long> sums(static_cast<std::size_t>(users_), 0);
  for (int i = 0; i < users_; ++i) {
    const auto r = row(i);
    long s = 0;
    for (int j = 0; j < items_; ++j) s += r[static_cast<std::size_t>(j)];
    sums[static_cast<std::size_t>(i)] = s;
  }
  return sums;
}

void validate_list(const RecommendationList& a, int n_items) {
  if (a.items.empty()) {
    throw std::invalid_argument("recommendation list is empty");
  }
  std::vector<int> sorted = a.items;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] < 0 || sorted[k] >= n_items) {
      throw std::out_of_range("recommendation list item " + std::to_string(sorted[k]) +
                              " outside [0, " + std::to_string(n_items) + ")");
    }
    if (k > 0 && sorted[k] == sorted[k - 1]) {
      throw std::invalid_argument("recommendation list repeats item " +
                                  std::to_string(sorted[k]));
    }
  }
}

double reward(const RecommendationList& a, const Eigen::VectorXd& w) {
  double miss = 1.0;
  for (int item : a.items) {
    if (item < 0 || item >= w.size()) {
      throw std::out_of_range("reward: item " + std::to_string(item) +
                              " outside weight vector of length " +
                              std::to_string(w.size()));
    }
    miss *= 1.0 - w(item);
  }
  return 1.0 - miss;
}

ClickFeedback simulate_click(const RecommendationList& a,
                             std::span<const std::uint8_t> w_row) {
  for (int k = 0; k < a.size(); ++k) {
    const int item = a.items[static_cast<std::size_t>(k)];
    if (item < 0 || static_cast<std::size_t>(item) >= w_row.size()) {
      throw std::out_of_range("simulate_click: item " + std::to_string(item) +
                              " outside row of length " + std::to_string(w_row.size()));
    }
    if (w_row[static_cast<std::size_t>(item)] != 0) {
      return ClickFeedback::at(k + 1);  // user stops at the first attraction
    }
  }
  return ClickFeedback::none();
}

std::vector<ObservedWeight> observed_weights(const RecommendationList& a,
                                             const ClickFeedback& c) {
  if (c.position.has_value() && (*c.position < 1 || *c.position > a.size())) {
    throw std::out_of_range("observed_weights: click position " +
                            std::to_string(*c.position) + " outside list of length " +
                            std::to_string(a.size()));
  }
  const int observed = c.observed_prefix(a.size());
  std::vector<ObservedWeight> out;
  out.reserve(static_cast<std::size_t>(observed));
  for (int k = 1; k <= observed; ++k) {
    out.push_back({a.items[static_cast<std::size_t>(k - 1)],
                   static_cast<std::uint8_t>(c.clicked_at(k) ? 1 : 0)});
  }
  return out;
}

AttractionProbabilities attraction_probs(const FeedbackMatrix& w) {
  const auto sums = w.column_sums();
  Eigen::VectorXd probs(w.items());
  for (int j = 0; j < w.items(); ++j) {
    probs(j) = static_cast<double>(sums[static_cast<std::size_t>(j)]) /
               static_cast<double>(w.users());
  }
  return {std::move(probs)};
}

RecommendationList greedy_oracle(const FeedbackMatrix& w, int k) {
  if (k < 1 || k > w.items()) {
    throw std::invalid_argument("greedy_oracle: K = " + std::to_string(k) +
                                " outside [1, " + std::to_string(w.items()) + "]");
  }
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(w.users()), 0);
  std::vector<std::uint8_t> chosen(static_cast<std::size_t>(w.items()), 0);
  RecommendationList a;
  a.items.reserve(static_cast<std::size_t>(k));
  for (int step = 0; step < k; ++step) {
    int best_item = -1;
    long best_gain = -1;
    for (int e = 0; e < w.items(); ++e) {
      if (chosen[static_cast<std::size_t>(e)] != 0) continue;
      long gain = 0;
      for (int i = 0; i < w.users(); ++i) {
        if (covered[static_cast<std::size_t>(i)] == 0 && w.at(i, e)) ++gain;
      }
      if (gain > best_gain) {  // strict: equal gains keep the earlier index
        best_gain = gain;
        best_item = e;
      }
    }
    chosen[static_cast<std::size_t>(best_item)] = 1;
    a.items.push_back(best_item);
    for (int i = 0; i < w.users(); ++i) {
      if (w.at(i, best_item)) covered[static_cast<std::size_t>(i)] = 1;
    }
  }
  return a;
}

MatrixEnvironment::MatrixEnvironment(FeedbackMatrix w, int k)
    : w_(std::move(w)), astar_(greedy_oracle(w_, k)) {
  astar_hit_.assign(static_cast<std::size_t>(w_.users()), 0);
  for (int i = 0; i < w_.users(); ++i) {
    for (int item : astar_.items) {
      if (w_.at(i, item)) {
        astar_hit_[static_cast<std::size_t>(i)] = 1;
        break;
      }
    }
  }
}

StepOutcome MatrixEnvironment::step(const RecommendationList& a, Rng& rng) const {
  const int user = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(w_.users())));
  StepOutcome out;
  out.click = simulate_click(a, w_.row(user));
  out.reward = out.click.position.has_value() ? 1.0 : 0.0;
  out.regret = static_cast<double>(astar_hit_[static_cast<std::size_t>(user)]) - out.reward;
  return out;
}

}  // namespace cascade
