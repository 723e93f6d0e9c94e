#include "cascade/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cascade/rng.hpp"

namespace cascade {

namespace {

RecommendationList top_k_of(const Eigen::VectorXd& scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 1 || k > n) {
    throw std::invalid_argument("top-k: K = " + std::to_string(k) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&scores](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  return {std::vector<int>(idx.begin(), idx.begin() + k)};
}

}  // namespace

BernoulliEnvironment::BernoulliEnvironment(Eigen::VectorXd wbar, int k)
    : wbar_(std::move(wbar)) {
  if (wbar_.size() < 1) {
    throw std::invalid_argument("BernoulliEnvironment: no items");
  }
  for (int e = 0; e < wbar_.size(); ++e) {
    if (!(wbar_(e) >= 0.0 && wbar_(e) <= 1.0)) {
      throw std::invalid_argument("BernoulliEnvironment: wbar(" + std::to_string(e) +
                                  ") = " + std::to_string(wbar_(e)) +
                                  " is not a probability");
    }
  }
  astar_ = top_k_of(wbar_, k);
}

StepOutcome BernoulliEnvironment::step(const RecommendationList& a, Rng& rng) const {
  validate_list(a, items());
  // One Bernoulli draw per distinct item this step touches. Draw order is
  // fixed — the shown list in position order, then the optimal list — so a
  // given rng state always yields the same realization.
  std::vector<std::pair<int, std::uint8_t>> drawn;
  drawn.reserve(static_cast<std::size_t>(a.size() + astar_.size()));
  auto weight_of = [&](int e) -> std::uint8_t {
    for (const auto& [item, bit] : drawn) {
      if (item == e) return bit;
    }
    const std::uint8_t bit = rng.uniform01() < wbar_(e) ? 1 : 0;
    drawn.emplace_back(e, bit);
    return bit;
  };
  StepOutcome out;
  for (int k = 1; k <= a.size(); ++k) {
    const std::uint8_t bit = weight_of(a.items[static_cast<std::size_t>(k - 1)]);
    if (bit != 0 && !out.click.position.has_value()) {
      out.click = ClickFeedback::at(k);
    }
  }
  bool star_hit = false;
  for (int e : astar_.items) {
    if (weight_of(e) != 0) star_hit = true;
  }
  out.reward = out.click.position.has_value() ? 1.0 : 0.0;
  out.regret = (star_hit ? 1.0 : 0.0) - out.reward;
  return out;
}

double BernoulliEnvironment::optimal_expected_reward() const {
  return reward(astar_, wbar_);
}

SyntheticEnv synthetic_env(int items, int d, int k, std::uint64_t theta_seed) {
  if (items < 1 || d < 1 || d > items) {
    throw std::invalid_argument("synthetic_env: need 1 <= d <= items");
  }
  if (k < 1 || k > items) {
    throw std::invalid_argument("synthetic_env: need 1 <= K <= items");
  }
  Rng rng(theta_seed);

  SyntheticEnv out;
  out.feats.x.resize(items, d);
  out.feats.scale = 1.0;
  Eigen::VectorXd wbar(items);

  if (d == 1) {
    // One shared coordinate: every item sits at probability 0.5 exactly.
    out.feats.x.setOnes();
    out.theta_star = Eigen::VectorXd::Constant(1, 0.5);
    wbar.setConstant(0.5);
  } else {
    // x_e = (1, u_e)/sqrt(2) with u_e on the unit sphere of R^{d-1}, and
    // theta* = sqrt(2) * (1/2, 0.45 * dir). Then x_e . theta* =
    // 1/2 + 0.45 * (u_e . dir), so placing u_e at a chosen cosine s_e to
    // `dir` pins the attraction probability at 0.5 + 0.45 s_e. Uniform s_e
    // spreads the probabilities evenly over [0.05, 0.95).
    const int dd = d - 1;
    Eigen::VectorXd dir(dd);
    int attempts = 0;
    for (;; ++attempts) {
      if (attempts >= 100) {
        throw std::runtime_error("synthetic_env: could not draw a usable direction");
      }
      for (int i = 0; i < dd; ++i) dir(i) = rng.normal();
      const double norm = dir.norm();
      if (norm > 1e-6) {
        dir /= norm;
        break;
      }
    }
    for (int e = 0; e < items; ++e) {
      const double s = 2.0 * rng.uniform01() - 1.0;
      Eigen::VectorXd u(dd);
      if (dd == 1) {
        u(0) = s * dir(0);  // |u| <= 1; the feature norm just dips below 1
      } else {
        Eigen::VectorXd perp(dd);
        int tries = 0;
        for (;; ++tries) {
          if (tries >= 100) {
            throw std::runtime_error("synthetic_env: degenerate tangent draw for item " +
                                     std::to_string(e));
          }
          for (int i = 0; i < dd; ++i) perp(i) = rng.normal();
          perp -= perp.dot(dir) * dir;
          const double norm = perp.norm();
          if (norm > 1e-9) {
            perp /= norm;
            break;
          }
        }
        u = s * dir + std::sqrt(std::max(0.0, 1.0 - s * s)) * perp;
      }
      out.feats.x(e, 0) = 1.0 / std::numbers::sqrt2;
      for (int i = 0; i < dd; ++i) out.feats.x(e, i + 1) = u(i) / std::numbers::sqrt2;
      wbar(e) = 0.5 + 0.45 * s;
    }
    out.theta_star.resize(d);
    out.theta_star(0) = 0.5 * std::numbers::sqrt2;
    for (int i = 0; i < dd; ++i) out.theta_star(i + 1) = 0.45 * std::numbers::sqrt2 * dir(i);
  }

  out.wbar.probs = wbar;
  out.env = std::make_unique<BernoulliEnvironment>(std::move(wbar), k);
  return out;
}

FeedbackMatrix latent_feedback_matrix(int users, int items, int rank,
                                      std::uint64_t seed) {
  if (users < 1 || items < 1 || rank < 1) {
    throw std::invalid_argument("latent_feedback_matrix: sizes must be positive");
  }
  Rng rng(seed);
  // Three planted components: a per-item popularity offset (the dominant
  // direction, so item quality is linearly decodable from a low-dimensional
  // factorization), a rank-`rank` user x item mixing term (entry scale
  // rank^(-1/4) keeps p_i . q_j at the same mild size for any rank), and a
  // global bias that sets the typical attraction level.
  const double entry_sd = 0.6 * std::pow(static_cast<double>(rank), -0.25);
  const double pop_sd = 1.2;
  const double bias = -1.2;
  Eigen::MatrixXd p(users, rank);
  for (int i = 0; i < users; ++i) {
    for (int r = 0; r < rank; ++r) p(i, r) = entry_sd * rng.normal();
  }
  Eigen::MatrixXd q(items, rank);
  for (int j = 0; j < items; ++j) {
    for (int r = 0; r < rank; ++r) q(j, r) = entry_sd * rng.normal();
  }
  Eigen::VectorXd pop(items);
  for (int j = 0; j < items; ++j) pop(j) = pop_sd * rng.normal();
  FeedbackMatrix w(users, items);
  for (int i = 0; i < users; ++i) {
    for (int j = 0; j < items; ++j) {
      const double logit = bias + pop(j) + p.row(i).dot(q.row(j));
      const double prob = 1.0 / (1.0 + std::exp(-logit));
      if (rng.uniform01() < prob) w.set(i, j, true);
    }
  }
  return w;
}

}  // namespace cascade
