#include "cascade/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cascade {

namespace {

// Top-k indices by score, descending; equal scores keep index order. The
// comparator is a strict weak ordering as long as no score is NaN.
RecommendationList top_k_by_score(const Eigen::VectorXd& scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 1 || k > n) {
    throw std::invalid_argument("selection: K = " + std::to_string(k) +
                                " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&scores](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  return {std::vector<int>(idx.begin(), idx.begin() + k)};
}

void check_click(const RecommendationList& a, const ClickFeedback& c) {
  if (c.position.has_value() && (*c.position < 1 || *c.position > a.size())) {
    throw std::out_of_range("click position " + std::to_string(*c.position) +
                            " outside list of length " + std::to_string(a.size()));
  }
}

Eigen::VectorXd feature_row(const ItemFeatures& feats, int item) {
  if (item < 0 || item >= feats.items()) {
    throw std::out_of_range("no feature vector for item " + std::to_string(item));
  }
  return feats.x.row(item).transpose();
}

}  // namespace

LinearState LinearState::init(int dim, double sigma) {
  if (sigma <= 0.0) {
    throw std::invalid_argument("LinearState: sigma must be positive");
  }
  LinearState s;
  s.minv = PDMatrixInverse::identity(dim);
  s.b = Eigen::VectorXd::Zero(dim);
  s.sigma = sigma;
  s.theta_bar = Eigen::VectorXd::Zero(dim);
  return s;
}

Ucb1State Ucb1State::init(int items) {
  if (items < 1) {
    throw std::invalid_argument("Ucb1State: need at least one item");
  }
  Ucb1State s;
  s.counts.assign(static_cast<std::size_t>(items), 0);
  s.means.assign(static_cast<std::size_t>(items), 0.0);
  s.t = 1;
  return s;
}

RankedState RankedState::init(int dim, double sigma, int k) {
  if (k < 1) {
    throw std::invalid_argument("RankedState: need at least one position");
  }
  RankedState s;
  s.per_position.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s.per_position.push_back(LinearState::init(dim, sigma));
  return s;
}

RecommendationList lin_ts_select(const LinearState& state, const ItemFeatures& feats,
                                 int k, Rng& rng) {
  if (feats.dim() != state.dim()) {
    throw std::invalid_argument("lin_ts_select: feature dim " +
                                std::to_string(feats.dim()) + " != state dim " +
                                std::to_string(state.dim()));
  }
  const Eigen::VectorXd theta = sample_mvn(state.theta_bar, state.minv, rng);
  return top_k_by_score(feats.x * theta, k);
}

RecommendationList lin_ucb_select(const LinearState& state, const ItemFeatures& feats,
                                  int k, double c) {
  if (feats.dim() != state.dim()) {
    throw std::invalid_argument("lin_ucb_select: feature dim " +
                                std::to_string(feats.dim()) + " != state dim " +
                                std::to_string(state.dim()));
  }
  if (c <= 0.0) {
    throw std::invalid_argument("lin_ucb_select: c must be positive");
  }
  const Eigen::VectorXd mean = feats.x * state.theta_bar;
  // x_e' M^-1 x_e for every item at once; tiny negatives from rounding are
  // clamped before the square root.
  const Eigen::VectorXd var =
      (feats.x * state.minv.inv).cwiseProduct(feats.x).rowwise().sum().cwiseMax(0.0);
  const Eigen::VectorXd ucb = (mean + c * var.cwiseSqrt()).cwiseMin(1.0);
  return top_k_by_score(ucb, k);
}

LinearState lin_update(LinearState state, const RecommendationList& a,
                       const ClickFeedback& c, const ItemFeatures& feats) {
  check_click(a, c);
  const int observed = c.observed_prefix(a.size());
  for (int k = 1; k <= observed; ++k) {
    const Eigen::VectorXd x = feature_row(feats, a.items[static_cast<std::size_t>(k - 1)]);
    state.minv = rank_one_update(state.minv, x, state.sigma);
    if (c.clicked_at(k)) state.b += x;
  }
  state.theta_bar = (state.minv.inv * state.b) / (state.sigma * state.sigma);
  return state;
}

RecommendationList ucb1_select(const Ucb1State& state, int k) {
  const int n = state.items();
  Eigen::VectorXd ucb(n);
  const double lt = std::log(static_cast<double>(state.t));
  for (int e = 0; e < n; ++e) {
    const long cnt = state.counts[static_cast<std::size_t>(e)];
    if (cnt == 0) {
      // Forced exploration: the confidence radius is undefined at T(e) = 0.
      ucb(e) = std::numeric_limits<double>::infinity();
    } else {
      ucb(e) = state.means[static_cast<std::size_t>(e)] +
               std::sqrt(1.5 * lt / static_cast<double>(cnt));
    }
  }
  return top_k_by_score(ucb, k);
}

Ucb1State ucb1_update(Ucb1State state, const RecommendationList& a,
                      const ClickFeedback& c) {
  check_click(a, c);
  const int observed = c.observed_prefix(a.size());
  for (int k = 1; k <= observed; ++k) {
    const int e = a.items[static_cast<std::size_t>(k - 1)];
    if (e < 0 || e >= state.items()) {
      throw std::out_of_range("ucb1_update: item " + std::to_string(e) +
                              " outside [0, " + std::to_string(state.items()) + ")");
    }
    auto& cnt = state.counts[static_cast<std::size_t>(e)];
    auto& mean = state.means[static_cast<std::size_t>(e)];
    const double obs = c.clicked_at(k) ? 1.0 : 0.0;
    cnt += 1;
    mean += (obs - mean) / static_cast<double>(cnt);
  }
  state.t += 1;
  return state;
}

RecommendationList ranked_lin_ts_select(const RankedState& state,
                                        const ItemFeatures& feats, int k, Rng& rng) {
  if (k < 1 || k > feats.items()) {
    throw std::invalid_argument("ranked_lin_ts_select: K = " + std::to_string(k) +
                                " outside [1, " + std::to_string(feats.items()) + "]");
  }
  if (static_cast<std::size_t>(k) > state.per_position.size()) {
    throw std::invalid_argument("ranked_lin_ts_select: state has " +
                                std::to_string(state.per_position.size()) +
                                " positions, need " + std::to_string(k));
  }
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(feats.items()), 0);
  RecommendationList a;
  a.items.reserve(static_cast<std::size_t>(k));
  for (int pos = 0; pos < k; ++pos) {
    const LinearState& st = state.per_position[static_cast<std::size_t>(pos)];
    const Eigen::VectorXd theta = sample_mvn(st.theta_bar, st.minv, rng);
    const Eigen::VectorXd scores = feats.x * theta;
    int best = -1;
    for (int e = 0; e < feats.items(); ++e) {
      if (taken[static_cast<std::size_t>(e)] != 0) continue;
      if (best < 0 || scores(e) > scores(best)) best = e;
    }
    taken[static_cast<std::size_t>(best)] = 1;
    a.items.push_back(best);
  }
  return a;
}

RankedState ranked_lin_ts_update(RankedState state, const RecommendationList& a,
                                 const ClickFeedback& c, const ItemFeatures& feats) {
  check_click(a, c);
  const int observed = c.observed_prefix(a.size());
  if (static_cast<std::size_t>(observed) > state.per_position.size()) {
    throw std::invalid_argument("ranked_lin_ts_update: list longer than state");
  }
  for (int k = 1; k <= observed; ++k) {
    // Position k sees a one-item list: its own item, clicked iff C_t = k.
    RecommendationList single{{a.items[static_cast<std::size_t>(k - 1)]}};
    const ClickFeedback sub = c.clicked_at(k) ? ClickFeedback::at(1) : ClickFeedback::none();
    auto& st = state.per_position[static_cast<std::size_t>(k - 1)];
    st = lin_update(std::move(st), single, sub, feats);
  }
  return state;
}

CascadeUcb1Policy::CascadeUcb1Policy(int items, int k)
    : state_(Ucb1State::init(items)), k_(k) {
  if (k < 1 || k > items) {
    throw std::invalid_argument("CascadeUcb1Policy: K outside [1, items]");
  }
}

RecommendationList CascadeUcb1Policy::select(Rng&) { return ucb1_select(state_, k_); }

void CascadeUcb1Policy::update(const RecommendationList& a, const ClickFeedback& c) {
  state_ = ucb1_update(std::move(state_), a, c);
}

CascadeLinTsPolicy::CascadeLinTsPolicy(const ItemFeatures& feats, int k, double sigma)
    : feats_(feats), state_(LinearState::init(feats.dim(), sigma)), k_(k) {
  if (k < 1 || k > feats.items()) {
    throw std::invalid_argument("CascadeLinTsPolicy: K outside [1, items]");
  }
}

RecommendationList CascadeLinTsPolicy::select(Rng& rng) {
  return lin_ts_select(state_, feats_, k_, rng);
}

void CascadeLinTsPolicy::update(const RecommendationList& a, const ClickFeedback& c) {
  state_ = lin_update(std::move(state_), a, c, feats_);
}

CascadeLinUcbPolicy::CascadeLinUcbPolicy(const ItemFeatures& feats, int k, double sigma,
                                         double c)
    : feats_(feats), state_(LinearState::init(feats.dim(), sigma)), k_(k), c_(c) {
  if (k < 1 || k > feats.items()) {
    throw std::invalid_argument("CascadeLinUcbPolicy: K outside [1, items]");
  }
  if (c <= 0.0) {
    throw std::invalid_argument("CascadeLinUcbPolicy: c must be positive");
  }
}

RecommendationList CascadeLinUcbPolicy::select(Rng&) {
  return lin_ucb_select(state_, feats_, k_, c_);
}

void CascadeLinUcbPolicy::update(const RecommendationList& a, const ClickFeedback& c) {
  state_ = lin_update(std::move(state_), a, c, feats_);
}

RankedLinTsPolicy::RankedLinTsPolicy(const ItemFeatures& feats, int k, double sigma)
    : feats_(feats), state_(RankedState::init(feats.dim(), sigma, k)), k_(k) {
  if (k < 1 || k > feats.items()) {
    throw std::invalid_argument("RankedLinTsPolicy: K outside [1, items]");
  }
}

RecommendationList RankedLinTsPolicy::select(Rng& rng) {
  return ranked_lin_ts_select(state_, feats_, k_, rng);
}

void RankedLinTsPolicy::update(const RecommendationList& a, const ClickFeedback& c) {
  state_ = ranked_lin_ts_update(std::move(state_), a, c, feats_);
}

RandomPolicy::RandomPolicy(int items, int k) : items_(items), k_(k) {
  if (k < 1 || k > items) {
    throw std::invalid_argument("RandomPolicy: K outside [1, items]");
  }
}

RecommendationList RandomPolicy::select(Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(items_));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k_; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_below(
                           static_cast<std::uint64_t>(items_ - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return {std::vector<int>(idx.begin(), idx.begin() + k_)};
}

}  // namespace cascade
