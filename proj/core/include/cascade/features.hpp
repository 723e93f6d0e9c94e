#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "cascade/environment.hpp"

namespace cascade {

// One d-dimensional feature vector per item, rows of `x`. All row norms are
// at most 1: the raw vectors are divided by max(1, largest row norm) and the
// divisor is kept in `scale`.
struct ItemFeatures {
  Eigen::MatrixXd x;   // items x dim; row e is x_e
  double scale = 1.0;  // >= 1
  bool all_zero = false;  // set when the train matrix had no ones at all

  int items() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

// Disjoint row split of a feedback matrix: features come from `train`, the
// simulator runs on `test`.
struct FeatureSplit {
  FeedbackMatrix train;
  FeedbackMatrix test;
  std::uint64_t split_seed = 0;
};

// Random row split: a seeded shuffle of the row indices, first floor(m/2)
// rows to train, the rest to test.
FeatureSplit split_rows(const FeedbackMatrix& w, std::uint64_t split_seed);

// Rank-d truncated SVD of the train matrix; item e gets x_e(i) = V(e,i) * S(i),
// then all vectors are rescaled together so no norm exceeds 1.
ItemFeatures build_features(const FeatureSplit& split, int d);

// Same construction on an unsplit matrix (used when the whole matrix should
// define the geometry, e.g. feature export).
ItemFeatures build_features_from_matrix(const FeedbackMatrix& train, int d);

// CSV with header `item,f1,...,fd`, one row per item, 17 significant digits.
void write_features_csv(const ItemFeatures& feats, const std::string& path);

}  // namespace cascade
