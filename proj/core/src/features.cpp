#include "cascade/features.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "cascade/numerics.hpp"
#include "cascade/rng.hpp"

namespace cascade {

FeatureSplit split_rows(const FeedbackMatrix& w, std::uint64_t split_seed) {
  if (w.users() < 2) {
    throw std::invalid_argument("split_rows: need at least 2 users, have " +
                                std::to_string(w.users()));
  }
  const int m = w.users();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(split_seed);
  // Fisher-Yates with our own uniform_below keeps the shuffle identical on
  // every platform.
  for (int i = m - 1; i > 0; --i) {
    const auto j = rng.uniform_below(static_cast<std::uint64_t>(i) + 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  const int train_rows = m / 2;
  const int test_rows = m - train_rows;
  FeedbackMatrix train(train_rows, w.items());
  FeedbackMatrix test(test_rows, w.items());
  for (int i = 0; i < m; ++i) {
    const int src = order[static_cast<std::size_t>(i)];
    FeedbackMatrix& dst = i < train_rows ? train : test;
    const int dst_row = i < train_rows ? i : i - train_rows;
    for (int j = 0; j < w.items(); ++j) {
      if (w.at(src, j)) dst.set(dst_row, j, true);
    }
  }
  return {std::move(train), std::move(test), split_seed};
}

ItemFeatures build_features_from_matrix(const FeedbackMatrix& train, int d) {
  const int min_dim = std::min(train.users(), train.items());
  if (d < 1 || d > min_dim) {
    throw std::invalid_argument("build_features: d = " + std::to_string(d) +
                                " outside [1, " + std::to_string(min_dim) +
                                "] for a " + std::to_string(train.users()) + "x" +
                                std::to_string(train.items()) + " train matrix");
  }
  const SvdFactors svd = truncated_svd(train.to_dense(), d);
  ItemFeatures out;
  out.x = svd.v * svd.s.asDiagonal();
  const double max_norm = out.x.rowwise().norm().maxCoeff();
  out.all_zero = max_norm == 0.0;
  out.scale = std::max(1.0, max_norm);
  out.x /= out.scale;
  return out;
}

ItemFeatures build_features(const FeatureSplit& split, int d) {
  return build_features_from_matrix(split.train, d);
}

void write_features_csv(const ItemFeatures& feats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << "item";
  for (int i = 1; i <= feats.dim(); ++i) out << ",f" << i;
  out << "\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (int e = 0; e < feats.items(); ++e) {
    line.str("");
    line << e;
    for (int i = 0; i < feats.dim(); ++i) line << ',' << feats.x(e, i);
    out << line.str() << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace cascade
