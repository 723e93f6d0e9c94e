#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cascade/environment.hpp"

namespace cascade {

struct RatingTriple {
  std::string user;
  std::string item;
  double rating = 0.0;
};

// Field separator of the input file. kDoubleColon is the MovieLens-1M style
// `user::item::rating[::timestamp]`; the timestamp, when present, is ignored.
enum class Delimiter { kTab, kComma, kDoubleColon };

// Accepts "tab", "comma", "double-colon".
Delimiter delimiter_from_name(const std::string& name);
std::string delimiter_name(Delimiter d);

struct BinarizeRule {
  enum class Kind { kGreaterThanThreshold, kPresence };
  Kind kind = Kind::kGreaterThanThreshold;
  double threshold = 0.0;
};

// Accepts "greater_than_threshold", "presence".
BinarizeRule::Kind rule_kind_from_name(const std::string& name);

// Parses one triple per line. Malformed lines (wrong field count, empty ids,
// unparseable or non-finite rating) are skipped and reported on the log with
// their line numbers; a file with no valid line at all is an error that
// quotes the first few rejects.
std::vector<RatingTriple> load_ratings(const std::string& path, Delimiter delim);

// Feedback matrix plus the id maps that locate each user row / item column.
// Rows and columns are ordered by first appearance in the triple list.
struct BinarizedMatrix {
  FeedbackMatrix w;
  std::vector<std::string> row_users;
  std::vector<std::string> col_items;
  std::unordered_map<std::string, int> user_rows;
  std::unordered_map<std::string, int> item_cols;
};

// greater_than_threshold: bit = 1 iff rating > threshold (strictly).
// presence: bit = 1 for every pair that appears. Duplicate pairs OR together.
BinarizedMatrix binarize(const std::vector<RatingTriple>& triples,
                         const BinarizeRule& rule);

// Kept row/column original indices after popularity reduction, ascending.
struct SelectTopResult {
  FeedbackMatrix w;
  std::vector<int> kept_rows;
  std::vector<int> kept_cols;
};

// Keeps the l_max columns with the largest column sums, then the m_max rows
// with the largest row sums over the kept columns. Ties keep the lower
// original index; all-zero rows rank last. Limits beyond the actual size
// keep everything. Kept rows/columns stay in their original relative order.
SelectTopResult select_top_indexed(const FeedbackMatrix& w, int l_max, int m_max);
FeedbackMatrix select_top(const FeedbackMatrix& w, int l_max, int m_max);

// 0/1 matrix as CSV: header row of item ids, then one row of bits per user.
void write_matrix_csv(const FeedbackMatrix& w, const std::vector<std::string>& item_ids,
                      const std::string& path);

struct LoadedMatrix {
  FeedbackMatrix w;
  std::vector<std::string> item_ids;
};

LoadedMatrix load_matrix_csv(const std::string& path);

}  // namespace cascade
