#include "cascade/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "cascade/logging.hpp"

namespace cascade {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_fields(const std::string& line, Delimiter delim) {
  std::vector<std::string> fields;
  const std::string sep = delim == Delimiter::kTab     ? "\t"
                          : delim == Delimiter::kComma ? ","
                                                       : "::";
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

bool parse_rating(const std::string& text, double* out) {
  if (text.empty()) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + text.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace

Delimiter delimiter_from_name(const std::string& name) {
  if (name == "tab") return Delimiter::kTab;
  if (name == "comma") return Delimiter::kComma;
  if (name == "double-colon") return Delimiter::kDoubleColon;
  throw std::invalid_argument("unknown delimiter '" + name +
                              "' (expected tab, comma, or double-colon)");
}

std::string delimiter_name(Delimiter d) {
  switch (d) {
    case Delimiter::kTab: return "tab";
    case Delimiter::kComma: return "comma";
    case Delimiter::kDoubleColon: return "double-colon";
  }
  return "?";
}

BinarizeRule::Kind rule_kind_from_name(const std::string& name) {
  if (name == "greater_than_threshold") return BinarizeRule::Kind::kGreaterThanThreshold;
  if (name == "presence") return BinarizeRule::Kind::kPresence;
  throw std::invalid_argument("unknown binarize rule '" + name +
                              "' (expected greater_than_threshold or presence)");
}

std::vector<RatingTriple> load_ratings(const std::string& path, Delimiter delim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read ratings file: " + path);
  }
  std::vector<RatingTriple> triples;
  std::vector<std::pair<long, std::string>> rejects;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    auto fields = split_fields(line, delim);
    // MovieLens-style files append a timestamp as a fourth field; drop it.
    const bool count_ok = fields.size() == 3 ||
                          (delim == Delimiter::kDoubleColon && fields.size() == 4);
    if (!count_ok) {
      rejects.emplace_back(lineno, "expected 3 fields, found " +
                                       std::to_string(fields.size()));
      continue;
    }
    if (fields[0].empty() || fields[1].empty()) {
      rejects.emplace_back(lineno, "empty user or item id");
      continue;
    }
    double rating = 0.0;
    if (!parse_rating(fields[2], &rating)) {
      rejects.emplace_back(lineno, "unparseable rating '" + fields[2] + "'");
      continue;
    }
    triples.push_back({std::move(fields[0]), std::move(fields[1]), rating});
  }
  for (const auto& [no, why] : rejects) {
    log_debug(path + ":" + std::to_string(no) + " rejected: " + why);
  }
  if (!rejects.empty()) {
    log_info(path + ": rejected " + std::to_string(rejects.size()) + " of " +
             std::to_string(lineno) + " lines");
  }
  if (triples.empty()) {
    std::ostringstream msg;
    msg << path << ": no valid rating lines";
    const std::size_t show = std::min<std::size_t>(rejects.size(), 5);
    for (std::size_t i = 0; i < show; ++i) {
      msg << "\n  line " << rejects[i].first << ": " << rejects[i].second;
    }
    throw std::runtime_error(msg.str());
  }
  return triples;
}

BinarizedMatrix binarize(const std::vector<RatingTriple>& triples,
                         const BinarizeRule& rule) {
  if (triples.empty()) {
    throw std::invalid_argument("binarize: no triples");
  }
  std::unordered_map<std::string, int> user_rows;
  std::unordered_map<std::string, int> item_cols;
  std::vector<std::string> row_users;
  std::vector<std::string> col_items;
  for (const auto& t : triples) {
    if (user_rows.emplace(t.user, static_cast<int>(row_users.size())).second) {
      row_users.push_back(t.user);
    }
    if (item_cols.emplace(t.item, static_cast<int>(col_items.size())).second) {
      col_items.push_back(t.item);
    }
  }
  FeedbackMatrix w(static_cast<int>(row_users.size()), static_cast<int>(col_items.size()));
  for (const auto& t : triples) {
    const bool attracted = rule.kind == BinarizeRule::Kind::kPresence
                               ? true
                               : t.rating > rule.threshold;
    if (attracted) {
      w.set(user_rows.at(t.user), item_cols.at(t.item), true);
    }
  }
  return {std::move(w), std::move(row_users), std::move(col_items),
          std::move(user_rows), std::move(item_cols)};
}

SelectTopResult select_top_indexed(const FeedbackMatrix& w, int l_max, int m_max) {
  if (l_max < 1 || m_max < 1) {
    throw std::invalid_argument("select_top: limits must be at least 1");
  }
  const auto col_sums = w.column_sums();
  std::vector<int> cols(static_cast<std::size_t>(w.items()));
  std::iota(cols.begin(), cols.end(), 0);
  const int keep_cols = std::min(w.items(), l_max);
  std::partial_sort(cols.begin(), cols.begin() + keep_cols, cols.end(),
                    [&col_sums](int a, int b) {
                      const long sa = col_sums[static_cast<std::size_t>(a)];
                      const long sb = col_sums[static_cast<std::size_t>(b)];
                      if (sa != sb) return sa > sb;
                      return a < b;
                    });
  std::vector<int> kept_cols(cols.begin(), cols.begin() + keep_cols);
  std::sort(kept_cols.begin(), kept_cols.end());

  // Row activity is re-measured on the surviving columns only.
  std::vector<long> row_sums(static_cast<std::size_t>(w.users()), 0);
  for (int i = 0; i < w.users(); ++i) {
    long s = 0;
    for (int j : kept_cols) s += w.at(i, j) ? 1 : 0;
    row_sums[static_cast<std::size_t>(i)] = s;
  }
  std::vector<int> rows(static_cast<std::size_t>(w.users()));
  std::iota(rows.begin(), rows.end(), 0);
  const int keep_rows = std::min(w.users(), m_max);
  std::partial_sort(rows.begin(), rows.begin() + keep_rows, rows.end(),
                    [&row_sums](int a, int b) {
                      const long sa = row_sums[static_cast<std::size_t>(a)];
                      const long sb = row_sums[static_cast<std::size_t>(b)];
                      if (sa != sb) return sa > sb;
                      return a < b;
                    });
  std::vector<int> kept_rows(rows.begin(), rows.begin() + keep_rows);
  std::sort(kept_rows.begin(), kept_rows.end());

  FeedbackMatrix out(keep_rows, keep_cols);
  for (int i = 0; i < keep_rows; ++i) {
    for (int j = 0; j < keep_cols; ++j) {
      if (w.at(kept_rows[static_cast<std::size_t>(i)], kept_cols[static_cast<std::size_t>(j)])) {
        out.set(i, j, true);
      }
    }
  }
  return {std::move(out), std::move(kept_rows), std::move(kept_cols)};
}

FeedbackMatrix select_top(const FeedbackMatrix& w, int l_max, int m_max) {
  return select_top_indexed(w, l_max, m_max).w;
}

void write_matrix_csv(const FeedbackMatrix& w, const std::vector<std::string>& item_ids,
                      const std::string& path) {
  if (static_cast<int>(item_ids.size()) != w.items()) {
    throw std::invalid_argument("write_matrix_csv: " + std::to_string(item_ids.size()) +
                                " item ids for " + std::to_string(w.items()) + " columns");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  for (std::size_t j = 0; j < item_ids.size(); ++j) {
    if (j > 0) out << ',';
    out << item_ids[j];
  }
  out << "\n";
  for (int i = 0; i < w.users(); ++i) {
    for (int j = 0; j < w.items(); ++j) {
      if (j > 0) out << ',';
      out << (w.at(i, j) ? '1' : '0');
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

LoadedMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read matrix file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty matrix file");
  }
  strip_cr(line);
  auto item_ids = split_fields(line, Delimiter::kComma);
  if (item_ids.empty() || (item_ids.size() == 1 && item_ids[0].empty())) {
    throw std::runtime_error(path + ": header row has no item ids");
  }
  std::vector<std::vector<std::uint8_t>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line, Delimiter::kComma);
    if (fields.size() != item_ids.size()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(item_ids.size()) + " fields, found " +
                               std::to_string(fields.size()));
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(fields.size());
    for (const auto& f : fields) {
      if (f == "0") {
        bits.push_back(0);
      } else if (f == "1") {
        bits.push_back(1);
      } else {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": matrix entry '" + f + "' is not 0 or 1");
      }
    }
    rows.push_back(std::move(bits));
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": matrix has no rows");
  }
  FeedbackMatrix w(static_cast<int>(rows.size()), static_cast<int>(item_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] != 0) w.set(static_cast<int>(i), static_cast<int>(j), true);
    }
  }
  return {std::move(w), std::move(item_ids)};
}

}  // namespace cascade
