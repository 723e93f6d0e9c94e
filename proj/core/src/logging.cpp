#include "cascade/logging.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace cascade {

namespace {

LogLevel level_from_env() {
  const char* raw = std::getenv("CASCADE_LOG");
  if (raw == nullptr) return LogLevel::kInfo;
  const std::string v(raw);
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

std::atomic<int>& level_store() {
  static std::atomic<int> level{static_cast<int>(level_from_env())};
  return level;
}

void emit(const char* tag, const std::string& msg) {
  // One formatted write per message so concurrent runs do not interleave.
  const std::string line = std::string("[") + tag + "] " + msg + "\n";
  std::fputs(line.c_str(), stderr);
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_store().load()); }

void set_log_level(LogLevel level) { level_store().store(static_cast<int>(level)); }

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) emit("debug", msg);
}

}  // namespace cascade
