#pragma once

#include <string>

namespace cascade {

// Verbosity of diagnostics on the error stream, from the CASCADE_LOG
// environment variable: "quiet", "info" (default), or "debug".
enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level();
void set_log_level(LogLevel level);

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace cascade
