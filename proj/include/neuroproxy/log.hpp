#pragma once

#include <string>

namespace neuroproxy {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Active verbosity, read once from NEUROPROXY_LOG (error|info|debug).
/// Default is error.
LogLevel log_level();

void log_message(LogLevel level, const std::string& message);

inline void log_error(const std::string& m) { log_message(LogLevel::kError, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::kInfo, m); }
inline void log_debug(const std::string& m) { log_message(LogLevel::kDebug, m); }

}  // namespace neuroproxy
