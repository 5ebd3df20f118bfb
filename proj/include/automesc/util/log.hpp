#pragma once

#include <string>
#include <string_view>

namespace automesc::util {

enum class LogLevel { Debug, Info, Warn, Error };

// Threshold from AUTOMESC_LOG (debug|info|warn|error|off); info by default.
// Lines go to stderr as "<utc time> <level> <message>".
void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view m) { log(LogLevel::Info, m); }
inline void log_warn(std::string_view m) { log(LogLevel::Warn, m); }
inline void log_error(std::string_view m) { log(LogLevel::Error, m); }
inline void log_debug(std::string_view m) { log(LogLevel::Debug, m); }

} // namespace automesc::util
