#pragma once

#include <string>

namespace tbp {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level from TBP_LOG (error|warn|info|debug), default warn; messages go to stderr.
LogLevel log_level();
void set_log_level(LogLevel l);
void log_message(LogLevel l, const std::string& msg);

inline void log_warn(const std::string& m) { log_message(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_message(LogLevel::Debug, m); }

}  // namespace tbp
