#include "tbp/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace tbp {

namespace {

LogLevel from_env()
{
    const char* v = std::getenv("TBP_LOG");
    if (!v) return LogLevel::Warn;
    std::string s(v);
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

std::atomic<int>& level_ref()
{
    static std::atomic<int> l{static_cast<int>(from_env())};
    return l;
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_ref().load()); }

void set_log_level(LogLevel l) { level_ref().store(static_cast<int>(l)); }

void log_message(LogLevel l, const std::string& msg)
{
    if (static_cast<int>(l) > level_ref().load()) return;
    static std::mutex mu;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[tbp " << names[static_cast<int>(l)] << "] " << msg << '\n';
}

}  // namespace tbp
