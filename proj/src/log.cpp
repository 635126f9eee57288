#include "textshift/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace textshift {

namespace {

LogLevel parse_level(const char* value) {
  if (value == nullptr) return LogLevel::Warn;
  std::string v(value);
  if (v == "error") return LogLevel::Error;
  if (v == "warn") return LogLevel::Warn;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

LogLevel& level_ref() {
  static LogLevel level = parse_level(std::getenv("TEXTSHIFT_LOG"));
  return level;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "?";
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

LogLevel log_level() { return level_ref(); }

void set_log_level(LogLevel level) { level_ref() = level; }

void log(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  std::lock_guard<std::mutex> lock(log_mutex());
  std::cerr << "[textshift:" << tag(level) << "] " << message << '\n';
}

}  // namespace textshift
