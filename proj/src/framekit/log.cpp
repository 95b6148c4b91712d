#include "tollgrid/framekit/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace tollgrid::framekit {
namespace {

LogLevel level_from_env() {
  const char* env = std::getenv("TOLLGRID_LOG");
  if (env == nullptr) return LogLevel::kWarn;
  const std::string v(env);
  if (v == "debug") return LogLevel::kDebug;
  if (v == "info") return LogLevel::kInfo;
  if (v == "error") return LogLevel::kError;
  return LogLevel::kWarn;
}

std::mutex g_mu;
LogSink g_sink;
std::atomic<LogLevel> g_level{level_from_env()};

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::kDebug: return "DEBUG";
    case LogLevel::kInfo: return "INFO";
    case LogLevel::kWarn: return "WARN";
    case LogLevel::kError: return "ERROR";
  }
  return "?";
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_mu);
  g_sink = std::move(sink);
}

void set_log_level(LogLevel level) { g_level = level; }

void log(LogLevel level, std::string_view component, std::string_view message) {
  std::lock_guard lock(g_mu);
  if (g_sink) {
    g_sink(level, component, message);
    return;
  }
  if (level < g_level.load()) return;
  std::fprintf(stderr, "[%s] %.*s: %.*s\n", level_tag(level), static_cast<int>(component.size()),
               component.data(), static_cast<int>(message.size()), message.data());
}

}  // namespace tollgrid::framekit
