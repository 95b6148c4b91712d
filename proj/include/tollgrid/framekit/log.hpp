#pragma once

#include <functional>
#include <string_view>

namespace tollgrid::framekit {

enum class LogLevel { kDebug, kInfo, kWarn, kError };

using LogSink = std::function<void(LogLevel, std::string_view component, std::string_view message)>;

// Replaces the process-wide sink (log aggregation hook). An empty function
// restores the default stderr sink.
void set_log_sink(LogSink sink);
// Minimum level for the default stderr sink. Initialised from TOLLGRID_LOG
// (debug|info|warn|error), default warn.
void set_log_level(LogLevel level);

void log(LogLevel level, std::string_view component, std::string_view message);

}  // namespace tollgrid::framekit
