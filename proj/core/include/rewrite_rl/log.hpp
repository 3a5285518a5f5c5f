#pragma once

#include <ostream>
#include <string_view>

namespace rewrite_rl {

enum class LogLevel { Off, Info, Debug };

/// Current level. Initialised from REWRITE_RL_LOG (off, info, debug); off when unset or unrecognised.
LogLevel log_level();
void set_log_level(LogLevel level);

/// Diagnostics go to std::clog unless redirected. Pass nullptr to restore.
void set_log_sink(std::ostream* sink);

void log_info(std::string_view message);
void log_debug(std::string_view message);

}  // namespace rewrite_rl
