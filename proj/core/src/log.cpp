#include "rewrite_rl/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace rewrite_rl {
namespace {

LogLevel level_from_env() {
    const char* env = std::getenv("REWRITE_RL_LOG");
    if (!env) return LogLevel::Off;
    std::string v(env);
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Off;
}

LogLevel& level() {
    static LogLevel current = level_from_env();
    return current;
}

std::ostream*& sink() {
    static std::ostream* current = nullptr;
    return current;
}

void emit(const char* tag, std::string_view message) {
    std::ostream& os = sink() ? *sink() : std::clog;
    os << "[rewrite-rl " << tag << "] " << message << '\n';
}

}  // namespace

LogLevel log_level() { return level(); }
void set_log_level(LogLevel l) { level() = l; }
void set_log_sink(std::ostream* s) { sink() = s; }

void log_info(std::string_view message) {
    if (level() >= LogLevel::Info) emit("info", message);
}

void log_debug(std::string_view message) {
    if (level() >= LogLevel::Debug) emit("debug", message);
}

}  // namespace rewrite_rl
