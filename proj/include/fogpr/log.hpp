#pragma once

#include <sstream>
#include <string>

namespace fogpr::log {

enum class Level { off = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from the FOGPR_LOG environment variable
// ("off"|"warn"|"info"|"debug" or 0..3). Parsed once per process.
Level level();

void write(Level lvl, const std::string& msg);

template <typename... Args>
void emit(Level lvl, Args&&... args) {
    if (static_cast<int>(lvl) > static_cast<int>(level())) return;
    std::ostringstream ss;
    (ss << ... << args);
    write(lvl, ss.str());
}

template <typename... Args>
void warn(Args&&... args) {
    emit(Level::warn, std::forward<Args>(args)...);
}

template <typename... Args>
void info(Args&&... args) {
    emit(Level::info, std::forward<Args>(args)...);
}

template <typename... Args>
void debug(Args&&... args) {
    emit(Level::debug, std::forward<Args>(args)...);
}

}  // namespace fogpr::log
