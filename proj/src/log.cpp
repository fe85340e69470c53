#include "fogpr/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace fogpr::log {

namespace {

Level parse_level() {
    const char* env = std::getenv("FOGPR_LOG");
    if (env == nullptr || *env == '\0') return Level::warn;
    if (std::strcmp(env, "off") == 0 || std::strcmp(env, "0") == 0) return Level::off;
    if (std::strcmp(env, "warn") == 0 || std::strcmp(env, "1") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0 || std::strcmp(env, "2") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0 || std::strcmp(env, "3") == 0) return Level::debug;
    return Level::warn;
}

const char* tag(Level lvl) {
    switch (lvl) {
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
        default: return "?";
    }
}

}  // namespace

Level level() {
    static const Level lvl = parse_level();
    return lvl;
}

void write(Level lvl, const std::string& msg) {
    std::fprintf(stderr, "[fogpr:%s] %s\n", tag(lvl), msg.c_str());
}

}  // namespace fogpr::log
