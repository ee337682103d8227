#include "camgeo/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace camgeo::log {

Level verbosity() {
  static const Level level = [] {
    const char* env = std::getenv("CAMGEO_LOG");
    if (env == nullptr) return Level::Warn;
    const int v = std::atoi(env);
    if (v <= 0) return Level::Quiet;
    if (v >= 3) return Level::Debug;
    return static_cast<Level>(v);
  }();
  return level;
}

namespace {
void emit(Level at, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(verbosity()) >= static_cast<int>(at))
    std::cerr << "[camgeo " << tag << "] " << msg << '\n';
}
} // namespace

void warn(std::string_view msg) { emit(Level::Warn, "warn", msg); }
void info(std::string_view msg) { emit(Level::Info, "info", msg); }
void debug(std::string_view msg) { emit(Level::Debug, "debug", msg); }

} // namespace camgeo::log
