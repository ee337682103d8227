#pragma once

#include <string_view>

namespace camgeo::log {

enum class Level { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

// Read once from CAMGEO_LOG (0..3, default 1).
Level verbosity();

void warn(std::string_view msg);
void info(std::string_view msg);
void debug(std::string_view msg);

} // namespace camgeo::log
