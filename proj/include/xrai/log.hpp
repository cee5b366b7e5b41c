#pragma once

#include <string_view>

namespace xrai::log {

enum class Level { quiet = 0, warn = 1, info = 2 };

void set_level(Level level);
Level level();

/// Thread-safe progress line on stderr.
void info(std::string_view message);
void warn(std::string_view message);

}  // namespace xrai::log
