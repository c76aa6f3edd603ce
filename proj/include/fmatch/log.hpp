#ifndef FMATCH_LOG_HPP
#define FMATCH_LOG_HPP

#include <string_view>

namespace fmatch::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Current threshold, read once from FRONTIER_MATCH_LOG (default: warn).
Level level();

/// Override the threshold in-process (tests, --strict handling).
void set_level(Level lvl);

void error(std::string_view message);
void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

}  // namespace fmatch::log

#endif  // FMATCH_LOG_HPP
