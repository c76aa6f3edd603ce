#include "fmatch/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace fmatch::log {

namespace {

Level level_from_env() {
  const char* raw = std::getenv("FRONTIER_MATCH_LOG");
  if (raw == nullptr) return Level::warn;
  const std::string value(raw);
  if (value == "error") return Level::error;
  if (value == "warn") return Level::warn;
  if (value == "info") return Level::info;
  if (value == "debug") return Level::debug;
  return Level::warn;
}

std::atomic<Level>& current() {
  static std::atomic<Level> lvl{level_from_env()};
  return lvl;
}

void emit(Level lvl, std::string_view tag, std::string_view message) {
  if (static_cast<int>(lvl) > static_cast<int>(current().load())) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[" << tag << "] " << message << "\n";
}

}  // namespace

Level level() { return current().load(); }
void set_level(Level lvl) { current().store(lvl); }

void error(std::string_view message) { emit(Level::error, "error", message); }
void warn(std::string_view message) { emit(Level::warn, "warn", message); }
void info(std::string_view message) { emit(Level::info, "info", message); }
void debug(std::string_view message) { emit(Level::debug, "debug", message); }

}  // namespace fmatch::log
