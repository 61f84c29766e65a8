#pragma once

#include <sstream>
#include <string_view>

namespace gpbo::log {

enum class Level { kDebug = 0, kInfo = 1, kWarning = 2, kOff = 3 };

/// Threshold read once from GPBO_LOG (debug|info); warnings are always shown.
Level threshold();
void write(Level level, std::string_view message);

template <typename... Args>
void emit(Level level, const Args&... args) {
  if (level < threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}

template <typename... Args>
void debug(const Args&... args) { emit(Level::kDebug, args...); }
template <typename... Args>
void info(const Args&... args) { emit(Level::kInfo, args...); }
template <typename... Args>
void warn(const Args&... args) { emit(Level::kWarning, args...); }

}  // namespace gpbo::log
