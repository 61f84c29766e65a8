#include "gpbo/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace gpbo::log {

Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("GPBO_LOG");
    if (env == nullptr) return Level::kWarning;
    const std::string v(env);
    if (v == "debug") return Level::kDebug;
    if (v == "info") return Level::kInfo;
    if (v == "off") return Level::kOff;
    return Level::kWarning;
  }();
  return level;
}

void write(Level level, std::string_view message) {
  static std::mutex mu;
  static constexpr const char* kNames[] = {"debug", "info", "warning", "off"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[gpbo " << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace gpbo::log
