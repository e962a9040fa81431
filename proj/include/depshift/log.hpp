// Minimal stderr logger; verbosity from the DEPSHIFT_LOG environment variable
// (quiet | warn | info | debug, default warn).
#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace depshift::log {

enum class Level { quiet = 0, warn = 1, info = 2, debug = 3 };

inline Level level_from_env() {
  const char* v = std::getenv("DEPSHIFT_LOG");
  if (v == nullptr) return Level::warn;
  const std::string_view s(v);
  if (s == "quiet") return Level::quiet;
  if (s == "info") return Level::info;
  if (s == "debug") return Level::debug;
  return Level::warn;
}

inline Level& threshold() {
  static Level lvl = level_from_env();
  return lvl;
}

inline void emit(Level lvl, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "depshift: " << tag << ": " << msg << '\n';
}

inline void warn(std::string_view msg) { emit(Level::warn, "warning", msg); }
inline void info(std::string_view msg) { emit(Level::info, "info", msg); }
inline void debug(std::string_view msg) { emit(Level::debug, "debug", msg); }

}  // namespace depshift::log
