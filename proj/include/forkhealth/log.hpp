#pragma once

#include <iostream>
#include <mutex>
#include <string>

namespace forkhealth::log {

enum class Level { Debug, Info, Warn, Error };

// Process-wide minimum level; messages below it are dropped.
void set_level(Level level);
Level level();

// Writes "LEVEL message" to stderr. Thread-safe; one line per call.
void emit(Level level, const std::string& message);

inline void debug(const std::string& m) { emit(Level::Debug, m); }
inline void info(const std::string& m) { emit(Level::Info, m); }
inline void warn(const std::string& m) { emit(Level::Warn, m); }
inline void error(const std::string& m) { emit(Level::Error, m); }

} // namespace forkhealth::log
