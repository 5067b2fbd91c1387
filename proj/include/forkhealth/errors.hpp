#pragma once

#include <stdexcept>
#include <string>

namespace forkhealth {

// Base class for all pipeline failures that map to exit code 1.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad flags, env vars, config files or preconditions on them; exit code 2.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Malformed input data (CSV rows, JSON payloads, git output).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// The forge returned 404 for the project itself.
class ProjectNotFoundError : public Error {
public:
  explicit ProjectNotFoundError(const std::string& what) : Error(what) {}
};

// Every token ran out of quota and the retry policy is spent.
class BudgetExhaustedError : public Error {
public:
  explicit BudgetExhaustedError(const std::string& what) : Error(what) {}
};

// Replay mode asked for a URL that was never recorded.
class CacheMissError : public Error {
public:
  explicit CacheMissError(const std::string& what) : Error(what) {}
};

} // namespace forkhealth
