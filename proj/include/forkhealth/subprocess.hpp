#pragma once

#include <string>
#include <utility>
#include <vector>

namespace forkhealth {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv via /bin/sh with stdout/stderr captured to temp files. Output is
// binary-safe (NUL bytes preserved). `env` entries are prepended to the
// child environment.
RunResult run_command(const std::vector<std::string>& argv, const std::string& cwd = "",
                      const std::vector<std::pair<std::string, std::string>>& env = {});

// POSIX single-quote escaping.
std::string shell_quote(const std::string& arg);

} // namespace forkhealth
