#pragma once

#include <optional>
#include <string>
#include <vector>

namespace forkhealth::app {

// Pipeline configuration. Precedence: flags > env vars > config file >
// defaults; the CLI layers flags on top of load_config's result.
struct RunConfig {
  std::string project_list_path;
  std::string clone_root_dir;
  std::string cache_dir = "forkhealth-cache";
  std::string output_dir = "forkhealth-out";
  long commit_limit = 150; // recent-commit cap for the logic coupling index
  long pr_page_cap = 5;    // pages of 30 PRs
  long interval_days = 30; // frequency index window
  std::vector<std::string> duplicate_keywords = {"duplicat", "supersed", "replicat"};
  bool dup_denominator_closed = true; // closed PRs (default) vs all PRs
  bool offline_replay = false;
  long histogram_bins = 20;
  std::string base_url = "https://api.github.com";
  std::vector<std::string> tokens;

  void validate() const; // positive counts; offline requires the cache dir
};

// Defaults overlaid with the JSON config file (when given) and then the
// FORKHEALTH_TOKENS / FORKHEALTH_BASE_URL / FORKHEALTH_CACHE_DIR env vars.
RunConfig load_config(const std::optional<std::string>& config_path);

std::vector<std::string> split_csv_list(const std::string& text);

} // namespace forkhealth::app
