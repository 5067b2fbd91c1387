#include "forkhealth/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "forkhealth/errors.hpp"

namespace forkhealth::app {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
  if (commit_limit <= 0) throw ConfigError("commit_limit must be positive");
  if (pr_page_cap <= 0) throw ConfigError("pr_page_cap must be positive");
  if (interval_days <= 0) throw ConfigError("interval_days must be positive");
  if (histogram_bins <= 0) throw ConfigError("histogram_bins must be positive");
  if (offline_replay && !fs::is_directory(cache_dir))
    throw ConfigError("offline replay requires an existing cache dir: " + cache_dir);
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

RunConfig load_config(const std::optional<std::string>& config_path) {
  RunConfig config;

  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file: " + *config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const std::exception& e) {
      throw ConfigError("bad config file " + *config_path + ": " + e.what());
    }
    auto str = [&](const char* key, std::string& target) {
      if (doc.contains(key)) target = doc[key].get<std::string>();
    };
    auto num = [&](const char* key, long& target) {
      if (doc.contains(key)) target = doc[key].get<long>();
    };
    try {
      str("project_list", config.project_list_path);
      str("clone_root", config.clone_root_dir);
      str("cache_dir", config.cache_dir);
      str("output_dir", config.output_dir);
      num("commit_limit", config.commit_limit);
      num("pr_page_cap", config.pr_page_cap);
      num("interval_days", config.interval_days);
      num("histogram_bins", config.histogram_bins);
      str("base_url", config.base_url);
      if (doc.contains("offline")) config.offline_replay = doc["offline"].get<bool>();
      if (doc.contains("duplicate_keywords"))
        config.duplicate_keywords = doc["duplicate_keywords"].get<std::vector<std::string>>();
      if (doc.contains("dup_denominator")) {
        std::string mode = doc["dup_denominator"].get<std::string>();
        if (mode != "closed" && mode != "all")
          throw ConfigError("dup_denominator must be \"closed\" or \"all\"");
        config.dup_denominator_closed = mode == "closed";
      }
      if (doc.contains("tokens"))
        config.tokens = doc["tokens"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError("bad config file " + *config_path + ": " + e.what());
    }
  }

  if (const char* tokens = std::getenv("FORKHEALTH_TOKENS"))
    config.tokens = split_csv_list(tokens);
  if (const char* base = std::getenv("FORKHEALTH_BASE_URL")) config.base_url = base;
  if (const char* cache = std::getenv("FORKHEALTH_CACHE_DIR")) config.cache_dir = cache;
  return config;
}

} // namespace forkhealth::app
