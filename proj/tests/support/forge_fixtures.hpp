#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "forkhealth/forge.hpp"
#include "forkhealth/http_cache.hpp"

namespace testsupport {

std::string fixtures_dir(); // compile-time FORKHEALTH_FIXTURES_DIR

void store_json(forkhealth::forge::HttpCache& cache, const std::string& url,
                const nlohmann::json& body, int status = 200);
void store_status(forkhealth::forge::HttpCache& cache, const std::string& url, int status);

// Loads the shipped recorded-API fixture index (entries: url, optional
// status, optional inline body) into a cache directory for replay runs.
void populate_forge_cache(const std::string& cache_dir, const std::string& index_path);

// Transport whose responses are scripted in order; records every call.
class ScriptedTransport final : public forkhealth::forge::Transport {
public:
  struct Call {
    std::string url;
    std::map<std::string, std::string> headers;
  };

  void push(forkhealth::forge::HttpResponse response) { script_.push_back(std::move(response)); }
  forkhealth::forge::HttpResponse get(
      const std::string& url, const std::map<std::string, std::string>& headers) override;
  const std::vector<Call>& calls() const { return calls_; }

private:
  std::deque<forkhealth::forge::HttpResponse> script_;
  std::vector<Call> calls_;
};

// Replay-ready end-to-end workspace: the project list, three scripted
// clones, and the recorded forge cache.
struct IntegrationWorkspace {
  std::string root;
  std::string list_path;
  std::string clones_dir;
  std::string cache_dir;
  std::string out_dir;
};

IntegrationWorkspace setup_integration_workspace(const std::string& root);

} // namespace testsupport
