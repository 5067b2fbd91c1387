#pragma once

#include <map>
#include <optional>
#include <string>

namespace forkhealth::forge {

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers; // lowercased keys
  std::string body;
};

// Canonical cache key form: lowercased scheme and host, default ports
// dropped, query parameters sorted by key.
std::string normalize_url(const std::string& url);

// One JSON file per normalized URL (hash-named) plus a manifest.jsonl
// mapping hash -> URL. Writes are write-temp-then-rename; entries are
// immutable once recorded.
class HttpCache {
public:
  explicit HttpCache(std::string dir);

  std::optional<HttpResponse> lookup(const std::string& url) const;
  void store(const std::string& url, const HttpResponse& response);

  const std::string& dir() const { return dir_; }
  static std::string entry_name(const std::string& normalized_url);

private:
  std::string dir_;
};

} // namespace forkhealth::forge
