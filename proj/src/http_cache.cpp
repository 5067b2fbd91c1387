#include "forkhealth/http_cache.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "forkhealth/errors.hpp"
#include "forkhealth/util.hpp"

namespace forkhealth::forge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string normalize_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("not an absolute URL: " + url);
  std::string scheme = url.substr(0, scheme_end);
  std::transform(scheme.begin(), scheme.end(), scheme.begin(),
                 [](unsigned char c) { return std::tolower(c); });

  std::string rest = url.substr(scheme_end + 3);
  auto path_start = rest.find('/');
  std::string host = path_start == std::string::npos ? rest : rest.substr(0, path_start);
  std::string path_query = path_start == std::string::npos ? "/" : rest.substr(path_start);
  std::transform(host.begin(), host.end(), host.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if ((scheme == "http" && host.size() > 3 && host.substr(host.size() - 3) == ":80"))
    host = host.substr(0, host.size() - 3);
  if ((scheme == "https" && host.size() > 4 && host.substr(host.size() - 4) == ":443"))
    host = host.substr(0, host.size() - 4);

  auto query_start = path_query.find('?');
  std::string path = path_query.substr(0, query_start);
  std::string query;
  if (query_start != std::string::npos) {
    std::vector<std::string> params;
    std::string q = path_query.substr(query_start + 1);
    std::size_t start = 0;
    while (start <= q.size()) {
      auto amp = q.find('&', start);
      std::string param = q.substr(start, amp == std::string::npos ? amp : amp - start);
      if (!param.empty()) params.push_back(param);
      if (amp == std::string::npos) break;
      start = amp + 1;
    }
    std::stable_sort(params.begin(), params.end(),
                     [](const std::string& a, const std::string& b) {
                       return a.substr(0, a.find('=')) < b.substr(0, b.find('='));
                     });
    for (std::size_t i = 0; i < params.size(); ++i)
      query += (i ? "&" : "?") + params[i];
  }
  return scheme + "://" + host + path + query;
}

HttpCache::HttpCache(std::string dir) : dir_(std::move(dir)) {}

std::string HttpCache::entry_name(const std::string& normalized_url) {
  return sha256_hex(normalized_url) + ".json";
}

std::optional<HttpResponse> HttpCache::lookup(const std::string& url) const {
  const std::string normalized = normalize_url(url);
  fs::path file = fs::path(dir_) / entry_name(normalized);
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json entry = json::parse(in);
    HttpResponse resp;
    resp.status = entry.at("status").get<int>();
    if (entry.contains("headers"))
      for (auto& [k, v] : entry.at("headers").items()) resp.headers[k] = v.get<std::string>();
    resp.body = entry.at("body").get<std::string>();
    return resp;
  } catch (const std::exception& e) {
    throw ParseError("corrupt cache entry " + file.string() + ": " + e.what());
  }
}

void HttpCache::store(const std::string& url, const HttpResponse& response) {
  const std::string normalized = normalize_url(url);
  fs::create_directories(dir_);
  fs::path file = fs::path(dir_) / entry_name(normalized);
  if (fs::exists(file)) return; // recorded responses are immutable

  json headers = json::object();
  for (const char* keep : {"content-type", "x-ratelimit-remaining"}) {
    auto it = response.headers.find(keep);
    if (it != response.headers.end()) headers[keep] = it->second;
  }
  json entry = {{"url", normalized},
                {"status", response.status},
                {"headers", headers},
                {"body", response.body}};
  atomic_write_file(file.string(), entry.dump(2) + "\n");
  append_line((fs::path(dir_) / "manifest.jsonl").string(),
              json({{"key", sha256_hex(normalized)}, {"url", normalized}}).dump());
}

} // namespace forkhealth::forge
