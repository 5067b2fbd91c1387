#include "forkhealth/forge.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "forkhealth/errors.hpp"
#include "forkhealth/log.hpp"
#include "forkhealth/util.hpp"

namespace forkhealth::forge {

using nlohmann::json;

namespace {

// Transport failure that the session may retry.
struct TransientError : Error {
  explicit TransientError(const std::string& what) : Error(what) {}
};

class HttplibTransport final : public Transport {
public:
  HttpResponse get(const std::string& url,
                   const std::map<std::string, std::string>& headers) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("not an absolute URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(30, 0);
    client.set_follow_location(true);
    httplib::Headers hl;
    for (const auto& [k, v] : headers) hl.emplace(k, v);
    auto result = client.Get(path, hl);
    if (!result)
      throw TransientError("transport failure for " + url + ": " +
                           httplib::to_string(result.error()));
    HttpResponse resp;
    resp.status = result->status;
    for (const auto& [k, v] : result->headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      resp.headers[key] = v;
    }
    resp.body = result->body;
    return resp;
  }
};

bool is_rate_limited(const HttpResponse& resp) {
  if (resp.status != 403 && resp.status != 429) return false;
  auto it = resp.headers.find("x-ratelimit-remaining");
  return it != resp.headers.end() && it->second == "0";
}

} // namespace

std::unique_ptr<Transport> make_httplib_transport() {
  return std::make_unique<HttplibTransport>();
}

ForgeSession::ForgeSession(std::string base_url, HttpCache cache,
                           std::unique_ptr<Transport> transport, RequestBudget budget)
    : base_url_(std::move(base_url)),
      cache_(std::move(cache)),
      transport_(std::move(transport)),
      budget_(std::move(budget)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

HttpResponse ForgeSession::request(const std::string& url) {
  if (auto hit = cache_.lookup(url)) {
    log::debug("cache hit: " + url);
    return *hit;
  }
  if (!transport_) throw CacheMissError("replay cache has no entry for " + normalize_url(url));

  const auto& retry = budget_.retry;
  auto backoff_for = [&](int attempt) {
    if (retry.backoff_ms.empty()) return 0;
    return retry.backoff_ms[std::min<std::size_t>(static_cast<std::size_t>(attempt),
                                                  retry.backoff_ms.size() - 1)];
  };
  int attempts = 0; // transient failures and exhaustion waits consume these
  for (;;) {
    RequestBudget::Token* token = nullptr;
    for (auto& t : budget_.tokens)
      if (t.remaining > 0 && (!token || t.remaining > token->remaining)) token = &t;
    if (!token) {
      if (attempts + 1 >= retry.max_attempts)
        throw BudgetExhaustedError("request budget exhausted across " +
                                   std::to_string(budget_.tokens.size()) + " token(s) for " +
                                   url);
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_for(attempts)));
      ++attempts;
      // After waiting, probe each token once; the server may have reset.
      for (auto& t : budget_.tokens) t.remaining = 1;
      continue;
    }

    std::map<std::string, std::string> headers = {
        {"User-Agent", "forkhealth"},
        {"Accept", "application/vnd.github+json"},
    };
    if (!token->credential.empty()) headers["Authorization"] = "token " + token->credential;

    HttpResponse resp;
    bool transient = false;
    try {
      resp = transport_->get(url, headers);
      ++network_calls_;
    } catch (const std::exception& e) { // any transport failure is retryable
      ++network_calls_;
      log::warn(std::string("transport: ") + e.what());
      transient = true;
    }
    if (!transient) {
      token->remaining = std::max(token->remaining - 1, 0L);
      auto it = resp.headers.find("x-ratelimit-remaining");
      if (it != resp.headers.end()) {
        try {
          token->remaining = std::stol(it->second);
        } catch (const std::exception&) {
        }
      }
      if (is_rate_limited(resp)) {
        token->remaining = 0;
        log::warn("token rate-limited, rotating");
        continue; // rotation is free while fresh tokens remain
      }
      if (resp.status < 500) {
        cache_.store(url, resp);
        return resp;
      }
      log::warn("HTTP " + std::to_string(resp.status) + " from " + url);
    }
    ++attempts;
    if (attempts >= retry.max_attempts)
      throw Error("request failed after " + std::to_string(attempts) + " attempts: " + url);
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff_for(attempts - 1)));
  }
}

// --- text scanners -----------------------------------------------------------

std::set<long> extract_issue_refs(const std::string& text) {
  std::set<long> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    if (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1) continue; // '#' with no digits
    if (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) continue;
    try {
      long id = std::stol(text.substr(i + 1, j - i - 1));
      if (id > 0) out.insert(id);
    } catch (const std::out_of_range&) {
      // absurdly long digit runs are not issue ids
    }
    i = j - 1;
  }
  return out;
}

std::set<long> extract_issue_links(const PullRequest& pr) {
  std::set<long> out = extract_issue_refs(pr.title);
  auto merge = [&out](std::set<long> more) { out.merge(std::move(more)); };
  merge(extract_issue_refs(pr.body));
  for (const auto& [author, text] : pr.comments) merge(extract_issue_refs(text));
  for (const auto& message : pr.commit_messages) merge(extract_issue_refs(message));
  return out;
}

bool contains_wip_marker(const std::string& text) {
  for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != 'w' ||
        std::tolower(static_cast<unsigned char>(text[i + 1])) != 'i' ||
        std::tolower(static_cast<unsigned char>(text[i + 2])) != 'p')
      continue;
    bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    bool right_ok =
        i + 3 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 3]));
    if (left_ok && right_ok) return true;
  }
  return false;
}

bool contains_any_stem(const std::string& text, const std::vector<std::string>& stems) {
  std::string lowered(text.size(), '\0');
  std::transform(text.begin(), text.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const auto& stem : stems) {
    std::string s(stem.size(), '\0');
    std::transform(stem.begin(), stem.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (!s.empty() && lowered.find(s) != std::string::npos) return true;
  }
  return false;
}

const std::vector<std::string> kDefaultDuplicateStems = {"duplicat", "supersed", "replicat"};

// --- fetchers ----------------------------------------------------------------

namespace {

json decode_json(const HttpResponse& resp, const std::string& url) {
  try {
    return json::parse(resp.body);
  } catch (const std::exception& e) {
    throw ParseError("cannot decode payload from " + url + ": " + e.what());
  }
}

std::string get_string(const json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return "";
  return j[field].get<std::string>();
}

std::string login_of(const json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return "ghost"; // deleted account
  return get_string(j[field], "login");
}

// Fetches pages of a list endpoint until a short page or the cap.
// page_cap <= 0 means no cap. Throws on non-2xx unless `not_found_ok`.
std::vector<json> list_paginated(ForgeSession& session, const std::string& path_and_query,
                                 long page_cap, bool* not_found = nullptr) {
  std::vector<json> items;
  const long per_page = session.page_size();
  const char sep = path_and_query.find('?') == std::string::npos ? '?' : '&';
  for (long page = 1; page_cap <= 0 || page <= page_cap; ++page) {
    std::string url = session.base_url() + path_and_query + sep + "page=" +
                      std::to_string(page) + "&per_page=" + std::to_string(per_page);
    HttpResponse resp = session.request(url);
    if (resp.status == 404 && not_found) {
      *not_found = true;
      return items;
    }
    if (resp.status < 200 || resp.status >= 300)
      throw Error("HTTP " + std::to_string(resp.status) + " listing " + url);
    json body = decode_json(resp, url);
    if (!body.is_array()) throw ParseError("expected a JSON array from " + url);
    for (auto& item : body) items.push_back(std::move(item));
    if (static_cast<long>(body.size()) < per_page) break;
    if (page > 400) { // defensive stop against a server that never shortens
      log::warn("pagination runaway on " + path_and_query + ", stopping at page 400");
      break;
    }
  }
  return items;
}

} // namespace

std::vector<PullRequest> fetch_pull_requests(ForgeSession& session, const ProjectRecord& project,
                                             long page_cap) {
  if (page_cap < 1) throw Error("fetch_pull_requests: page cap must be >= 1");
  const std::string repo_path = "/repos/" + project.owner + "/" + project.repo;
  bool not_found = false;
  std::vector<json> listed =
      list_paginated(session, repo_path + "/pulls?state=all", page_cap, &not_found);
  if (not_found)
    throw ProjectNotFoundError("project not found on forge: " + project.owner + "/" +
                               project.repo);

  std::vector<PullRequest> prs;
  prs.reserve(listed.size());
  for (const auto& item : listed) {
    PullRequest pr;
    const std::string url_ctx = repo_path + "/pulls";
    try {
      pr.number = item.at("number").get<long>();
      pr.title = get_string(item, "title");
      pr.body = get_string(item, "body");
      std::string state = item.at("state").get<std::string>();
      pr.closed = state == "closed";
      pr.merged = item.contains("merged_at") && !item["merged_at"].is_null();
      pr.created_at = parse_iso8601_utc(item.at("created_at").get<std::string>());
      pr.author = login_of(item, "user");
      if (item.contains("assignees") && item["assignees"].is_array())
        for (const auto& a : item["assignees"]) pr.assignees.insert(get_string(a, "login"));
    } catch (const json::exception& e) {
      throw ParseError("cannot decode pull request from " + session.base_url() + url_ctx +
                       ": " + e.what());
    }
    if (pr.merged && !pr.closed)
      throw ParseError("pull request #" + std::to_string(pr.number) +
                       " claims merged but open");

    const std::string n = std::to_string(pr.number);
    for (const auto& c :
         list_paginated(session, repo_path + "/issues/" + n + "/comments", 0))
      pr.comments.emplace_back(login_of(c, "user"), get_string(c, "body"));
    for (const auto& c : list_paginated(session, repo_path + "/pulls/" + n + "/commits", 0)) {
      if (c.contains("commit") && c["commit"].is_object())
        pr.commit_messages.push_back(get_string(c["commit"], "message"));
    }
    pr.linked_issue_numbers = extract_issue_links(pr);
    prs.push_back(std::move(pr));
  }
  return prs;
}

std::map<long, IssueRef> fetch_issues(ForgeSession& session, const ProjectRecord& project,
                                      const std::set<long>& numbers) {
  const std::string repo_path = "/repos/" + project.owner + "/" + project.repo;
  std::map<long, IssueRef> issues;
  for (long number : numbers) {
    const std::string url = session.base_url() + repo_path + "/issues/" + std::to_string(number);
    HttpResponse resp = session.request(url);
    if (resp.status == 404 || resp.status == 410) {
      log::warn(project.name + ": linked issue #" + std::to_string(number) +
                " is not resolvable, skipping");
      continue;
    }
    if (resp.status < 200 || resp.status >= 300)
      throw Error("HTTP " + std::to_string(resp.status) + " fetching " + url);
    json body = decode_json(resp, url);
    IssueRef issue;
    issue.number = number;
    issue.author = login_of(body, "user");
    if (body.contains("assignees") && body["assignees"].is_array())
      for (const auto& a : body["assignees"]) issue.assignees.insert(get_string(a, "login"));
    for (const auto& c : list_paginated(
             session, repo_path + "/issues/" + std::to_string(number) + "/comments", 0))
      issue.comment_authors.insert(login_of(c, "user"));
    issues.emplace(number, std::move(issue));
  }
  return issues;
}

std::vector<Fork> fetch_forks(ForgeSession& session, const ProjectRecord& project,
                              long page_cap) {
  const std::string repo_path = "/repos/" + project.owner + "/" + project.repo;
  bool not_found = false;
  std::vector<json> listed = list_paginated(session, repo_path + "/forks", 0, &not_found);
  if (not_found)
    throw ProjectNotFoundError("project not found on forge: " + project.owner + "/" +
                               project.repo);

  std::vector<Fork> forks;
  for (const auto& item : listed) {
    Fork fork;
    fork.full_name = get_string(item, "full_name");
    if (fork.full_name.empty()) {
      log::warn(project.name + ": fork entry without full_name, skipping");
      continue;
    }
    bool fork_gone = false;
    std::vector<json> fork_prs = list_paginated(
        session, "/repos/" + fork.full_name + "/pulls?state=all", page_cap, &fork_gone);
    if (fork_gone) {
      log::warn(project.name + ": PR listing for fork " + fork.full_name +
                " is inaccessible; counting 0 merged PRs");
      forks.push_back(std::move(fork));
      continue;
    }
    for (const auto& pr : fork_prs) {
      long number = 0;
      try {
        number = pr.at("number").get<long>();
      } catch (const json::exception& e) {
        throw ParseError("cannot decode fork PR from " + fork.full_name + ": " + e.what());
      }
      // Merge status by the dedicated merge check; 204 = merged, 404 = not.
      const std::string merge_url = session.base_url() + "/repos/" + fork.full_name +
                                    "/pulls/" + std::to_string(number) + "/merge";
      HttpResponse merge = session.request(merge_url);
      if (merge.status == 204) ++fork.merged_pr_count;
      else if (merge.status != 404)
        log::warn(project.name + ": unexpected HTTP " + std::to_string(merge.status) +
                  " from merge check on " + fork.full_name + "#" + std::to_string(number) +
                  "; counting as unmerged");
    }
    forks.push_back(std::move(fork));
  }
  return forks;
}

// --- metrics -------------------------------------------------------------------

std::optional<double> central_management_index(const std::vector<PullRequest>& prs) {
  if (prs.empty()) return std::nullopt;
  std::size_t linked = 0;
  for (const auto& pr : prs)
    if (!pr.linked_issue_numbers.empty()) ++linked;
  return static_cast<double>(linked) / static_cast<double>(prs.size());
}

std::optional<double> duplicate_pr_ratio(const std::vector<PullRequest>& prs,
                                         const std::vector<std::string>& stems,
                                         bool closed_denominator) {
  std::size_t closed = 0, flagged = 0;
  for (const auto& pr : prs) {
    if (pr.closed) ++closed;
    if (!pr.closed || pr.merged) continue;
    for (const auto& [author, text] : pr.comments) {
      if (contains_any_stem(text, stems)) {
        ++flagged;
        break;
      }
    }
  }
  const std::size_t denominator = closed_denominator ? closed : prs.size();
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(flagged) / static_cast<double>(denominator);
}

int hard_fork_present(const std::vector<Fork>& forks) {
  for (const auto& fork : forks)
    if (fork.merged_pr_count >= 2) return 1;
  return 0;
}

bool pre_communicated(const PullRequest& pr, const std::map<long, IssueRef>& issues) {
  if (contains_wip_marker(pr.title) || contains_wip_marker(pr.body)) return true;
  if (pr.assignees.count(pr.author)) return true;
  for (long number : pr.linked_issue_numbers) {
    auto it = issues.find(number);
    if (it == issues.end()) continue; // unresolvable link
    if (it->second.author == pr.author || it->second.assignees.count(pr.author)) return true;
  }
  for (long number : pr.linked_issue_numbers) {
    auto it = issues.find(number);
    if (it == issues.end()) continue;
    if (it->second.comment_authors.count(pr.author)) return true;
  }
  return false;
}

std::optional<double> pre_communication_index(const std::vector<PullRequest>& prs,
                                              const std::map<long, IssueRef>& issues) {
  if (prs.empty()) return std::nullopt;
  std::size_t communicated = 0;
  for (const auto& pr : prs)
    if (pre_communicated(pr, issues)) ++communicated;
  return static_cast<double>(communicated) / static_cast<double>(prs.size());
}

std::optional<double> frequency_index(const std::vector<PullRequest>& prs, long interval_days) {
  if (interval_days <= 0) throw Error("frequency_index: interval must be positive");
  if (prs.empty()) return std::nullopt;
  std::int64_t first = prs.front().created_at, last = prs.front().created_at;
  for (const auto& pr : prs) {
    first = std::min(first, pr.created_at);
    last = std::max(last, pr.created_at);
  }
  const std::int64_t window = interval_days * 86400;
  const std::int64_t windows = (last - first) / window + 1;
  return static_cast<double>(prs.size()) / static_cast<double>(windows);
}

} // namespace forkhealth::forge
