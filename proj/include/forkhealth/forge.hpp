#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forkhealth/http_cache.hpp"
#include "forkhealth/model.hpp"

namespace forkhealth::forge {

struct PullRequest {
  long number = 0;
  std::string title;
  std::string body;
  bool closed = false;
  bool merged = false; // merged implies closed
  std::int64_t created_at = 0;
  std::string author;
  std::set<std::string> assignees;
  std::vector<std::pair<std::string, std::string>> comments; // (author, text)
  std::vector<std::string> commit_messages;
  std::set<long> linked_issue_numbers;
};

struct IssueRef {
  long number = 0;
  std::string author;
  std::set<std::string> assignees;
  std::set<std::string> comment_authors;
};

struct Fork {
  std::string full_name; // owner/repo
  long merged_pr_count = 0;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::vector<int> backoff_ms = {500, 1000, 2000};
};

struct RequestBudget {
  struct Token {
    std::string credential;
    long remaining = 5000; // GitHub's authenticated hourly quota
  };
  std::vector<Token> tokens;
  RetryPolicy retry;
};

// Transport abstraction so tests can script responses.
class Transport {
public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url,
                           const std::map<std::string, std::string>& headers) = 0;
};

std::unique_ptr<Transport> make_httplib_transport();

// Serializes all forge traffic: read-through cache, token rotation by most
// remaining quota, bounded retries with backoff on transient failures. A
// null transport means replay mode: every request must hit the cache.
class ForgeSession {
public:
  ForgeSession(std::string base_url, HttpCache cache, std::unique_ptr<Transport> transport,
               RequestBudget budget);

  // issue_budgeted_request: returns the response (any status); throws
  // BudgetExhaustedError / CacheMissError / Error per the retry policy.
  HttpResponse request(const std::string& url);

  const std::string& base_url() const { return base_url_; }
  bool replay() const { return transport_ == nullptr; }
  std::size_t network_calls() const { return network_calls_; }
  long page_size() const { return 30; }

private:
  std::string base_url_;
  HttpCache cache_;
  std::unique_ptr<Transport> transport_;
  RequestBudget budget_;
  std::size_t network_calls_ = 0;
};

// --- text scanners ---------------------------------------------------------

// All `#<digits>` references with a non-alphanumeric (or start) boundary on
// both sides; "C#5" does not match. Positive ids only, deduplicated.
std::set<long> extract_issue_refs(const std::string& text);

// Union of refs in title, body, comments and commit messages.
std::set<long> extract_issue_links(const PullRequest& pr);

// Case-insensitive token "wip" delimited by non-alphanumerics.
bool contains_wip_marker(const std::string& text);

// Case-insensitive substring match of any keyword stem.
bool contains_any_stem(const std::string& text, const std::vector<std::string>& stems);

extern const std::vector<std::string> kDefaultDuplicateStems; // duplicat/supersed/replicat

// --- fetchers ---------------------------------------------------------------

// Newest-first PRs (state=all) up to page_cap pages of 30, hydrated with
// comments, commit messages and merge status. 404 on the listing raises
// ProjectNotFoundError.
std::vector<PullRequest> fetch_pull_requests(ForgeSession& session, const ProjectRecord& project,
                                             long page_cap);

// Issues referenced by the given numbers; unresolvable ones are skipped with
// a warning.
std::map<long, IssueRef> fetch_issues(ForgeSession& session, const ProjectRecord& project,
                                      const std::set<long>& numbers);

// All forks; each fork's merged PR count comes from listing the PRs raised
// within the fork (up to page_cap pages) and checking each PR's merge
// status. A fork whose PR listing fails yields count 0 plus a warning.
std::vector<Fork> fetch_forks(ForgeSession& session, const ProjectRecord& project, long page_cap);

// --- metrics -----------------------------------------------------------------

// Fraction of PRs that link to at least one issue. MISSING when no PRs.
std::optional<double> central_management_index(const std::vector<PullRequest>& prs);

// Fraction of closed PRs rejected as duplicates: closed, unmerged PRs with a
// comment matching a duplicate stem, over closed PRs (or all PRs when
// closed_denominator is false). MISSING when the denominator is empty.
std::optional<double> duplicate_pr_ratio(const std::vector<PullRequest>& prs,
                                         const std::vector<std::string>& stems =
                                             kDefaultDuplicateStems,
                                         bool closed_denominator = true);

// 1 iff any fork has >= 2 merged PRs. Never MISSING: no forks means 0.
int hard_fork_present(const std::vector<Fork>& forks);

// Ordered cascade: WIP marker in title/body; author among PR assignees;
// author raised or is assigned a linked issue; author commented on a linked
// issue. Unresolvable linked issues are treated as absent.
bool pre_communicated(const PullRequest& pr, const std::map<long, IssueRef>& issues);

std::optional<double> pre_communication_index(const std::vector<PullRequest>& prs,
                                              const std::map<long, IssueRef>& issues);

// PRs per interval_days window; windows partition the closed span between
// the first and last PR, anchored at the first. Interior empty windows count
// in the denominator. MISSING when no PRs.
std::optional<double> frequency_index(const std::vector<PullRequest>& prs, long interval_days);

} // namespace forkhealth::forge
