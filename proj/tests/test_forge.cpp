#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "forkhealth/errors.hpp"
#include "forkhealth/forge.hpp"
#include "support/fixture_repo.hpp"
#include "support/forge_fixtures.hpp"

using namespace forkhealth;
using namespace forkhealth::forge;
using nlohmann::json;
using testsupport::ScriptedTransport;

namespace {

constexpr const char* kBase = "https://api.github.com";

ProjectRecord project(const std::string& owner, const std::string& repo) {
  ProjectRecord rec;
  rec.name = repo;
  rec.owner = owner;
  rec.repo = repo;
  rec.forge_url = "https://github.com/" + owner + "/" + repo;
  return rec;
}

PullRequest make_pr(long number, bool closed, bool merged, std::int64_t created_day = 0) {
  PullRequest pr;
  pr.number = number;
  pr.closed = closed;
  pr.merged = merged;
  pr.created_at = created_day * 86400;
  pr.author = "author" + std::to_string(number);
  return pr;
}

ForgeSession replay_session(const std::string& cache_dir) {
  return ForgeSession(kBase, HttpCache(cache_dir), nullptr, RequestBudget{});
}

RequestBudget quick_budget(std::vector<RequestBudget::Token> tokens, int attempts = 4) {
  RequestBudget b;
  b.tokens = std::move(tokens);
  b.retry.max_attempts = attempts;
  b.retry.backoff_ms = {0, 0, 0};
  return b;
}

HttpResponse json_response(int status, const json& body,
                           std::map<std::string, std::string> headers = {}) {
  HttpResponse resp;
  resp.status = status;
  resp.headers = std::move(headers);
  resp.body = body.dump();
  return resp;
}

} // namespace

TEST_CASE("issue reference extraction") {
  CHECK(extract_issue_refs("Fixes #123") == std::set<long>{123});
  CHECK(extract_issue_refs("").empty());
  CHECK(extract_issue_refs("see issue #7 and #7 again") == std::set<long>{7});
  CHECK(extract_issue_refs("C#5 is a language") == std::set<long>{});
  CHECK(extract_issue_refs("(#99) and [#100]!") == std::set<long>{99, 100});
  CHECK(extract_issue_refs("issue #12ab is mangled") == std::set<long>{});
  CHECK(extract_issue_refs("##5 double hash") == std::set<long>{5});
  CHECK(extract_issue_refs("#0 is not a real issue") == std::set<long>{});
  CHECK(extract_issue_refs("dangling # end") == std::set<long>{});
  CHECK(extract_issue_refs("ISSUE #42.") == std::set<long>{42});
}

TEST_CASE("links are gathered across title, body, comments and commit messages") {
  PullRequest pr;
  pr.title = "Add parser for issue #21";
  pr.body = "Also touches #30";
  pr.comments = {{"alice", "duplicate of #104"}};
  pr.commit_messages = {"fix crash\n\ncloses #45"};
  CHECK(extract_issue_links(pr) == std::set<long>{21, 30, 104, 45});
}

TEST_CASE("WIP marker detection") {
  CHECK(contains_wip_marker("[WIP] add parser"));
  CHECK(contains_wip_marker("WIP: rework"));
  CHECK(contains_wip_marker("wip - do not merge"));
  CHECK(contains_wip_marker("wip"));
  CHECK(contains_wip_marker("This is Wip, still"));
  CHECK_FALSE(contains_wip_marker("wipe the slate"));
  CHECK_FALSE(contains_wip_marker("shipwip2"));
  CHECK_FALSE(contains_wip_marker(""));
  CHECK_FALSE(contains_wip_marker("whip"));
}

TEST_CASE("duplicate keyword stems") {
  CHECK(contains_any_stem("Closing as DUPLICATED work", kDefaultDuplicateStems));
  CHECK(contains_any_stem("superseded by #9", kDefaultDuplicateStems));
  CHECK(contains_any_stem("this replicates that", kDefaultDuplicateStems));
  CHECK_FALSE(contains_any_stem("duplex channel", kDefaultDuplicateStems));
  CHECK_FALSE(contains_any_stem("", kDefaultDuplicateStems));
  CHECK(contains_any_stem("redundant", {"redundan"}));
}

TEST_CASE("central management index") {
  std::vector<PullRequest> prs;
  for (int i = 0; i < 4; ++i) prs.push_back(make_pr(i + 1, false, false));
  prs[0].linked_issue_numbers = {7};
  prs[1].linked_issue_numbers = {9, 12};
  prs[2].linked_issue_numbers = {7};
  CHECK(*central_management_index(prs) == doctest::Approx(0.75).epsilon(1e-15));
  for (auto& pr : prs) pr.linked_issue_numbers.clear();
  CHECK(*central_management_index(prs) == 0.0);
  CHECK_FALSE(central_management_index({}).has_value());
}

TEST_CASE("duplicate PR ratio") {
  std::vector<PullRequest> prs;
  for (int i = 0; i < 10; ++i) prs.push_back(make_pr(i + 1, true, i < 3)); // 3 merged
  prs[4].comments = {{"bob", "This is a duplicate of #4"}};
  prs[7].comments = {{"amy", "superseded, closing"}};

  SUBCASE("closed denominator (default)") {
    CHECK(*duplicate_pr_ratio(prs) == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("merged PRs with keywords do not count in the numerator") {
    prs[0].comments = {{"zed", "replicated elsewhere"}}; // merged
    CHECK(*duplicate_pr_ratio(prs) == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("open PRs with keywords do not count either") {
    prs.push_back(make_pr(11, false, false));
    prs.back().comments = {{"zed", "duplicate!"}};
    CHECK(*duplicate_pr_ratio(prs) == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("all-PRs denominator") {
    CHECK(*duplicate_pr_ratio(prs, kDefaultDuplicateStems, false) ==
          doctest::Approx(0.2).epsilon(1e-15)); // 2/10, all closed here
    prs.push_back(make_pr(11, false, false));
    prs.push_back(make_pr(12, false, false));
    CHECK(*duplicate_pr_ratio(prs, kDefaultDuplicateStems, false) ==
          doctest::Approx(2.0 / 12.0).epsilon(1e-15));
    CHECK(*duplicate_pr_ratio(prs) == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("no closed PRs means MISSING") {
    std::vector<PullRequest> open = {make_pr(1, false, false)};
    CHECK_FALSE(duplicate_pr_ratio(open).has_value());
    CHECK(*duplicate_pr_ratio(open, kDefaultDuplicateStems, false) == 0.0);
  }
  SUBCASE("keyword list is configurable") {
    CHECK(*duplicate_pr_ratio(prs, {"nonsense"}) == 0.0);
  }
}

TEST_CASE("hard fork presence and monotonicity") {
  CHECK(hard_fork_present({}) == 0);
  CHECK(hard_fork_present({{"a/x", 0}, {"b/x", 1}}) == 0);
  CHECK(hard_fork_present({{"a/x", 0}, {"b/x", 2}}) == 1);
  CHECK(hard_fork_present({{"a/x", 5}}) == 1);

  std::mt19937 rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Fork> forks;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) forks.push_back({"o/f" + std::to_string(i),
                                                 static_cast<long>(rng() % 4)});
    int before = hard_fork_present(forks);
    forks[rng() % forks.size()].merged_pr_count += 1 + rng() % 3;
    CHECK(hard_fork_present(forks) >= before);
  }
}

TEST_CASE("pre-communication cascade") {
  std::map<long, IssueRef> issues;
  issues[7] = {7, "alice", {"bob"}, {"carol"}};
  issues[21] = {21, "frank", {"carol", "dan"}, {}};
  issues[30] = {30, "erin", {}, {"frank", "dan"}};

  SUBCASE("step 1: WIP announcement short-circuits everything") {
    auto pr = make_pr(1, false, false);
    pr.title = "[WIP] add parser";
    pr.author = "nobody-linked";
    CHECK(pre_communicated(pr, issues));
    pr.title = "plain";
    pr.body = "still wip here";
    CHECK(pre_communicated(pr, issues));
  }
  SUBCASE("step 2: author among PR assignees, no links needed") {
    auto pr = make_pr(2, false, false);
    pr.author = "bob";
    pr.assignees = {"bob", "alice"};
    CHECK(pre_communicated(pr, issues));
  }
  SUBCASE("step 3: author raised or is assigned a linked issue") {
    auto pr = make_pr(3, false, false);
    pr.author = "alice";
    pr.linked_issue_numbers = {7};
    CHECK(pre_communicated(pr, issues)); // alice raised #7
    pr.author = "dan";
    pr.linked_issue_numbers = {21};
    CHECK(pre_communicated(pr, issues)); // dan assigned #21
  }
  SUBCASE("step 4: author commented on a linked issue") {
    auto pr = make_pr(4, false, false);
    pr.author = "dan";
    pr.linked_issue_numbers = {30};
    CHECK(pre_communicated(pr, issues));
  }
  SUBCASE("unresolvable links are treated as absent") {
    auto pr = make_pr(5, false, false);
    pr.author = "dan";
    pr.linked_issue_numbers = {999};
    CHECK_FALSE(pre_communicated(pr, issues));
  }
  SUBCASE("no signals at all") {
    auto pr = make_pr(6, false, false);
    pr.author = "erin";
    CHECK_FALSE(pre_communicated(pr, issues));
    // linked but uninvolved
    pr.linked_issue_numbers = {7};
    CHECK_FALSE(pre_communicated(pr, issues));
  }
}

TEST_CASE("pre-communication index") {
  std::map<long, IssueRef> issues;
  std::vector<PullRequest> prs;
  for (int i = 0; i < 8; ++i) prs.push_back(make_pr(i + 1, false, false));
  prs[0].title = "[WIP] one";
  prs[3].assignees = {prs[3].author};
  CHECK(*pre_communication_index(prs, issues) == doctest::Approx(0.25).epsilon(1e-15));
  for (auto& pr : prs) pr.title = "WIP everywhere";
  CHECK(*pre_communication_index(prs, issues) == 1.0);
  CHECK_FALSE(pre_communication_index({}, issues).has_value());
}

TEST_CASE("frequency index window arithmetic") {
  SUBCASE("days 0, 10, 35, 40 with 30-day windows -> 2.0") {
    std::vector<PullRequest> prs = {make_pr(1, false, false, 0), make_pr(2, false, false, 10),
                                    make_pr(3, false, false, 35), make_pr(4, false, false, 40)};
    CHECK(*frequency_index(prs, 30) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("single PR -> one window -> 1.0") {
    CHECK(*frequency_index({make_pr(1, false, false, 123)}, 30) == 1.0);
  }
  SUBCASE("days 0 and 65 -> three windows, middle one empty -> 2/3") {
    std::vector<PullRequest> prs = {make_pr(1, false, false, 0), make_pr(2, false, false, 65)};
    CHECK(*frequency_index(prs, 30) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("feed order does not matter") {
    std::vector<PullRequest> prs = {make_pr(2, false, false, 65), make_pr(1, false, false, 0)};
    CHECK(*frequency_index(prs, 30) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("empty and invalid inputs") {
    CHECK_FALSE(frequency_index({}, 30).has_value());
    CHECK_THROWS_AS(frequency_index({make_pr(1, false, false)}, 0), Error);
  }
}

TEST_CASE("ratio metrics are invariant under PR permutation") {
  std::mt19937 rng(909);
  std::vector<PullRequest> prs;
  for (int i = 0; i < 12; ++i) {
    auto pr = make_pr(i + 1, rng() % 2 == 0, false, static_cast<std::int64_t>(rng() % 100));
    if (pr.closed && rng() % 3 == 0) pr.merged = true;
    if (rng() % 3 == 0) pr.linked_issue_numbers = {static_cast<long>(1 + rng() % 5)};
    if (rng() % 4 == 0) pr.comments = {{"x", "duplicate"}};
    prs.push_back(pr);
  }
  auto c0 = central_management_index(prs);
  auto d0 = duplicate_pr_ratio(prs);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(prs.begin(), prs.end(), rng);
    CHECK(central_management_index(prs) == c0);
    CHECK(duplicate_pr_ratio(prs) == d0);
  }
}

TEST_CASE("url normalization") {
  CHECK(normalize_url("HTTPS://API.GitHub.COM/repos/a/b?state=all&page=1") ==
        "https://api.github.com/repos/a/b?page=1&state=all");
  CHECK(normalize_url("https://api.github.com:443/x") == "https://api.github.com/x");
  CHECK(normalize_url("http://localhost:80/x") == "http://localhost/x");
  CHECK(normalize_url("http://localhost:8080/x?b=2&a=1") == "http://localhost:8080/x?a=1&b=2");
  CHECK(normalize_url("https://h/x") == normalize_url("https://h/x"));
  CHECK_THROWS_AS(normalize_url("not-a-url"), Error);
}

TEST_CASE("http cache stores, replays and stays immutable") {
  testsupport::TempDir tmp;
  HttpCache cache(tmp.path() + "/http");
  CHECK_FALSE(cache.lookup("https://api.github.com/x").has_value());

  HttpResponse resp;
  resp.status = 200;
  resp.headers["content-type"] = "application/json";
  resp.headers["x-ratelimit-remaining"] = "4999";
  resp.headers["set-cookie"] = "secret"; // not part of the stored subset
  resp.body = "[1,2,3]";
  cache.store("https://api.github.com/x?b=2&a=1", resp);

  auto hit = cache.lookup("https://api.github.com/x?a=1&b=2"); // normalized match
  REQUIRE(hit.has_value());
  CHECK(hit->status == 200);
  CHECK(hit->body == "[1,2,3]");
  CHECK(hit->headers.count("content-type") == 1);
  CHECK(hit->headers.count("set-cookie") == 0);

  HttpResponse other;
  other.status = 500;
  other.body = "changed";
  cache.store("https://api.github.com/x?a=1&b=2", other); // ignored: immutable
  CHECK(cache.lookup("https://api.github.com/x?b=2&a=1")->status == 200);

  CHECK(std::filesystem::exists(std::filesystem::path(tmp.path()) / "http" /
                                "manifest.jsonl"));
}

TEST_CASE("replay misses raise CacheMissError; 404s replay as recorded") {
  testsupport::TempDir tmp;
  auto session = replay_session(tmp.path() + "/http");
  CHECK_THROWS_AS(session.request("https://api.github.com/missing"), CacheMissError);

  HttpCache cache(tmp.path() + "/http");
  testsupport::store_status(cache, "https://api.github.com/gone", 404);
  CHECK(replay_session(tmp.path() + "/http").request("https://api.github.com/gone").status ==
        404);
}

TEST_CASE("budget: request goes out on the token with the most quota") {
  testsupport::TempDir tmp;
  auto transport = std::make_unique<ScriptedTransport>();
  auto* scripted = transport.get();
  scripted->push(json_response(200, json::array()));
  ForgeSession session(kBase, HttpCache(tmp.path() + "/http"), std::move(transport),
                       quick_budget({{"tok-a", 0}, {"tok-b", 5}}));
  auto resp = session.request("https://api.github.com/repos/a/b/forks?page=1&per_page=30");
  CHECK(resp.status == 200);
  REQUIRE(scripted->calls().size() == 1);
  CHECK(scripted->calls()[0].headers.at("Authorization") == "token tok-b");
}

TEST_CASE("budget: rate-limited token rotates without losing the request") {
  testsupport::TempDir tmp;
  auto transport = std::make_unique<ScriptedTransport>();
  auto* scripted = transport.get();
  scripted->push(json_response(403, json{{"message", "API rate limit exceeded"}},
                               {{"x-ratelimit-remaining", "0"}}));
  scripted->push(json_response(200, json::array()));
  ForgeSession session(kBase, HttpCache(tmp.path() + "/http"), std::move(transport),
                       quick_budget({{"tok-a", 9}, {"tok-b", 5}}));
  auto resp = session.request("https://api.github.com/repos/a/b/forks?page=1&per_page=30");
  CHECK(resp.status == 200);
  REQUIRE(scripted->calls().size() == 2);
  CHECK(scripted->calls()[0].headers.at("Authorization") == "token tok-a");
  CHECK(scripted->calls()[1].headers.at("Authorization") == "token tok-b");
}

TEST_CASE("budget: transient 5xx responses are retried per policy") {
  testsupport::TempDir tmp;
  SUBCASE("three 502s then success within limit 4") {
    auto transport = std::make_unique<ScriptedTransport>();
    auto* scripted = transport.get();
    for (int i = 0; i < 3; ++i) scripted->push(json_response(502, json{{"oops", true}}));
    scripted->push(json_response(200, json::array()));
    ForgeSession session(kBase, HttpCache(tmp.path() + "/http1"), std::move(transport),
                         quick_budget({{"tok", 100}}, 4));
    CHECK(session.request("https://api.github.com/r1").status == 200);
    CHECK(scripted->calls().size() == 4);
    CHECK(session.network_calls() == 4);
  }
  SUBCASE("four 502s exhaust the limit") {
    auto transport = std::make_unique<ScriptedTransport>();
    auto* scripted = transport.get();
    for (int i = 0; i < 4; ++i) scripted->push(json_response(502, json{{"oops", true}}));
    ForgeSession session(kBase, HttpCache(tmp.path() + "/http2"), std::move(transport),
                         quick_budget({{"tok", 100}}, 4));
    CHECK_THROWS_AS(session.request("https://api.github.com/r2"), Error);
    CHECK(scripted->calls().size() == 4);
  }
}

TEST_CASE("budget: global exhaustion fails, or waits and probes") {
  testsupport::TempDir tmp;
  SUBCASE("no quota anywhere and no attempts left") {
    ForgeSession session(kBase, HttpCache(tmp.path() + "/http1"),
                         std::make_unique<ScriptedTransport>(),
                         quick_budget({{"tok", 0}}, 1));
    CHECK_THROWS_AS(session.request("https://api.github.com/r"), BudgetExhaustedError);
  }
  SUBCASE("a wait and a probe can recover") {
    auto transport = std::make_unique<ScriptedTransport>();
    auto* scripted = transport.get();
    scripted->push(json_response(200, json::array()));
    ForgeSession session(kBase, HttpCache(tmp.path() + "/http2"), std::move(transport),
                         quick_budget({{"tok", 0}}, 3));
    CHECK(session.request("https://api.github.com/r").status == 200);
    CHECK(scripted->calls().size() == 1);
  }
}

TEST_CASE("warm cache answers without any network call") {
  testsupport::TempDir tmp;
  const std::string url = "https://api.github.com/repos/a/b/pulls?state=all&page=1&per_page=30";
  {
    HttpCache cache(tmp.path() + "/http");
    testsupport::store_json(cache, url, json::array());
  }
  auto transport = std::make_unique<ScriptedTransport>();
  auto* scripted = transport.get();
  ForgeSession session(kBase, HttpCache(tmp.path() + "/http"), std::move(transport),
                       quick_budget({{"tok", 5}}));
  CHECK(session.request(url).status == 200);
  CHECK(session.request(url).status == 200);
  CHECK(scripted->calls().empty());
  CHECK(session.network_calls() == 0);
}

namespace {

// Programmatic replay fixture: `count` PRs, hydration included.
void record_simple_project(HttpCache& cache, const std::string& owner, const std::string& repo,
                           int count) {
  const std::string repo_base = std::string(kBase) + "/repos/" + owner + "/" + repo;
  json page1 = json::array(), page2 = json::array();
  for (int i = count; i >= 1; --i) { // newest first
    json pr = {{"number", i},
               {"title", "pr " + std::to_string(i)},
               {"body", i % 2 ? "touches #7" : ""},
               {"state", i % 3 ? "closed" : "open"},
               {"merged_at", i % 3 == 1 ? json("2020-01-05T00:00:00Z") : json(nullptr)},
               {"created_at", "2020-01-0" + std::to_string(1 + (i % 9)) + "T00:00:00Z"},
               {"user", {{"login", "dev" + std::to_string(i % 3)}}},
               {"assignees", json::array()}};
    if (static_cast<int>(page1.size()) < 30) page1.push_back(pr);
    else page2.push_back(pr);
  }
  testsupport::store_json(cache, repo_base + "/pulls?state=all&page=1&per_page=30", page1);
  testsupport::store_json(cache, repo_base + "/pulls?state=all&page=2&per_page=30", page2);
  for (int i = 1; i <= count; ++i) {
    testsupport::store_json(
        cache, repo_base + "/issues/" + std::to_string(i) + "/comments?page=1&per_page=30",
        json::array());
    testsupport::store_json(
        cache, repo_base + "/pulls/" + std::to_string(i) + "/commits?page=1&per_page=30",
        json::array({{{"commit", {{"message", "work " + std::to_string(i)}}}}}));
  }
}

} // namespace

TEST_CASE("fetch_pull_requests: hydrated replay fixture of 7 PRs") {
  testsupport::TempDir tmp;
  {
    HttpCache cache(tmp.path() + "/http");
    record_simple_project(cache, "acme", "seven", 7);
  }
  auto session = replay_session(tmp.path() + "/http");
  auto prs = fetch_pull_requests(session, project("acme", "seven"), 5);
  REQUIRE(prs.size() == 7);
  CHECK(prs[0].number == 7); // newest first
  CHECK(prs[6].number == 1);
  for (const auto& pr : prs) {
    CHECK(pr.commit_messages.size() == 1);
    if (pr.merged) CHECK(pr.closed);
    if (pr.number % 2) CHECK(pr.linked_issue_numbers == std::set<long>{7});
  }
  CHECK(session.network_calls() == 0);
}

TEST_CASE("fetch_pull_requests: page cap stops after page one") {
  testsupport::TempDir tmp;
  {
    HttpCache cache(tmp.path() + "/http");
    record_simple_project(cache, "acme", "paged", 35);
  }
  auto session = replay_session(tmp.path() + "/http");
  auto capped = fetch_pull_requests(session, project("acme", "paged"), 1);
  CHECK(capped.size() == 30);
  auto session2 = replay_session(tmp.path() + "/http");
  auto full = fetch_pull_requests(session2, project("acme", "paged"), 5);
  CHECK(full.size() == 35);
}

TEST_CASE("fetch_pull_requests: 404 project raises ProjectNotFoundError") {
  testsupport::TempDir tmp;
  {
    HttpCache cache(tmp.path() + "/http");
    testsupport::store_status(
        cache, std::string(kBase) + "/repos/acme/void/pulls?state=all&page=1&per_page=30", 404);
  }
  auto session = replay_session(tmp.path() + "/http");
  CHECK_THROWS_AS(fetch_pull_requests(session, project("acme", "void"), 5),
                  ProjectNotFoundError);
}

TEST_CASE("fetch_pull_requests: malformed payload raises a decode error naming the url") {
  testsupport::TempDir tmp;
  {
    HttpCache cache(tmp.path() + "/http");
    HttpResponse broken;
    broken.status = 200;
    broken.body = "this is not json";
    cache.store(std::string(kBase) + "/repos/acme/bad/pulls?state=all&page=1&per_page=30",
                broken);
  }
  auto session = replay_session(tmp.path() + "/http");
  CHECK_THROWS_WITH_AS(fetch_pull_requests(session, project("acme", "bad"), 5),
                       doctest::Contains("acme/bad/pulls"), ParseError);
}

TEST_CASE("shipped fixture: all five forge metrics match hand-computed rationals") {
  testsupport::TempDir tmp;
  testsupport::populate_forge_cache(
      tmp.path() + "/http",
      (std::filesystem::path(testsupport::fixtures_dir()) / "forge" / "index.json").string());
  auto session = replay_session(tmp.path() + "/http");
  auto rec = project("acme", "fixproj");

  auto prs = fetch_pull_requests(session, rec, 5);
  REQUIRE(prs.size() == 12);
  std::set<long> linked;
  for (const auto& pr : prs)
    linked.insert(pr.linked_issue_numbers.begin(), pr.linked_issue_numbers.end());
  CHECK(linked == std::set<long>{7, 21, 30, 42, 45, 103, 104, 110});
  auto issues = fetch_issues(session, rec, linked);
  CHECK(issues.size() == 4); // 42/103/104/110 are unresolvable
  auto forks = fetch_forks(session, rec, 5);
  REQUIRE(forks.size() == 4);

  CHECK(*frequency_index(prs, 30) == 12.0 / 3.0);
  CHECK(*central_management_index(prs) == 9.0 / 12.0);
  CHECK(*pre_communication_index(prs, issues) == 6.0 / 12.0);
  CHECK(*duplicate_pr_ratio(prs) == 2.0 / 8.0);
  CHECK(*duplicate_pr_ratio(prs, kDefaultDuplicateStems, false) == 2.0 / 12.0);
  CHECK(hard_fork_present(forks) == 1);

  // fork-by-fork merged counts, including the degraded 404 fork
  CHECK(forks[0].full_name == "mirrorco/fixproj");
  CHECK(forks[0].merged_pr_count == 0);
  CHECK(forks[1].merged_pr_count == 1);
  CHECK(forks[2].merged_pr_count == 2);
  CHECK(forks[3].full_name == "gone/fixproj");
  CHECK(forks[3].merged_pr_count == 0);

  // boundary: a lone fork with one merged PR is not a hard fork; two are
  CHECK(hard_fork_present({forks[0], forks[1]}) == 0);
  CHECK(hard_fork_present({forks[2]}) == 1);

  CHECK(session.network_calls() == 0);
}

TEST_CASE("short-circuit evidence from the shipped fixture") {
  testsupport::TempDir tmp;
  testsupport::populate_forge_cache(
      tmp.path() + "/http",
      (std::filesystem::path(testsupport::fixtures_dir()) / "forge" / "index.json").string());
  auto session = replay_session(tmp.path() + "/http");
  auto rec = project("acme", "fixproj");
  auto prs = fetch_pull_requests(session, rec, 5);
  auto issues = fetch_issues(session, rec, [&] {
    std::set<long> all;
    for (const auto& pr : prs) all.insert(pr.linked_issue_numbers.begin(),
                                          pr.linked_issue_numbers.end());
    return all;
  }());

  auto by_number = [&](long n) -> const PullRequest& {
    for (const auto& pr : prs)
      if (pr.number == n) return pr;
    throw std::runtime_error("missing PR");
  };
  // #107 passes step 2 while its only would-be link "#5" never matched
  CHECK(pre_communicated(by_number(107), issues));
  CHECK(by_number(107).linked_issue_numbers.empty());
  // #112 passes step 1 with no assignees and no links at all
  CHECK(pre_communicated(by_number(112), issues));
  // #110 reaches steps 3-4 with a resolvable link and still fails
  CHECK_FALSE(pre_communicated(by_number(110), issues));
  // #104: a "wip" PR comment must not satisfy step 1
  CHECK_FALSE(pre_communicated(by_number(104), issues));
}
