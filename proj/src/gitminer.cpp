#include "forkhealth/gitminer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "forkhealth/errors.hpp"
#include "forkhealth/log.hpp"
#include "forkhealth/subprocess.hpp"
#include "forkhealth/util.hpp"

namespace forkhealth::gitmine {

namespace fs = std::filesystem;
using nlohmann::json;

char change_kind_letter(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::Added: return 'A';
    case ChangeKind::Modified: return 'M';
    case ChangeKind::Deleted: return 'D';
    case ChangeKind::Renamed: return 'R';
  }
  return '?';
}

ChangeKind change_kind_from_letter(char letter) {
  switch (letter) {
    case 'A': return ChangeKind::Added;
    case 'M': return ChangeKind::Modified;
    case 'D': return ChangeKind::Deleted;
    case 'R': return ChangeKind::Renamed;
  }
  throw ParseError(std::string("unknown change kind letter: ") + letter);
}

void validate_summary(const CommitSummary& summary) {
  std::set<std::string> paths;
  std::size_t added_or_modified = 0;
  for (const auto& c : summary.changes) {
    if (c.lines_added < 0 || c.lines_deleted < 0)
      throw ParseError("commit " + summary.commit_id + ": negative churn for " + c.path);
    if (!paths.insert(c.path).second)
      throw ParseError("commit " + summary.commit_id + ": duplicate path " + c.path);
    if (c.kind == ChangeKind::Added || c.kind == ChangeKind::Modified) ++added_or_modified;
  }
  if (summary.snapshot_file_count < added_or_modified)
    throw ParseError("commit " + summary.commit_id + ": snapshot smaller than changed files");
}

namespace {

RunResult git(const std::string& repo, const std::vector<std::string>& args) {
  std::vector<std::string> argv = {"git", "-C", repo};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_command(argv);
}

std::string first_line(const std::string& s) {
  auto pos = s.find('\n');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

// Kind of a raw diff status field like "A", "M", "R100".
ChangeKind kind_of_status(const std::string& status, const std::string& commit) {
  switch (status.empty() ? '?' : status[0]) {
    case 'A': return ChangeKind::Added;
    case 'M': return ChangeKind::Modified;
    case 'D': return ChangeKind::Deleted;
    case 'R': return ChangeKind::Renamed;
    case 'C': return ChangeKind::Added; // copies create a new path
    case 'T': return ChangeKind::Modified;
    default:
      log::warn("commit " + commit + ": unexpected diff status '" + status +
                "', treating as modified");
      return ChangeKind::Modified;
  }
}

struct RawEntry {
  ChangeKind kind;
  std::string path;
};

struct NumstatEntry {
  long added = 0;
  long deleted = 0;
  std::string path;
};

bool looks_like_numstat(const std::string& token) {
  // "<count or -> TAB <count or -> TAB ..."
  std::size_t i = 0;
  auto field_ok = [&]() {
    if (i < token.size() && token[i] == '-') {
      ++i;
      return true;
    }
    std::size_t start = i;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) ++i;
    return i > start;
  };
  if (!field_ok() || i >= token.size() || token[i] != '\t') return false;
  ++i;
  if (!field_ok() || i >= token.size() || token[i] != '\t') return false;
  return true;
}

long churn_field(const std::string& s) {
  if (s == "-") return 0; // binary file
  return std::stol(s);
}

std::vector<CommitSummary> parse_log_stream(const std::string& stream,
                                            std::size_t head_file_count) {
  // Token grammar of `git log -z --raw --numstat --format=C%x09%H%x09%ct`:
  //   header   C\t<sha>\t<ts>
  //   raw      :<modes...> <status>   followed by 1 path token (2 for R/C)
  //   numstat  <n|->\t<n|->\t<path>   (rename form: empty path plus 2 tokens)
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= stream.size()) {
    auto nul = stream.find('\0', start);
    if (nul == std::string::npos) {
      if (start < stream.size()) tokens.push_back(stream.substr(start));
      break;
    }
    tokens.push_back(stream.substr(start, nul - start));
    start = nul + 1;
  }

  struct PendingCommit {
    std::string sha;
    std::int64_t ts = 0;
    std::vector<RawEntry> raw;
    std::vector<NumstatEntry> numstat;
  };
  std::vector<PendingCommit> pending;

  std::size_t i = 0;
  while (i < tokens.size()) {
    std::string token = tokens[i];
    while (!token.empty() && token.front() == '\n') token.erase(token.begin());
    if (token.empty()) {
      ++i;
      continue;
    }
    if (token.rfind("C\t", 0) == 0) {
      std::istringstream header(token.substr(2));
      PendingCommit c;
      std::string ts;
      if (!std::getline(header, c.sha, '\t') || !std::getline(header, ts))
        throw ParseError("git log parse: bad commit header \"" + token + "\"");
      c.ts = std::stoll(ts);
      pending.push_back(std::move(c));
      ++i;
      continue;
    }
    if (pending.empty()) throw ParseError("git log parse: entry before first commit header");
    PendingCommit& commit = pending.back();
    if (token.front() == ':') {
      auto space = token.rfind(' ');
      if (space == std::string::npos)
        throw ParseError("git log parse: bad raw entry \"" + token + "\"");
      std::string status = token.substr(space + 1);
      ChangeKind kind = kind_of_status(status, commit.sha);
      bool two_paths = status[0] == 'R' || status[0] == 'C';
      if (i + (two_paths ? 2 : 1) >= tokens.size())
        throw ParseError("git log parse: truncated raw entry in commit " + commit.sha);
      std::string path = two_paths ? tokens[i + 2] : tokens[i + 1];
      commit.raw.push_back({kind, std::move(path)});
      i += two_paths ? 3 : 2;
      continue;
    }
    if (looks_like_numstat(token)) {
      auto tab1 = token.find('\t');
      auto tab2 = token.find('\t', tab1 + 1);
      NumstatEntry entry;
      entry.added = churn_field(token.substr(0, tab1));
      entry.deleted = churn_field(token.substr(tab1 + 1, tab2 - tab1 - 1));
      entry.path = token.substr(tab2 + 1);
      if (entry.path.empty()) {
        // Rename: old and new path follow as separate tokens.
        if (i + 2 >= tokens.size())
          throw ParseError("git log parse: truncated numstat rename in commit " + commit.sha);
        entry.path = tokens[i + 2];
        i += 3;
      } else {
        ++i;
      }
      commit.numstat.push_back(std::move(entry));
      continue;
    }
    throw ParseError("git log parse: unrecognized token \"" + token + "\"");
  }

  // Zip raw and numstat (same order by construction) and derive each parent
  // tree's file count from the child's: parent = child - added + deleted.
  std::vector<CommitSummary> out;
  out.reserve(pending.size());
  std::size_t tree_files = head_file_count;
  for (auto& p : pending) {
    if (p.raw.size() != p.numstat.size())
      throw ParseError("git log parse: raw/numstat mismatch in commit " + p.sha);
    CommitSummary s;
    s.commit_id = p.sha;
    s.timestamp_utc = p.ts;
    s.snapshot_file_count = tree_files;
    long net_added = 0, net_deleted = 0;
    for (std::size_t j = 0; j < p.raw.size(); ++j) {
      if (p.raw[j].path != p.numstat[j].path)
        throw ParseError("git log parse: path mismatch in commit " + p.sha + ": \"" +
                         p.raw[j].path + "\" vs \"" + p.numstat[j].path + "\"");
      FileChange change;
      change.path = p.raw[j].path;
      change.kind = p.raw[j].kind;
      change.lines_added = p.numstat[j].added;
      change.lines_deleted = p.numstat[j].deleted;
      if (change.kind == ChangeKind::Added) ++net_added;
      if (change.kind == ChangeKind::Deleted) ++net_deleted;
      s.changes.push_back(std::move(change));
    }
    validate_summary(s);
    out.push_back(std::move(s));
    tree_files = tree_files - static_cast<std::size_t>(net_added) +
                 static_cast<std::size_t>(net_deleted);
  }
  return out;
}

} // namespace

std::vector<CommitSummary> scan_history(const std::string& clone_path,
                                        std::optional<long> commit_limit) {
  if (commit_limit && *commit_limit <= 0)
    throw Error("scan_history: commit limit must be positive");
  auto probe = git(clone_path, {"rev-parse", "--git-dir"});
  if (probe.exit_code != 0)
    throw Error("not a readable git repository: " + clone_path + ": " + first_line(probe.err));
  auto head = git(clone_path, {"rev-parse", "--verify", "HEAD"});
  if (head.exit_code != 0)
    throw Error("repository has no commits: " + clone_path);

  auto ls = git(clone_path, {"ls-tree", "-r", "-z", "--name-only", "HEAD"});
  if (ls.exit_code != 0)
    throw Error("git ls-tree failed for " + clone_path + ": " + first_line(ls.err));
  std::size_t head_files = 0;
  for (char c : ls.out)
    if (c == '\0') ++head_files;

  std::vector<std::string> args = {"log", "--first-parent", "-M",     "--raw",
                                   "--numstat",  "-z",      "--format=C%x09%H%x09%ct"};
  if (commit_limit) args.push_back("-n" + std::to_string(*commit_limit));
  args.push_back("HEAD");
  auto log_out = git(clone_path, args);
  if (log_out.exit_code != 0)
    throw Error("git log failed for " + clone_path + ": " + first_line(log_out.err));
  return parse_log_stream(log_out.out, head_files);
}

namespace {

json summary_to_json(const CommitSummary& s) {
  json changes = json::array();
  for (const auto& c : s.changes)
    changes.push_back({c.path, std::string(1, change_kind_letter(c.kind)), c.lines_added,
                       c.lines_deleted});
  return {{"id", s.commit_id},
          {"ts", s.timestamp_utc},
          {"snapshot", s.snapshot_file_count},
          {"changes", changes}};
}

CommitSummary summary_from_json(const json& j) {
  CommitSummary s;
  s.commit_id = j.at("id").get<std::string>();
  s.timestamp_utc = j.at("ts").get<std::int64_t>();
  s.snapshot_file_count = j.at("snapshot").get<std::size_t>();
  for (const auto& c : j.at("changes")) {
    FileChange change;
    change.path = c.at(0).get<std::string>();
    change.kind = change_kind_from_letter(c.at(1).get<std::string>().at(0));
    change.lines_added = c.at(2).get<long>();
    change.lines_deleted = c.at(3).get<long>();
    s.changes.push_back(std::move(change));
  }
  validate_summary(s);
  return s;
}

} // namespace

std::pair<std::vector<CommitSummary>, bool> scan_history_cached(
    const std::string& clone_path, std::optional<long> commit_limit,
    const std::string& cache_dir) {
  auto head = git(clone_path, {"rev-parse", "--verify", "HEAD"});
  if (head.exit_code != 0) {
    // Let scan_history produce the precise error.
    return {scan_history(clone_path, commit_limit), false};
  }
  std::string head_sha = first_line(head.out);
  json key = {{"schema", 1},
              {"repo", fs::weakly_canonical(clone_path).string()},
              {"head", head_sha},
              {"limit", commit_limit ? json(*commit_limit) : json(nullptr)},
              {"traversal", "first-parent,rename-detect"}};
  fs::create_directories(cache_dir);
  fs::path file = fs::path(cache_dir) / ("git-" + sha256_hex(key.dump()) + ".jsonl");

  if (fs::exists(file)) {
    try {
      std::ifstream in(file);
      std::string line;
      if (!std::getline(in, line)) throw ParseError("empty cache file");
      if (json::parse(line) != key) throw ParseError("cache key mismatch");
      std::vector<CommitSummary> summaries;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        summaries.push_back(summary_from_json(json::parse(line)));
      }
      return {std::move(summaries), true};
    } catch (const std::exception& e) {
      log::warn("git cache " + file.string() + " unusable (" + e.what() + "); rescanning");
    }
  }

  auto summaries = scan_history(clone_path, commit_limit);
  std::string blob = key.dump() + "\n";
  for (const auto& s : summaries) blob += summary_to_json(s).dump() + "\n";
  atomic_write_file(file.string(), blob);
  return {std::move(summaries), false};
}

std::optional<double> logic_coupling_index(const std::vector<CommitSummary>& commits) {
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& c : commits) {
    if (c.snapshot_file_count < 2) continue;
    double m = 0;
    for (const auto& ch : c.changes)
      if (ch.kind == ChangeKind::Added || ch.kind == ChangeKind::Modified) ++m;
    double n = static_cast<double>(c.snapshot_file_count);
    sum += (m * (m - 1.0) / 2.0) / (n * (n - 1.0) / 2.0);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / static_cast<double>(used);
}

std::optional<double> additive_contribution_index(const std::vector<CommitSummary>& commits) {
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& c : commits) {
    long added = 0, modified = 0;
    for (const auto& ch : c.changes) {
      if (ch.kind == ChangeKind::Added) ++added;
      else if (ch.kind == ChangeKind::Modified) ++modified;
    }
    if (added + modified == 0) continue;
    sum += static_cast<double>(added) / static_cast<double>(added + modified);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / static_cast<double>(used);
}

std::optional<double> dimensionality_index(const std::vector<CommitSummary>& commits) {
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& c : commits) {
    long churn = 0, files = 0;
    for (const auto& ch : c.changes) {
      churn += ch.lines_added + ch.lines_deleted;
      if (ch.kind != ChangeKind::Deleted) ++files;
    }
    if (files == 0) continue;
    sum += static_cast<double>(churn) / static_cast<double>(files);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / static_cast<double>(used);
}

} // namespace forkhealth::gitmine
