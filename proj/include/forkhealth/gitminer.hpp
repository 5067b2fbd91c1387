#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace forkhealth::gitmine {

enum class ChangeKind { Added, Modified, Deleted, Renamed };

char change_kind_letter(ChangeKind kind);
ChangeKind change_kind_from_letter(char letter);

struct FileChange {
  std::string path; // post-rename path
  ChangeKind kind = ChangeKind::Modified;
  long lines_added = 0;   // 0 for binary files
  long lines_deleted = 0; // 0 for binary files
};

struct CommitSummary {
  std::string commit_id;
  std::int64_t timestamp_utc = 0; // committer time, unix seconds
  std::vector<FileChange> changes;
  std::size_t snapshot_file_count = 0; // files in the tree at this commit
};

// Checks: no duplicate paths, non-negative churn, snapshot count covers
// added+modified files. Throws ParseError.
void validate_summary(const CommitSummary& summary);

// First-parent history of HEAD, newest first, truncated to `commit_limit`
// when given. Each summary is the diff against the first parent (the root
// commit diffs against the empty tree); rename detection is on. Throws on an
// unreadable repository or one with zero commits.
std::vector<CommitSummary> scan_history(const std::string& clone_path,
                                        std::optional<long> commit_limit = std::nullopt);

// scan_history behind a JSON-lines cache keyed by (repo path, head commit,
// traversal settings). Returns the summaries and whether the cache hit.
std::pair<std::vector<CommitSummary>, bool> scan_history_cached(
    const std::string& clone_path, std::optional<long> commit_limit,
    const std::string& cache_dir);

// Mean over commits of C(m,2)/C(tree,2) where m counts files added or
// modified in the commit; commits whose tree has fewer than 2 files are
// skipped. MISSING (nullopt) when every commit was skipped.
std::optional<double> logic_coupling_index(const std::vector<CommitSummary>& commits);

// Mean over commits of added/(added+modified); commits without added or
// modified files are skipped.
std::optional<double> additive_contribution_index(const std::vector<CommitSummary>& commits);

// Mean over commits of total churn lines / changed files (added, modified or
// renamed); commits with no such files are skipped. Deleted files contribute
// churn but are not counted as changed files.
std::optional<double> dimensionality_index(const std::vector<CommitSummary>& commits);

} // namespace forkhealth::gitmine
