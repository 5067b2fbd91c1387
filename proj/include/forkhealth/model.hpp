#pragma once

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace forkhealth {

enum class ProjectStatus { Graduated, Retired, Incubating };

// Parses "graduated" / "retired" / "incubating", case-insensitively and
// whitespace-trimmed. Throws ParseError for anything else.
ProjectStatus parse_status(const std::string& token);
std::string status_name(ProjectStatus status);

// success = 1 (graduated), failure = 0 (retired). Incubating projects have
// no outcome and never reach the regression.
using Outcome = int;
std::optional<Outcome> outcome_for(ProjectStatus status);

struct ProjectRecord {
  std::string name;       // unique within one project list
  std::string forge_url;  // absolute URL with owner and repo path segments
  ProjectStatus status = ProjectStatus::Incubating;
  std::optional<std::string> local_clone_path;

  // Owner / repository extracted from forge_url.
  std::string owner;
  std::string repo;
};

// Splits an absolute forge URL into owner and repo ("<owner>/<repo>").
// Trailing "/" and ".git" are tolerated. Throws ParseError otherwise.
std::pair<std::string, std::string> split_forge_url(const std::string& url);

// The eight per-project metrics. A field is MISSING (nullopt) iff its
// denominator population was empty, never as a stand-in for zero.
enum class MetricId {
  FrequencyIndex,
  DimensionalityIndex,
  AdditiveContributionIndex,
  LogicCouplingIndex,
  CentralManagementIndex,
  PreCommunicationIndex,
  DuplicatePrRatio,
  HardForkPresent,
};

inline constexpr std::array<MetricId, 8> kAllMetrics = {
    MetricId::FrequencyIndex,          MetricId::DimensionalityIndex,
    MetricId::AdditiveContributionIndex, MetricId::LogicCouplingIndex,
    MetricId::CentralManagementIndex,  MetricId::PreCommunicationIndex,
    MetricId::DuplicatePrRatio,        MetricId::HardForkPresent,
};

// Stable CSV column id, e.g. "frequency_index".
std::string metric_csv_id(MetricId id);
// Human-facing name for report tables, e.g. "Frequency Index".
std::string metric_display_name(MetricId id);
std::optional<MetricId> metric_from_csv_id(const std::string& id);
// hard_fork_present is the only binary metric.
bool metric_is_binary(MetricId id);

struct MetricVector {
  std::string project;
  std::optional<double> frequency_index;             // >= 0
  std::optional<double> dimensionality_index;        // >= 0
  std::optional<double> additive_contribution_index; // [0,1]
  std::optional<double> logic_coupling_index;        // [0,1]
  std::optional<double> central_management_index;    // [0,1]
  std::optional<double> pre_communication_index;     // [0,1]
  std::optional<double> duplicate_pr_ratio;          // [0,1]
  std::optional<double> hard_fork_present;           // {0,1}

  std::optional<double> get(MetricId id) const;
  void set(MetricId id, std::optional<double> value);

  // Enforces the per-field range constraints; throws ParseError naming the
  // offending field. Called by every constructor-like entry point below.
  void validate() const;
};

// One row of the metrics CSV: mined values plus the project's label.
struct MetricRow {
  ProjectStatus status = ProjectStatus::Incubating;
  MetricVector values;
};

// A joined analysis observation; incubating projects never appear here.
struct AnalysisRow {
  Outcome outcome = 0;
  MetricVector values;
};

// --- project list ----------------------------------------------------------

// CSV with header `project_name,github_url,status`. Errors name the row
// number (1-based, counting the header as row 1) and the offending field.
std::vector<ProjectRecord> parse_project_list(std::istream& in);
void write_project_list(std::ostream& out, const std::vector<ProjectRecord>& records);

// --- analysis join ---------------------------------------------------------

// Joins metric vectors to records by project name, maps graduated/retired to
// outcome 1/0 and drops incubating projects. A metric vector with no
// matching record is an error.
std::vector<AnalysisRow> to_analysis_rows(const std::vector<ProjectRecord>& records,
                                          const std::vector<MetricVector>& metrics);

// --- metrics CSV -----------------------------------------------------------
// Header: project,status,outcome,<eight metric ids>. MISSING fields and the
// incubating outcome serialize as empty fields. Values round-trip exactly.

extern const char* const kMetricsCsvHeader;

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

} // namespace forkhealth
