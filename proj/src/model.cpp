#include "forkhealth/model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <unordered_map>

#include "forkhealth/csv.hpp"
#include "forkhealth/errors.hpp"

namespace forkhealth {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

} // namespace

ProjectStatus parse_status(const std::string& token) {
  const std::string t = lower(trim(token));
  if (t == "graduated") return ProjectStatus::Graduated;
  if (t == "retired") return ProjectStatus::Retired;
  if (t == "incubating") return ProjectStatus::Incubating;
  throw ParseError("unknown project status: \"" + token + "\"");
}

std::string status_name(ProjectStatus status) {
  switch (status) {
    case ProjectStatus::Graduated: return "graduated";
    case ProjectStatus::Retired: return "retired";
    case ProjectStatus::Incubating: return "incubating";
  }
  return "?";
}

std::optional<Outcome> outcome_for(ProjectStatus status) {
  switch (status) {
    case ProjectStatus::Graduated: return 1;
    case ProjectStatus::Retired: return 0;
    case ProjectStatus::Incubating: return std::nullopt;
  }
  return std::nullopt;
}

std::pair<std::string, std::string> split_forge_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ParseError("forge url is not absolute: \"" + url + "\"");
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos)
    throw ParseError("forge url has no owner/repo path: \"" + url + "\"");
  std::string path = url.substr(path_start + 1);
  while (!path.empty() && path.back() == '/') path.pop_back();
  auto slash = path.find('/');
  if (slash == std::string::npos)
    throw ParseError("forge url needs owner and repo segments: \"" + url + "\"");
  std::string owner = path.substr(0, slash);
  std::string repo = path.substr(slash + 1);
  // GitHub-style URLs are exactly two segments deep; keep the first two.
  auto extra = repo.find('/');
  if (extra != std::string::npos) repo = repo.substr(0, extra);
  if (repo.size() > 4 && repo.substr(repo.size() - 4) == ".git")
    repo = repo.substr(0, repo.size() - 4);
  if (owner.empty() || repo.empty())
    throw ParseError("forge url needs owner and repo segments: \"" + url + "\"");
  return {owner, repo};
}

std::string metric_csv_id(MetricId id) {
  switch (id) {
    case MetricId::FrequencyIndex: return "frequency_index";
    case MetricId::DimensionalityIndex: return "dimensionality_index";
    case MetricId::AdditiveContributionIndex: return "additive_contribution_index";
    case MetricId::LogicCouplingIndex: return "logic_coupling_index";
    case MetricId::CentralManagementIndex: return "central_management_index";
    case MetricId::PreCommunicationIndex: return "pre_communication_index";
    case MetricId::DuplicatePrRatio: return "duplicate_pr_ratio";
    case MetricId::HardForkPresent: return "hard_fork_present";
  }
  return "?";
}

std::string metric_display_name(MetricId id) {
  switch (id) {
    case MetricId::FrequencyIndex: return "Frequency Index";
    case MetricId::DimensionalityIndex: return "Dimensionality Index";
    case MetricId::AdditiveContributionIndex: return "Additive Contribution Index";
    case MetricId::LogicCouplingIndex: return "Logic Coupling Index";
    case MetricId::CentralManagementIndex: return "Central Management Index";
    case MetricId::PreCommunicationIndex: return "Pre-communication Index";
    case MetricId::DuplicatePrRatio: return "Ratio of Duplicate PRs";
    case MetricId::HardForkPresent: return "Hard forks";
  }
  return "?";
}

std::optional<MetricId> metric_from_csv_id(const std::string& id) {
  for (MetricId m : kAllMetrics)
    if (metric_csv_id(m) == id) return m;
  return std::nullopt;
}

bool metric_is_binary(MetricId id) { return id == MetricId::HardForkPresent; }

std::optional<double> MetricVector::get(MetricId id) const {
  switch (id) {
    case MetricId::FrequencyIndex: return frequency_index;
    case MetricId::DimensionalityIndex: return dimensionality_index;
    case MetricId::AdditiveContributionIndex: return additive_contribution_index;
    case MetricId::LogicCouplingIndex: return logic_coupling_index;
    case MetricId::CentralManagementIndex: return central_management_index;
    case MetricId::PreCommunicationIndex: return pre_communication_index;
    case MetricId::DuplicatePrRatio: return duplicate_pr_ratio;
    case MetricId::HardForkPresent: return hard_fork_present;
  }
  return std::nullopt;
}

void MetricVector::set(MetricId id, std::optional<double> value) {
  switch (id) {
    case MetricId::FrequencyIndex: frequency_index = value; return;
    case MetricId::DimensionalityIndex: dimensionality_index = value; return;
    case MetricId::AdditiveContributionIndex: additive_contribution_index = value; return;
    case MetricId::LogicCouplingIndex: logic_coupling_index = value; return;
    case MetricId::CentralManagementIndex: central_management_index = value; return;
    case MetricId::PreCommunicationIndex: pre_communication_index = value; return;
    case MetricId::DuplicatePrRatio: duplicate_pr_ratio = value; return;
    case MetricId::HardForkPresent: hard_fork_present = value; return;
  }
}

void MetricVector::validate() const {
  for (MetricId id : kAllMetrics) {
    auto v = get(id);
    if (!v) continue;
    bool ok = true;
    switch (id) {
      case MetricId::FrequencyIndex:
      case MetricId::DimensionalityIndex:
        ok = *v >= 0.0;
        break;
      case MetricId::HardForkPresent:
        ok = *v == 0.0 || *v == 1.0;
        break;
      default:
        ok = *v >= 0.0 && *v <= 1.0;
    }
    if (!ok)
      throw ParseError("metric " + metric_csv_id(id) + " out of range for project \"" +
                       project + "\": " + format_double(*v));
  }
}

std::vector<ProjectRecord> parse_project_list(std::istream& in) {
  std::vector<std::vector<std::string>> rows = csv::parse(in);
  if (rows.empty()) throw ParseError("project list: missing header row");
  const std::vector<std::string> expected = {"project_name", "github_url", "status"};
  if (rows[0] != expected)
    throw ParseError("project list: header must be project_name,github_url,status");

  std::vector<ProjectRecord> records;
  std::set<std::string> seen;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = "project list row " + std::to_string(i + 1);
    if (row.size() == 1 && row[0].empty()) continue; // stray blank line
    if (row.size() != 3)
      throw ParseError(where + ": expected 3 fields, got " + std::to_string(row.size()));
    ProjectRecord rec;
    rec.name = trim(row[0]);
    if (rec.name.empty()) throw ParseError(where + ": field project_name is empty");
    if (!seen.insert(rec.name).second)
      throw ParseError(where + ": duplicate project name \"" + rec.name + "\"");
    rec.forge_url = trim(row[1]);
    try {
      std::tie(rec.owner, rec.repo) = split_forge_url(rec.forge_url);
    } catch (const ParseError& e) {
      throw ParseError(where + ": field github_url: " + e.what());
    }
    try {
      rec.status = parse_status(row[2]);
    } catch (const ParseError& e) {
      throw ParseError(where + ": field status: " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_project_list(std::ostream& out, const std::vector<ProjectRecord>& records) {
  out << "project_name,github_url,status\n";
  for (const auto& r : records)
    out << csv::join_row({r.name, r.forge_url, status_name(r.status)});
}

std::vector<AnalysisRow> to_analysis_rows(const std::vector<ProjectRecord>& records,
                                          const std::vector<MetricVector>& metrics) {
  std::unordered_map<std::string, const ProjectRecord*> by_name;
  for (const auto& r : records) by_name[r.name] = &r;
  std::vector<AnalysisRow> rows;
  for (const auto& m : metrics) {
    auto it = by_name.find(m.project);
    if (it == by_name.end())
      throw Error("metric vector for unknown project \"" + m.project + "\"");
    auto outcome = outcome_for(it->second->status);
    if (!outcome) continue; // incubating: mined but never analyzed
    rows.push_back(AnalysisRow{*outcome, m});
  }
  return rows;
}

const char* const kMetricsCsvHeader =
    "project,status,outcome,frequency_index,dimensionality_index,"
    "additive_contribution_index,logic_coupling_index,central_management_index,"
    "pre_communication_index,duplicate_pr_ratio,hard_fork_present";

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << kMetricsCsvHeader << "\n";
  for (const auto& row : rows) {
    row.values.validate();
    std::vector<std::string> fields;
    fields.push_back(row.values.project);
    fields.push_back(status_name(row.status));
    auto outcome = outcome_for(row.status);
    fields.push_back(outcome ? std::to_string(*outcome) : "");
    for (MetricId id : kAllMetrics) {
      auto v = row.values.get(id);
      fields.push_back(v ? format_double(*v) : "");
    }
    out << csv::join_row(fields);
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  auto rows = csv::parse(in);
  if (rows.empty()) throw ParseError("metrics csv: missing header row");
  {
    std::istringstream header(kMetricsCsvHeader);
    std::vector<std::string> expected;
    std::string col;
    while (std::getline(header, col, ',')) expected.push_back(col);
    if (rows[0] != expected) throw ParseError("metrics csv: unexpected header");
  }
  std::vector<MetricRow> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = "metrics csv row " + std::to_string(i + 1);
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 3 + kAllMetrics.size())
      throw ParseError(where + ": expected " + std::to_string(3 + kAllMetrics.size()) +
                       " fields, got " + std::to_string(row.size()));
    MetricRow rec;
    rec.values.project = row[0];
    if (rec.values.project.empty()) throw ParseError(where + ": empty project name");
    rec.status = parse_status(row[1]);
    // outcome column is derived from status; the stored value is ignored.
    for (size_t k = 0; k < kAllMetrics.size(); ++k) {
      const std::string& cell = row[3 + k];
      if (cell.empty()) continue;
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ParseError(where + ": field " + metric_csv_id(kAllMetrics[k]) +
                         " is not a number: \"" + cell + "\"");
      rec.values.set(kAllMetrics[k], v);
    }
    rec.values.validate();
    out.push_back(std::move(rec));
  }
  return out;
}

} // namespace forkhealth
