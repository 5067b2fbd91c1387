#pragma once

#include <string>
#include <vector>

#include "forkhealth/config.hpp"
#include "forkhealth/model.hpp"
#include "forkhealth/report.hpp"
#include "forkhealth/stats.hpp"

namespace forkhealth::app {

// Exit codes: 0 success, 1 runtime failure, 2 configuration error (thrown as
// ConfigError and mapped by the CLI).

// Mines the three git metrics for every project with a clone under
// clone_root_dir (or its record's explicit path). Unminable projects keep
// MISSING values with a logged reason; fails (1) when nothing was minable.
int cmd_mine_git(const RunConfig& config);

// Mines the five forge metrics through the record/replay session. Per-project
// failures degrade to MISSING with warnings; a globally exhausted request
// budget aborts with exit 1, keeping the partial CSV.
int cmd_mine_forge(const RunConfig& config);

// Outlier removal, per-metric univariate fits with McFadden R^2, full-model
// backward stepwise, and all report documents. Exit 1 when fewer than two
// outcome classes remain.
int cmd_analyze(const RunConfig& config);

// mine git, mine forge, analyze; stops at the first failing stage.
int cmd_run_all(const RunConfig& config);

// Re-renders report documents from a previous analyze run's analysis.json.
int cmd_report(const RunConfig& config, bool paper_layout);

// Paths inside the run-scoped output directory.
std::string metrics_csv_path(const RunConfig& config);
std::string analysis_json_path(const RunConfig& config);

// Exposed for tests: computes per-metric univariate fits and the stepwise
// trace from metric rows. Returns the univariate table rows.
struct AnalysisResult {
  std::vector<report::UnivariateReportRow> univariate;
  // Per-metric bookkeeping aligned with `univariate`.
  struct MetricDetail {
    MetricId metric;
    std::size_t n_total = 0;    // analysis rows
    std::size_t n_missing = 0;  // rows without this metric
    std::size_t n_outliers = 0; // rows removed by the fences
    std::size_t n_used = 0;
    stats::RegressionFit fit;
    stats::RegressionFit null_fit;
    double mcfadden = 0.0;
  };
  std::vector<MetricDetail> details;
  bool stepwise_ran = false;
  std::string stepwise_skip_reason;
  std::size_t stepwise_rows = 0;
  stats::StepwiseTrace stepwise;
};

AnalysisResult analyze_rows(const std::vector<MetricRow>& rows);

} // namespace forkhealth::app
