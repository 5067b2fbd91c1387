#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "forkhealth/model.hpp"
#include "forkhealth/stats.hpp"

namespace forkhealth::report {

enum class Format { Text, Csv, Json };

Format format_from_name(const std::string& name);
std::string format_extension(Format format);

extern const char* const kSignifLegend;

// One univariate regression line: metric against outcome.
struct UnivariateReportRow {
  std::string metric_name; // display name
  double intercept_estimate = 0.0;
  double intercept_p = 1.0;
  double slope_estimate = 0.0;
  double slope_p = 1.0;
  std::string signif_code; // for slope_p
  double mcfadden_r2 = 0.0;
};

// Deterministic rendering; estimates at 4 decimal places, p-values at up to
// 6 significant digits. Text format appends the significance legend.
// `paper_layout` (text only) interleaves per-metric intercept rows the way
// the classic R summary table reads.
std::string univariate_table(const std::vector<UnivariateReportRow>& rows, Format format,
                             bool paper_layout = false);

// Final stepwise model coefficients plus an appendix with the AIC at each
// elimination step.
std::string stepwise_table(const stats::StepwiseTrace& trace, Format format);

// Distribution data behind boxplots and histograms.
struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct DistributionSummary {
  MetricId metric = MetricId::FrequencyIndex;
  std::string group;  // graduated | retired | pooled
  std::string sample; // raw | cleaned
  std::size_t count = 0;
  bool has_five_number = false; // suppressed for binary metrics and empty groups
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  std::vector<HistogramBin> bins;
};

// Five-number summaries (same quartile rule as the stats engine) and
// equal-width histograms per metric, per group, for the raw sample and the
// outlier-cleaned sample. Binary metrics emit two-bin histograms and no
// five-number summary; cleaning never removes binary values. Incubating
// projects are not part of any group.
std::vector<DistributionSummary> distribution_summaries(const std::vector<MetricRow>& rows,
                                                        std::size_t bins);

std::string render_distributions(const std::vector<DistributionSummary>& summaries,
                                 Format format);

} // namespace forkhealth::report
