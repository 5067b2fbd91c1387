#include "forkhealth/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "forkhealth/csv.hpp"
#include "forkhealth/errors.hpp"

namespace forkhealth::report {

using nlohmann::ordered_json;

const char* const kSignifLegend =
    "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1";

Format format_from_name(const std::string& name) {
  if (name == "text" || name == "txt") return Format::Text;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ConfigError("unknown report format: " + name);
}

std::string format_extension(Format format) {
  switch (format) {
    case Format::Text: return "txt";
    case Format::Csv: return "csv";
    case Format::Json: return "json";
  }
  return "?";
}

namespace {

std::string fmt_estimate(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_p(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Numeric cell for JSON documents: parse the formatted text back so CSV and
// JSON carry identical values at the stated precision.
double reparse(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

std::string pad(const std::string& s, std::size_t width) {
  return s + std::string(s.size() >= width ? 0 : width - s.size(), ' ');
}

// Display name for a design column that is a metric csv id; other names
// render verbatim.
std::string column_display(const std::string& column) {
  if (auto id = metric_from_csv_id(column)) return metric_display_name(*id);
  return column;
}

std::string render_text_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i + 1 == row.size()) line += row[i];
      else line += pad(row[i], widths[i] + 2);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

} // namespace

std::string univariate_table(const std::vector<UnivariateReportRow>& rows, Format format,
                             bool paper_layout) {
  if (format == Format::Csv) {
    std::string out =
        "metric,intercept_estimate,intercept_p,slope_estimate,slope_p,signif_code,"
        "mcfadden_r2\n";
    for (const auto& r : rows)
      out += csv::join_row({r.metric_name, fmt_estimate(r.intercept_estimate),
                            fmt_p(r.intercept_p), fmt_estimate(r.slope_estimate),
                            fmt_p(r.slope_p), r.signif_code, fmt_p(r.mcfadden_r2)});
    return out;
  }
  if (format == Format::Json) {
    ordered_json doc = ordered_json::array();
    for (const auto& r : rows) {
      doc.push_back({{"metric", r.metric_name},
                     {"intercept_estimate", reparse(fmt_estimate(r.intercept_estimate))},
                     {"intercept_p", reparse(fmt_p(r.intercept_p))},
                     {"slope_estimate", reparse(fmt_estimate(r.slope_estimate))},
                     {"slope_p", reparse(fmt_p(r.slope_p))},
                     {"signif_code", r.signif_code},
                     {"mcfadden_r2", reparse(fmt_p(r.mcfadden_r2))}});
    }
    return doc.dump(2) + "\n";
  }

  std::string out = "Logistic Regression Summary\n\n";
  std::vector<std::vector<std::string>> table;
  if (paper_layout) {
    table.push_back({"Coefficients", "Estimate Std.", "p-value"});
    for (const auto& r : rows) {
      table.push_back({"(Intercept)", fmt_estimate(r.intercept_estimate),
                       fmt_p(r.intercept_p) + stats::significance_code(r.intercept_p)});
      table.push_back({r.metric_name, fmt_estimate(r.slope_estimate),
                       fmt_p(r.slope_p) + r.signif_code});
    }
  } else {
    table.push_back({"Metric", "Intercept", "p-value", "Estimate", "p-value", "Signif",
                     "McFadden R2"});
    for (const auto& r : rows)
      table.push_back({r.metric_name, fmt_estimate(r.intercept_estimate), fmt_p(r.intercept_p),
                       fmt_estimate(r.slope_estimate), fmt_p(r.slope_p), r.signif_code,
                       fmt_p(r.mcfadden_r2)});
  }
  out += render_text_table(table);
  out += "\n";
  out += kSignifLegend;
  out += "\n";
  return out;
}

std::string stepwise_table(const stats::StepwiseTrace& trace, Format format) {
  const auto& fit = trace.final;
  if (format == Format::Csv) {
    std::string out = "term,estimate,p_value,signif_code\n";
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
      std::string name = j == 0 ? fit.names[j] : column_display(fit.names[j]);
      out += csv::join_row({name, fmt_estimate(fit.coefficients[j]), fmt_p(fit.p_values[j]),
                            stats::significance_code(fit.p_values[j])});
    }
    out += "\nstep,dropped,aic\n";
    for (std::size_t s = 0; s < trace.steps.size(); ++s)
      out += csv::join_row({std::to_string(s), column_display(trace.steps[s].dropped),
                            fmt_p(trace.steps[s].aic)});
    return out;
  }
  if (format == Format::Json) {
    ordered_json coefficients = ordered_json::array();
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
      std::string name = j == 0 ? fit.names[j] : column_display(fit.names[j]);
      coefficients.push_back({{"term", name},
                              {"estimate", reparse(fmt_estimate(fit.coefficients[j]))},
                              {"p_value", reparse(fmt_p(fit.p_values[j]))},
                              {"signif_code", stats::significance_code(fit.p_values[j])}});
    }
    ordered_json steps = ordered_json::array();
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
      ordered_json columns = ordered_json::array();
      for (const auto& c : trace.steps[s].columns) columns.push_back(column_display(c));
      steps.push_back({{"step", s},
                       {"dropped", column_display(trace.steps[s].dropped)},
                       {"aic", reparse(fmt_p(trace.steps[s].aic))},
                       {"columns", columns}});
    }
    return ordered_json({{"coefficients", coefficients}, {"steps", steps}}).dump(2) + "\n";
  }

  std::string out = "stepAIC Summary\n\n";
  std::vector<std::vector<std::string>> table;
  table.push_back({"Coefficients", "Estimate Std.", "p-value"});
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    std::string name = j == 0 ? fit.names[j] : column_display(fit.names[j]);
    table.push_back({name, fmt_estimate(fit.coefficients[j]),
                     fmt_p(fit.p_values[j]) + stats::significance_code(fit.p_values[j])});
  }
  out += render_text_table(table);
  out += "\n";
  out += kSignifLegend;
  out += "\n\nElimination trace (AIC):\n";
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    out += "  step " + std::to_string(s);
    if (!trace.steps[s].dropped.empty())
      out += ": dropped " + column_display(trace.steps[s].dropped);
    else
      out += ": full model";
    out += ", AIC " + fmt_p(trace.steps[s].aic) + "\n";
  }
  return out;
}

namespace {

DistributionSummary summarize(MetricId metric, const std::string& group,
                              const std::string& sample, const std::vector<double>& values,
                              std::size_t bins) {
  DistributionSummary s;
  s.metric = metric;
  s.group = group;
  s.sample = sample;
  s.count = values.size();
  if (values.empty()) return s; // marked empty: no five-number, no bins

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());

  if (metric_is_binary(metric)) {
    // Histogram only; a boxplot cannot be formed for binary data.
    s.bins.push_back({0.0, 0.5, 0});
    s.bins.push_back({0.5, 1.0, 0});
    for (double v : values) ++s.bins[v < 0.5 ? 0 : 1].count;
    return s;
  }

  s.has_five_number = true;
  s.min = sorted.front();
  s.q1 = stats::quantile(sorted, 0.25);
  s.median = stats::quantile(sorted, 0.5);
  s.q3 = stats::quantile(sorted, 0.75);
  s.max = sorted.back();

  if (s.min == s.max) {
    s.bins.push_back({s.min, s.max, values.size()});
    return s;
  }
  const double width = (s.max - s.min) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b)
    s.bins.push_back({s.min + width * static_cast<double>(b),
                      b + 1 == bins ? s.max : s.min + width * static_cast<double>(b + 1), 0});
  for (double v : values) {
    auto idx = static_cast<std::size_t>((v - s.min) / width);
    if (idx >= bins) idx = bins - 1; // max lands in the last (closed) bin
    ++s.bins[idx].count;
  }
  return s;
}

} // namespace

std::vector<DistributionSummary> distribution_summaries(const std::vector<MetricRow>& rows,
                                                        std::size_t bins) {
  if (bins < 1) throw Error("distribution_summaries: need at least one bin");
  std::vector<DistributionSummary> out;
  for (MetricId metric : kAllMetrics) {
    std::vector<double> graduated, retired;
    for (const auto& row : rows) {
      auto v = row.values.get(metric);
      if (!v) continue;
      if (row.status == ProjectStatus::Graduated) graduated.push_back(*v);
      else if (row.status == ProjectStatus::Retired) retired.push_back(*v);
    }
    std::vector<double> pooled = graduated;
    pooled.insert(pooled.end(), retired.begin(), retired.end());

    // Cleaning uses pooled fences, matching the analysis stage; binary data
    // is never cleaned.
    double lo = 0.0, hi = 0.0;
    bool clean = !metric_is_binary(metric) && !pooled.empty();
    if (clean) {
      auto split = stats::remove_outliers_iqr(pooled);
      lo = split.lower_fence;
      hi = split.upper_fence;
    }
    auto cleaned = [&](const std::vector<double>& values) {
      if (!clean) return values;
      std::vector<double> kept;
      for (double v : values)
        if (v >= lo && v <= hi) kept.push_back(v);
      return kept;
    };

    const std::pair<const char*, const std::vector<double>*> groups[] = {
        {"graduated", &graduated}, {"retired", &retired}, {"pooled", &pooled}};
    for (const auto& [name, values] : groups) {
      out.push_back(summarize(metric, name, "raw", *values, bins));
      out.push_back(summarize(metric, name, "cleaned", cleaned(*values), bins));
    }
  }
  return out;
}

std::string render_distributions(const std::vector<DistributionSummary>& summaries,
                                 Format format) {
  auto num = [](double v) { return fmt_p(v); };
  if (format == Format::Csv) {
    std::string out =
        "metric,group,sample,count,min,q1,median,q3,max,bin_lower,bin_upper,bin_count\n";
    for (const auto& s : summaries) {
      const std::string id = metric_csv_id(s.metric);
      std::vector<std::string> head = {id, s.group, s.sample, std::to_string(s.count)};
      std::vector<std::string> five(5);
      if (s.has_five_number)
        five = {num(s.min), num(s.q1), num(s.median), num(s.q3), num(s.max)};
      if (s.bins.empty()) {
        std::vector<std::string> row = head;
        row.insert(row.end(), five.begin(), five.end());
        row.insert(row.end(), {"", "", ""});
        out += csv::join_row(row);
        continue;
      }
      for (const auto& bin : s.bins) {
        std::vector<std::string> row = head;
        row.insert(row.end(), five.begin(), five.end());
        row.insert(row.end(),
                   {num(bin.lower), num(bin.upper), std::to_string(bin.count)});
        out += csv::join_row(row);
      }
    }
    return out;
  }
  if (format == Format::Json) {
    ordered_json doc = ordered_json::array();
    for (const auto& s : summaries) {
      ordered_json entry = {{"metric", metric_csv_id(s.metric)},
                            {"group", s.group},
                            {"sample", s.sample},
                            {"count", s.count}};
      if (s.has_five_number)
        entry["five_number"] = {{"min", reparse(num(s.min))},
                                {"q1", reparse(num(s.q1))},
                                {"median", reparse(num(s.median))},
                                {"q3", reparse(num(s.q3))},
                                {"max", reparse(num(s.max))}};
      else
        entry["five_number"] = nullptr;
      ordered_json bins = ordered_json::array();
      for (const auto& bin : s.bins)
        bins.push_back({{"lower", reparse(num(bin.lower))},
                        {"upper", reparse(num(bin.upper))},
                        {"count", bin.count}});
      entry["bins"] = bins;
      doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
  }
  // Text rendering is informational; CSV/JSON are the machine formats.
  std::string out = "Metric distributions\n\n";
  for (const auto& s : summaries) {
    out += metric_csv_id(s.metric) + " [" + s.group + ", " + s.sample +
           "] n=" + std::to_string(s.count);
    if (s.has_five_number)
      out += "  min=" + num(s.min) + " q1=" + num(s.q1) + " median=" + num(s.median) +
             " q3=" + num(s.q3) + " max=" + num(s.max);
    out += "\n";
  }
  return out;
}

} // namespace forkhealth::report
