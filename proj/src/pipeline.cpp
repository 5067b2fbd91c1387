#include "forkhealth/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "forkhealth/csv.hpp"
#include "forkhealth/errors.hpp"
#include "forkhealth/forge.hpp"
#include "forkhealth/gitminer.hpp"
#include "forkhealth/log.hpp"
#include "forkhealth/util.hpp"

namespace forkhealth::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string metrics_csv_path(const RunConfig& config) {
  return (fs::path(config.output_dir) / "metrics.csv").string();
}

std::string analysis_json_path(const RunConfig& config) {
  return (fs::path(config.output_dir) / "analysis.json").string();
}

namespace {

std::vector<ProjectRecord> load_records(const RunConfig& config) {
  if (config.project_list_path.empty())
    throw ConfigError("no project list given (--list or config project_list)");
  std::ifstream in(config.project_list_path);
  if (!in) throw ConfigError("cannot open project list: " + config.project_list_path);
  return parse_project_list(in);
}

// Existing metrics rows by project name, or empty when no CSV exists yet.
std::unordered_map<std::string, MetricRow> load_existing_metrics(const RunConfig& config) {
  std::unordered_map<std::string, MetricRow> by_name;
  std::ifstream in(metrics_csv_path(config));
  if (!in) return by_name;
  for (auto& row : read_metrics_csv(in)) by_name.emplace(row.values.project, row);
  return by_name;
}

// One row per project in list order, carrying over previously mined values.
std::vector<MetricRow> seed_rows(const std::vector<ProjectRecord>& records,
                                 const RunConfig& config) {
  auto existing = load_existing_metrics(config);
  std::vector<MetricRow> rows;
  rows.reserve(records.size());
  for (const auto& rec : records) {
    MetricRow row;
    row.status = rec.status;
    auto it = existing.find(rec.name);
    if (it != existing.end()) row.values = it->second.values;
    row.values.project = rec.name;
    rows.push_back(std::move(row));
  }
  return rows;
}

void flush_metrics(const std::vector<MetricRow>& rows, const RunConfig& config) {
  fs::create_directories(config.output_dir);
  std::ostringstream out;
  write_metrics_csv(out, rows);
  atomic_write_file(metrics_csv_path(config), out.str());
}

void write_document(const RunConfig& config, const std::string& name,
                    const std::string& content) {
  fs::create_directories(config.output_dir);
  atomic_write_file((fs::path(config.output_dir) / name).string(), content);
}

std::string stepwise_stub(const std::string& reason, report::Format format) {
  switch (format) {
    case report::Format::Text:
      return "stepAIC Summary\n\nskipped: " + reason + "\n";
    case report::Format::Csv:
      return "status,reason\n" + csv::join_row({"skipped", reason});
    case report::Format::Json:
      return ordered_json({{"skipped", reason}}).dump(2) + "\n";
  }
  return "";
}

} // namespace

int cmd_mine_git(const RunConfig& config) {
  config.validate();
  auto records = load_records(config);
  auto rows = seed_rows(records, config);

  std::mutex state_mutex;
  std::vector<std::string> missing_clones;
  std::atomic<std::size_t> mined{0};
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      const auto& rec = records[i];
      fs::path clone = rec.local_clone_path
                           ? fs::path(*rec.local_clone_path)
                           : fs::path(config.clone_root_dir) / rec.name;
      if (!fs::is_directory(clone)) {
        log::warn(rec.name + ": no clone at " + clone.string() + "; git metrics left MISSING");
        std::lock_guard<std::mutex> lock(state_mutex);
        missing_clones.push_back(clone.string());
        continue;
      }
      try {
        auto [summaries, cache_hit] =
            gitmine::scan_history_cached(clone.string(), std::nullopt, config.cache_dir);
        if (cache_hit) log::info(rec.name + ": git scan cache hit");
        std::vector<gitmine::CommitSummary> recent(
            summaries.begin(),
            summaries.begin() +
                std::min<std::size_t>(summaries.size(),
                                      static_cast<std::size_t>(config.commit_limit)));
        rows[i].values.set(MetricId::LogicCouplingIndex,
                           gitmine::logic_coupling_index(recent));
        rows[i].values.set(MetricId::AdditiveContributionIndex,
                           gitmine::additive_contribution_index(summaries));
        rows[i].values.set(MetricId::DimensionalityIndex,
                           gitmine::dimensionality_index(summaries));
        mined.fetch_add(1);
      } catch (const Error& e) {
        log::warn(rec.name + ": git mining failed (" + e.what() +
                  "); git metrics left MISSING");
      }
    }
  };

  std::size_t pool = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                                           records.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  flush_metrics(rows, config);
  if (mined.load() == 0) {
    std::string clones;
    for (const auto& c : missing_clones) clones += "\n  " + c;
    log::error("mine git: no minable projects; missing clones:" +
               (clones.empty() ? std::string(" (none found)") : clones));
    return 1;
  }
  log::info("mine git: mined " + std::to_string(mined.load()) + "/" +
            std::to_string(records.size()) + " projects");
  return 0;
}

int cmd_mine_forge(const RunConfig& config) {
  config.validate();
  if (!config.offline_replay && config.tokens.empty())
    throw ConfigError("online forge mining needs credentials: set FORKHEALTH_TOKENS "
                      "or run with --offline against a recorded cache");
  auto records = load_records(config);
  auto rows = seed_rows(records, config);

  forge::RequestBudget budget;
  for (const auto& t : config.tokens) budget.tokens.push_back({t, 5000});
  forge::HttpCache cache((fs::path(config.cache_dir) / "http").string());
  forge::ForgeSession session(config.base_url, std::move(cache),
                              config.offline_replay ? nullptr : forge::make_httplib_transport(),
                              std::move(budget));

  std::size_t mined = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    try {
      auto prs = forge::fetch_pull_requests(session, rec, config.pr_page_cap);
      std::set<long> linked;
      for (const auto& pr : prs)
        linked.insert(pr.linked_issue_numbers.begin(), pr.linked_issue_numbers.end());
      auto issues = forge::fetch_issues(session, rec, linked);
      auto forks = forge::fetch_forks(session, rec, config.pr_page_cap);

      rows[i].values.set(MetricId::FrequencyIndex,
                         forge::frequency_index(prs, config.interval_days));
      rows[i].values.set(MetricId::CentralManagementIndex,
                         forge::central_management_index(prs));
      rows[i].values.set(MetricId::PreCommunicationIndex,
                         forge::pre_communication_index(prs, issues));
      rows[i].values.set(MetricId::DuplicatePrRatio,
                         forge::duplicate_pr_ratio(prs, config.duplicate_keywords,
                                                   config.dup_denominator_closed));
      rows[i].values.set(MetricId::HardForkPresent,
                         static_cast<double>(forge::hard_fork_present(forks)));
      ++mined;
    } catch (const BudgetExhaustedError& e) {
      flush_metrics(rows, config);
      log::error("mine forge: " + std::string(e.what()) + "; partial CSV retained");
      return 1;
    } catch (const Error& e) {
      log::warn(rec.name + ": forge mining failed (" + e.what() +
                "); forge metrics left MISSING");
    }
  }
  flush_metrics(rows, config);
  log::info("mine forge: mined " + std::to_string(mined) + "/" +
            std::to_string(records.size()) + " projects (" +
            std::to_string(session.network_calls()) + " network calls)");
  return 0;
}

// --- analysis ----------------------------------------------------------------

AnalysisResult analyze_rows(const std::vector<MetricRow>& rows) {
  std::vector<AnalysisRow> arows;
  for (const auto& row : rows) {
    auto outcome = outcome_for(row.status);
    if (outcome) arows.push_back({*outcome, row.values});
  }
  std::size_t ones = 0, zeros = 0;
  for (const auto& r : arows) (r.outcome ? ones : zeros)++;
  if (ones == 0 || zeros == 0)
    throw Error("analysis needs both graduated and retired projects; have " +
                std::to_string(ones) + " successes and " + std::to_string(zeros) +
                " failures");

  AnalysisResult result;
  std::map<MetricId, std::pair<double, double>> fences;

  for (MetricId metric : kAllMetrics) {
    std::vector<double> values;
    std::vector<int> outcomes;
    for (const auto& r : arows) {
      auto v = r.values.get(metric);
      if (!v) continue;
      values.push_back(*v);
      outcomes.push_back(r.outcome);
    }
    AnalysisResult::MetricDetail detail;
    detail.metric = metric;
    detail.n_total = arows.size();
    detail.n_missing = arows.size() - values.size();
    const std::string id = metric_csv_id(metric);
    if (values.empty()) {
      log::warn("analyze: " + id + " has no data; skipped");
      continue;
    }

    std::vector<double> kept_values;
    std::vector<int> kept_outcomes;
    if (metric_is_binary(metric)) {
      kept_values = values; // no fences for binary data (no boxplot exists)
      kept_outcomes = outcomes;
    } else {
      auto split = stats::remove_outliers_iqr(values);
      fences[metric] = {split.lower_fence, split.upper_fence};
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < split.lower_fence || values[i] > split.upper_fence) continue;
        kept_values.push_back(values[i]);
        kept_outcomes.push_back(outcomes[i]);
      }
    }
    detail.n_outliers = values.size() - kept_values.size();
    detail.n_used = kept_values.size();

    try {
      std::vector<std::vector<std::optional<double>>> cells;
      cells.reserve(kept_values.size());
      for (double v : kept_values) cells.push_back({v});
      auto design = stats::DesignMatrix::build({id}, cells, kept_outcomes);
      detail.fit = stats::fit_logistic(design);
      detail.null_fit = stats::fit_logistic(design.without(id));
      detail.mcfadden = stats::mcfadden_r2(detail.fit, detail.null_fit);
    } catch (const Error& e) {
      log::warn("analyze: univariate fit for " + id + " failed (" + e.what() + "); skipped");
      continue;
    }

    report::UnivariateReportRow row;
    row.metric_name = metric_display_name(metric);
    row.intercept_estimate = detail.fit.coefficients[0];
    row.intercept_p = detail.fit.p_values[0];
    row.slope_estimate = detail.fit.coefficients[1];
    row.slope_p = detail.fit.p_values[1];
    row.signif_code = stats::significance_code(row.slope_p);
    row.mcfadden_r2 = detail.mcfadden;
    result.univariate.push_back(std::move(row));
    result.details.push_back(std::move(detail));
  }

  // Full model: complete-case rows that sit inside every metric's fences.
  std::vector<std::string> columns;
  std::vector<MetricId> column_ids;
  for (MetricId metric : kAllMetrics) {
    bool any = false;
    for (const auto& r : arows)
      if (r.values.get(metric)) {
        any = true;
        break;
      }
    if (any) {
      columns.push_back(metric_csv_id(metric));
      column_ids.push_back(metric);
    } else {
      log::warn("analyze: " + metric_csv_id(metric) + " dropped from the full model (no data)");
    }
  }
  std::vector<std::vector<std::optional<double>>> cells;
  std::vector<int> outcomes;
  for (const auto& r : arows) {
    std::vector<std::optional<double>> row;
    bool keep = true;
    for (MetricId metric : column_ids) {
      auto v = r.values.get(metric);
      if (v && !metric_is_binary(metric)) {
        auto f = fences.find(metric);
        if (f != fences.end() && (*v < f->second.first || *v > f->second.second)) keep = false;
      }
      row.push_back(v);
    }
    if (!keep) continue; // outlier in some metric
    cells.push_back(std::move(row));
    outcomes.push_back(r.outcome);
  }
  try {
    auto design = stats::DesignMatrix::build(columns, cells, outcomes);
    result.stepwise_rows = design.rows.size();
    result.stepwise = stats::backward_stepwise(design);
    result.stepwise_ran = true;
  } catch (const Error& e) {
    result.stepwise_skip_reason = e.what();
    log::warn("analyze: stepwise selection skipped (" + result.stepwise_skip_reason + ")");
  }
  return result;
}

namespace {

ordered_json fit_to_json(const stats::RegressionFit& fit) {
  return {{"names", fit.names},
          {"coefficients", fit.coefficients},
          {"standard_errors", fit.standard_errors},
          {"z_values", fit.z_values},
          {"p_values", fit.p_values},
          {"log_likelihood", fit.log_likelihood},
          {"aic", fit.aic},
          {"n_obs", fit.n_obs},
          {"converged", fit.converged},
          {"iterations", fit.iterations}};
}

stats::RegressionFit fit_from_json(const ordered_json& j) {
  stats::RegressionFit fit;
  fit.names = j.at("names").get<std::vector<std::string>>();
  fit.coefficients = j.at("coefficients").get<std::vector<double>>();
  fit.standard_errors = j.at("standard_errors").get<std::vector<double>>();
  fit.z_values = j.at("z_values").get<std::vector<double>>();
  fit.p_values = j.at("p_values").get<std::vector<double>>();
  fit.log_likelihood = j.at("log_likelihood").get<double>();
  fit.aic = j.at("aic").get<double>();
  fit.n_obs = j.at("n_obs").get<std::size_t>();
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  return fit;
}

void write_reports(const RunConfig& config, const AnalysisResult& result,
                   const std::vector<MetricRow>& rows, bool paper_layout, bool to_stdout) {
  using report::Format;
  for (Format format : {Format::Text, Format::Csv, Format::Json}) {
    std::string ext = report::format_extension(format);
    write_document(config, "univariate_summary." + ext,
                   report::univariate_table(result.univariate, format,
                                            paper_layout && format == Format::Text));
    write_document(config, "stepwise_summary." + ext,
                   result.stepwise_ran
                       ? report::stepwise_table(result.stepwise, format)
                       : stepwise_stub(result.stepwise_skip_reason, format));
  }
  auto distributions =
      report::distribution_summaries(rows, static_cast<std::size_t>(config.histogram_bins));
  write_document(config, "distributions.csv",
                 report::render_distributions(distributions, report::Format::Csv));
  write_document(config, "distributions.json",
                 report::render_distributions(distributions, report::Format::Json));

  if (to_stdout) {
    std::cout << report::univariate_table(result.univariate, report::Format::Text,
                                          paper_layout)
              << "\n"
              << (result.stepwise_ran
                      ? report::stepwise_table(result.stepwise, report::Format::Text)
                      : stepwise_stub(result.stepwise_skip_reason, report::Format::Text));
  }
}

} // namespace

int cmd_analyze(const RunConfig& config) {
  config.validate();
  std::ifstream in(metrics_csv_path(config));
  if (!in)
    throw Error("metrics csv not found at " + metrics_csv_path(config) +
                "; run `forkhealth mine` first");
  auto rows = read_metrics_csv(in);
  AnalysisResult result = analyze_rows(rows);

  ordered_json univariate = ordered_json::array();
  for (std::size_t i = 0; i < result.details.size(); ++i) {
    const auto& d = result.details[i];
    univariate.push_back({{"metric", metric_csv_id(d.metric)},
                          {"display_name", metric_display_name(d.metric)},
                          {"n_total", d.n_total},
                          {"n_missing", d.n_missing},
                          {"n_outliers_removed", d.n_outliers},
                          {"n_used", d.n_used},
                          {"mcfadden_r2", d.mcfadden},
                          {"fit", fit_to_json(d.fit)},
                          {"null_fit", fit_to_json(d.null_fit)}});
  }
  ordered_json stepwise;
  if (result.stepwise_ran) {
    ordered_json steps = ordered_json::array();
    for (const auto& s : result.stepwise.steps)
      steps.push_back({{"columns", s.columns}, {"aic", s.aic}, {"dropped", s.dropped}});
    stepwise = {{"n_used", result.stepwise_rows},
                {"steps", steps},
                {"final", fit_to_json(result.stepwise.final)}};
  } else {
    stepwise = {{"skipped", result.stepwise_skip_reason}};
  }
  ordered_json doc = {
      {"univariate", univariate},
      {"stepwise", stepwise},
      {"settings",
       {{"dup_denominator", config.dup_denominator_closed ? "closed" : "all"},
        {"interval_days", config.interval_days},
        {"commit_limit", config.commit_limit},
        {"pr_page_cap", config.pr_page_cap},
        {"histogram_bins", config.histogram_bins}}}};
  write_document(config, "analysis.json", doc.dump(2) + "\n");

  write_reports(config, result, rows, false, true);
  return 0;
}

int cmd_report(const RunConfig& config, bool paper_layout) {
  config.validate();
  std::ifstream in(analysis_json_path(config));
  if (!in)
    throw Error("analysis.json not found at " + analysis_json_path(config) +
                "; run `forkhealth analyze` first");
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError("corrupt analysis.json: " + std::string(e.what()));
  }

  AnalysisResult result;
  for (const auto& u : doc.at("univariate")) {
    const auto fit = fit_from_json(u.at("fit"));
    report::UnivariateReportRow row;
    row.metric_name = u.at("display_name").get<std::string>();
    row.intercept_estimate = fit.coefficients[0];
    row.intercept_p = fit.p_values[0];
    row.slope_estimate = fit.coefficients[1];
    row.slope_p = fit.p_values[1];
    row.signif_code = stats::significance_code(row.slope_p);
    row.mcfadden_r2 = u.at("mcfadden_r2").get<double>();
    result.univariate.push_back(std::move(row));
  }
  const auto& stepwise = doc.at("stepwise");
  if (stepwise.contains("skipped")) {
    result.stepwise_skip_reason = stepwise.at("skipped").get<std::string>();
  } else {
    result.stepwise_ran = true;
    for (const auto& s : stepwise.at("steps"))
      result.stepwise.steps.push_back({s.at("columns").get<std::vector<std::string>>(),
                                       s.at("aic").get<double>(),
                                       s.at("dropped").get<std::string>()});
    result.stepwise.final = fit_from_json(stepwise.at("final"));
  }

  std::ifstream metrics_in(metrics_csv_path(config));
  if (!metrics_in)
    throw Error("metrics csv not found at " + metrics_csv_path(config));
  auto rows = read_metrics_csv(metrics_in);

  write_reports(config, result, rows, paper_layout, true);
  return 0;
}

int cmd_run_all(const RunConfig& config) {
  if (int rc = cmd_mine_git(config)) return rc;
  if (int rc = cmd_mine_forge(config)) return rc;
  return cmd_analyze(config);
}

} // namespace forkhealth::app
