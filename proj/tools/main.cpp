#include <optional>
#include <string>

#include <CLI11.hpp>

#include "forkhealth/config.hpp"
#include "forkhealth/errors.hpp"
#include "forkhealth/log.hpp"
#include "forkhealth/pipeline.hpp"

namespace {

using forkhealth::app::RunConfig;

struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::string> list;
  std::optional<std::string> clones;
  std::optional<std::string> cache;
  std::optional<std::string> out;
  std::optional<std::string> base_url;
  std::optional<long> commit_limit;
  std::optional<long> pr_page_cap;
  std::optional<long> interval_days;
  std::optional<long> bins;
  std::optional<std::string> dup_denominator;
  std::vector<std::string> dup_keywords;
  bool offline = false;
  bool paper_layout = false;
  bool verbose = false;
};

RunConfig make_config(const Flags& flags) {
  RunConfig config = forkhealth::app::load_config(flags.config_path);
  if (flags.list) config.project_list_path = *flags.list;
  if (flags.clones) config.clone_root_dir = *flags.clones;
  if (flags.cache) config.cache_dir = *flags.cache;
  if (flags.out) config.output_dir = *flags.out;
  if (flags.base_url) config.base_url = *flags.base_url;
  if (flags.commit_limit) config.commit_limit = *flags.commit_limit;
  if (flags.pr_page_cap) config.pr_page_cap = *flags.pr_page_cap;
  if (flags.interval_days) config.interval_days = *flags.interval_days;
  if (flags.bins) config.histogram_bins = *flags.bins;
  if (flags.dup_denominator) config.dup_denominator_closed = *flags.dup_denominator == "closed";
  if (!flags.dup_keywords.empty()) config.duplicate_keywords = flags.dup_keywords;
  if (flags.offline) config.offline_replay = true;
  return config;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"forkhealth: fork-practice metrics and sustainability analysis"};
  app.fallthrough();
  app.require_subcommand(1);

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON config file");
  app.add_option("--list", flags.list, "project list CSV (project_name,github_url,status)");
  app.add_option("--clones", flags.clones, "directory of pre-cloned repositories");
  app.add_option("--cache", flags.cache, "cache directory (git scans + recorded HTTP)");
  app.add_option("--out", flags.out, "output directory for metrics and reports");
  app.add_option("--base-url", flags.base_url, "forge API base URL");
  app.add_option("--commit-limit", flags.commit_limit,
                 "recent-commit cap for the logic coupling index (default 150)");
  app.add_option("--pr-page-cap", flags.pr_page_cap, "PR pages of 30 to fetch (default 5)");
  app.add_option("--interval-days", flags.interval_days,
                 "frequency index window in days (default 30)");
  app.add_option("--bins", flags.bins, "histogram bin count (default 20)");
  app.add_option("--dup-denominator", flags.dup_denominator,
                 "duplicate ratio denominator: closed (default) or all")
      ->check(CLI::IsMember({"closed", "all"}));
  app.add_option("--dup-keywords", flags.dup_keywords,
                 "duplicate comment keyword stems (default duplicat supersed replicat)");
  app.add_flag("--offline", flags.offline, "replay mode: serve forge data from the cache only");
  app.add_flag("-v,--verbose", flags.verbose, "debug logging");

  auto* mine = app.add_subcommand("mine", "compute metrics");
  mine->require_subcommand(1);
  auto* mine_git = mine->add_subcommand("git", "three commit-structure metrics from clones");
  auto* mine_forge = mine->add_subcommand("forge", "five collaboration metrics from the forge");
  auto* analyze = app.add_subcommand(
      "analyze", "outlier removal, logistic regressions, stepwise AIC, reports");
  auto* run_all = app.add_subcommand("run-all", "mine git, mine forge, analyze");
  auto* report_cmd =
      app.add_subcommand("report", "re-render report documents from analysis.json");
  report_cmd->add_flag("--paper-layout", flags.paper_layout,
                       "interleave intercept rows in the text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (flags.verbose) forkhealth::log::set_level(forkhealth::log::Level::Debug);

  try {
    RunConfig config = make_config(flags);
    if (mine_git->parsed()) return forkhealth::app::cmd_mine_git(config);
    if (mine_forge->parsed()) return forkhealth::app::cmd_mine_forge(config);
    if (analyze->parsed()) return forkhealth::app::cmd_analyze(config);
    if (run_all->parsed()) return forkhealth::app::cmd_run_all(config);
    if (report_cmd->parsed()) return forkhealth::app::cmd_report(config, flags.paper_layout);
  } catch (const forkhealth::ConfigError& e) {
    forkhealth::log::error(e.what());
    return 2;
  } catch (const std::exception& e) {
    forkhealth::log::error(e.what());
    return 1;
  }
  return 2; // no subcommand matched (unreachable with require_subcommand)
}
