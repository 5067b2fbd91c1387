#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <random>

#include "forkhealth/config.hpp"
#include "forkhealth/errors.hpp"
#include "forkhealth/model.hpp"
#include "forkhealth/pipeline.hpp"
#include "forkhealth/stats.hpp"
#include "forkhealth/subprocess.hpp"
#include "support/fixture_repo.hpp"
#include "support/forge_fixtures.hpp"
#include "support/logistic_oracle.hpp"

using namespace forkhealth;
using namespace forkhealth::app;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: ", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig workspace_config(const testsupport::IntegrationWorkspace& ws,
                           const std::string& out_dir = "") {
  RunConfig config;
  config.project_list_path = ws.list_path;
  config.clone_root_dir = ws.clones_dir;
  config.cache_dir = ws.cache_dir;
  config.output_dir = out_dir.empty() ? ws.out_dir : out_dir;
  config.offline_replay = true;
  return config;
}

void clear_env() {
  unsetenv("FORKHEALTH_TOKENS");
  unsetenv("FORKHEALTH_BASE_URL");
  unsetenv("FORKHEALTH_CACHE_DIR");
}

std::map<std::string, MetricRow> rows_by_project(const fs::path& csv) {
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::map<std::string, MetricRow> by_name;
  for (auto& row : read_metrics_csv(in)) by_name[row.values.project] = row;
  return by_name;
}

} // namespace

TEST_CASE("mine git fills the three git columns and degrades cleanly") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());
  auto config = workspace_config(ws);

  CHECK(cmd_mine_git(config) == 0);
  auto rows = rows_by_project(metrics_csv_path(config));
  REQUIRE(rows.size() == 4);
  for (const char* name : {"fixproj", "tinyproj", "oldproj"}) {
    INFO("project ", name);
    CHECK(rows[name].values.logic_coupling_index.has_value());
    CHECK(rows[name].values.additive_contribution_index.has_value());
    CHECK(rows[name].values.dimensionality_index.has_value());
    CHECK_FALSE(rows[name].values.frequency_index.has_value()); // forge not mined yet
  }
  // incub has no clone: row retained, git metrics MISSING
  CHECK_FALSE(rows["incub"].values.logic_coupling_index.has_value());

  SUBCASE("rerun with a warm cache is byte-identical") {
    auto first = slurp(metrics_csv_path(config));
    CHECK(cmd_mine_git(config) == 0);
    CHECK(slurp(metrics_csv_path(config)) == first);
  }
}

TEST_CASE("mine git with an empty clone root fails and lists missing clones") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());
  auto config = workspace_config(ws);
  config.clone_root_dir = tmp.path() + "/empty-clones";
  fs::create_directories(config.clone_root_dir);
  CHECK(cmd_mine_git(config) == 1);
  // partial results flushed: all rows present, all git metrics MISSING
  auto rows = rows_by_project(metrics_csv_path(config));
  CHECK(rows.size() == 4);
  CHECK_FALSE(rows["fixproj"].values.logic_coupling_index.has_value());
}

TEST_CASE("mine forge replays the recorded fixtures") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());
  auto config = workspace_config(ws);

  CHECK(cmd_mine_forge(config) == 0);
  auto rows = rows_by_project(metrics_csv_path(config));

  CHECK(rows["fixproj"].values.frequency_index == 4.0);
  CHECK(rows["fixproj"].values.central_management_index == 0.75);
  CHECK(rows["fixproj"].values.pre_communication_index == 0.5);
  CHECK(rows["fixproj"].values.duplicate_pr_ratio == 0.25);
  CHECK(rows["fixproj"].values.hard_fork_present == 1.0);

  CHECK(rows["oldproj"].values.frequency_index == 1.5);
  CHECK(rows["oldproj"].values.central_management_index == doctest::Approx(1.0 / 3.0));
  CHECK(rows["oldproj"].values.pre_communication_index == 0.0);
  CHECK(rows["oldproj"].values.duplicate_pr_ratio == doctest::Approx(1.0 / 3.0));
  CHECK(rows["oldproj"].values.hard_fork_present == 0.0);

  CHECK(rows["tinyproj"].values.frequency_index == 1.0);
  CHECK_FALSE(rows["tinyproj"].values.duplicate_pr_ratio.has_value()); // no closed PRs
  CHECK(rows["tinyproj"].values.hard_fork_present == 0.0);

  // 404 project: row retained with MISSING forge metrics
  for (MetricId id : {MetricId::FrequencyIndex, MetricId::CentralManagementIndex,
                      MetricId::PreCommunicationIndex, MetricId::DuplicatePrRatio,
                      MetricId::HardForkPresent})
    CHECK_FALSE(rows["incub"].values.get(id).has_value());
}

TEST_CASE("mine forge online without tokens is a config error") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());
  auto config = workspace_config(ws);
  config.offline_replay = false;
  CHECK_THROWS_AS(cmd_mine_forge(config), ConfigError);
}

TEST_CASE("analyze writes every report artifact deterministically") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());
  auto config = workspace_config(ws);
  REQUIRE(cmd_mine_git(config) == 0);
  REQUIRE(cmd_mine_forge(config) == 0);
  REQUIRE(cmd_analyze(config) == 0);

  const char* artifacts[] = {"metrics.csv",          "analysis.json",
                             "univariate_summary.txt", "univariate_summary.csv",
                             "univariate_summary.json", "stepwise_summary.txt",
                             "stepwise_summary.csv",  "stepwise_summary.json",
                             "distributions.csv",     "distributions.json"};
  std::map<std::string, std::string> first;
  for (const char* name : artifacts)
    first[name] = slurp(fs::path(config.output_dir) / name);

  REQUIRE(cmd_analyze(config) == 0);
  for (const char* name : artifacts)
    CHECK_MESSAGE(slurp(fs::path(config.output_dir) / name) == first[name],
                  "artifact drifted: ", name);

  auto doc = json::parse(first["analysis.json"]);
  CHECK(doc["univariate"].size() >= 7); // all metrics with data
  // 3 analysis rows cannot support the 8-predictor full model
  CHECK(doc["stepwise"].contains("skipped"));
}

TEST_CASE("analyze requires both outcome classes") {
  clear_env();
  testsupport::TempDir tmp;
  RunConfig config;
  config.output_dir = tmp.path() + "/out";
  fs::create_directories(config.output_dir);
  {
    std::vector<MetricRow> rows(2);
    rows[0].status = ProjectStatus::Graduated;
    rows[0].values.project = "a";
    rows[0].values.frequency_index = 1.0;
    rows[1].status = ProjectStatus::Graduated;
    rows[1].values.project = "b";
    rows[1].values.frequency_index = 2.0;
    std::ofstream out(metrics_csv_path(config));
    write_metrics_csv(out, rows);
  }
  CHECK_THROWS_WITH_AS(cmd_analyze(config), doctest::Contains("graduated and retired"), Error);
}

TEST_CASE("analyze skips IQR fences for the binary hard-fork metric") {
  clear_env();
  // 9 zeros and 3 ones: numeric fences would delete every 1.
  std::vector<MetricRow> rows;
  for (int i = 0; i < 12; ++i) {
    MetricRow row;
    row.status = i % 2 ? ProjectStatus::Graduated : ProjectStatus::Retired;
    row.values.project = "p" + std::to_string(i);
    row.values.hard_fork_present = i < 3 ? 1.0 : 0.0;
    rows.push_back(row);
  }
  auto result = analyze_rows(rows);
  REQUIRE(result.details.size() == 1);
  CHECK(result.details[0].metric == MetricId::HardForkPresent);
  CHECK(result.details[0].n_outliers == 0);
  CHECK(result.details[0].n_used == 12);
}

TEST_CASE("analyze recovers a planted effect, matching the brute-force oracle") {
  clear_env();
  std::mt19937 rng(112233);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> ux(0.05, 0.95);
  std::vector<MetricRow> rows;
  for (int i = 0; i < 60; ++i) {
    MetricRow row;
    row.values.project = "s" + std::to_string(i);
    double x = ux(rng);
    double p = 1.0 / (1.0 + std::exp(-(-3.0 + 6.0 * x)));
    row.status = u01(rng) < p ? ProjectStatus::Graduated : ProjectStatus::Retired;
    row.values.additive_contribution_index = x;
    rows.push_back(std::move(row));
  }

  auto result = analyze_rows(rows);
  REQUIRE(result.details.size() == 1);
  const auto& detail = result.details[0];
  CHECK(detail.metric == MetricId::AdditiveContributionIndex);
  CHECK(detail.fit.coefficients[1] > 0.0);
  CHECK(detail.fit.p_values[1] < 0.05);

  // The pipeline's fit must agree with the independent maximizer on the
  // exact rows that survived cleaning.
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  {
    std::vector<double> values;
    std::vector<int> outcomes;
    for (const auto& row : rows) {
      values.push_back(*row.values.additive_contribution_index);
      outcomes.push_back(row.status == ProjectStatus::Graduated ? 1 : 0);
    }
    auto split = stats::remove_outliers_iqr(values);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < split.lower_fence || values[i] > split.upper_fence) continue;
      x.push_back({1.0, values[i]});
      y.push_back(outcomes[i]);
    }
  }
  REQUIRE(x.size() == detail.n_used);
  auto oracle = testsupport::oracle_max_likelihood(x, y);
  CHECK(std::abs(detail.fit.coefficients[0] - oracle[0]) < 1e-6);
  CHECK(std::abs(detail.fit.coefficients[1] - oracle[1]) < 1e-6);
}

TEST_CASE("cli: run-all twice produces byte-identical artifacts") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());

  auto run = [&](const std::string& out_dir) {
    auto result = run_command({FORKHEALTH_CLI_PATH, "run-all", "--list", ws.list_path,
                               "--clones", ws.clones_dir, "--cache", ws.cache_dir, "--out",
                               out_dir, "--offline"});
    INFO(result.err);
    REQUIRE(result.exit_code == 0);
  };
  run(tmp.path() + "/out1");
  run(tmp.path() + "/out2");

  for (const char* name :
       {"metrics.csv", "analysis.json", "univariate_summary.txt", "univariate_summary.csv",
        "univariate_summary.json", "stepwise_summary.txt", "stepwise_summary.csv",
        "stepwise_summary.json", "distributions.csv", "distributions.json"}) {
    INFO("artifact ", name);
    CHECK(slurp(fs::path(tmp.path()) / "out1" / name) ==
          slurp(fs::path(tmp.path()) / "out2" / name));
  }
}

TEST_CASE("cli: report re-renders from analysis.json, with paper layout") {
  clear_env();
  testsupport::TempDir tmp;
  auto ws = testsupport::setup_integration_workspace(tmp.path());
  auto config = workspace_config(ws);
  REQUIRE(cmd_run_all(config) == 0);

  auto default_text = slurp(fs::path(ws.out_dir) / "univariate_summary.txt");
  auto result = run_command({FORKHEALTH_CLI_PATH, "report", "--out", ws.out_dir, "--cache",
                             ws.cache_dir, "--offline", "--paper-layout"});
  INFO(result.err);
  CHECK(result.exit_code == 0);
  auto paper_text = slurp(fs::path(ws.out_dir) / "univariate_summary.txt");
  CHECK(paper_text != default_text);
  CHECK(paper_text.find("(Intercept)") != std::string::npos);
  CHECK(result.out.find("(Intercept)") != std::string::npos);
}

TEST_CASE("cli exit codes: help 0, usage 2, bad config 2, missing input 1") {
  clear_env();
  testsupport::TempDir tmp;
  CHECK(run_command({FORKHEALTH_CLI_PATH, "--help"}).exit_code == 0);
  CHECK(run_command({FORKHEALTH_CLI_PATH, "no-such-command"}).exit_code == 2);
  CHECK(run_command({FORKHEALTH_CLI_PATH, "analyze", "--config", tmp.path() + "/nope.json"})
            .exit_code == 2);
  CHECK(run_command({FORKHEALTH_CLI_PATH, "mine", "git", "--list",
                     tmp.path() + "/missing.csv", "--out", tmp.path() + "/out"})
            .exit_code == 2);
  // config exists but analyze has no metrics csv yet: runtime failure
  auto config_path = tmp.path() + "/cfg.json";
  {
    std::ofstream out(config_path);
    out << json({{"output_dir", tmp.path() + "/out"}}).dump();
  }
  CHECK(run_command({FORKHEALTH_CLI_PATH, "analyze", "--config", config_path}).exit_code == 1);
}

TEST_CASE("config precedence: flags beat env beat file beat defaults") {
  testsupport::TempDir tmp;
  auto config_path = tmp.path() + "/cfg.json";
  {
    std::ofstream out(config_path);
    out << json({{"cache_dir", tmp.path() + "/from-file"},
                 {"interval_days", 14},
                 {"dup_denominator", "all"}})
               .dump();
  }
  setenv("FORKHEALTH_CACHE_DIR", (tmp.path() + "/from-env").c_str(), 1);
  setenv("FORKHEALTH_TOKENS", "t1,t2", 1);
  auto config = load_config(config_path);
  CHECK(config.cache_dir == tmp.path() + "/from-env"); // env wins over file
  CHECK(config.interval_days == 14);                   // file wins over default
  CHECK(config.pr_page_cap == 5);                      // default
  CHECK_FALSE(config.dup_denominator_closed);
  CHECK(config.tokens == std::vector<std::string>{"t1", "t2"});
  clear_env();

  CHECK_THROWS_AS(load_config(std::string(tmp.path() + "/absent.json")), ConfigError);
  RunConfig bad;
  bad.commit_limit = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  RunConfig offline;
  offline.offline_replay = true;
  offline.cache_dir = tmp.path() + "/never";
  CHECK_THROWS_AS(offline.validate(), ConfigError);
}
