#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "forkhealth/forge.hpp"
#include "forkhealth/gitminer.hpp"
#include "forkhealth/model.hpp"
#include "forkhealth/stats.hpp"

namespace py = pybind11;
using namespace forkhealth;

PYBIND11_MODULE(_forkhealth, m) {
  m.doc() = "fork-practice metrics and logistic analysis (C++ core)";

  // --- git mining ---
  py::enum_<gitmine::ChangeKind>(m, "ChangeKind")
      .value("ADDED", gitmine::ChangeKind::Added)
      .value("MODIFIED", gitmine::ChangeKind::Modified)
      .value("DELETED", gitmine::ChangeKind::Deleted)
      .value("RENAMED", gitmine::ChangeKind::Renamed);

  py::class_<gitmine::FileChange>(m, "FileChange")
      .def(py::init<>())
      .def_readwrite("path", &gitmine::FileChange::path)
      .def_readwrite("kind", &gitmine::FileChange::kind)
      .def_readwrite("lines_added", &gitmine::FileChange::lines_added)
      .def_readwrite("lines_deleted", &gitmine::FileChange::lines_deleted);

  py::class_<gitmine::CommitSummary>(m, "CommitSummary")
      .def(py::init<>())
      .def_readwrite("commit_id", &gitmine::CommitSummary::commit_id)
      .def_readwrite("timestamp_utc", &gitmine::CommitSummary::timestamp_utc)
      .def_readwrite("changes", &gitmine::CommitSummary::changes)
      .def_readwrite("snapshot_file_count", &gitmine::CommitSummary::snapshot_file_count);

  m.def("scan_history", &gitmine::scan_history, py::arg("clone_path"),
        py::arg("commit_limit") = py::none(),
        "First-parent history of HEAD, newest first");
  m.def("logic_coupling_index", &gitmine::logic_coupling_index, py::arg("commits"));
  m.def("additive_contribution_index", &gitmine::additive_contribution_index,
        py::arg("commits"));
  m.def("dimensionality_index", &gitmine::dimensionality_index, py::arg("commits"));

  // --- forge objects and metrics ---
  py::class_<forge::PullRequest>(m, "PullRequest")
      .def(py::init<>())
      .def_readwrite("number", &forge::PullRequest::number)
      .def_readwrite("title", &forge::PullRequest::title)
      .def_readwrite("body", &forge::PullRequest::body)
      .def_readwrite("closed", &forge::PullRequest::closed)
      .def_readwrite("merged", &forge::PullRequest::merged)
      .def_readwrite("created_at", &forge::PullRequest::created_at)
      .def_readwrite("author", &forge::PullRequest::author)
      .def_readwrite("assignees", &forge::PullRequest::assignees)
      .def_readwrite("comments", &forge::PullRequest::comments)
      .def_readwrite("commit_messages", &forge::PullRequest::commit_messages)
      .def_readwrite("linked_issue_numbers", &forge::PullRequest::linked_issue_numbers);

  py::class_<forge::IssueRef>(m, "IssueRef")
      .def(py::init<>())
      .def_readwrite("number", &forge::IssueRef::number)
      .def_readwrite("author", &forge::IssueRef::author)
      .def_readwrite("assignees", &forge::IssueRef::assignees)
      .def_readwrite("comment_authors", &forge::IssueRef::comment_authors);

  py::class_<forge::Fork>(m, "Fork")
      .def(py::init<>())
      .def(py::init([](std::string full_name, long merged) {
             forge::Fork f;
             f.full_name = std::move(full_name);
             f.merged_pr_count = merged;
             return f;
           }),
           py::arg("full_name"), py::arg("merged_pr_count"))
      .def_readwrite("full_name", &forge::Fork::full_name)
      .def_readwrite("merged_pr_count", &forge::Fork::merged_pr_count);

  m.def("extract_issue_refs", &forge::extract_issue_refs, py::arg("text"));
  m.def("extract_issue_links", &forge::extract_issue_links, py::arg("pr"));
  m.def("contains_wip_marker", &forge::contains_wip_marker, py::arg("text"));
  m.def("central_management_index", &forge::central_management_index, py::arg("prs"));
  m.def("duplicate_pr_ratio", &forge::duplicate_pr_ratio, py::arg("prs"),
        py::arg("stems") = forge::kDefaultDuplicateStems,
        py::arg("closed_denominator") = true);
  m.def("hard_fork_present", &forge::hard_fork_present, py::arg("forks"));
  m.def("pre_communicated", &forge::pre_communicated, py::arg("pr"), py::arg("issues"));
  m.def("pre_communication_index", &forge::pre_communication_index, py::arg("prs"),
        py::arg("issues"));
  m.def("frequency_index", &forge::frequency_index, py::arg("prs"),
        py::arg("interval_days") = 30);

  // --- statistics ---
  py::class_<stats::RegressionFit>(m, "RegressionFit")
      .def_readonly("names", &stats::RegressionFit::names)
      .def_readonly("coefficients", &stats::RegressionFit::coefficients)
      .def_readonly("standard_errors", &stats::RegressionFit::standard_errors)
      .def_readonly("z_values", &stats::RegressionFit::z_values)
      .def_readonly("p_values", &stats::RegressionFit::p_values)
      .def_readonly("log_likelihood", &stats::RegressionFit::log_likelihood)
      .def_readonly("aic", &stats::RegressionFit::aic)
      .def_readonly("n_obs", &stats::RegressionFit::n_obs)
      .def_readonly("converged", &stats::RegressionFit::converged)
      .def_readonly("iterations", &stats::RegressionFit::iterations);

  py::class_<stats::StepwiseStep>(m, "StepwiseStep")
      .def_readonly("columns", &stats::StepwiseStep::columns)
      .def_readonly("aic", &stats::StepwiseStep::aic)
      .def_readonly("dropped", &stats::StepwiseStep::dropped);

  py::class_<stats::StepwiseTrace>(m, "StepwiseTrace")
      .def_readonly("steps", &stats::StepwiseTrace::steps)
      .def_readonly("final", &stats::StepwiseTrace::final);

  py::class_<stats::OutlierSplit>(m, "OutlierSplit")
      .def_readonly("kept", &stats::OutlierSplit::kept)
      .def_readonly("removed", &stats::OutlierSplit::removed)
      .def_readonly("q1", &stats::OutlierSplit::q1)
      .def_readonly("q3", &stats::OutlierSplit::q3)
      .def_readonly("lower_fence", &stats::OutlierSplit::lower_fence)
      .def_readonly("upper_fence", &stats::OutlierSplit::upper_fence);

  m.def("remove_outliers_iqr", &stats::remove_outliers_iqr, py::arg("values"));
  m.def(
      "fit_logistic",
      [](const std::vector<std::string>& columns,
         const std::vector<std::vector<std::optional<double>>>& rows,
         const std::vector<int>& outcome) {
        return stats::fit_logistic(stats::DesignMatrix::build(columns, rows, outcome));
      },
      py::arg("columns"), py::arg("rows"), py::arg("outcome"),
      "Logistic regression by IRLS; rows with None cells are dropped");
  m.def(
      "backward_stepwise",
      [](const std::vector<std::string>& columns,
         const std::vector<std::vector<std::optional<double>>>& rows,
         const std::vector<int>& outcome) {
        return stats::backward_stepwise(stats::DesignMatrix::build(columns, rows, outcome));
      },
      py::arg("columns"), py::arg("rows"), py::arg("outcome"));
  m.def("mcfadden_r2", &stats::mcfadden_r2, py::arg("fit"), py::arg("null_fit"));
  m.def("significance_code", &stats::significance_code, py::arg("p"));
  m.def("standard_normal_cdf", &stats::standard_normal_cdf, py::arg("z"));
}
