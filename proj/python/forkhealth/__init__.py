"""Fork-practice metrics and logistic analysis, backed by the C++ core."""

from ._forkhealth import (  # noqa: F401
    ChangeKind,
    CommitSummary,
    FileChange,
    Fork,
    IssueRef,
    OutlierSplit,
    PullRequest,
    RegressionFit,
    StepwiseStep,
    StepwiseTrace,
    additive_contribution_index,
    backward_stepwise,
    central_management_index,
    contains_wip_marker,
    dimensionality_index,
    duplicate_pr_ratio,
    extract_issue_links,
    extract_issue_refs,
    fit_logistic,
    frequency_index,
    hard_fork_present,
    logic_coupling_index,
    mcfadden_r2,
    pre_communicated,
    pre_communication_index,
    remove_outliers_iqr,
    scan_history,
    significance_code,
    standard_normal_cdf,
)

__all__ = [
    "ChangeKind",
    "CommitSummary",
    "FileChange",
    "Fork",
    "IssueRef",
    "OutlierSplit",
    "PullRequest",
    "RegressionFit",
    "StepwiseStep",
    "StepwiseTrace",
    "additive_contribution_index",
    "backward_stepwise",
    "central_management_index",
    "contains_wip_marker",
    "dimensionality_index",
    "duplicate_pr_ratio",
    "extract_issue_links",
    "extract_issue_refs",
    "fit_logistic",
    "frequency_index",
    "hard_fork_present",
    "logic_coupling_index",
    "mcfadden_r2",
    "pre_communicated",
    "pre_communication_index",
    "remove_outliers_iqr",
    "scan_history",
    "significance_code",
    "standard_normal_cdf",
]
