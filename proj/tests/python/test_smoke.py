"""Smoke tests for the _forkhealth extension module."""

import math
import subprocess
import tempfile
from pathlib import Path

import pytest

import forkhealth as fh


def test_normal_cdf_and_codes():
    assert fh.standard_normal_cdf(0.0) == 0.5
    assert abs(fh.standard_normal_cdf(1.959964) - 0.975) < 1e-6
    assert fh.significance_code(0.00132) == "**"
    assert fh.significance_code(0.5) == ""


def test_issue_refs_and_wip():
    assert fh.extract_issue_refs("Fixes #123, see issue #7 and #7") == {123, 7}
    assert fh.extract_issue_refs("C#5") == set()
    assert fh.contains_wip_marker("[WIP] thing")
    assert not fh.contains_wip_marker("wipe")


def test_intercept_only_fit():
    fit = fh.fit_logistic([], [[] for _ in range(4)], [1, 1, 1, 0])
    assert abs(fit.coefficients[0] - math.log(3.0)) < 1e-10
    assert fit.converged
    null = fh.fit_logistic([], [[] for _ in range(4)], [1, 1, 1, 0])
    assert fh.mcfadden_r2(fit, null) == 0.0


def test_fit_drops_missing_rows():
    fit = fh.fit_logistic(
        ["x"], [[0.0], [None], [1.0], [2.0], [3.0]], [0, 1, 0, 1, 1]
    )
    assert fit.n_obs == 4


def test_frequency_windows():
    day = 86400
    prs = []
    for d in (0, 10, 35, 40):
        pr = fh.PullRequest()
        pr.created_at = d * day
        prs.append(pr)
    assert fh.frequency_index(prs, 30) == 2.0
    assert fh.frequency_index([], 30) is None


def test_hard_fork_boundary():
    assert fh.hard_fork_present([fh.Fork("a/b", 1)]) == 0
    assert fh.hard_fork_present([fh.Fork("a/b", 1), fh.Fork("c/d", 2)]) == 1
    assert fh.hard_fork_present([]) == 0


def test_pre_communication_cascade():
    issue = fh.IssueRef()
    issue.number = 9
    issue.author = "ana"
    pr = fh.PullRequest()
    pr.author = "ana"
    pr.linked_issue_numbers = {9}
    assert fh.pre_communicated(pr, {9: issue})
    pr.linked_issue_numbers = {404}
    assert not fh.pre_communicated(pr, {9: issue})


def test_outlier_fences():
    split = fh.remove_outliers_iqr([1, 2, 3, 4, 5, 6, 7, 8, 9, 100])
    assert split.removed == [100.0]
    assert split.q1 == 3.25 and split.q3 == 7.75


@pytest.fixture()
def mini_repo(tmp_path: Path) -> Path:
    repo = tmp_path / "repo"
    repo.mkdir()
    env = {
        "GIT_AUTHOR_NAME": "t",
        "GIT_AUTHOR_EMAIL": "t@example.com",
        "GIT_COMMITTER_NAME": "t",
        "GIT_COMMITTER_EMAIL": "t@example.com",
        "GIT_AUTHOR_DATE": "2021-01-01T00:00:00Z",
        "GIT_COMMITTER_DATE": "2021-01-01T00:00:00Z",
        "PATH": "/usr/bin:/bin:/usr/local/bin",
    }

    def git(*args: str) -> None:
        subprocess.run(["git", "-C", str(repo), *args], check=True, env=env,
                       capture_output=True)

    git("init", "-q", "-b", "main")
    (repo / "a.txt").write_text("one\ntwo\n")
    git("add", "-A")
    git("commit", "-q", "-m", "first")
    (repo / "b.txt").write_text("three\n")
    (repo / "a.txt").write_text("one\ntwo\nthree\n")
    git("add", "-A")
    git("commit", "-q", "-m", "second")
    return repo


def test_scan_history_and_indices(mini_repo: Path):
    commits = fh.scan_history(str(mini_repo))
    assert len(commits) == 2
    assert commits[0].snapshot_file_count == 2
    assert commits[1].snapshot_file_count == 1

    coupling = fh.logic_coupling_index(commits)
    additive = fh.additive_contribution_index(commits)
    dims = fh.dimensionality_index(commits)
    # newest commit: adds b, edits a in a 2-file tree -> pair ratio 1
    assert coupling == 1.0
    assert additive == (0.5 + 1.0) / 2.0
    assert dims is not None and dims > 0.0
