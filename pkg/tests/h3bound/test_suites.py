"""Tests for the verification suites and their runner."""

import pytest

from h3bound.const import SUITES
from h3bound.errors import DataError
from workbench.suites import (
    SUITE_REGISTRY,
    Failure,
    VerificationReport,
    get_suite,
    partition,
    replay,
    run_suite,
    trial_rng,
)

SMALL_TRIALS = {
    "thin-triangles": 20,
    "selection": 50,
    "shortcut": 6,
    "trichotomy": 5,
    "steiner": 4,
    "window": 5,
    "metric": 10,
}


class TestPartition:
    """Test splitting trials across workers."""

    def test_even_split(self):
        """Test contiguous ranges that cover every trial once."""
        assert partition(10, 3) == [(0, 3), (3, 6), (6, 10)]

    def test_more_workers_than_trials(self):
        """Test idle workers get no range."""
        assert partition(2, 4) == [(0, 1), (1, 2)]

    def test_no_trials(self):
        """Test zero trials give no ranges."""
        assert partition(0, 4) == []


class TestRegistry:
    """Test suite lookup."""

    def test_every_suite_registered(self):
        """Test the registry covers every suite name."""
        assert sorted(SUITE_REGISTRY) == sorted(SUITES)
        assert set(SMALL_TRIALS) == set(SUITES)

    def test_unknown_suite(self):
        """Test an unknown name raises KeyError."""
        with pytest.raises(KeyError):
            get_suite("everything")

    def test_trial_generators_are_independent_of_order(self):
        """Test each trial seeds its own generator."""
        assert trial_rng(5, 17).random() == trial_rng(5, 17).random()
        assert trial_rng(5, 17).random() != trial_rng(5, 18).random()


class TestRunSuite:
    """Test running suites."""

    @pytest.mark.parametrize("name", SUITES)
    async def test_suite_passes(self, name):
        """Test a short run of every suite passes."""
        report = await run_suite(name, seed=1, trials=SMALL_TRIALS[name], workers=2)
        assert report.passed, report.summary()
        assert report.trials == SMALL_TRIALS[name]
        assert report.failures == []
        assert "PASS" in report.summary()

    async def test_worker_count_does_not_change_report(self):
        """Test equal seeds give equal documents for any number of workers."""
        one = await run_suite("selection", seed=9, trials=40, workers=1)
        four = await run_suite("selection", seed=9, trials=40, workers=4)
        assert one.to_dict() == four.to_dict()
        assert "wall_time" not in one.to_dict()

    async def test_seed_changes_cases(self):
        """Test different seeds draw different cases."""
        suite = get_suite("metric")
        assert suite.generate(trial_rng(1, 0), 0) != suite.generate(trial_rng(2, 0), 0)


class TestReports:
    """Test report serialization and replay."""

    def test_round_trip(self):
        """Test to_dict feeds back into from_dict."""
        report = VerificationReport(
            suite="selection",
            seed=3,
            trials=10,
            failure_count=1,
            failures=[Failure(4, "boom", {"x": [1.0], "y": [2.0]})],
            statistics={"case1": 1.0},
        )
        data = report.to_dict()
        assert data["passed"] is False
        assert VerificationReport.from_dict(data).to_dict() == data

    def test_malformed_report(self):
        """Test a report without a suite raises DataError."""
        with pytest.raises(DataError):
            VerificationReport.from_dict({"seed": 1})

    def test_replay_keeps_real_failures(self):
        """Test replay re-runs recorded cases and skips generator failures."""
        bad_case = {"x": [20.0, 10.0], "y": [10.0]}
        good_case = {"x": [1.0, 1e9], "y": [1e9]}
        stored = VerificationReport(
            suite="selection",
            seed=0,
            trials=3,
            failure_count=3,
            failures=[Failure(0, "old", bad_case), Failure(1, "old", good_case), Failure(2, "generator", {})],
        )
        result = replay(stored)
        assert result.replayed
        assert result.failure_count == 1
        assert result.failures[0].trial == 0
        assert result.failures[0].reason.startswith("HypothesisError")
