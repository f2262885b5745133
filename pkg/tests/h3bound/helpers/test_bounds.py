"""Tests for L0, the short-cut threshold, the schedule and R_n."""

import math

import pytest

from h3bound.const import DEFAULT_DELTA
from h3bound.errors import GraphError, HypothesisError, ScheduleOverflowError
from h3bound.helpers import (
    chord_certifies,
    l0,
    lbar,
    lbar_closed_form,
    phi_max,
    r_n,
    ray_exit_length,
    schedule,
    short_cut_length,
    two_long_edges_threshold,
)

from ...common import load_cases

BOUNDS_CASES = load_cases("bounds_cases.json")


class TestL0:
    """Test the base exit length."""

    def test_value(self):
        """Test L0 = 2 ln(2 + sqrt 3) and 2 L0 to six decimals."""
        assert round(l0(), 6) == 2.633916
        assert round(2 * l0(), 6) == 5.267832

    def test_matches_ray_exit(self):
        """Test L0 is the exit length of the pi/6 ray."""
        assert l0() == pytest.approx(ray_exit_length(math.pi / 6), rel=1e-12)


class TestShortCutThreshold:
    """Test phi_max, the chord condition and lbar."""

    @pytest.mark.parametrize("case", BOUNDS_CASES, ids=[c["name"] for c in BOUNDS_CASES])
    def test_reference_values(self, case):
        """Test L2 and lbar against reference values."""
        delta = case["input"]["delta"]
        assert short_cut_length(delta) == pytest.approx(case["expected"]["L2"], rel=1e-4)
        assert lbar(delta) == pytest.approx(case["expected"]["lbar"], rel=1e-4)

    @pytest.mark.parametrize("delta", [0.0, 0.25, 1.0, 2.0, 10.0, 100.0])
    def test_bisection_matches_closed_form(self, delta):
        """Test the bracketing search against the closed form."""
        assert short_cut_length(delta) == pytest.approx(lbar_closed_form(delta), abs=1e-6)

    @pytest.mark.parametrize("delta", [0.0, 1.0, 5.0])
    def test_threshold_is_sharp(self, delta):
        """Test the chord condition holds at L2 and fails just below it."""
        length = short_cut_length(delta)
        assert chord_certifies(length, delta)
        assert not chord_certifies(length - 1e-3, delta)
        assert length > 2.0 * (delta + DEFAULT_DELTA)

    def test_lbar_is_monotone(self):
        """Test lbar grows with delta."""
        values = [lbar(0.5 * i) for i in range(10)]
        assert values == sorted(values)

    def test_phi_max(self):
        """Test phi_max tends to pi as L approaches delta and to 0 for long segments."""
        assert phi_max(1.0 + 1e-9, 1.0) == pytest.approx(math.pi, abs=1e-8)
        assert phi_max(60.0, 0.0) < 1e-12
        assert phi_max(3.0, 1.0) == pytest.approx(2.0 * math.acos(math.tanh(1.0)), rel=1e-12)

    def test_phi_max_needs_length_above_delta(self):
        """Test L <= delta raises HypothesisError."""
        with pytest.raises(HypothesisError):
            phi_max(1.0, 1.0)

    @pytest.mark.parametrize(("delta", "big_delta"), [(-0.1, DEFAULT_DELTA), (0.0, 0.0)])
    def test_invalid_arguments(self, delta, big_delta):
        """Test negative delta or non-positive Delta raise HypothesisError."""
        with pytest.raises(HypothesisError):
            lbar(delta, big_delta)
        with pytest.raises(HypothesisError):
            lbar_closed_form(delta, big_delta)

    def test_two_long_edges_threshold(self):
        """Test [3(n-1)]^2 L."""
        assert two_long_edges_threshold(2, 1.0) == 9.0
        assert two_long_edges_threshold(3, 2.0) == 72.0


class TestSchedule:
    """Test the constant schedule L(k)."""

    def test_first_entries(self, schedule4):
        """Test L(0), L(1) and the recursion."""
        assert schedule4(0) == pytest.approx(l0())
        assert schedule4(1) == pytest.approx(2.0 * l0())
        for k in range(2, 5):
            assert schedule4(k) == pytest.approx(lbar(k * schedule4(k - 1)), rel=1e-12)

    def test_magnitudes(self, schedule4):
        """Test the schedule grows roughly ninefold per step."""
        assert 120.0 < schedule4(2) < 130.0
        assert 3300.0 < schedule4(3) < 3500.0
        assert 1.1e5 < schedule4(4) < 1.3e5
        assert schedule4.values == sorted(schedule4.values)

    def test_rows_and_dict(self, schedule4):
        """Test export shapes."""
        rows = schedule4.to_rows()
        assert [row["k"] for row in rows] == [0, 1, 2, 3, 4]
        assert rows[0]["provenance"].startswith("L0")
        data = schedule4.to_dict()
        assert data["Delta"] == DEFAULT_DELTA
        assert len(data["L"]) == 5
        assert not schedule4.has_log_domain

    def test_zero_length_schedule(self):
        """Test kmax = 0 holds only L0 and negative kmax raises."""
        assert len(schedule(0)) == 1
        with pytest.raises(HypothesisError):
            schedule(-1)

    def test_log_domain(self, caplog):
        """Test entries past 1e300 are flagged instead of overflowing."""
        sched = schedule(150)
        assert sched.has_log_domain
        assert sched.is_log_domain(150)
        assert math.isfinite(sched.log_value(150))
        assert sched.log_value(150) == pytest.approx(math.log(9 * 150) + sched.log_value(149))
        assert sched.to_rows()[-1]["L"].startswith("exp(")
        with pytest.raises(ScheduleOverflowError):
            sched(150)
        assert "log domain" in caplog.text


class TestRn:
    """Test R and R_n."""

    def test_rank_two(self):
        """Test R = 9 L(3) and the sharp bound 2 L0."""
        report = r_n(2)
        sched = report.schedule
        assert report.R == pytest.approx(9.0 * sched(3), rel=1e-12)
        assert report.R_n == pytest.approx(max(report.R, 3.0 * sched(2)), rel=1e-12)
        assert report.sharp_R2 == pytest.approx(2.0 * l0())
        data = report.to_dict()
        assert data["n"] == 2
        assert data["log_domain"] is False

    def test_rank_three_has_no_sharp_value(self):
        """Test sharp_R2 is only reported for n = 2."""
        report = r_n(3)
        assert report.sharp_R2 is None
        assert report.R_n > r_n(2).R_n

    def test_rank_one(self):
        """Test n = 1 raises GraphError."""
        with pytest.raises(GraphError):
            r_n(1)

    def test_overflow_attaches_report(self):
        """Test a large rank raises with the log-domain report attached."""
        with pytest.raises(ScheduleOverflowError) as exc_info:
            r_n(60)
        report = exc_info.value.report
        assert report.log_domain
        assert report.to_dict()["R_n"] is None
        assert report.log_R_n > 690.0
