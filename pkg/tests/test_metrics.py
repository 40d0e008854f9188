import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _workloads import random_workload
from mixsched.engine import SimConfig, run, simulate
from mixsched.errors import ConfigError
from mixsched.metrics import (
    MetricsReport,
    average_lateness,
    compute_report,
    deadline_miss_rate,
    fct_stats,
    nearest_rank,
    normalize_by_minimum,
)
from mixsched.metrics import report_from_records
from mixsched.policy import PolicyKind


class TestFctStats:
    def test_even_count(self):
        afct, mfct, _ = fct_stats([1, 2, 3, 4])
        assert (afct, mfct) == (2.5, 2.5)

    def test_tail_nearest_rank(self):
        assert fct_stats(range(1, 101))[2] == 99

    def test_singleton(self):
        assert fct_stats([5]) == (5, 5, 5)

    def test_empty_is_missing(self):
        assert fct_stats([]) is None

    def test_nearest_rank(self):
        v = np.arange(1, 11, dtype=float)
        assert nearest_rank(v, 0.5) == 5
        assert nearest_rank(v, 0.99) == 10
        assert nearest_rank(v, 0.0) == 1


class TestDeadlineMissRate:
    def test_half(self):
        assert deadline_miss_rate([2, 5], [3, 4]) == 0.5

    def test_boundary_met(self):
        assert deadline_miss_rate([3], [3]) == 0.0

    def test_all_missed(self):
        assert deadline_miss_rate([5, 6], [1, 2]) == 1.0

    def test_empty(self):
        assert deadline_miss_rate([], []) is None


class TestLateness:
    def test_examples(self):
        assert average_lateness([5], [4]) == 1.0
        assert average_lateness([3], [4]) == 0.0
        assert average_lateness([5, 3], [4, 4]) == 0.5

    def test_empty(self):
        assert average_lateness([], []) is None


class TestNormalize:
    @pytest.mark.parametrize(
        "values,expected",
        [([2, 4, 8], [1, 2, 4]), ([3], [1]), ([5, 5], [1, 1]), ([], [])],
    )
    def test_examples(self, values, expected):
        assert normalize_by_minimum(values) == expected

    @pytest.mark.parametrize("values", [[0, 1], [-1, 2]])
    def test_non_positive(self, values):
        with pytest.raises(ConfigError):
            normalize_by_minimum(values)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=200), st.randoms(use_true_random=False))
def test_fct_invariants(fcts, rnd):
    afct, mfct, tfct = fct_stats(fcts)
    assert min(fcts) - 1e-9 <= afct <= max(fcts) + 1e-9
    assert tfct >= mfct
    shuffled = list(fcts)
    rnd.shuffle(shuffled)
    assert fct_stats(shuffled) == pytest.approx((afct, mfct, tfct))


@pytest.mark.parametrize("policy", list(PolicyKind))
def test_report_invariants(policy):
    for seed in range(15):
        wl = random_workload(8000 + seed, max_flows=40)
        c = simulate(wl, SimConfig(policy))
        r = compute_report(wl, c)
        assert r.n_regular + r.n_deadline == len(wl)
        if r.dmr is not None:
            assert 0 <= r.dmr <= 1
            assert r.n_missed == round(r.dmr * r.n_deadline)
        if r.avg_lateness is not None:
            assert r.avg_lateness >= 0
            soft = wl.soft
            met = np.all(c[soft] <= wl.deadline[soft])
            assert (r.avg_lateness == 0) == met
        if r.afct is not None:
            assert r.tfct >= r.mfct and r.afct >= 0


def test_partition_audit():
    # Changing regular flows' completions leaves deadline metrics untouched and vice versa.
    wl = random_workload(9001, n=60)
    c = simulate(wl, SimConfig("srpt"))
    base = compute_report(wl, c)
    bumped = c.copy()
    bumped[wl.regular] += 5.0
    r = compute_report(wl, bumped)
    assert (r.dmr, r.avg_lateness) == (base.dmr, base.avg_lateness)
    bumped = c.copy()
    bumped[~wl.regular] += 5.0
    r = compute_report(wl, bumped)
    assert (r.afct, r.mfct, r.tfct) == (base.afct, base.mfct, base.tfct)


def test_missing_metrics_on_single_class():
    from mixsched.traffic import Exponential, WorkloadConfig, generate_workload

    wl = generate_workload(WorkloadConfig(1.0, 50, Exponential(), 1.0, seed=0))
    r = compute_report(wl, simulate(wl, SimConfig("fcfs")))
    assert r.dmr is None and r.avg_lateness is None and r.afct is not None
    wl = generate_workload(WorkloadConfig(1.0, 50, Exponential(), 0.0, seed=0))
    r = compute_report(wl, simulate(wl, SimConfig("fcfs")))
    assert r.afct is None and r.dmr is not None


def test_report_from_records_matches():
    wl = random_workload(12, n=80)
    cfg = SimConfig("edf-srpt-dl")
    a = compute_report(wl, simulate(wl, cfg))
    b = report_from_records(list(reversed(run(wl, cfg))))
    for m in MetricsReport.METRICS:
        assert getattr(a, m) == pytest.approx(getattr(b, m), abs=1e-9)
    assert a.as_dict()["n_regular"] == b.n_regular
