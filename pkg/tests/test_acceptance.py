"""Acceptance criteria 1-11.

Each test appends one PASS/FAIL line to the acceptance summary printed at the
end of the run, then asserts. Tolerances are the ones fixed by the build
contract; nothing here is tuned to make a criterion pass.

The two full-grid runs (criteria 5-9, 11) take a few minutes each. Setting
``MIXSCHED_GRID_CACHE`` to a directory pickles them there and reuses them on
later runs; criterion 11 is then reported from the recorded wall time.
"""

import math
import os
import pickle
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from _workloads import random_workload
from mixsched.engine import SimConfig, SimState, simulate, step
from mixsched.experiment import ExperimentConfig, run_experiment
from mixsched.metrics import MetricsReport
from mixsched.oracle import simulate_exact
from mixsched.policy import ActiveFlow, PolicyKind, allocate
from mixsched.traffic import Exponential, FlowSpec, Softness, Workload, WorkloadConfig, generate_workload

POLICIES = list(PolicyKind)
FRACTIONS = [round(0.1 * i, 1) for i in range(1, 10)]
P = PolicyKind


def record(log, number, ok, text):
    log.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")


# Shared full-grid runs


def _full_grid(delta):
    cache = os.environ.get("MIXSCHED_GRID_CACHE")
    path = Path(cache) / f"grid_{delta:g}.pkl" if cache else None
    if path is not None and path.exists():
        return pickle.loads(path.read_bytes())
    start = time.perf_counter()
    results = run_experiment(ExperimentConfig(delta=delta))
    out = (results, time.perf_counter() - start)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(pickle.dumps(out))
    return out


@pytest.fixture(scope="module")
def grid():
    return _full_grid(0.1)


@pytest.fixture(scope="module")
def grid_fine():
    return _full_grid(0.05)


def means(results, metric):
    return {(c.policy, c.distribution, c.arrival_rate, c.regular_fraction): c.mean[metric] for c in results}


# 1-2: M/M/1 analytic checks


def _mm1(policy):
    simulate(random_workload(0), SimConfig(policy))  # compile outside the timed region
    cfg = ExperimentConfig(
        policies=[policy], regular_fractions=[1.0], distributions=["exponential"], arrival_rates=[0.1],
        flow_count=10000, repetitions=20,
    )
    start = time.perf_counter()
    [cell] = run_experiment(cfg)
    return cell.mean["afct"], time.perf_counter() - start


@pytest.mark.parametrize("number,policy", [(1, P.FCFS), (2, P.FAIR)])
def test_mm1_mean_sojourn(acceptance_log, number, policy):
    target = 1 / (1 - 0.1)
    afct, elapsed = _mm1(policy)
    rel = abs(afct - target) / target
    ok = rel <= 0.05 and elapsed < 10
    record(acceptance_log, number,
           ok, f"M/M/1 {policy.value} AFCT={afct:.4f} vs {target:.4f} (rel {rel:.2%}, tol 5%), {elapsed:.2f}s (< 10s)")
    assert ok


# 3: slotted vs exact schedule


def test_oracle_equivalence(acceptance_log):
    worst = {}
    for policy in POLICIES:
        for delta in (0.1, 0.01):
            err = 0.0
            for seed in range(100):
                wl = random_workload(seed, max_flows=20)
                slotted = simulate(wl, SimConfig(policy, 1.0, delta))
                exact = np.array([r.completion for r in simulate_exact(wl, policy)])
                err = max(err, float(np.max(np.abs(slotted - exact))))
            worst[policy, delta] = err
    bad = {k: v for k, v in worst.items() if v > 2 * k[1] + 1e-9}
    detail = ", ".join(f"{p.value}@{d:g}={e:.3g}" for (p, d), e in worst.items() if (p, d) in bad)
    record(acceptance_log, 3, not bad,
           f"per-flow |C_slotted - C_exact| <= 2*delta on 100 instances x 7 policies x delta in (0.1, 0.01); "
           f"{len(worst) - len(bad)}/{len(worst)} policy-delta pairs hold" + (f"; worst violations: {detail}" if bad else ""))
    assert not bad


# 4: SRPT optimality, exact arithmetic


def _dyadic(x, bits=12):
    return Fraction(math.ceil(x * 2**bits), 2**bits)


def _exact_flows(seed):
    wl = random_workload(10_000 + seed, max_flows=50)
    flows = []
    for f in wl.flows():
        a, v = _dyadic(f.arrival), _dyadic(f.volume)
        if f.is_deadline:
            flows.append(FlowSpec(f.id, a, v, max(_dyadic(f.deadline), a + v), f.softness))
        else:
            flows.append(FlowSpec(f.id, a, v))
    return flows


def test_srpt_optimal_exact(acceptance_log):
    violations = 0
    for seed in range(100):
        flows = _exact_flows(seed)
        mean = {}
        for p in POLICIES:
            recs = simulate_exact(flows, p, capacity=Fraction(1))
            mean[p] = sum(r.completion - r.arrival for r in recs) / len(recs)
        violations += any(mean[P.SRPT] > mean[p] for p in POLICIES)
    record(acceptance_log, 4, violations == 0,
           f"SRPT mean FCT <= every other policy, exact rationals, 100 instances; {violations} violations")
    assert violations == 0


# 5: delta insensitivity


def test_delta_insensitivity(acceptance_log, grid, grid_fine):
    coarse, fine = grid[0], grid_fine[0]
    worst = {}
    per_metric = {}
    failing = 0
    total = 0
    for m in MetricsReport.METRICS:
        a, b = means(coarse, m), means(fine, m)
        for key in a:
            x, y = a[key], b[key]
            if x is None and y is None:
                continue
            total += 1
            if x == y:
                rel = 0.0
            elif x is None or y is None or min(abs(x), abs(y)) == 0:
                rel = math.inf
            else:
                rel = abs(x - y) / abs(x)
            failing += rel >= 0.02
            per_metric[m] = per_metric.get(m, 0) + (rel >= 0.02)
            if rel > worst.get(m, (-1,))[0]:
                worst[m] = (rel, key)
    detail = ", ".join(f"{m} {r:.1%} ({k[0].value} {k[1]} rate={k[2]:g} frac={k[3]:g})" for m, (r, k) in worst.items())
    record(acceptance_log, 5, failing == 0,
           f"delta 0.1 vs 0.05 aggregate rel diff < 2%; {total - failing}/{total} hold; "
           f"failing per metric {per_metric}; worst per metric: {detail}")
    assert failing == 0


# 6-9: directional claims


def _count(pred):
    return sum(bool(pred(f)) for f in FRACTIONS)


def test_light_tailed_fct(acceptance_log, grid):
    afct, tfct = means(grid[0], "afct"), means(grid[0], "tfct")
    parts = []
    ok = True
    for rate in (0.1, 1.0):
        def a(p, f, rate=rate):
            return afct[p, "exponential", rate, f]
        n_fcfs = _count(lambda f: a(P.SRPT, f) < a(P.FCFS, f))
        n_fair = _count(lambda f: a(P.SRPT, f) < a(P.FAIR, f))
        ok &= n_fcfs >= 8 and n_fair >= 8
        parts.append(f"rate {rate:g}: AFCT(srpt)<AFCT(fcfs) {n_fcfs}/9, <AFCT(fair) {n_fair}/9")
    n_tail = _count(lambda f: tfct[P.SRPT, "exponential", 1.0, f] > tfct[P.FCFS, "exponential", 1.0, f])
    ok &= n_tail >= 8
    parts.append(f"rate 1: TFCT(srpt)>TFCT(fcfs) {n_tail}/9")
    record(acceptance_log, 6, ok, "light-tailed FCT ordering (>= 8/9 each); " + "; ".join(parts))
    assert ok


def test_heavy_tailed_fct(acceptance_log, grid):
    afct = means(grid[0], "afct")

    def a(p, f):
        return afct[p, "pareto", 1.0, f]

    n_srpt = _count(lambda f: a(P.FCFS, f) > a(P.SRPT, f))
    n_fair = _count(lambda f: a(P.FCFS, f) > a(P.FAIR, f))
    ok = n_srpt >= 8 and n_fair >= 8
    record(acceptance_log, 7, ok,
           f"heavy-tailed heavy load AFCT(fcfs) > srpt {n_srpt}/9, > fair {n_fair}/9 (>= 8/9 each)")
    assert ok


def test_miss_rate_ordering(acceptance_log, grid):
    dmr = means(grid[0], "dmr")
    parts = []
    ok = True
    for dist in ("exponential", "pareto"):
        n_heavy = _count(lambda f: dmr[P.FCFS, dist, 1.0, f] > dmr[P.SRPT, dist, 1.0, f])
        n_light = _count(lambda f: all(dmr[P.FCFS, dist, 0.1, f] >= dmr[p, dist, 0.1, f] for p in POLICIES))
        ok &= n_heavy == 9 and n_light == 9
        parts.append(f"{dist}: heavy DMR(fcfs)>DMR(srpt) {n_heavy}/9, light DMR(fcfs) maximal {n_light}/9")
    record(acceptance_log, 8, ok, "DMR ordering at every fraction; " + "; ".join(parts))
    assert ok


def test_lateness_ordering(acceptance_log, grid):
    late = means(grid[0], "avg_lateness")
    light = [late[p, "exponential", 0.1, f] for p in POLICIES for f in FRACTIONS]
    n_zero = sum(v == 0 for v in light)
    df = (P.EDF_FCFS_DF, P.EDF_SRPT_DF)
    others = [p for p in POLICIES if p not in df]
    n_heavy = _count(lambda f: all(
        late[d, "exponential", 1.0, f] <= late[o, "exponential", 1.0, f] for d in df for o in others))
    ok = n_zero == len(light) and n_heavy == 9
    record(acceptance_log, 9, ok,
           f"light-tailed lateness: light load zero for {n_zero}/{len(light)} policy-fraction cells "
           f"(max {max(light):.3g}); heavy load EDF-*-DF minimal at {n_heavy}/9 fractions")
    assert ok


# 10: invariant suites


def _random_active(rng):
    flows = []
    for i in range(int(rng.integers(0, 7))):
        arrival = float(rng.integers(0, 5))
        remaining = max(float(rng.exponential(rng.choice([0.05, 0.5, 3.0]))), 1e-6)
        deadline = arrival + float(rng.uniform(0.5, 5)) if rng.random() < 0.5 else None
        flows.append(ActiveFlow(i, arrival, remaining, deadline))
    return flows


def _max_min_ok(rates, demands, capacity, eps=1e-7):
    total = sum(rates)
    for i, (r, d) in enumerate(zip(rates, demands)):
        if r >= d - eps:
            continue
        if total < capacity - eps or any(rj > r + eps for j, rj in enumerate(rates) if j != i):
            return False
    return True


def test_invariant_suites(acceptance_log):
    trials = 10_000
    rng = np.random.default_rng(2024)
    counts = dict(work=0, capacity=0, maxmin=0, volume=0, idle=0)

    for _ in range(trials):
        policy = POLICIES[int(rng.integers(len(POLICIES)))]
        flows = _random_active(rng)
        capacity = float(rng.choice([0.5, 1.0, 2.0]))
        slot = float(rng.choice([0.01, 0.1, 1.0]))
        alloc = allocate(policy, flows, capacity, slot)
        rates = [alloc.get(f.id, 0.0) for f in flows]
        demands = [f.remaining / slot for f in flows]
        counts["capacity"] += sum(rates) > capacity + 1e-9 or any(r < 0 for r in rates)
        counts["work"] += abs(sum(rates) - min(capacity, sum(demands))) > 1e-9
        if policy is P.FAIR:
            counts["maxmin"] += not _max_min_ok(rates, demands, capacity)

    for t in range(trials):
        policy = POLICIES[t % len(POLICIES)]
        wl = generate_workload(WorkloadConfig(2.0, int(rng.integers(1, 5)), Exponential(0.2), 0.5, seed=t))
        cfg = SimConfig(policy, 1.0, 0.1)
        state = SimState.from_flows(wl.flows())
        while not state.finished:
            start = state.slot_start(cfg)
            step(state, cfg)
            visible = wl.volume[wl.arrival <= start].sum()
            counts["volume"] += abs(state.delivered + sum(f.remaining for f in state.active) - visible) > 1e-9

    for _ in range(trials):
        policy = POLICIES[int(rng.integers(len(POLICIES)))]
        a, v = float(rng.uniform(0, 50)), float(rng.exponential(1.0)) + 1e-6
        capacity, delta = float(rng.choice([0.5, 1.0, 2.0])), float(rng.choice([0.01, 0.1]))
        deadline = a + 4 * v / capacity if rng.random() < 0.5 else None
        flow = FlowSpec(0, a, v, deadline, Softness.HARD if deadline else None)
        [c] = simulate(Workload.from_flows([flow]), SimConfig(policy, capacity, delta))
        counts["idle"] += not (v / capacity - 1e-9 <= c - a <= v / capacity + delta + 1e-9)

    counts = {k: int(v) for k, v in counts.items()}
    bad = sum(counts.values())
    record(acceptance_log, 10, bad == 0,
           f"invariants over 10^4 trials each (work conservation, capacity bound, max-min, volume conservation, "
           f"idle-link FCT bound); violations {counts}")
    assert bad == 0


# 11: full-grid runtime


def test_full_grid_runtime(acceptance_log, grid):
    results, elapsed = grid
    ok = len(results) == 252 and all(len(c.replications) == 20 for c in results) and elapsed < 1800
    record(acceptance_log, 11, ok, f"full grid 252 cells x 20 reps x 10^4 flows in {elapsed / 60:.1f} min (< 30 min)")
    assert ok
