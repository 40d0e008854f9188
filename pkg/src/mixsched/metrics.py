"""Flow completion time and deadline metrics.

A metric with no flows to average over is ``None``, never zero.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .traffic import Softness, Workload


def nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    """q-th quantile by nearest rank: the ceil(q*n)-th smallest (1-based)."""
    n = len(sorted_values)
    rank = max(1, math.ceil(round(q * n, 9)))
    return float(sorted_values[min(rank, n) - 1])


def fct_stats(fcts, tail: float = 0.99) -> tuple[float, float, float] | None:
    """(mean, median, tail percentile) of regular-flow completion times."""
    fcts = np.sort(np.asarray(fcts, dtype=float))
    if fcts.size == 0:
        return None
    return float(fcts.mean()), float(np.median(fcts)), nearest_rank(fcts, tail)


def deadline_miss_rate(completion, deadline) -> float | None:
    completion = np.asarray(completion, dtype=float)
    if completion.size == 0:
        return None
    return float(np.mean(completion > np.asarray(deadline, dtype=float)))


def average_lateness(completion, deadline) -> float | None:
    """Mean of max(0, C - D) over all given (soft-deadline) flows, met ones included."""
    completion = np.asarray(completion, dtype=float)
    if completion.size == 0:
        return None
    return float(np.mean(np.maximum(0.0, completion - np.asarray(deadline, dtype=float))))


def normalize_by_minimum(values: Sequence[float]) -> list[float]:
    values = [float(v) for v in values]
    if not values:
        return []
    if any(not v > 0 for v in values):
        raise ConfigError(f"normalization needs positive values, got {values}")
    lo = min(values)
    return [v / lo for v in values]


@dataclass(frozen=True)
class MetricsReport:
    afct: float | None
    mfct: float | None
    tfct: float | None
    dmr: float | None
    avg_lateness: float | None
    n_regular: int
    n_deadline: int
    n_soft: int
    n_missed: int

    METRICS = ("afct", "mfct", "tfct", "dmr", "avg_lateness")

    def as_dict(self) -> dict:
        return asdict(self)


def compute_report(workload: Workload, completion: np.ndarray, tail: float = 0.99) -> MetricsReport:
    completion = np.asarray(completion, dtype=float)
    regular = workload.regular
    dl = ~regular
    soft = workload.soft & dl

    stats = fct_stats(completion[regular] - workload.arrival[regular], tail)
    afct, mfct, tfct = stats if stats is not None else (None, None, None)
    return MetricsReport(
        afct=afct,
        mfct=mfct,
        tfct=tfct,
        dmr=deadline_miss_rate(completion[dl], workload.deadline[dl]),
        avg_lateness=average_lateness(completion[soft], workload.deadline[soft]),
        n_regular=int(regular.sum()),
        n_deadline=int(dl.sum()),
        n_soft=int(soft.sum()),
        n_missed=int(np.sum(completion[dl] > workload.deadline[dl])),
    )


def report_from_records(records, tail: float = 0.99) -> MetricsReport:
    """Same as :func:`compute_report` for a list of ``CompletionRecord``."""
    records = sorted(records, key=lambda r: (r.arrival, r.id))
    wl = Workload(
        arrival=np.array([r.arrival for r in records], dtype=float),
        volume=np.array([r.volume for r in records], dtype=float),
        deadline=np.array([math.inf if r.deadline is None else r.deadline for r in records], dtype=float),
        soft=np.array([r.softness is Softness.SOFT for r in records], dtype=bool),
    )
    return compute_report(wl, np.array([r.completion for r in records], dtype=float), tail)
