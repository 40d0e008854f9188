"""Grid sweeps over policy x regular fraction x size distribution x arrival rate.

Replication ``r`` of every cell draws its workload with seed ``base_seed + r``,
and every policy in the cell runs on that same workload.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .engine import SimConfig, simulate
from .errors import ConfigError
from .metrics import MetricsReport, compute_report
from .policy import PolicyKind
from .traffic import Exponential, Pareto, WorkloadConfig, generate_workload

log = logging.getLogger(__name__)

METRICS = MetricsReport.METRICS
NORMALIZED = ("afct", "mfct", "tfct")
CSV_HEADER = (
    "policy", "distribution", "arrival_rate", "regular_fraction",
    *METRICS, *(f"{m}_norm" for m in NORMALIZED),
)
DISTRIBUTIONS = {"exponential": "exponential", "exp": "exponential", "pareto": "pareto"}


def _fractions_default():
    return [round(0.1 * i, 1) for i in range(1, 10)]


@dataclass
class ExperimentConfig:
    policies: list = field(default_factory=lambda: list(PolicyKind))
    regular_fractions: list = field(default_factory=_fractions_default)
    distributions: list = field(default_factory=lambda: ["exponential", "pareto"])
    arrival_rates: list = field(default_factory=lambda: [0.1, 1.0])
    flow_count: int = 10000
    repetitions: int = 20
    base_seed: int = 0
    delta: float = 0.1
    capacity: float = 1.0
    mean_size: float = 1.0
    pareto_min: float = 0.1
    slack: tuple = (1.0, 4.0)
    soft_multiplier: float = 2.0
    tail_percentile: float = 0.99
    workers: int = 1

    def __post_init__(self):
        def bad(name, why):
            raise ConfigError(f"{name}: {why}")

        for name in ("policies", "regular_fractions", "distributions", "arrival_rates"):
            if not isinstance(getattr(self, name), (list, tuple)) or not getattr(self, name):
                bad(name, "must be a non-empty list")
        self.policies = [PolicyKind.parse(p) for p in self.policies]
        dists = []
        for d in self.distributions:
            if d not in DISTRIBUTIONS:
                bad("distributions", f"unknown distribution {d!r} (exponential | pareto)")
            dists.append(DISTRIBUTIONS[d])
        self.distributions = dists
        self.regular_fractions = [float(x) for x in self.regular_fractions]
        if any(not 0.0 <= x <= 1.0 for x in self.regular_fractions):
            bad("regular_fractions", "values must lie in [0, 1]")
        self.arrival_rates = [float(x) for x in self.arrival_rates]
        if any(not x > 0 for x in self.arrival_rates):
            bad("arrival_rates", "values must be > 0")
        if isinstance(self.slack, dict):
            self.slack = (self.slack.get("low"), self.slack.get("high"))
        if len(self.slack) != 2 or not 1.0 <= self.slack[0] <= self.slack[1]:
            bad("slack", f"need 1 <= low <= high, got {self.slack}")
        self.slack = (float(self.slack[0]), float(self.slack[1]))
        for name in ("flow_count", "repetitions", "workers"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                bad(name, "must be an integer >= 1")
        for name in ("delta", "capacity", "mean_size", "soft_multiplier"):
            if not getattr(self, name) > 0:
                bad(name, "must be > 0")
        if "pareto" in self.distributions and not 0 < self.pareto_min < self.mean_size:
            bad("pareto_min", "must satisfy 0 < pareto_min < mean_size")
        if not 0 < self.tail_percentile <= 1:
            bad("tail_percentile", "must be in (0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config document must be a JSON object")
        return cls.from_dict(data)

    def size_distribution(self, name: str):
        if name == "exponential":
            return Exponential(self.mean_size)
        return Pareto(self.mean_size, self.pareto_min)

    def workload_config(self, distribution: str, rate: float, fraction: float, rep: int) -> WorkloadConfig:
        return WorkloadConfig(
            arrival_rate=rate,
            flow_count=self.flow_count,
            size_distribution=self.size_distribution(distribution),
            regular_fraction=fraction,
            deadline_slack=self.slack,
            soft_threshold_multiplier=self.soft_multiplier,
            capacity=self.capacity,
            seed=self.base_seed + rep,
        )


@dataclass
class GridCellResult:
    policy: PolicyKind
    distribution: str
    arrival_rate: float
    regular_fraction: float
    replications: list = field(default_factory=list)
    workload_digests: list = field(default_factory=list)
    mean: dict = field(default_factory=dict)

    @property
    def key(self):
        return (self.distribution, self.arrival_rate, self.regular_fraction, _policy_rank(self.policy))

    def aggregate(self):
        for m in METRICS:
            vals = [getattr(r, m) for r in self.replications if getattr(r, m) is not None]
            self.mean[m] = float(np.mean(vals)) if vals else None


def _policy_rank(p: PolicyKind) -> int:
    return list(PolicyKind).index(p)


def _run_unit(args):
    config, dist, rate, fraction, rep = args
    wl = generate_workload(config.workload_config(dist, rate, fraction, rep))
    out = {}
    for policy in config.policies:
        sim = SimConfig(policy, config.capacity, config.delta)
        out[policy] = compute_report(wl, simulate(wl, sim), config.tail_percentile)
    return wl.digest(), out


def run_experiment(config: ExperimentConfig, progress: Callable[[int, int], None] | None = None) -> list[GridCellResult]:
    cells = {}
    units = []
    for dist in config.distributions:
        for rate in config.arrival_rates:
            for fraction in config.regular_fractions:
                for policy in config.policies:
                    cells[(policy, dist, rate, fraction)] = GridCellResult(policy, dist, rate, fraction)
                units.extend((config, dist, rate, fraction, rep) for rep in range(config.repetitions))

    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            outputs = pool.map(_run_unit, units, chunksize=max(1, len(units) // (8 * config.workers)))
            outputs = list(outputs)
    else:
        outputs = map(_run_unit, units)

    for i, (unit, (digest, reports)) in enumerate(zip(units, outputs), 1):
        _, dist, rate, fraction, rep = unit
        for policy, report in reports.items():
            cell = cells[(policy, dist, rate, fraction)]
            cell.replications.append(report)
            cell.workload_digests.append(digest)
            log.debug(
                "rep dist=%s rate=%g fraction=%g rep=%d seed=%d workload=%s policy=%s %s",
                dist, rate, fraction, rep, config.base_seed + rep, digest, policy.value,
                " ".join(f"{m}={_fmt(getattr(report, m))}" for m in METRICS),
            )
        if progress is not None:
            progress(i, len(units))

    results = sorted(cells.values(), key=lambda c: c.key)
    for cell in results:
        cell.aggregate()
    return results


def _fmt(x) -> str:
    return "" if x is None else f"{x:.6g}"


def normalized_columns(results: Iterable[GridCellResult]) -> dict:
    """Per (distribution, rate, fraction) group, each FCT metric divided by the group minimum."""
    groups = {}
    for c in results:
        groups.setdefault(c.key[:3], []).append(c)
    out = {}
    for group in groups.values():
        for m in NORMALIZED:
            present = [c.mean[m] for c in group if c.mean.get(m) is not None]
            lo = min(present) if present else None
            for c in group:
                v = c.mean.get(m)
                norm = None if v is None or lo is None or lo <= 0 else v / lo
                out.setdefault(id(c), {})[f"{m}_norm"] = norm
    return out


def emit_csv(results: list[GridCellResult]) -> str:
    if not results:
        raise ConfigError("no results to serialize")
    results = sorted(results, key=lambda c: c.key)
    norms = normalized_columns(results)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in results:
        w.writerow([
            c.policy.value, c.distribution, _fmt(c.arrival_rate), _fmt(c.regular_fraction),
            *(_fmt(c.mean[m]) for m in METRICS),
            *(_fmt(norms[id(c)][f"{m}_norm"]) for m in NORMALIZED),
        ])
    return buf.getvalue()


def replication_rows(results: list[GridCellResult], base_seed: int = 0) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("policy", "distribution", "arrival_rate", "regular_fraction",
                "replication", "seed", "workload", *METRICS))
    for c in sorted(results, key=lambda c: c.key):
        for r, (rep, digest) in enumerate(zip(c.replications, c.workload_digests)):
            w.writerow([
                c.policy.value, c.distribution, _fmt(c.arrival_rate), _fmt(c.regular_fraction),
                r, base_seed + r, digest, *(_fmt(getattr(rep, m)) for m in METRICS),
            ])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    """Read emitted CSV back; empty fields become ``None``."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for k, v in row.items():
            if k in ("policy", "distribution"):
                parsed[k] = v
            else:
                parsed[k] = None if v == "" else float(v)
        rows.append(parsed)
    return rows


def csv_filename(distribution: str, rate: float) -> str:
    return f"{distribution}_{rate:g}.csv"


def write_csvs(results: list[GridCellResult], outdir) -> list[Path]:
    """One CSV per (distribution, arrival rate), one chart column each."""
    outdir = Path(outdir)
    os.makedirs(outdir, exist_ok=True)
    by_panel = {}
    for c in results:
        by_panel.setdefault((c.distribution, c.arrival_rate), []).append(c)
    paths = []
    for (dist, rate), cells in sorted(by_panel.items()):
        path = outdir / csv_filename(dist, rate)
        path.write_text(emit_csv(cells))
        paths.append(path)
    return paths


def cell_means(results: list[GridCellResult], metric: str) -> dict:
    """{(policy, distribution, rate, fraction): mean value} for quick comparisons."""
    return {(c.policy, c.distribution, c.arrival_rate, c.regular_fraction): c.mean[metric] for c in results}
