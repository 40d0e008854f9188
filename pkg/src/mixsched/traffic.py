"""Synthetic workloads: Poisson arrivals, Exponential/Pareto sizes, deadline classes.

A workload is held column-wise in :class:`Workload` (numpy arrays) because the
experiment grid generates thousands of 10^4-flow workloads. :class:`FlowSpec`
is the per-flow view used by tests, the oracle and the text dump format.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError


class Softness(enum.Enum):
    SOFT = "soft"
    HARD = "hard"


@dataclass(frozen=True)
class FlowSpec:
    """One flow. ``deadline is None`` marks a regular flow."""

    id: int
    arrival: float
    volume: float
    deadline: float | None = None
    softness: Softness | None = None

    def __post_init__(self):
        if not self.volume > 0:
            raise ConfigError(f"flow {self.id}: volume must be > 0, got {self.volume}")
        if not self.arrival >= 0:
            raise ConfigError(f"flow {self.id}: arrival must be >= 0, got {self.arrival}")
        if self.deadline is not None:
            if not self.deadline > self.arrival:
                raise ConfigError(f"flow {self.id}: deadline must exceed arrival")
            if self.softness is None:
                raise ConfigError(f"flow {self.id}: deadline flow needs a softness")
        elif self.softness is not None:
            raise ConfigError(f"flow {self.id}: regular flow cannot have a softness")

    @property
    def is_deadline(self) -> bool:
        return self.deadline is not None

    @property
    def is_soft(self) -> bool:
        return self.softness is Softness.SOFT


# Size distributions


@dataclass(frozen=True)
class Exponential:
    mean: float = 1.0

    def __post_init__(self):
        if not self.mean > 0:
            raise ConfigError(f"exponential mean must be > 0, got {self.mean}")

    def ppf(self, u):
        """Inverse CDF at ``u`` in [0, 1)."""
        return -self.mean * np.log1p(-np.asarray(u, dtype=float))


@dataclass(frozen=True)
class Pareto:
    """Pareto sizes with the shape chosen so the distribution has ``mean``."""

    mean: float = 1.0
    minimum: float = 0.1
    shape: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "shape", pareto_shape(self.mean, self.minimum))

    def ppf(self, u):
        return self.minimum * (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / self.shape)


SizeDistribution = Exponential | Pareto


def pareto_shape(mean: float, minimum: float) -> float:
    """Shape ``a`` with ``a * minimum / (a - 1) == mean``."""
    if not minimum > 0:
        raise ConfigError(f"pareto minimum must be > 0, got {minimum}")
    if not mean > minimum:
        raise ConfigError(
            f"pareto mean ({mean}) must exceed minimum ({minimum}) for a finite-mean shape"
        )
    return mean / (mean - minimum)


def _uniform_open_zero(rng: np.random.Generator, size) -> np.ndarray:
    # Exponential ppf(0) == 0 would give a zero-volume flow.
    u = rng.random(size)
    bad = u == 0.0
    while bad.any():
        u[bad] = rng.random(int(bad.sum()))
        bad = u == 0.0
    return u


def sample_size(dist: SizeDistribution, rng: np.random.Generator, size=None):
    """Draw flow volumes by inverse-CDF sampling."""
    if size is None:
        return float(sample_size(dist, rng, 1)[0])
    return dist.ppf(_uniform_open_zero(rng, size))


def gen_arrivals(rate: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Poisson arrival times (cumulative exponential gaps with mean ``1/rate``)."""
    if not rate > 0:
        raise ConfigError(f"arrival rate must be > 0, got {rate}")
    if count < 0:
        raise ConfigError(f"arrival count must be >= 0, got {count}")
    gaps = -np.log1p(-_uniform_open_zero(rng, count)) / rate
    return np.cumsum(gaps)


def assign_class(rng: np.random.Generator, regular_fraction: float, size=None):
    """True where the flow is regular; each flow independently with prob ``regular_fraction``."""
    if not 0.0 <= regular_fraction <= 1.0:
        raise ConfigError(f"regular_fraction must be in [0, 1], got {regular_fraction}")
    u = rng.random(size)
    return u < regular_fraction


def assign_deadline(arrival, volume, capacity: float, slack, rng: np.random.Generator):
    """Deadline = arrival + s * volume / capacity, with s ~ U[slack.low, slack.high]."""
    low, high = slack
    if low < 1.0:
        raise ConfigError(f"slack low must be >= 1 (deadline infeasible otherwise), got {low}")
    if high < low:
        raise ConfigError(f"slack high ({high}) must be >= low ({low})")
    arrival = np.asarray(arrival, dtype=float)
    s = rng.uniform(low, high, size=arrival.shape)
    out = arrival + s * np.asarray(volume, dtype=float) / capacity
    return float(out) if out.ndim == 0 else out


def classify_softness(volume: float, mean_size: float, multiplier: float = 2.0) -> Softness:
    return Softness.SOFT if volume > multiplier * mean_size else Softness.HARD


# Workload container


@dataclass
class Workload:
    """Column-wise flow table sorted by arrival; flow ids are row indices."""

    arrival: np.ndarray
    volume: np.ndarray
    deadline: np.ndarray  # +inf for regular flows
    soft: np.ndarray  # bool, False for regular flows

    def __post_init__(self):
        self.arrival = np.ascontiguousarray(self.arrival, dtype=float)
        self.volume = np.ascontiguousarray(self.volume, dtype=float)
        self.deadline = np.ascontiguousarray(self.deadline, dtype=float)
        self.soft = np.ascontiguousarray(self.soft, dtype=bool)
        n = len(self.arrival)
        if not (len(self.volume) == len(self.deadline) == len(self.soft) == n):
            raise ConfigError("workload columns have different lengths")
        if n:
            if np.any(np.diff(self.arrival) < 0):
                raise ConfigError("workload must be sorted by arrival")
            if np.any(self.volume <= 0) or self.arrival[0] < 0:
                raise ConfigError("workload has non-positive volume or negative arrival")

    def __len__(self):
        return len(self.arrival)

    @property
    def is_deadline(self) -> np.ndarray:
        return np.isfinite(self.deadline)

    @property
    def regular(self) -> np.ndarray:
        return ~np.isfinite(self.deadline)

    @classmethod
    def from_flows(cls, flows: Iterable[FlowSpec]) -> "Workload":
        flows = list(flows)
        for i, f in enumerate(flows):
            if f.id != i:
                raise ConfigError(f"flow ids must be 0..n-1 in arrival order, got {f.id} at {i}")
        return cls(
            arrival=np.array([f.arrival for f in flows], dtype=float),
            volume=np.array([f.volume for f in flows], dtype=float),
            deadline=np.array(
                [math.inf if f.deadline is None else f.deadline for f in flows], dtype=float
            ),
            soft=np.array([f.is_soft for f in flows], dtype=bool),
        )

    def flows(self) -> list[FlowSpec]:
        out = []
        for i in range(len(self)):
            d = float(self.deadline[i])
            if math.isfinite(d):
                softness = Softness.SOFT if self.soft[i] else Softness.HARD
                out.append(FlowSpec(i, float(self.arrival[i]), float(self.volume[i]), d, softness))
            else:
                out.append(FlowSpec(i, float(self.arrival[i]), float(self.volume[i])))
        return out

    def digest(self) -> str:
        h = hashlib.sha256()
        for col in (self.arrival, self.volume, self.deadline, self.soft):
            h.update(col.tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class WorkloadConfig:
    arrival_rate: float = 1.0
    flow_count: int = 10000
    size_distribution: SizeDistribution = field(default_factory=Exponential)
    regular_fraction: float = 0.5
    deadline_slack: tuple[float, float] = (1.0, 4.0)
    soft_threshold_multiplier: float = 2.0
    capacity: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.arrival_rate > 0:
            raise ConfigError(f"arrival_rate must be > 0, got {self.arrival_rate}")
        if not self.flow_count > 0:
            raise ConfigError(f"flow_count must be > 0, got {self.flow_count}")
        if not 0.0 <= self.regular_fraction <= 1.0:
            raise ConfigError(f"regular_fraction must be in [0, 1], got {self.regular_fraction}")
        low, high = self.deadline_slack
        if not 1.0 <= low <= high:
            raise ConfigError(f"deadline_slack must satisfy 1 <= low <= high, got {self.deadline_slack}")
        if not self.capacity > 0:
            raise ConfigError(f"capacity must be > 0, got {self.capacity}")


def generate_workload(config: WorkloadConfig) -> Workload:
    """Draw a workload from one seeded generator.

    Arrivals, sizes, class draws and slack draws are taken as whole columns in
    that order, so two configs that differ only in ``regular_fraction`` share
    arrivals and sizes.
    """
    rng = np.random.default_rng(config.seed)
    n = config.flow_count
    arrival = gen_arrivals(config.arrival_rate, n, rng)
    volume = sample_size(config.size_distribution, rng, n)
    regular = assign_class(rng, config.regular_fraction, n)
    deadline = assign_deadline(arrival, volume, config.capacity, config.deadline_slack, rng)
    deadline = np.where(regular, math.inf, deadline)
    threshold = config.soft_threshold_multiplier * config.size_distribution.mean
    soft = ~regular & (volume > threshold)
    return Workload(arrival, volume, deadline, soft)


# Text dump: ``id arrival volume class [deadline softness]`` per line.


def dump_workload(flows: Sequence[FlowSpec] | Workload) -> str:
    if isinstance(flows, Workload):
        flows = flows.flows()
    lines = []
    for f in flows:
        if f.is_deadline:
            lines.append(f"{f.id} {f.arrival!r} {f.volume!r} deadline {f.deadline!r} {f.softness.value}")
        else:
            lines.append(f"{f.id} {f.arrival!r} {f.volume!r} regular")
    return "".join(line + "\n" for line in lines)


def load_workload(text: str) -> list[FlowSpec]:
    flows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            fid, arrival, volume, cls = int(parts[0]), float(parts[1]), float(parts[2]), parts[3]
            if cls == "regular" and len(parts) == 4:
                flows.append(FlowSpec(fid, arrival, volume))
            elif cls == "deadline" and len(parts) == 6:
                flows.append(FlowSpec(fid, arrival, volume, float(parts[4]), Softness(parts[5])))
            else:
                raise ValueError(cls)
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"line {lineno}: cannot parse flow {line!r}") from exc
    return flows
