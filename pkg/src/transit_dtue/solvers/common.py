"""Shared solver plumbing: memoized evaluation, configuration and reports."""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass, field

from ..costs import CostModel, CostTable, UndefinedSRGError, relative_gap
from ..loading import FlowDistribution, simulate


def improves(new: float, old: float) -> bool:
    """Strict decrease, ignoring float noise."""
    return new < old - 1e-9 * max(1.0, abs(old))


class Evaluator:
    """Simulate-and-cost with an LRU memo keyed by the count vector."""

    def __init__(self, model: CostModel, cache_size: int = 512):
        self.model = model
        self.network = model.network
        self.cache: OrderedDict[tuple[int, ...], CostTable] = OrderedDict()
        self.cache_size = cache_size
        self.simulations = 0
        self.calls = 0

    def __call__(self, flows: FlowDistribution) -> CostTable:
        self.calls += 1
        key = flows.counts
        hit = self.cache.get(key)
        if hit is not None:
            self.cache.move_to_end(key)
            return hit
        table = self.model.table(simulate(self.network, flows))
        self.simulations += 1
        self.cache[key] = table
        if len(self.cache) > self.cache_size:
            self.cache.popitem(last=False)
        return table


def safe_srg(table: CostTable) -> float:
    try:
        return relative_gap(table)
    except UndefinedSRGError:
        return float("nan")


@dataclass
class SolverConfig:
    """Iteration limits and knobs shared by all solvers."""

    max_outer: int = 200
    patience: int | None = None  # defaults to 5 * number of OD pairs
    max_inner: int = 20000
    max_simulations: int | None = None
    gss_tol: float = 0.01
    gss_max_evals: int = 20
    rounding: str = "largest-remainder"
    learning_rate: float = 0.5
    baseline_iterations: int = 50
    seed: int = 0
    certify: bool = True
    extra_moves: int = 2000  # moves to non-best options tried per descent pass, 0 disables

    def __post_init__(self) -> None:
        if min(self.max_outer, self.max_inner, self.gss_max_evals, self.baseline_iterations) < 1:
            raise ValueError("iteration limits must be >= 1")
        if self.extra_moves < 0:
            raise ValueError("extra_moves must be >= 0")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.gss_tol <= 0:
            raise ValueError("golden-section tolerance must be positive")
        if self.rounding != "largest-remainder":
            raise ValueError(f"unknown rounding policy {self.rounding}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning rate must lie in (0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> SolverConfig:
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown solver settings: {sorted(unknown)}")
        return cls(**known)


@dataclass
class IterationLog:
    iteration: int
    loop: str
    gap: float
    srg: float
    theta: float | None
    accepted: bool
    wall: float


@dataclass
class SolverReport:
    solver: str
    flows: FlowDistribution
    table: CostTable
    trace: list[IterationLog]
    termination: str
    certificate: object | None = None
    simulations: int = 0
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.table.gap

    @property
    def srg(self) -> float:
        return safe_srg(self.table)

    def accepted_gaps(self) -> list[float]:
        return [it.gap for it in self.trace if it.accepted]


class Clock:
    def __init__(self) -> None:
        self.t0 = time.perf_counter()

    def __call__(self) -> float:
        return time.perf_counter() - self.t0
