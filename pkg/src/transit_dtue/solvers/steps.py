"""Step-size components and integer flow shifting for one OD pair."""

from __future__ import annotations

import math
from typing import Sequence

from ..costs import DegenerateCostError


def od_relative_gap(costs: Sequence[float]) -> float:
    """(mean - min) / mean over all options of an OD."""
    if not costs:
        raise ValueError("OD has no options")
    lo = min(costs)
    if all(c == lo for c in costs):
        return 0.0
    mean = sum(costs) / len(costs)
    if mean <= 0:
        raise DegenerateCostError(f"mean option cost {mean} is not positive")
    return (mean - lo) / mean


def non_optimal(costs: Sequence[float], counts: Sequence[int] | None = None) -> list[int]:
    """Indices with cost above the OD minimum, restricted to used options when counts are given."""
    lo = min(costs)
    return [
        i for i, c in enumerate(costs)
        if c > lo and (counts is None or counts[i] > 0)
    ]


def option_ratios(costs: Sequence[float], counts: Sequence[int] | None = None) -> list[float]:
    """Cost share of each non-optimal option among the non-optimal options; 0 elsewhere."""
    idx = non_optimal(costs, counts)
    phi = [0.0] * len(costs)
    total = sum(costs[i] for i in idx)
    if not idx:
        return phi
    if total <= 0:
        raise DegenerateCostError("non-optimal options have non-positive total cost")
    for i in idx:
        phi[i] = costs[i] / total
    return phi


def step_sizes(theta: float, partial: float, phi: Sequence[float]) -> list[float]:
    return [theta * partial * p for p in phi]


def integerize(values: Sequence[float], total: int, best: int) -> list[int]:
    """Largest-remainder rounding of ``values`` to integers summing to ``total``.

    Equal remainders favour ``best``, then lower indices.
    """
    vals = [round(v, 9) for v in values]
    floors = [math.floor(v) for v in vals]
    short = total - sum(floors)
    if short < 0 or short > len(vals):
        raise ArithmeticError(f"cannot round {sum(vals)} to {total}")
    order = sorted(range(len(vals)), key=lambda i: (-(vals[i] - floors[i]), i != best, i))
    for i in order[:short]:
        floors[i] += 1
    if sum(floors) != total or min(floors, default=0) < 0:
        raise ArithmeticError("rounding broke conservation")
    return floors


def shift_flows(counts: Sequence[int], best: int, sigma: Sequence[float]) -> list[int]:
    """Move the fraction ``sigma[i]`` of every option's users to ``best``.

    This is q + σ(v - q) with v the all-on-best vector, rounded per OD.
    """
    if any(s < 0 or s > 1 for s in sigma):
        raise ValueError("step sizes must lie in [0, 1]")
    shifted = [float(q) for q in counts]
    moved = 0.0
    for i, (q, s) in enumerate(zip(counts, sigma)):
        if i != best and q and s:
            d = s * q
            shifted[i] = q - d
            moved += d
    shifted[best] = counts[best] + moved
    return integerize(shifted, sum(counts), best)
