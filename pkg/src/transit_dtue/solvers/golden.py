"""Golden-section line search on [lo, hi]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass
class LineSearchResult:
    theta: float
    value: float
    evaluations: int
    bracket: tuple[float, float]
    history: list[tuple[float, float]] = field(default_factory=list)


def golden_section(
    f: Callable[[float], float],
    lo: float = 0.0,
    hi: float = 1.0,
    tol: float = 0.01,
    max_evals: int = 20,
) -> LineSearchResult:
    """Minimize a (presumed unimodal) ``f`` and return the best point evaluated.

    Ties go to the smaller argument, so a flat function drifts to ``lo``.
    The endpoints themselves are never evaluated.
    """
    if tol <= 0 or max_evals < 2:
        raise ValueError("need tol > 0 and max_evals >= 2")
    history: list[tuple[float, float]] = []

    def ev(x: float) -> float:
        v = f(x)
        history.append((x, v))
        return v

    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = ev(c), ev(d)
    while hi - lo > tol and len(history) < max_evals:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = ev(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = ev(d)
    x, v = min(history, key=lambda p: (p[1], p[0]))
    return LineSearchResult(x, v, len(history), (lo, hi), history)
