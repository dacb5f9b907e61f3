"""Exhaustive search over all integer flow distributions of a tiny instance."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, prod

from ..costs import CostModel
from ..loading import FlowDistribution
from .common import Evaluator, improves

ENUMERATION_LIMIT = 10**6


class InstanceTooLargeError(ValueError):
    pass


@dataclass
class OracleResult:
    min_gap: float
    minimizers: list[FlowDistribution]
    enumerated: int


def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def enumeration_size(model: CostModel) -> int:
    net = model.network
    return prod(comb(od.demand + len(net.od_options[k]) - 1, len(net.od_options[k]) - 1)
                for k, od in net.ods.items())


def brute_force_oracle(model: CostModel, limit: int = ENUMERATION_LIMIT) -> OracleResult:
    net = model.network
    size = enumeration_size(model)
    if size > limit:
        raise InstanceTooLargeError(f"{size} distributions exceed the enumeration limit of {limit}")
    ev = Evaluator(model, cache_size=1)
    per_od = [
        ([net.option_index[k] for k in net.od_options[od]], list(compositions(q.demand, len(net.od_options[od]))))
        for od, q in net.ods.items()
    ]
    best = None
    minimizers: list[FlowDistribution] = []
    n = 0
    for combo in itertools.product(*(c for _, c in per_od)):
        counts = [0] * len(net.option_keys)
        for (idx, _), parts in zip(per_od, combo):
            for i, v in zip(idx, parts):
                counts[i] = v
        fd = FlowDistribution(net, counts)
        g = ev(fd).gap
        n += 1
        if best is None or improves(g, best):
            best, minimizers = g, [fd]
        elif not improves(best, g):
            minimizers.append(fd)
    return OracleResult(best if best is not None else 0.0, minimizers, n)
