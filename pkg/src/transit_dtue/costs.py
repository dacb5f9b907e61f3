"""Generalized costs, option averages, system gap and relative gap."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .loading import FlowDistribution, LoadingResult, free_flow_cost_probe, simulate
from .network import Network, OptionKey


class DegenerateCostError(ValueError):
    """Costs do not allow a relative measure (a non-positive reference cost)."""


class UndefinedSRGError(DegenerateCostError):
    pass


@dataclass(frozen=True)
class CostWeights:
    alpha: float = 10
    beta: float = 1
    gamma: float = 10

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("cost weights must be non-negative")

    def scaled(self, factor: float) -> CostWeights:
        return CostWeights(self.alpha * factor, self.beta * factor, self.gamma * factor)


SYNTHETIC_WEIGHTS = CostWeights(10, 1, 10)
MTR_WEIGHTS = CostWeights(18, 5, 12)


def individual_cost(arrival: int, option: int, in_vehicle: int, weights: CostWeights, t_star: int):
    """Waiting cost plus early or late schedule delay for one user."""
    w = arrival - in_vehicle - option
    if w < 0:
        raise AssertionError(
            f"negative waiting time: arrival {arrival} < departure {option} + in-vehicle {in_vehicle}"
        )
    early = t_star - arrival if arrival < t_star else 0
    late = arrival - t_star if arrival > t_star else 0
    return weights.alpha * w + weights.beta * early + weights.gamma * late


@dataclass
class CostTable:
    """Costs of one loaded flow distribution.

    ``option_cost`` holds C_k(t,r) for every option in ``network.option_keys``
    order; unused options carry their free-flow cost.
    """

    network: Network
    flows: FlowDistribution
    option_sum: list[float]
    option_cost: list[float]
    free_flow: list[float]
    od_best: dict[str, int]
    od_star: dict[str, float]
    od_gap: dict[str, float]
    gap: float
    stranded: int
    penalty: float

    def cost(self, key: OptionKey) -> float:
        return self.option_cost[self.network.option_index[OptionKey(*key)]]

    def best_option(self, od: str) -> OptionKey:
        return self.network.option_keys[self.od_best[od]]

    def ideal_cost(self) -> float:
        return sum(self.od_star[od] * self.network.ods[od].demand for od in self.network.ods)

    def total_cost(self) -> float:
        return sum(self.option_sum)

    def srg(self) -> float:
        return relative_gap(self)

    def od_mean_cost(self, od: str) -> float:
        q = self.network.ods[od].demand
        if q == 0:
            return 0.0
        idx = self.network.option_index
        return sum(self.option_sum[idx[k]] for k in self.network.od_options[od]) / q


class CostModel:
    """Network plus weights, with cached free-flow option costs."""

    def __init__(self, network: Network, weights: CostWeights | None = None):
        self.network = network
        self.weights = weights or CostWeights()
        self.in_vehicle = {rid: network.in_vehicle_time(rid) for rid in network.routes}
        t_star = {k: od.desired_arrival for k, od in network.ods.items()}
        self.t_star = t_star
        ff: list[float | None] = []
        for key in network.option_keys:
            probe = free_flow_cost_probe(network, key)
            if probe is None:
                ff.append(None)
            else:
                _, arr = probe
                ff.append(individual_cost(arr, key.time, self.in_vehicle[key.route], self.weights, t_star[key.od]))
        finite = [c for c in ff if c is not None]
        # stranded users pay a constant penalty so gaps stay comparable across evaluations;
        # it scales with the weights so relative gaps do not depend on their unit
        penalty = 10 * max(finite, default=0)
        if penalty <= 0:
            times = [t for runs in network.runs.values() for r in runs for t in (r.departures[0], r.arrivals[-1])]
            span = max(times) - min(times) + 1
            w = self.weights
            penalty = 10 * max(w.alpha, w.beta, w.gamma) * span
        self.penalty = penalty
        self.free_flow = [self.penalty if c is None else c for c in ff]
        # per option: departure second + in-vehicle time, and desired arrival
        self._base = [k.time + self.in_vehicle[k.route] for k in network.option_keys]
        self._tstar = [t_star[k.od] for k in network.option_keys]
        self._od_idx = {od: [network.option_index[k] for k in opts] for od, opts in network.od_options.items()}

    def table(self, result: LoadingResult) -> CostTable:
        net = self.network
        keys = net.option_keys
        counts = result.flows.counts
        sums = [0] * len(keys)
        a, b, g = self.weights.alpha, self.weights.beta, self.weights.gamma
        base, tstar = self._base, self._tstar
        for opt, _, count, arr, _ in result.arrivals:
            w = arr - base[opt]
            if w < 0:
                k = keys[opt]
                individual_cost(arr, k.time, self.in_vehicle[k.route], self.weights, tstar[opt])
            ts = tstar[opt]
            sums[opt] += count * (a * w + (b * (ts - arr) if arr < ts else g * (arr - ts)))
        stranded = 0
        for p in result.stranded:
            sums[p.option] += self.penalty * p.count
            stranded += p.count
        costs = [s / n if n else ff for s, n, ff in zip(sums, counts, self.free_flow)]
        od_best: dict[str, int] = {}
        od_star: dict[str, float] = {}
        od_gap: dict[str, float] = {}
        for od, idx in self._od_idx.items():
            # options are sorted by (time, route), so the first minimum wins ties
            best = min(idx, key=costs.__getitem__)
            star = costs[best]
            od_best[od] = best
            od_star[od] = star
            excess = sum(sums[i] for i in idx) - star * sum(counts[i] for i in idx)
            od_gap[od] = excess if excess > 0 else 0.0
        return CostTable(
            net, result.flows, sums, costs, self.free_flow, od_best, od_star, od_gap,
            sum(od_gap.values()), stranded, self.penalty,
        )

    def evaluate(self, flows: FlowDistribution) -> CostTable:
        return self.table(simulate(self.network, flows))


def option_average_cost(table: CostTable, key: OptionKey) -> float:
    return table.cost(key)


def system_gap(table: CostTable) -> float:
    return table.gap


def od_gap(costs, counts) -> float:
    """Σ (C - C*)·q over one OD's options, with C* the cheapest option."""
    star = min(costs)
    return sum((c - star) * q for c, q in zip(costs, counts))


def relative_gap(table: CostTable) -> float:
    """System gap over the ideal cost Σ_k Q_k·C_k*."""
    net = table.network
    if sum(od.demand for od in net.ods.values()) == 0:
        return 0.0
    for od in net.ods.values():
        if od.demand > 0 and table.od_star[od.id] <= 0:
            raise UndefinedSRGError(
                f"OD {od.id}: optimal cost {table.od_star[od.id]} is not positive, relative gap undefined"
            )
    denom = table.ideal_cost()
    if not math.isfinite(denom) or denom <= 0:
        raise UndefinedSRGError(f"ideal system cost {denom} is not positive")
    return table.gap / denom


srg = relative_gap
