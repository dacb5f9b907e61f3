"""Adaptive gap-based descent: a system-wide loop then a one-OD-at-a-time loop."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from ..costs import CostModel, CostTable
from ..loading import FlowDistribution
from .certificate import CertificateResult, single_user_swap_certificate, swap_descent
from .common import Clock, Evaluator, IterationLog, SolverConfig, SolverReport, improves, safe_srg
from .golden import golden_section
from .steps import od_relative_gap, option_ratios, shift_flows

log = logging.getLogger(__name__)


@dataclass
class ODStep:
    """Direction data for one OD: option indices, counts, best position, ∂ and φ."""

    indices: list[int]
    counts: list[int]
    best: int
    partial: float
    phi: list[float]

    @property
    def movable(self) -> bool:
        return self.partial > 0 and any(self.phi)


def od_steps(table: CostTable, ods: list[str] | None = None, targeted: bool = False) -> list[ODStep]:
    net = table.network
    out = []
    for od in ods if ods is not None else list(net.od_options):
        idx = [net.option_index[k] for k in net.od_options[od]]
        costs = [table.option_cost[i] for i in idx]
        counts = [table.flows.counts[i] for i in idx]
        if sum(counts) == 0:
            continue
        best = idx.index(table.od_best[od])
        partial = 1.0 if targeted else od_relative_gap(costs)
        out.append(ODStep(idx, counts, best, partial, option_ratios(costs, counts)))
    return out


def apply_steps(flows: FlowDistribution, steps: list[ODStep], theta: float) -> FlowDistribution:
    counts = list(flows.counts)
    for s in steps:
        if not s.movable:
            continue
        sigma = [theta * s.partial * p for p in s.phi]
        for i, q in zip(s.indices, shift_flows(s.counts, s.best, sigma)):
            counts[i] = q
    return flows.with_counts(counts)


def _search(ev: Evaluator, flows: FlowDistribution, steps: list[ODStep], config: SolverConfig):
    def f(theta: float) -> float:
        return ev(apply_steps(flows, steps, theta)).gap

    ls = golden_section(f, tol=config.gss_tol, max_evals=config.gss_max_evals)
    q = apply_steps(flows, steps, ls.theta)
    return ls.theta, q, ev(q)


def adagdd(
    model: CostModel,
    initial: FlowDistribution,
    config: SolverConfig | None = None,
    evaluator: Evaluator | None = None,
) -> SolverReport:
    config = config or SolverConfig()
    initial.validate()
    ev = evaluator or Evaluator(model)
    clock = Clock()
    net = model.network
    q, t = initial, ev(initial)
    trace = [IterationLog(0, "init", t.gap, safe_srg(t), None, True, clock())]
    it = 0

    def out_of_budget() -> bool:
        return config.max_simulations is not None and ev.simulations >= config.max_simulations

    termination = None
    # system-based loop: all ODs shift at once
    for _ in range(config.max_outer):
        if t.gap <= 0:
            termination = "converged"
            break
        if out_of_budget():
            termination = "budget"
            break
        steps = od_steps(t)
        if not any(s.movable for s in steps):
            break
        theta, qn, tn = _search(ev, q, steps, config)
        it += 1
        ok = tn.gap <= t.gap and qn != q
        trace.append(IterationLog(it, "outer", tn.gap, safe_srg(tn), theta, ok, clock()))
        log.debug("outer %d gap %.6g theta %.4f accepted %s", it, tn.gap, theta, ok)
        if not ok:
            break
        q, t = qn, tn

    # OD-based loop: one random OD per iteration, full relative gap
    rng = random.Random(config.seed)
    ods = [od for od in net.ods if net.ods[od].demand > 0]
    patience = config.patience or 5 * max(1, len(net.ods))
    misses = 0
    certificate = None
    inner = 0
    while termination is None:
        if t.gap <= 0:
            termination = "converged"
            break
        if inner >= config.max_inner or out_of_budget():
            termination = "budget"
            break
        if misses >= patience:
            budget = None if config.max_simulations is None else config.max_simulations - ev.simulations
            d = swap_descent(ev, q, t, budget, config.extra_moves)
            it += 1
            q, t = d.flows, d.table
            trace.append(IterationLog(it, "swap", t.gap, safe_srg(t), None, d.moves > 0, clock()))
            log.debug("swap descent at %d: %d moves, gap %.6g, certified %s", it, d.moves, t.gap, d.certified)
            if d.certified and d.moves == 0:
                certificate = CertificateResult(True, d.checked, t.gap)
                termination = "converged"
                break
            if not d.certified:
                termination = "budget"
                break
            misses = 0
            continue
        inner += 1
        it += 1
        od = ods[rng.randrange(len(ods))] if ods else None
        steps = od_steps(t, [od], targeted=True) if od else []
        if not any(s.movable for s in steps):
            misses += 1
            trace.append(IterationLog(it, "inner", t.gap, safe_srg(t), None, False, clock()))
            continue
        theta, qn, tn = _search(ev, q, steps, config)
        if improves(tn.gap, t.gap):
            q, t, misses, ok = qn, tn, 0, True
        elif tn.gap <= t.gap and qn != q:
            q, t, ok = qn, tn, True
            misses += 1
        else:
            ok = False
            misses += 1
        trace.append(IterationLog(it, "inner", tn.gap if ok else t.gap, safe_srg(t), theta, ok, clock()))
        if ok:
            log.debug("inner %d od %s gap %.6g srg %.4f sims %d", it, od, t.gap, safe_srg(t), ev.simulations)

    if config.certify and (certificate is None or certificate.gap != t.gap or termination != "converged"):
        certificate = single_user_swap_certificate(ev, q, t)
    return SolverReport(
        "adagdd", q, t, trace, termination, certificate, ev.simulations, clock(),
        {"patience": patience, "inner_iterations": inner},
    )
