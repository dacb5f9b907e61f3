"""Reference solvers: successive averages and day-to-day learning."""

from __future__ import annotations

from ..costs import CostModel, CostTable
from ..loading import FlowDistribution
from .certificate import single_user_swap_certificate
from .common import Clock, Evaluator, IterationLog, SolverConfig, SolverReport, safe_srg
from .steps import shift_flows


def _step_all(flows: FlowDistribution, table: CostTable, sigma_of) -> FlowDistribution:
    net = table.network
    counts = list(flows.counts)
    for od, opts in net.od_options.items():
        idx = [net.option_index[k] for k in opts]
        sub = [counts[i] for i in idx]
        if not sum(sub):
            continue
        best = idx.index(table.od_best[od])
        sigma = [0.0 if j == best else sigma_of(i, table.od_star[od]) for j, i in enumerate(idx)]
        for i, v in zip(idx, shift_flows(sub, best, sigma)):
            counts[i] = v
    return flows.with_counts(counts)


def _run(name, model, initial, config, evaluator, sigma_for_iteration, stop_on_fixed_point):
    config = config or SolverConfig()
    initial.validate()
    ev = evaluator or Evaluator(model)
    clock = Clock()
    q, t = initial, ev(initial)
    trace = [IterationLog(0, "init", t.gap, safe_srg(t), None, True, clock())]
    termination = "budget"
    for n in range(1, config.baseline_iterations + 1):
        qn = _step_all(q, t, sigma_for_iteration(n, t))
        if qn == q and stop_on_fixed_point:
            termination = "fixed-point"
            break
        q, t = qn, ev(qn)
        trace.append(IterationLog(n, name, t.gap, safe_srg(t), None, True, clock()))
    cert = single_user_swap_certificate(ev, q, t) if config.certify else None
    return SolverReport(name, q, t, trace, termination, cert, ev.simulations, clock())


def msa(model: CostModel, initial: FlowDistribution, config: SolverConfig | None = None,
        evaluator: Evaluator | None = None) -> SolverReport:
    """Average toward the all-on-best assignment with step 1/(n+1), n = 1, 2, ..."""

    def sigma(n, table):
        s = 1.0 / (n + 1)
        return lambda i, star: s

    return _run("msa", model, initial, config, evaluator, sigma, False)


def dtd_learning(model: CostModel, initial: FlowDistribution, config: SolverConfig | None = None,
                 evaluator: Evaluator | None = None) -> SolverReport:
    """Each day users of a costlier option switch to the best one with
    probability λ(C - C*)/C; expected counts are realized by rounding."""
    lam = (config or SolverConfig()).learning_rate

    def sigma(n, table):
        costs = table.option_cost
        counts = table.flows.counts

        def s(i, star):
            c = costs[i]
            return lam * (c - star) / c if counts[i] and c > star else 0.0

        return s

    return _run("dtd", model, initial, config, evaluator, sigma, True)
