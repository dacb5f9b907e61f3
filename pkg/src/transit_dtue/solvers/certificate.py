"""Single-user-swap equilibrium certificate."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..costs import CostModel, CostTable
from ..loading import FlowDistribution
from ..network import OptionKey
from .common import Evaluator, improves


@dataclass
class CertificateResult:
    passed: bool
    checked: int
    gap: float
    witness: tuple[OptionKey, OptionKey] | None = None
    witness_gap: float | None = None
    witness_flows: FlowDistribution | None = None
    witness_table: CostTable | None = None


def candidate_moves(table: CostTable) -> list[tuple[OptionKey, OptionKey]]:
    """(source, best) for every used option costlier than its OD's best."""
    net = table.network
    counts = table.flows.counts
    out = []
    for od, opts in net.od_options.items():
        best = table.od_best[od]
        star = table.od_star[od]
        for key in opts:
            i = net.option_index[key]
            if i != best and counts[i] > 0 and table.option_cost[i] > star:
                out.append((key, net.option_keys[best]))
    return out


def single_user_swap_certificate(
    evaluator: Evaluator | CostModel,
    flows: FlowDistribution,
    table: CostTable | None = None,
) -> CertificateResult:
    """Pass iff moving any one user to its OD's best option never lowers the gap.

    Every move is tried; on failure the witness is the move with the lowest gap.
    """
    ev = evaluator if isinstance(evaluator, Evaluator) else Evaluator(evaluator)
    table = table or ev(flows)
    base = table.gap
    best = None
    checked = 0
    for src, dst in candidate_moves(table):
        q = flows.moved(src, dst, 1)
        t = ev(q)
        checked += 1
        if improves(t.gap, base) and (best is None or t.gap < best[2].gap):
            best = ((src, dst), q, t)
    if best is None:
        return CertificateResult(True, checked, base)
    move, q, t = best
    return CertificateResult(False, checked, base, move, t.gap, q, t)


@dataclass
class DescentResult:
    flows: FlowDistribution
    table: CostTable
    moves: int
    certified: bool
    checked: int


def other_moves(table: CostTable) -> list[tuple[OptionKey, OptionKey]]:
    """One-user moves from used options to non-best options of the same OD.

    Sources are taken costliest first and each source's targets cheapest
    first; the list interleaves sources so every source's k-th target comes
    before any source's (k+1)-th.
    """
    net = table.network
    counts = table.flows.counts
    cost = table.option_cost
    per_source = []
    for od, opts in net.od_options.items():
        idx = [net.option_index[k] for k in opts]
        best = table.od_best[od]
        for i in idx:
            if counts[i]:
                targets = sorted((j for j in idx if j != i and j != best), key=lambda j: (cost[j], j))
                per_source.append((-cost[i], i, targets))
    per_source.sort(key=lambda e: (e[0], e[1]))
    out = []
    for rank in range(max((len(t) for _, _, t in per_source), default=0)):
        for _, i, targets in per_source:
            if rank < len(targets):
                out.append((net.option_keys[i], net.option_keys[targets[rank]]))
    return out


def single_moves(table: CostTable) -> list[tuple[OptionKey, OptionKey]]:
    """Every one-user move between two options of the same OD, cheapest target first."""
    net = table.network
    counts = table.flows.counts
    cost = table.option_cost
    scored = []
    for opts in net.od_options.values():
        idx = [net.option_index[k] for k in opts]
        for i in idx:
            if counts[i]:
                scored.extend((cost[j] - cost[i], i, j) for j in idx if j != i)
    scored.sort()
    return [(net.option_keys[i], net.option_keys[j]) for _, i, j in scored]


def pair_moves(table: CostTable):
    """Lazily yield two simultaneous one-user moves that the flows can afford."""
    moves = single_moves(table)
    flows = table.flows
    for a in range(len(moves)):
        for b in range(a + 1, len(moves)):
            (s1, d1), (s2, d2) = moves[a], moves[b]
            if s1 == d2 or s2 == d1 or (s1 == s2 and flows[s1] < 2):
                continue
            yield moves[a], moves[b]


def _grow(ev, flows, src, dst, q, t, spent):
    """Repeat an improving one-user move with 2, 4, 8... users while the gap keeps falling."""
    size = 1
    while flows[src] >= 2 * size and not spent():
        q2 = flows.moved(src, dst, 2 * size)
        t2 = ev(q2)
        if not improves(t2.gap, t.gap):
            break
        size, q, t = 2 * size, q2, t2
    return q, t


def swap_descent(
    ev: Evaluator,
    flows: FlowDistribution,
    table: CostTable,
    max_simulations: int | None = None,
    extra_moves: int = 0,
) -> DescentResult:
    """Apply improving single-user moves until none is left.

    Moves to each OD's best option are scanned in rotation and each
    improving one is applied as soon as it is found, grown to 2, 4, 8...
    users while that keeps improving. Ending with
    ``certified`` means a full scan of the final flows found no improving
    move, which is exactly a certificate pass.

    When that scan is clean, moves to the other options are tried until
    ``extra_moves`` consecutive ones fail, growing improving ones the
    same way. If none helps, up to
    ``extra_moves`` pairs of simultaneous moves are tried. Any improvement
    there restarts the scan.
    """
    moves = checked = 0
    cursor = 0
    start = ev.simulations

    def spent() -> bool:
        return max_simulations is not None and ev.simulations - start >= max_simulations

    while True:
        cands = candidate_moves(table)
        n = len(cands)
        applied = False
        for step in range(n):
            if spent():
                return DescentResult(flows, table, moves, False, checked)
            src, dst = cands[(cursor + step) % n]
            q = flows.moved(src, dst, 1)
            t = ev(q)
            checked += 1
            if improves(t.gap, table.gap):
                flows, table = _grow(ev, flows, src, dst, q, t, spent)
                moves += 1
                cursor = (cursor + step) % n
                applied = True
                break
        if applied or not extra_moves:
            if applied:
                continue
            return DescentResult(flows, table, moves, True, checked)

        others = other_moves(table)
        misses = pos = 0
        while others and misses < extra_moves and not spent():
            src, dst = others[pos % len(others)]
            pos += 1
            if flows[src] == 0:
                misses += 1
                continue
            q = flows.moved(src, dst, 1)
            t = ev(q)
            if not improves(t.gap, table.gap):
                misses += 1
                continue
            flows, table = _grow(ev, flows, src, dst, q, t, spent)
            moves += 1
            misses = 0
            applied = True
        if not applied:
            for (s1, d1), (s2, d2) in itertools.islice(pair_moves(table), extra_moves):
                if spent():
                    break
                q = flows.moved(s1, d1, 1).moved(s2, d2, 1)
                t = ev(q)
                if improves(t.gap, table.gap):
                    flows, table = q, t
                    moves += 1
                    applied = True
                    break
        if not applied:
            return DescentResult(flows, table, moves, True, checked)
