"""Event-driven, capacity-constrained network loading with FCFS platform queues."""

from __future__ import annotations

import csv
import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple

from .network import Network, NoPathError, OptionKey


class FlowInputError(ValueError):
    """A flow distribution does not match the network's option set."""


class FlowDistribution:
    """Integer user counts per option, aligned with ``network.option_keys``.

    Equality and hashing use the count vector only, so distributions over the
    same network can be memoized cheaply.
    """

    __slots__ = ("network", "counts")

    def __init__(self, network: Network, counts: Iterable[int]):
        self.network = network
        self.counts = tuple(int(c) for c in counts)
        if len(self.counts) != len(network.option_keys):
            raise FlowInputError(
                f"expected {len(network.option_keys)} counts, got {len(self.counts)}"
            )

    @classmethod
    def zeros(cls, network: Network) -> FlowDistribution:
        return cls(network, [0] * len(network.option_keys))

    @classmethod
    def from_mapping(cls, network: Network, mapping: Mapping[OptionKey | tuple, int]) -> FlowDistribution:
        counts = [0] * len(network.option_keys)
        for key, n in mapping.items():
            key = OptionKey(*key)
            idx = network.option_index.get(key)
            if idx is None:
                raise FlowInputError(f"unknown option {key}")
            counts[idx] += int(n)
        return cls(network, counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FlowDistribution) and self.counts == other.counts

    def __hash__(self) -> int:
        return hash(self.counts)

    def __repr__(self) -> str:
        return f"FlowDistribution({dict(self.items())})"

    def __getitem__(self, key: OptionKey | tuple) -> int:
        return self.counts[self.network.option_index[OptionKey(*key)]]

    def items(self) -> Iterator[tuple[OptionKey, int]]:
        """Non-zero entries in option order."""
        for k, n in zip(self.network.option_keys, self.counts):
            if n:
                yield k, n

    def od_total(self, od: str) -> int:
        idx = self.network.option_index
        return sum(self.counts[idx[k]] for k in self.network.od_options[od])

    def validate(self) -> None:
        """Raise unless counts are non-negative and sum to each OD's demand."""
        if any(c < 0 for c in self.counts):
            raise FlowInputError("negative option count")
        for od in self.network.ods.values():
            got = self.od_total(od.id)
            if got != od.demand:
                raise FlowInputError(f"OD {od.id}: flows sum to {got}, demand is {od.demand}")

    def with_counts(self, counts: Iterable[int]) -> FlowDistribution:
        return FlowDistribution(self.network, counts)

    def moved(self, src: OptionKey, dst: OptionKey, n: int = 1) -> FlowDistribution:
        counts = list(self.counts)
        i, j = self.network.option_index[src], self.network.option_index[dst]
        if counts[i] < n:
            raise FlowInputError(f"cannot move {n} users out of {src}")
        counts[i] -= n
        counts[j] += n
        return FlowDistribution(self.network, counts)

    def to_csv(self, path: str | Path, include_zero: bool = False) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["od_id", "option_time", "route_id", "count"])
            for k, n in zip(self.network.option_keys, self.counts):
                if n or include_zero:
                    w.writerow([k.od, k.time, k.route, n])

    @classmethod
    def read_csv(cls, network: Network, path: str | Path) -> FlowDistribution:
        mapping: dict[OptionKey, int] = {}
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                key = OptionKey(row["od_id"], int(row["option_time"]), row["route_id"])
                mapping[key] = mapping.get(key, 0) + int(row["count"])
        return cls.from_mapping(network, mapping)


@dataclass
class FlowRecord:
    """Flows of one run at one station.

    ``arrived`` is the load reaching the station, ``m`` alights, ``y`` stays
    on board, ``x = capacity - y`` seats remain, ``g`` users wait on the
    platform, ``f`` of them board and ``h`` are denied; ``z = y + f`` departs.
    ``inflow`` counts users who joined the platform since the previous run of
    the line left it, and ``h_prev`` is what that run left behind.
    """

    station: str
    run: str
    position: int
    capacity: int
    arrived: int = 0
    m: int = 0
    y: int = 0
    x: int = 0
    g: int = 0
    f: int = 0
    h: int = 0
    z: int = 0
    inflow: int = 0
    h_prev: int = 0
    m_od: dict[str, int] = field(default_factory=dict)
    f_od: dict[str, int] = field(default_factory=dict)
    h_od: dict[str, int] = field(default_factory=dict)
    inflow_od: dict[str, int] = field(default_factory=dict)
    h_prev_od: dict[str, int] = field(default_factory=dict)


class ArrivalPiece(NamedTuple):
    """Users ``first .. first+count-1`` of an option reaching their destination."""

    option: int
    first: int
    count: int
    time: int
    run: str


class StrandedPiece(NamedTuple):
    option: int
    first: int
    count: int
    station: str
    line: str


@dataclass
class LoadingResult:
    network: Network
    flows: FlowDistribution
    arrivals: list[ArrivalPiece]
    M: dict[tuple[str, str, str], int]
    stranded: list[StrandedPiece]
    records: dict[tuple[str, str], FlowRecord] | None = None

    @property
    def stranded_count(self) -> int:
        return sum(p.count for p in self.stranded)

    def arrival_times(self, key: OptionKey) -> list[int | None]:
        """Arrival second of every user of an option, indexed by user; None if stranded."""
        idx = self.network.option_index[OptionKey(*key)]
        out: list[int | None] = [None] * self.flows.counts[idx]
        for p in self.arrivals:
            if p.option == idx:
                out[p.first : p.first + p.count] = [p.time] * p.count
        return out

    def boarding_pieces(self, key: OptionKey) -> list[ArrivalPiece]:
        idx = self.network.option_index[OptionKey(*key)]
        return sorted((p for p in self.arrivals if p.option == idx), key=lambda p: p.first)

    def write_trace(self, path: str | Path) -> None:
        if self.records is None:
            raise ValueError("simulation ran without records")
        rows = sorted(
            self.records.values(),
            key=lambda r: (self.network.run_by_id[r.run].line, self.network.run_by_id[r.run].index, r.position),
        )
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["run", "station", "g", "f", "h", "z", "m", "x", "y"])
            for r in rows:
                w.writerow([r.run, r.station, r.g, r.f, r.h, r.z, r.m, r.x, r.y])


class _Plan:
    """Per-network constants used by every simulation, indexed by small integers."""

    def __init__(self, network: Network):
        od_rank = {od: i for i, od in enumerate(network.ods)}
        route_rank = {}
        for od in network.ods.values():
            for i, r in enumerate(od.routes):
                route_rank[r.id] = i
        self.platforms: list[tuple[str, str]] = []
        pid: dict[tuple[str, str], int] = {}

        def platform(station: str, line: str) -> int:
            key = (station, line)
            if key not in pid:
                pid[key] = len(self.platforms)
                self.platforms.append(key)
            return pid[key]

        # runs get global integer ids
        self.run_ids: list[str] = []
        self.run_line: list[str] = []
        self.run_stations: list[tuple[str, ...]] = []
        self.run_cap: list[int] = []
        self.run_platforms: list[tuple[int, ...]] = []
        static = []
        for lid in sorted(network.runs):
            line = network.lines[lid]
            last = len(line.stations) - 1
            plats = tuple(platform(s, lid) for s in line.stations)
            for run in network.runs[lid]:
                g = len(self.run_ids)
                self.run_ids.append(run.id)
                self.run_line.append(lid)
                self.run_stations.append(line.stations)
                self.run_cap.append(line.capacity)
                self.run_platforms.append(plats)
                for pos in range(last + 1):
                    if pos > 0:
                        static.append((run.arrivals[pos], 0, g, pos))
                    if pos < last:
                        static.append((run.departures[pos], 1, g, pos))
        static.sort()
        self.static_events = static
        # per option: queue-priority fields and legs as (board platform, alight position)
        self.options = []
        for key in network.option_keys:
            route = network.routes[key.route]
            legs = []
            for leg in route.legs:
                line = network.lines[leg.line]
                legs.append((platform(leg.board, leg.line), line.position(leg.alight)))
            self.options.append((od_rank[key.od], route_rank[key.route], key.time, tuple(legs), key.od))


def _plan(network: Network) -> _Plan:
    plan = network.__dict__.get("_loading_plan")
    if plan is None:
        plan = _Plan(network)
        network.__dict__["_loading_plan"] = plan
    return plan


def simulate(
    network: Network,
    flows: FlowDistribution | Mapping[OptionKey, int],
    record: bool = False,
    capacity_override: int | None = None,
) -> LoadingResult:
    """Load ``flows`` onto the timetable.

    Users queue at their origin at the chosen option's departure second and
    ride the route's legs in order. Platform queues are FCFS on
    (platform arrival second, OD order, route order, option, user index);
    a full train leaves the rest of the queue for the next run of the line.
    Arrivals are processed before departures at the same second.
    ``capacity_override`` replaces every line capacity (used for
    uncongested comparisons).
    """
    if not isinstance(flows, FlowDistribution):
        flows = FlowDistribution.from_mapping(network, flows)
    if flows.network is not network and flows.network.option_keys != network.option_keys:
        raise FlowInputError("flow distribution belongs to a different network")
    counts = flows.counts
    if any(c < 0 for c in counts):
        raise FlowInputError("negative option count")
    plan = _plan(network)
    options = plan.options
    run_ids = plan.run_ids
    run_stations = plan.run_stations
    run_platforms = plan.run_platforms
    caps = plan.run_cap if capacity_override is None else [capacity_override] * len(run_ids)

    injections = sorted((options[i][2], 0, -1, i) for i, n in enumerate(counts) if n)

    n_plat = len(plan.platforms)
    queues: list[list] = [[] for _ in range(n_plat)]
    waiting = [0] * n_plat
    onboard: dict[int, dict[int, list]] = {}
    load = [0] * len(run_ids)
    arrivals: list[ArrivalPiece] = []
    M: dict[tuple[str, str, str], int] = defaultdict(int)
    heappush, heappop = heapq.heappush, heapq.heappop

    records: dict[tuple[str, str], FlowRecord] | None = {} if record else None
    if record:
        inflow = [0] * n_plat
        inflow_od: list[dict[str, int]] = [defaultdict(int) for _ in range(n_plat)]
        left_od: list[dict[str, int]] = [{} for _ in range(n_plat)]
        pending: dict[tuple[int, int], tuple[int, int, dict[str, int]]] = {}

    for t, kind, g, x in heapq.merge(plan.static_events, injections):
        if g < 0:
            opt = x
            od_r, rt_r, otime, legs, od = options[opt]
            p = legs[0][0]
            n = counts[opt]
            heappush(queues[p], (t, od_r, rt_r, otime, 0, n, opt, 0))
            waiting[p] += n
            if record:
                inflow[p] += n
                inflow_od[p][od] += n
            continue
        pos = x
        if kind == 0:
            bus = onboard.get(g)
            groups = bus.pop(pos, ()) if bus else ()
            if not groups and not record:
                continue
            station = run_stations[g][pos]
            m = 0
            m_od: dict[str, int] = defaultdict(int)
            for opt, leg, first, count in groups:
                od_r, rt_r, otime, legs, od = options[opt]
                m += count
                if record:
                    m_od[od] += count
                if leg == len(legs) - 1:
                    arrivals.append(ArrivalPiece(opt, first, count, t, run_ids[g]))
                    M[(station, od, run_ids[g])] += count
                else:
                    p = legs[leg + 1][0]
                    heappush(queues[p], (t, od_r, rt_r, otime, first, count, opt, leg + 1))
                    waiting[p] += count
                    if record:
                        inflow[p] += count
                        inflow_od[p][od] += count
            arrived = load[g]
            load[g] = arrived - m
            if record:
                if pos == len(run_stations[g]) - 1:
                    cap = caps[g]
                    records[(station, run_ids[g])] = FlowRecord(
                        station, run_ids[g], pos, cap, arrived=arrived, m=m, y=arrived - m,
                        x=cap - (arrived - m), z=arrived - m, m_od=dict(m_od),
                    )
                else:
                    pending[(g, pos)] = (arrived, m, dict(m_od))
            continue

        # departure of run g from position pos
        p = run_platforms[g][pos]
        wait_n = waiting[p]
        if not wait_n and not record:
            continue
        y = load[g]
        free = caps[g] - y
        boarded = 0
        f_od: dict[str, int] = defaultdict(int)
        if wait_n and free > 0:
            q = queues[p]
            bus = onboard.get(g)
            if bus is None:
                bus = onboard[g] = {}
            while q and boarded < free:
                entry = heappop(q)
                count = entry[5]
                opt = entry[6]
                leg = entry[7]
                b = count if count <= free - boarded else free - boarded
                legs = options[opt][3]
                alight = legs[leg][1]
                lst = bus.get(alight)
                if lst is None:
                    lst = bus[alight] = []
                lst.append((opt, leg, entry[4], b))
                boarded += b
                if record:
                    f_od[options[opt][4]] += b
                if b < count:
                    heappush(q, entry[:4] + (entry[4] + b, count - b, opt, leg))
            waiting[p] = wait_n - boarded
            load[g] = y + boarded
        if record:
            station = run_stations[g][pos]
            arrived, m, m_od = pending.pop((g, pos), (0, 0, {}))
            h_prev_od = left_od[p]
            in_od = dict(inflow_od[p])
            h_od = dict(h_prev_od)
            for k_, n in in_od.items():
                h_od[k_] = h_od.get(k_, 0) + n
            for k_, n in f_od.items():
                h_od[k_] -= n
            h_od = {k_: v for k_, v in h_od.items() if v}
            records[(station, run_ids[g])] = FlowRecord(
                station, run_ids[g], pos, caps[g],
                arrived=arrived, m=m, y=y, x=free, g=wait_n, f=boarded, h=wait_n - boarded,
                z=y + boarded, inflow=inflow[p], h_prev=sum(h_prev_od.values()),
                m_od=m_od, f_od=dict(f_od), h_od=h_od, inflow_od=in_od, h_prev_od=dict(h_prev_od),
            )
            left_od[p] = h_od
            inflow[p] = 0
            inflow_od[p] = defaultdict(int)

    stranded = []
    for p in sorted(range(n_plat), key=lambda i: plan.platforms[i]):
        station, lid = plan.platforms[p]
        for entry in sorted(queues[p]):
            stranded.append(StrandedPiece(entry[6], entry[4], entry[5], station, lid))
    return LoadingResult(network, flows, arrivals, dict(M), stranded, records)


def free_flow_cost_probe(network: Network, key: OptionKey) -> tuple[int, int] | None:
    """Transfer wait and arrival second of a lone user on option ``key``.

    Capacity is ignored. Returns None when a connection is missing.
    """
    key = OptionKey(*key)
    if key not in network.option_index:
        raise FlowInputError(f"unknown option {key}")
    try:
        arrival, wait, _ = network.traverse(network.routes[key.route], key.time)
    except NoPathError:
        return None
    return wait, arrival
