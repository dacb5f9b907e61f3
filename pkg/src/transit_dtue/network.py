"""Schedule-based multi-line network: stations, lines, timetables, routes and OD demand."""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence


class NetworkError(ValueError):
    """Invalid network description."""


class ScheduleError(NetworkError):
    """Runs on a line overlap or are out of order."""


class RouteError(NetworkError):
    """A route leg does not match the lines it references."""


class NoPathError(NetworkError):
    """A route cannot be traversed from the requested option."""


STATION_KINDS = frozenset({"origin", "transfer", "destination", "intermediate"})


@dataclass(frozen=True)
class Station:
    id: str
    kinds: frozenset[str] = frozenset()
    name: str | None = None


@dataclass(frozen=True)
class Line:
    """A line with identical running times for every run.

    Runs depart the first station at ``first_departure + j * headway`` unless
    ``departures`` gives explicit first-station departure times (irregular
    timetables); running and dwell times are shared by all runs either way.
    """

    id: str
    stations: tuple[str, ...]
    capacity: int
    segment_times: tuple[int, ...]
    dwell_times: tuple[int, ...] = ()
    headway: int | None = None
    first_departure: int | None = None
    run_count: int | None = None
    departures: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        n = len(self.stations)
        if n < 2:
            raise NetworkError(f"line {self.id}: needs at least 2 stations")
        if len(set(self.stations)) != n:
            raise NetworkError(f"line {self.id}: repeated station in sequence")
        if self.capacity < 1:
            raise NetworkError(f"line {self.id}: capacity must be >= 1")
        if len(self.segment_times) != n - 1:
            raise NetworkError(f"line {self.id}: expected {n - 1} segment times")
        if any(s <= 0 for s in self.segment_times):
            raise NetworkError(f"line {self.id}: segment times must be positive")
        if not self.dwell_times:
            object.__setattr__(self, "dwell_times", (0,) * n)
        if len(self.dwell_times) != n or any(d < 0 for d in self.dwell_times):
            raise NetworkError(f"line {self.id}: expected {n} non-negative dwell times")
        if self.departures is None:
            if self.headway is None or self.first_departure is None or self.run_count is None:
                raise NetworkError(
                    f"line {self.id}: give headway/first_departure/run_count or departures"
                )
            if self.headway < 1:
                raise NetworkError(f"line {self.id}: headway must be >= 1 s")
            if self.run_count < 1:
                raise NetworkError(f"line {self.id}: run_count must be >= 1")

    @property
    def arrival_offsets(self) -> tuple[int, ...]:
        offs = [0]
        dep = 0
        for i, seg in enumerate(self.segment_times, start=1):
            offs.append(dep + seg)
            dep = offs[-1] + self.dwell_times[i]
        return tuple(offs)

    @property
    def departure_offsets(self) -> tuple[int, ...]:
        arr = self.arrival_offsets
        return (0,) + tuple(a + d for a, d in zip(arr[1:], self.dwell_times[1:]))

    def first_station_departures(self) -> tuple[int, ...]:
        if self.departures is not None:
            return tuple(self.departures)
        return tuple(self.first_departure + j * self.headway for j in range(self.run_count))

    def position(self, station: str) -> int:
        try:
            return self.stations.index(station)
        except ValueError:
            raise RouteError(f"line {self.id} does not serve station {station}") from None


@dataclass(frozen=True)
class TrainRun:
    id: str
    line: str
    index: int
    arrivals: tuple[int, ...]
    departures: tuple[int, ...]


class Leg(NamedTuple):
    line: str
    board: str
    alight: str


@dataclass(frozen=True)
class Route:
    id: str
    od: str
    legs: tuple[Leg, ...]


@dataclass(frozen=True)
class ODDemand:
    id: str
    origin: str
    destination: str
    demand: int
    desired_arrival: int
    preferred_departure: int | None = None
    routes: tuple[Route, ...] = ()

    def __post_init__(self) -> None:
        if self.demand < 0:
            raise NetworkError(f"OD {self.id}: negative demand")
        if not self.routes:
            raise NetworkError(f"OD {self.id}: empty route set")


@dataclass(frozen=True)
class TransferConnection:
    station: str
    arriving_run: str
    departing_run: str
    od: str
    route: str
    indicator: bool = True


class OptionKey(NamedTuple):
    """A departure-time option: OD pair, departure second at the origin, route."""

    od: str
    time: int
    route: str


def build_timetable(line: Line) -> list[TrainRun]:
    """Expand a line description into explicit train runs."""
    starts = line.first_station_departures()
    if not starts:
        raise ScheduleError(f"line {line.id}: no runs")
    for a, b in zip(starts, starts[1:]):
        if b <= a:
            raise ScheduleError(
                f"line {line.id}: runs depart at {a} and {b}; departures must strictly increase"
            )
    arr_off = line.arrival_offsets
    dep_off = line.departure_offsets
    return [
        TrainRun(
            id=f"{line.id}#{j}",
            line=line.id,
            index=j,
            arrivals=tuple(s + o for o in arr_off),
            departures=tuple(s + o for o in dep_off),
        )
        for j, s in enumerate(starts)
    ]


@dataclass
class Network:
    """Validated network with derived timetable data.

    Treat instances as immutable after construction; simulations share them.
    """

    stations: dict[str, Station]
    lines: dict[str, Line]
    ods: dict[str, ODDemand]
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.runs: dict[str, list[TrainRun]] = {lid: build_timetable(l) for lid, l in self.lines.items()}
        self.run_by_id: dict[str, TrainRun] = {r.id: r for rs in self.runs.values() for r in rs}
        self._validate()
        self.routes: dict[str, Route] = {r.id: r for od in self.ods.values() for r in od.routes}
        # sorted departures per (line, position) for connection lookups
        self._deps_at: dict[tuple[str, int], list[int]] = {}
        for lid, line in self.lines.items():
            for pos in range(len(line.stations)):
                self._deps_at[(lid, pos)] = [r.departures[pos] for r in self.runs[lid]]
        self.option_keys: list[OptionKey] = []
        self.od_options: dict[str, list[OptionKey]] = {}
        for od in self.ods.values():
            keys = []
            for route in od.routes:
                leg = route.legs[0]
                pos = self.lines[leg.line].position(leg.board)
                keys.extend(OptionKey(od.id, t, route.id) for t in self._deps_at[(leg.line, pos)])
            keys.sort(key=lambda k: (k.time, k.route))
            self.od_options[od.id] = keys
            self.option_keys.extend(keys)
        self.option_index = {k: i for i, k in enumerate(self.option_keys)}
        self._in_vehicle = {rid: self._route_in_vehicle(r) for rid, r in self.routes.items()}

    # -- validation -------------------------------------------------------

    def _validate(self) -> None:
        for line in self.lines.values():
            for s in line.stations:
                if s not in self.stations:
                    raise NetworkError(f"line {line.id}: unknown station {s}")
        lines_at: dict[str, set[str]] = {}
        for line in self.lines.values():
            for s in line.stations:
                lines_at.setdefault(s, set()).add(line.id)
        for st in self.stations.values():
            if not st.kinds <= STATION_KINDS:
                raise NetworkError(f"station {st.id}: unknown kind in {sorted(st.kinds)}")
            if "transfer" in st.kinds and len(lines_at.get(st.id, ())) < 2:
                raise NetworkError(f"transfer station {st.id} is served by fewer than 2 lines")
        route_ids: set[str] = set()
        for od in self.ods.values():
            if od.origin not in self.stations or od.destination not in self.stations:
                raise NetworkError(f"OD {od.id}: unknown origin or destination")
            for route in od.routes:
                if route.id in route_ids:
                    raise NetworkError(f"duplicate route id {route.id}")
                route_ids.add(route.id)
                self._validate_route(od, route, lines_at)

    def _validate_route(self, od: ODDemand, route: Route, lines_at: dict[str, set[str]]) -> None:
        if route.od != od.id:
            raise RouteError(f"route {route.id} belongs to {route.od}, listed under {od.id}")
        if not route.legs:
            raise RouteError(f"route {route.id}: no legs")
        if route.legs[0].board != od.origin:
            raise RouteError(f"route {route.id}: first leg must board at {od.origin}")
        if route.legs[-1].alight != od.destination:
            raise RouteError(f"route {route.id}: last leg must alight at {od.destination}")
        for leg in route.legs:
            if leg.line not in self.lines:
                raise RouteError(f"route {route.id}: unknown line {leg.line}")
            line = self.lines[leg.line]
            if line.position(leg.board) >= line.position(leg.alight):
                raise RouteError(
                    f"route {route.id}: line {leg.line} does not run {leg.board} -> {leg.alight}"
                )
        for a, b in zip(route.legs, route.legs[1:]):
            if a.alight != b.board:
                raise RouteError(f"route {route.id}: legs do not meet at {a.alight}/{b.board}")
            if len(lines_at.get(a.alight, ())) < 2:
                raise RouteError(f"route {route.id}: {a.alight} is not a transfer station")

    # -- timetable queries ---------------------------------------------------

    def od_demand(self, od: str) -> int:
        return self.ods[od].demand

    def run_departing(self, line: str, station: str, time: int) -> TrainRun:
        """The run of ``line`` departing ``station`` exactly at ``time``."""
        pos = self.lines[line].position(station)
        deps = self._deps_at[(line, pos)]
        i = bisect.bisect_left(deps, time)
        if i == len(deps) or deps[i] != time:
            raise NoPathError(f"no run of line {line} departs {station} at {time}")
        return self.runs[line][i]

    def next_run(self, line: str, station: str, earliest: int) -> TrainRun | None:
        """Earliest run of ``line`` departing ``station`` at or after ``earliest``."""
        pos = self.lines[line].position(station)
        deps = self._deps_at[(line, pos)]
        i = bisect.bisect_left(deps, earliest)
        return self.runs[line][i] if i < len(deps) else None

    def _route_in_vehicle(self, route: Route) -> int:
        total = 0
        for leg in route.legs:
            line = self.lines[leg.line]
            total += line.arrival_offsets[line.position(leg.alight)] - line.departure_offsets[
                line.position(leg.board)
            ]
        return total

    def in_vehicle_time(self, route: str | Route, option_time: int | None = None) -> int:
        """Scheduled on-board seconds along ``route``; identical for every option.

        With ``option_time`` the route is traversed from that run and a
        :class:`NoPathError` is raised if a connection is missing.
        """
        route = self.routes[route] if isinstance(route, str) else route
        if option_time is not None:
            _, _, on_board = self.traverse(route, option_time)
            return on_board
        return self._in_vehicle[route.id]

    def traverse(self, route: Route, option_time: int) -> tuple[int, int, int]:
        """Free-flow traversal from the run departing at ``option_time``.

        Returns ``(arrival, transfer_wait, on_board)``.
        """
        leg = route.legs[0]
        run = self.run_departing(leg.line, leg.board, option_time)
        wait = 0
        on_board = 0
        arrival = option_time
        for i, leg in enumerate(route.legs):
            line = self.lines[leg.line]
            if i > 0:
                run = self.next_run(leg.line, leg.board, arrival)
                if run is None:
                    raise NoPathError(
                        f"route {route.id}: no run of {leg.line} leaves {leg.board} after {arrival}"
                    )
                wait += run.departures[line.position(leg.board)] - arrival
            dep = run.departures[line.position(leg.board)]
            arrival = run.arrivals[line.position(leg.alight)]
            on_board += arrival - dep
        return arrival, wait, on_board

    def derive_transfer_connections(self) -> list[TransferConnection]:
        """Closest connecting run for every arriving run at every route transfer."""
        out: list[TransferConnection] = []
        for route in self.routes.values():
            for a, b in zip(route.legs, route.legs[1:]):
                pos = self.lines[a.line].position(a.alight)
                for run in self.runs[a.line]:
                    nxt = self.next_run(b.line, b.board, run.arrivals[pos])
                    if nxt is not None:
                        out.append(
                            TransferConnection(a.alight, run.id, nxt.id, route.od, route.id)
                        )
        return out

    def validated(self) -> Network:
        """Re-run validation on a copy; returns an equal network."""
        return Network(dict(self.stations), dict(self.lines), dict(self.ods), self.name, dict(self.meta))

    def with_demand(self, demand: dict[str, int]) -> Network:
        ods = {}
        for oid, od in self.ods.items():
            ods[oid] = ODDemand(
                od.id, od.origin, od.destination, demand.get(oid, od.demand),
                od.desired_arrival, od.preferred_departure, od.routes,
            )
        return Network(self.stations, self.lines, ods, self.name, self.meta)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        lines = []
        for l in self.lines.values():
            d = {
                "id": l.id,
                "stations": list(l.stations),
                "capacity": l.capacity,
                "segment_times": list(l.segment_times),
                "dwell_times": list(l.dwell_times),
            }
            if l.departures is not None:
                d["departures"] = list(l.departures)
            else:
                d.update(headway=l.headway, first_departure=l.first_departure, run_count=l.run_count)
            lines.append(d)
        return {
            "name": self.name,
            "meta": self.meta,
            "stations": [
                {"id": s.id, "kind": sorted(s.kinds), **({"name": s.name} if s.name else {})}
                for s in self.stations.values()
            ],
            "lines": lines,
            "od_demand": [
                {
                    "id": od.id,
                    "origin": od.origin,
                    "destination": od.destination,
                    "demand": od.demand,
                    "preferred_departure": od.preferred_departure,
                    "desired_arrival": od.desired_arrival,
                }
                for od in self.ods.values()
            ],
            "routes": [
                {"id": r.id, "od": r.od, "legs": [list(leg) for leg in r.legs]}
                for od in self.ods.values()
                for r in od.routes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Network:
        stations = {}
        for s in data["stations"]:
            kinds = s.get("kind", [])
            kinds = [kinds] if isinstance(kinds, str) else kinds
            if s["id"] in stations:
                raise NetworkError(f"duplicate station id {s['id']}")
            stations[str(s["id"])] = Station(str(s["id"]), frozenset(kinds), s.get("name"))
        lines = {}
        for l in data["lines"]:
            if l["id"] in lines:
                raise NetworkError(f"duplicate line id {l['id']}")
            lines[str(l["id"])] = Line(
                id=str(l["id"]),
                stations=tuple(str(s) for s in l["stations"]),
                capacity=int(l["capacity"]),
                segment_times=tuple(int(x) for x in l["segment_times"]),
                dwell_times=tuple(int(x) for x in l.get("dwell_times", ())),
                headway=l.get("headway"),
                first_departure=l.get("first_departure"),
                run_count=l.get("run_count"),
                departures=tuple(int(x) for x in l["departures"]) if "departures" in l else None,
            )
        routes_by_od: dict[str, list[Route]] = {}
        for r in data.get("routes", []):
            legs = tuple(Leg(str(a), str(b), str(c)) for a, b, c in r["legs"])
            routes_by_od.setdefault(str(r["od"]), []).append(Route(str(r["id"]), str(r["od"]), legs))
        ods = {}
        for o in data["od_demand"]:
            oid = str(o.get("id") or f"{o['origin']}-{o['destination']}")
            if oid in ods:
                raise NetworkError(f"duplicate OD id {oid}")
            ods[oid] = ODDemand(
                id=oid,
                origin=str(o["origin"]),
                destination=str(o["destination"]),
                demand=int(o["demand"]),
                desired_arrival=int(o["desired_arrival"]),
                preferred_departure=o.get("preferred_departure"),
                routes=tuple(routes_by_od.get(oid, ())),
            )
        return cls(stations, lines, ods, data.get("name", ""), data.get("meta", {}))

    @classmethod
    def load(cls, path: str | Path) -> Network:
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=1)
            f.write("\n")


def total_demand(network: Network, ods: Iterable[str] | None = None) -> int:
    ids: Sequence[str] = list(ods) if ods is not None else list(network.ods)
    return sum(network.ods[k].demand for k in ids)
