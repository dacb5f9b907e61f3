"""Small hand-built networks shared by the unit tests."""

from __future__ import annotations

from transit_dtue.network import Network


def line(lid: str, stations: list[str], capacity: int, segments: list[int], *,
         departures: list[int] | None = None, headway: int = 300, first: int = 18000,
         runs: int = 3, dwell: list[int] | None = None) -> dict:
    d = {"id": lid, "stations": stations, "capacity": capacity, "segment_times": segments}
    if dwell is not None:
        d["dwell_times"] = dwell
    if departures is not None:
        d["departures"] = departures
    else:
        d.update(headway=headway, first_departure=first, run_count=runs)
    return d


def od(oid: str, legs: list[list[str]], demand: int, t_star: int, **extra) -> tuple[dict, list[dict]]:
    """An OD with a single route ``oid/a`` (or several when ``legs`` is a list of leg lists)."""
    routes = legs if legs and isinstance(legs[0][0], list) else [legs]
    o = {"id": oid, "origin": routes[0][0][1], "destination": routes[0][-1][2], "demand": demand,
         "desired_arrival": t_star, **extra}
    rs = [{"id": f"{oid}/{chr(97 + i)}", "od": oid, "legs": r} for i, r in enumerate(routes)]
    return o, rs


def network(lines: list[dict], ods: list[tuple[dict, list[dict]]], name: str = "test", meta=None) -> Network:
    served: dict[str, set[str]] = {}
    for l in lines:
        for s in l["stations"]:
            served.setdefault(s, set()).add(l["id"])
    stations = [{"id": s, "kind": ["transfer"] if len(ls) > 1 else ["intermediate"]}
                for s, ls in served.items()]
    return Network.from_dict({
        "name": name, "stations": stations, "lines": lines,
        "od_demand": [o for o, _ in ods], "routes": [r for _, rs in ods for r in rs],
        "meta": meta or {},
    })


def single_line(demand: int, capacity: int, runs: int = 3, t_star: int = 19000, headway: int = 300,
                segment: int = 600) -> Network:
    """One OD on a two-station line."""
    return network(
        [line("L", ["A", "B"], capacity, [segment], headway=headway, runs=runs)],
        [od("AB", [["L", "A", "B"]], demand, t_star)],
    )
