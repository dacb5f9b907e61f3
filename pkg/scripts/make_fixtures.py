"""Regenerate the bundled network fixtures.

Run from the repository root: ``python3 scripts/make_fixtures.py``.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "transit_dtue" / "fixtures"


def hms(s: str) -> int:
    h, m = s.split(":")[:2]
    return int(h) * 3600 + int(m) * 60


def dump(name: str, data: dict) -> None:
    with open(OUT / name, "w", newline="\n") as f:
        json.dump(data, f, indent=1)
        f.write("\n")


def synthetic() -> dict:
    lines = {
        "L1": ["1", "5", "6", "9"],
        "L2": ["2", "6", "7", "10"],
        "L3": ["3", "7", "8", "11"],
        "L4": ["4", "8", "5", "12"],
    }
    # (origin, destination) -> legs as (line, board, alight)
    paths = {
        ("1", "9"): [("L1", "1", "9")],
        ("1", "10"): [("L1", "1", "6"), ("L2", "6", "10")],
        ("1", "11"): [("L1", "1", "6"), ("L2", "6", "7"), ("L3", "7", "11")],
        ("1", "12"): [("L1", "1", "5"), ("L4", "5", "12")],
        ("2", "9"): [("L2", "2", "6"), ("L1", "6", "9")],
        ("2", "10"): [("L2", "2", "10")],
        ("2", "11"): [("L2", "2", "7"), ("L3", "7", "11")],
        ("2", "12"): [("L2", "2", "7"), ("L3", "7", "8"), ("L4", "8", "12")],
        ("3", "9"): [("L3", "3", "8"), ("L4", "8", "5"), ("L1", "5", "9")],
        ("3", "10"): [("L3", "3", "8"), ("L4", "8", "5"), ("L1", "5", "6"), ("L2", "6", "10")],
        ("3", "11"): [("L3", "3", "11")],
        ("3", "12"): [("L3", "3", "8"), ("L4", "8", "12")],
        ("4", "9"): [("L4", "4", "5"), ("L1", "5", "9")],
        ("4", "10"): [("L4", "4", "5"), ("L1", "5", "6"), ("L2", "6", "10")],
        ("4", "11"): [("L4", "4", "5"), ("L1", "5", "6"), ("L2", "6", "7"), ("L3", "7", "11")],
        ("4", "12"): [("L4", "4", "12")],
    }
    preferred = {
        "1": ["8:50", "8:35", "8:30", "8:45"],
        "2": ["8:45", "8:35", "8:30", "8:20"],
        "3": ["8:25", "8:40", "8:40", "8:30"],
        "4": ["8:30", "8:15", "8:40", "8:35"],
    }
    stations = [{"id": s, "kind": ["origin"]} for s in "1234"]
    stations += [{"id": s, "kind": ["transfer"]} for s in "5678"]
    stations += [{"id": s, "kind": ["destination"]} for s in ("9", "10", "11", "12")]
    ods, routes = [], []
    for o in "1234":
        for j, d in enumerate(("9", "10", "11", "12")):
            oid = f"{o}-{d}"
            ods.append({
                "id": oid, "origin": o, "destination": d, "demand": 2000,
                "preferred_departure": hms(preferred[o][j]), "desired_arrival": hms("9:00"),
            })
            routes.append({"id": f"{oid}/r1", "od": oid, "legs": [list(l) for l in paths[(o, d)]]})
    return {
        "name": "synthetic4",
        "meta": {
            "description": "Four-line grid: 4 origins, 4 transfer stations, 4 destinations, 16 OD pairs of 2000 users.",
            "weights": {"alpha": 10, "beta": 1, "gamma": 10},
            "initial_window": [hms("5:00"), hms("12:30")],
            "latest_departure": hms("12:25"),
            "heatmap": {"start": hms("5:50"), "width": 1200, "bins": 13},
        },
        "stations": stations,
        "lines": [
            {
                "id": lid, "stations": st, "capacity": 230,
                "segment_times": [180] * 3, "dwell_times": [0, 45, 45, 0],
                "headway": 300, "first_departure": hms("5:00"), "run_count": 100,
            }
            for lid, st in lines.items()
        ],
        "od_demand": ods,
        "routes": routes,
    }


MTR_STATIONS = {
    "1": ("Sha Tin", ["origin"]),
    "2": ("Cheung Sha Wan", ["origin"]),
    "3": ("Choi Hung", ["origin"]),
    "4": ("Che Kung Temple", ["origin"]),
    "5": ("Tai Wai", ["transfer"]),
    "6": ("Kowloon Tong", ["transfer"]),
    "7": ("Prince Edward", ["transfer"]),
    "8": ("Diamond Hill", ["transfer"]),
    "9": ("Ho Man Tin", ["transfer"]),
    "10": ("Hung Hom", ["transfer"]),
    "11": ("Admiralty", ["transfer"]),
    "13": ("Quarry Bay", ["destination"]),
    "14": ("Central", ["destination"]),
    "15": ("Whampoa", ["destination"]),
}

MTR_DEMAND = {
    "1": (5356, 5663, 1892),
    "2": (6116, 4073, 2049),
    "3": (14967, 5852, 2525),
    "4": (1727, 1848, 649),
}

# line id -> (stations, segment seconds, headway, first departure, runs)
MTR_LINES_CURRENT = {
    "L1": (["1", "5", "6", "10", "11"], [180, 240, 300, 300], 600, "5:50", 26),
    "L2": (["2", "7", "11", "14"], [300, 600, 120], 600, "5:50", 26),
    "L3": (["3", "8", "6", "7", "9", "15"], [120, 240, 240, 360, 120], 960, "5:50", 16),
    "L4": (["4", "5", "8", "9", "10"], [300, 300, 420, 120], 420, "5:50", 35),
    "L5": (["11", "13"], [600], 900, "6:10", 17),
}
MTR_LINES_PREVIOUS = dict(MTR_LINES_CURRENT)
MTR_LINES_PREVIOUS["L1"] = (["1", "5", "6", "10"], [180, 240, 300], 600, "5:50", 26)
MTR_LINES_PREVIOUS["L4"] = (["4", "5"], [300], 420, "5:50", 35)

MTR_ROUTES_CURRENT = {
    "1-13": [[("L1", "1", "11"), ("L5", "11", "13")]],
    "1-14": [[("L1", "1", "11"), ("L2", "11", "14")],
             [("L1", "1", "6"), ("L3", "6", "7"), ("L2", "7", "14")]],
    "1-15": [[("L1", "1", "6"), ("L3", "6", "15")],
             [("L1", "1", "5"), ("L4", "5", "9"), ("L3", "9", "15")]],
    "2-13": [[("L2", "2", "11"), ("L5", "11", "13")]],
    "2-14": [[("L2", "2", "14")]],
    "2-15": [[("L2", "2", "7"), ("L3", "7", "15")]],
    "3-13": [[("L3", "3", "8"), ("L4", "8", "10"), ("L1", "10", "11"), ("L5", "11", "13")],
             [("L3", "3", "7"), ("L2", "7", "11"), ("L5", "11", "13")]],
    "3-14": [[("L3", "3", "7"), ("L2", "7", "14")]],
    "3-15": [[("L3", "3", "15")]],
    "4-13": [[("L4", "4", "10"), ("L1", "10", "11"), ("L5", "11", "13")],
             [("L4", "4", "5"), ("L1", "5", "11"), ("L5", "11", "13")]],
    "4-14": [[("L4", "4", "10"), ("L1", "10", "11"), ("L2", "11", "14")],
             [("L4", "4", "5"), ("L1", "5", "11"), ("L2", "11", "14")]],
    "4-15": [[("L4", "4", "9"), ("L3", "9", "15")],
             [("L4", "4", "5"), ("L1", "5", "6"), ("L3", "6", "15")]],
}
MTR_ROUTES_PREVIOUS = {
    "1-13": [[("L1", "1", "6"), ("L3", "6", "7"), ("L2", "7", "11"), ("L5", "11", "13")]],
    "1-14": [[("L1", "1", "6"), ("L3", "6", "7"), ("L2", "7", "14")]],
    "1-15": [[("L1", "1", "6"), ("L3", "6", "15")]],
    "2-13": MTR_ROUTES_CURRENT["2-13"],
    "2-14": MTR_ROUTES_CURRENT["2-14"],
    "2-15": MTR_ROUTES_CURRENT["2-15"],
    "3-13": [[("L3", "3", "7"), ("L2", "7", "11"), ("L5", "11", "13")]],
    "3-14": MTR_ROUTES_CURRENT["3-14"],
    "3-15": MTR_ROUTES_CURRENT["3-15"],
    "4-13": [[("L4", "4", "5"), ("L1", "5", "6"), ("L3", "6", "7"), ("L2", "7", "11"), ("L5", "11", "13")]],
    "4-14": [[("L4", "4", "5"), ("L1", "5", "6"), ("L3", "6", "7"), ("L2", "7", "14")]],
    "4-15": [[("L4", "4", "5"), ("L1", "5", "6"), ("L3", "6", "15")]],
}


def mtr(name: str, lines: dict, routes: dict, route_choice: bool, description: str) -> dict:
    used = {s for st, *_ in lines.values() for s in st}
    served: dict[str, int] = {}
    for st, *_ in lines.values():
        for s in st:
            served[s] = served.get(s, 0) + 1
    stations = []
    for sid, (label, kinds) in MTR_STATIONS.items():
        if sid not in used:
            continue
        if kinds == ["transfer"] and served[sid] < 2:
            kinds = ["intermediate"]
        stations.append({"id": sid, "name": label, "kind": kinds})
    ods, route_list = [], []
    for o, row in MTR_DEMAND.items():
        for d, q in zip(("13", "14", "15"), row):
            oid = f"{o}-{d}"
            ods.append({"id": oid, "origin": o, "destination": d, "demand": q,
                        "preferred_departure": None, "desired_arrival": hms("9:00")})
            alts = routes[oid] if route_choice else routes[oid][:1]
            for j, legs in enumerate(alts, start=1):
                route_list.append({"id": f"{oid}/r{j}", "od": oid, "legs": [list(l) for l in legs]})
    return {
        "name": name,
        "meta": {
            "description": description,
            "weights": {"alpha": 18, "beta": 5, "gamma": 12},
            "heatmap": {"start": hms("5:50"), "width": 1200, "bins": 13},
        },
        "stations": stations,
        "lines": [
            {
                "id": lid, "stations": st, "capacity": 2600, "segment_times": seg,
                "dwell_times": [0] + [30] * (len(st) - 2) + [0],
                "headway": hw, "first_departure": hms(first), "run_count": n,
            }
            for lid, (st, seg, hw, first, n) in MTR_LINES_CURRENT.items() if lid in lines
            for st, seg, hw, first, n in [lines[lid]]
        ],
        "od_demand": ods,
        "routes": route_list,
    }


RECON = (
    "Reconstructed corridor model: line topology, run counts and capacity are taken as given; "
    "segment times, headways, first departures and the 9:00 desired arrival are assumptions, "
    "not operator schedules."
)


def tiny_shared() -> dict:
    """Two ODs whose transfers feed one single-seat line; small enough to enumerate."""
    return {
        "name": "tiny-shared",
        "stations": [{"id": "o1", "kind": ["origin"]}, {"id": "o2", "kind": ["origin"]},
                     {"id": "y", "kind": ["transfer"]}, {"id": "d", "kind": ["destination"]}],
        "lines": [
            {"id": "P", "stations": ["o1", "y"], "capacity": 10, "segment_times": [60], "departures": [18000, 18300]},
            {"id": "B", "stations": ["o2", "y"], "capacity": 10, "segment_times": [60], "departures": [18010, 18310]},
            {"id": "A", "stations": ["y", "d"], "capacity": 1, "segment_times": [300],
             "departures": [18100, 18400, 18700]},
        ],
        "od_demand": [
            {"id": "k1", "origin": "o1", "destination": "d", "demand": 2, "desired_arrival": 18400},
            {"id": "k2", "origin": "o2", "destination": "d", "demand": 1, "desired_arrival": 18400},
        ],
        "routes": [
            {"id": "k1/a", "od": "k1", "legs": [["P", "o1", "y"], ["A", "y", "d"]]},
            {"id": "k2/a", "od": "k2", "legs": [["B", "o2", "y"], ["A", "y", "d"]]},
        ],
        "meta": {"weights": {"alpha": 10, "beta": 1, "gamma": 10}},
    }


if __name__ == "__main__":
    dump("synthetic4.json", synthetic())
    dump("tiny_shared.json", tiny_shared())
    dump("mtr.json", mtr("mtr-current", MTR_LINES_CURRENT, MTR_ROUTES_CURRENT, False,
                         "Current network (cross-harbour East Rail, Tuen Ma to Hung Hom). " + RECON))
    dump("mtr_routes.json", mtr("mtr-current-routes", MTR_LINES_CURRENT, MTR_ROUTES_CURRENT, True,
                                "Current network with a second route for some OD pairs. " + RECON))
    dump("mtr_previous.json", mtr("mtr-previous", MTR_LINES_PREVIOUS, MTR_ROUTES_PREVIOUS, False,
                                  "Previous network (East Rail ends at Hung Hom, Ma On Shan line ends at Tai Wai). " + RECON))
