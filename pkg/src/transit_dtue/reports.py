"""CSV and JSON report writers."""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .costs import CostTable
from .network import Network
from .solvers.common import SolverReport, safe_srg


def _num(x) -> str:
    if isinstance(x, float):
        if x != x:
            return ""
        return repr(int(x)) if x.is_integer() else repr(x)
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(v) if v is not None else "" for v in r])


@dataclass
class HeatmapTable:
    """Origin-by-bin ratio of departing demand to scheduled capacity; None where no train departs."""

    origins: list[str]
    bin_starts: list[int]
    cells: list[list[float | None]]
    width: int = 1200


def heatmap(table: CostTable, start: int = 21000, width: int = 1200, bins: int = 13) -> HeatmapTable:
    net: Network = table.network
    origins = sorted({od.origin for od in net.ods.values()}, key=_natural)
    demand = {(o, b): 0 for o in origins for b in range(bins)}
    for key, n in table.flows.items():
        b = (key.time - start) // width
        if 0 <= b < bins:
            demand[(net.ods[key.od].origin, b)] += n
    # lines boarded at each origin by some route's first leg
    lines_at: dict[str, set[str]] = {o: set() for o in origins}
    for od in net.ods.values():
        for r in od.routes:
            lines_at[od.origin].add(r.legs[0].line)
    cells = []
    for o in origins:
        row = []
        for b in range(bins):
            lo, hi = start + b * width, start + (b + 1) * width
            cap = 0
            for lid in sorted(lines_at[o]):
                line = net.lines[lid]
                pos = line.position(o)
                cap += line.capacity * sum(1 for r in net.runs[lid] if lo <= r.departures[pos] < hi)
            row.append(demand[(o, b)] / cap if cap else None)
        cells.append(row)
    return HeatmapTable(origins, [start + b * width for b in range(bins)], cells, width)


def _natural(s: str):
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


def _clock(sec: int) -> str:
    return f"{sec // 3600:02d}:{sec % 3600 // 60:02d}"


def write_convergence(report: SolverReport, path: Path) -> None:
    _write_csv(
        path, ["iteration", "loop", "gap", "srg", "theta", "accepted"],
        ([it.iteration, it.loop, float(it.gap), it.srg, it.theta, int(it.accepted)] for it in report.trace),
    )


def write_od_costs(table: CostTable, path: Path) -> None:
    net = table.network
    rows = []
    for od_id, od in net.ods.items():
        rows.append([
            od_id, od.origin, od.destination, od.demand, table.od_mean_cost(od_id),
            float(table.od_star[od_id]), float(table.od_gap[od_id]),
        ])
    _write_csv(path, ["od_id", "origin", "destination", "demand", "mean_cost", "best_cost", "gap"], rows)


def system_summary(table: CostTable) -> dict:
    return {
        "demand": sum(od.demand for od in table.network.ods.values()),
        "total_cost": float(table.total_cost()),
        "ideal_cost": float(table.ideal_cost()),
        "gap": float(table.gap),
        "srg": safe_srg(table),
        "stranded": table.stranded,
    }


def write_system_cost(table: CostTable, path: Path) -> None:
    _write_csv(path, ["metric", "value"], system_summary(table).items())


def write_heatmap(hm: HeatmapTable, path: Path) -> None:
    header = ["origin"] + [f"{_clock(s)}-{_clock(s + hm.width)}" for s in hm.bin_starts]
    _write_csv(path, header, ([o] + row for o, row in zip(hm.origins, hm.cells)))


def write_manifest(path: Path, scenario: dict, report: SolverReport, extra: dict | None = None) -> None:
    from . import __version__

    manifest = {
        "scenario": scenario,
        "solver": report.solver,
        "seed": scenario.get("solver_config", {}).get("seed"),
        "termination": report.termination,
        "certificate_passed": None if report.certificate is None else report.certificate.passed,
        "final": system_summary(report.table),
        "versions": {"transit_dtue": __version__, "python": platform.python_version()},
    }
    if extra:
        manifest.update(extra)
    with open(path, "w", newline="\n") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")


def write_timing(path: Path, report: SolverReport) -> None:
    with open(path, "w", newline="\n") as f:
        json.dump({
            "wall_time": report.wall_time,
            "simulations": report.simulations,
            "iterations": [[it.iteration, it.loop, it.wall] for it in report.trace],
        }, f)
        f.write("\n")


def emit_reports(report: SolverReport, out: str | Path, selection: Sequence[str], scenario: dict,
                 heatmap_spec: dict | None = None) -> list[Path]:
    """Write the selected reports into ``out``; returns the written paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    table = report.table
    if "convergence" in selection:
        written.append(out / "convergence.csv")
        write_convergence(report, written[-1])
    if "od_costs" in selection:
        written.append(out / "od_costs.csv")
        write_od_costs(table, written[-1])
    if "system_cost" in selection:
        written.append(out / "system_cost.csv")
        write_system_cost(table, written[-1])
    if "heatmap" in selection:
        written.append(out / "heatmap.csv")
        write_heatmap(heatmap(table, **(heatmap_spec or {})), written[-1])
    if "flows" in selection:
        written.append(out / "flows.csv")
        table.flows.to_csv(written[-1])
    if "manifest" in selection:
        written.append(out / "manifest.json")
        write_manifest(written[-1], scenario, report)
    written.append(out / "timing.json")
    write_timing(written[-1], report)
    return written
