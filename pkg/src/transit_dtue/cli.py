"""Command-line entry point: ``transit-dtue run|oracle|certify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .costs import CostModel
from .loading import FlowDistribution, simulate
from .scenario import INITIAL_SETTINGS, Scenario, ScenarioError
from .solvers import SOLVERS, brute_force_oracle, single_user_swap_certificate
from .solvers.oracle import InstanceTooLargeError
from .reports import emit_reports

log = logging.getLogger("transit_dtue")


def run_scenario(path: str, overrides: dict, out_root: str, trace: bool, multi: bool) -> dict:
    sc = Scenario.load(path)
    if overrides.get("solver"):
        sc = replace(sc, solver=overrides["solver"])
    if overrides.get("initial"):
        init = overrides["initial"]
        if init not in INITIAL_SETTINGS:
            init = str(Path(init).resolve())
        sc = replace(sc, initial=init)
    if overrides.get("demand_scale") is not None:
        sc = replace(sc, demand_scale=overrides["demand_scale"])
    if overrides.get("seed") is not None:
        sc = replace(sc, config=replace(sc.config, seed=overrides["seed"]))
    net = sc.load_network()
    model = CostModel(net, sc.resolved_weights(net))
    q0 = sc.initial_flows(net)
    report = SOLVERS[sc.solver](model, q0, sc.config)
    out = Path(out_root) / sc.name if multi else Path(out_root)
    hm = net.meta.get("heatmap")
    written = emit_reports(report, out, sc.reports, sc.to_dict(), hm)
    if trace:
        res = simulate(net, report.flows, record=True)
        res.write_trace(out / "trace.csv")
        written.append(out / "trace.csv")
    return {
        "scenario": sc.name,
        "solver": sc.solver,
        "gap": report.gap,
        "srg": report.srg,
        "termination": report.termination,
        "out": str(out),
    }


def cmd_run(args: argparse.Namespace) -> int:
    overrides = {
        "solver": args.solver,
        "initial": args.initial,
        "demand_scale": args.demand_scale,
        "seed": args.seed,
    }
    multi = len(args.scenarios) > 1
    jobs = [(p, overrides, args.out, args.trace, multi) for p in args.scenarios]
    if args.jobs > 1 and multi:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_scenario, *zip(*jobs)))
    else:
        results = [run_scenario(*j) for j in jobs]
    for r in results:
        print(f"{r['scenario']}: solver={r['solver']} gap={r['gap']:.6g} srg={r['srg']:.4f} "
              f"termination={r['termination']} -> {r['out']}")
    return 0


def _model(path: str) -> tuple[Scenario, CostModel]:
    sc = Scenario.load(path)
    net = sc.load_network()
    return sc, CostModel(net, sc.resolved_weights(net))


def cmd_oracle(args: argparse.Namespace) -> int:
    _, model = _model(args.scenario)
    try:
        res = brute_force_oracle(model, limit=args.limit)
    except InstanceTooLargeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(json.dumps({
        "min_gap": res.min_gap,
        "enumerated": res.enumerated,
        "minimizers": [{f"{k.od}@{k.time}/{k.route}": n for k, n in q.items()} for q in res.minimizers],
    }, indent=1))
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    _, model = _model(args.scenario)
    q = FlowDistribution.read_csv(model.network, args.flows)
    q.validate()
    res = single_user_swap_certificate(model, q)
    if res.passed:
        print(f"PASS: {res.checked} single-user moves checked, gap {res.gap:.6g}")
        return 0
    src, dst = res.witness
    print(f"FAIL: moving one user of {src.od} from {src.time}/{src.route} to {dst.time}/{dst.route} "
          f"lowers the gap from {res.gap:.6g} to {res.witness_gap:.6g}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transit-dtue", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="solve one or more scenarios and write reports")
    r.add_argument("scenarios", nargs="+")
    r.add_argument("--solver", choices=sorted(SOLVERS))
    r.add_argument("--initial", help=f"one of {', '.join(INITIAL_SETTINGS)} or a flow CSV")
    r.add_argument("--demand-scale", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", default="results")
    r.add_argument("--trace", action="store_true", help="also write the per-run loading trace")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle", help="exhaustive minimum gap of a tiny scenario")
    o.add_argument("scenario")
    o.add_argument("--limit", type=int, default=10**6)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("certify", help="single-user-swap check of a flow CSV")
    c.add_argument("scenario")
    c.add_argument("flows")
    c.set_defaults(func=cmd_certify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
