"""Scenario files, initial flow settings and demand scaling."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .costs import CostWeights
from .loading import FlowDistribution
from .network import Network, OptionKey
from .solvers.common import SolverConfig

SCHEMA_VERSION = 1
FIXTURE_DIR = Path(__file__).parent / "fixtures"
INITIAL_SETTINGS = ("default", "uniform", "earliest", "latest", "default-earliest")
REPORTS = ("convergence", "od_costs", "system_cost", "heatmap", "flows", "manifest")


class ScenarioError(ValueError):
    pass


def resolve_path(ref: str, base: Path | None = None) -> Path:
    """``fixture:NAME`` points into the bundled fixtures; other paths are relative to ``base``."""
    if ref.startswith("fixture:"):
        p = FIXTURE_DIR / ref[len("fixture:"):]
    else:
        p = Path(ref)
        if not p.is_absolute() and base is not None:
            p = base / p
    if not p.exists():
        raise ScenarioError(f"file not found: {ref}")
    return p


@dataclass
class Scenario:
    network_ref: str
    name: str = "scenario"
    weights: CostWeights | None = None
    solver: str = "adagdd"
    config: SolverConfig = field(default_factory=SolverConfig)
    initial: str = "default"
    demand_scale: float = 1.0
    reports: tuple[str, ...] = REPORTS
    base_dir: Path | None = None

    def __post_init__(self) -> None:
        if self.demand_scale <= 0:
            raise ScenarioError("demand scale must be positive")
        if self.solver not in ("adagdd", "msa", "dtd"):
            raise ScenarioError(f"unknown solver {self.solver}")
        bad = set(self.reports) - set(REPORTS)
        if bad:
            raise ScenarioError(f"unknown reports {sorted(bad)}")
        resolve_path(self.network_ref, self.base_dir)
        if self.initial not in INITIAL_SETTINGS:
            resolve_path(self.initial, self.base_dir)

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        path = Path(path)
        with open(path) as f:
            data = json.load(f)
        return cls.from_dict(data, path.parent, default_name=path.stem)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None, default_name: str = "scenario") -> Scenario:
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
        w = data.get("weights")
        return cls(
            network_ref=data["network"],
            name=data.get("name", default_name),
            weights=CostWeights(**w) if w else None,
            solver=data.get("solver", "adagdd"),
            config=SolverConfig.from_dict(data.get("solver_config", {})),
            initial=data.get("initial", "default"),
            demand_scale=float(data.get("demand_scale", 1.0)),
            reports=tuple(data.get("reports", REPORTS)),
            base_dir=base_dir,
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "network": self.network_ref,
            "weights": None if self.weights is None else vars(self.weights),
            "solver": self.solver,
            "solver_config": vars(self.config),
            "initial": self.initial,
            "demand_scale": self.demand_scale,
            "reports": list(self.reports),
        }

    def load_network(self) -> Network:
        net = Network.load(resolve_path(self.network_ref, self.base_dir))
        return scale_demand(net, self.demand_scale) if self.demand_scale != 1.0 else net

    def resolved_weights(self, network: Network) -> CostWeights:
        if self.weights is not None:
            return self.weights
        w = network.meta.get("weights")
        return CostWeights(**w) if w else CostWeights()

    def initial_flows(self, network: Network) -> FlowDistribution:
        if self.initial in INITIAL_SETTINGS:
            return generate_initial(self.initial, network)
        fd = FlowDistribution.read_csv(network, resolve_path(self.initial, self.base_dir))
        fd.validate()
        return fd


def scale_demand(network: Network, factor: float) -> Network:
    """Every OD demand becomes round(factor * demand)."""
    if factor <= 0:
        raise ScenarioError("demand scale must be positive")
    return network.with_demand({k: round(factor * od.demand) for k, od in network.ods.items()})


def _window_options(network: Network, od: str) -> list[OptionKey]:
    route = network.ods[od].routes[0].id
    lo, hi = network.meta.get("initial_window", (-math.inf, math.inf))
    return [k for k in network.od_options[od] if k.route == route and lo <= k.time <= hi]


def generate_initial(setting: str, network: Network) -> FlowDistribution:
    """Initial flows on each OD's first route.

    default puts everyone on the preferred departure; uniform fills options of
    the initial window in order with ceil(Q/n) users each; earliest and latest
    use the first option of the window and ``latest_departure``;
    default-earliest splits demand, the odd user going to the preferred option.
    """
    if setting not in INITIAL_SETTINGS:
        raise ScenarioError(f"unknown initial setting {setting}")
    mapping: dict[OptionKey, int] = {}
    for od_id, od in network.ods.items():
        opts = _window_options(network, od_id)
        if not opts:
            raise ScenarioError(f"OD {od_id}: no options inside the initial window")
        q = od.demand
        if setting in ("default", "default-earliest"):
            pref = OptionKey(od_id, od.preferred_departure, od.routes[0].id)
            if od.preferred_departure is None or pref not in network.option_index:
                raise ScenarioError(
                    f"OD {od_id}: preferred departure {od.preferred_departure} is not an option"
                )
        if setting == "default":
            mapping[pref] = q
        elif setting == "earliest":
            mapping[opts[0]] = q
        elif setting == "latest":
            latest = network.meta.get("latest_departure")
            key = opts[-1] if latest is None else OptionKey(od_id, latest, od.routes[0].id)
            if key not in network.option_index:
                raise ScenarioError(f"OD {od_id}: latest departure {latest} is not an option")
            mapping[key] = q
        elif setting == "default-earliest":
            mapping[opts[0]] = mapping.get(opts[0], 0) + q // 2
            mapping[pref] = mapping.get(pref, 0) + q - q // 2
        else:
            per = math.ceil(q / len(opts)) if q else 0
            left = q
            for k in opts:
                n = min(per, left)
                if n:
                    mapping[k] = n
                left -= n
    fd = FlowDistribution.from_mapping(network, mapping)
    fd.validate()
    return fd
