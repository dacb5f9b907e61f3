"""Capacity-constrained transit loading and departure-time user equilibrium."""

from .costs import CostModel, CostTable, CostWeights, individual_cost, relative_gap, system_gap
from .loading import FlowDistribution, LoadingResult, free_flow_cost_probe, simulate
from .network import Network, OptionKey, build_timetable

__version__ = "0.1.0"

__all__ = [
    "CostModel", "CostTable", "CostWeights", "FlowDistribution", "LoadingResult", "Network",
    "OptionKey", "build_timetable", "free_flow_cost_probe", "individual_cost", "relative_gap",
    "simulate", "system_gap", "__version__",
]
