from .adagdd import adagdd
from .baselines import dtd_learning, msa
from .certificate import CertificateResult, single_user_swap_certificate
from .common import Evaluator, SolverConfig, SolverReport
from .golden import golden_section
from .oracle import InstanceTooLargeError, OracleResult, brute_force_oracle
from .steps import od_relative_gap, option_ratios, shift_flows

SOLVERS = {"adagdd": adagdd, "msa": msa, "dtd": dtd_learning}

__all__ = [
    "SOLVERS", "adagdd", "msa", "dtd_learning", "single_user_swap_certificate", "CertificateResult",
    "Evaluator", "SolverConfig", "SolverReport", "golden_section", "brute_force_oracle",
    "OracleResult", "InstanceTooLargeError", "od_relative_gap", "option_ratios", "shift_flows",
]
