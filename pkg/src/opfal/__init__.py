"""Active-set-guided active learning for DC-OPF optimization proxies."""

from .cases import (
    Branch,
    Bus,
    CaseError,
    CaseParseError,
    CaseValidationError,
    Generator,
    NetworkCase,
    builtin_case,
    load_case,
    parse_case,
)
from .dcopf import (
    ActiveSetLayout,
    InfeasibleError,
    OpfSolution,
    active_set_size,
    extract_active_set,
    solve_dcopf,
)

__all__ = [
    "ActiveSetLayout",
    "Branch",
    "Bus",
    "CaseError",
    "CaseParseError",
    "CaseValidationError",
    "Generator",
    "InfeasibleError",
    "NetworkCase",
    "OpfSolution",
    "active_set_size",
    "builtin_case",
    "extract_active_set",
    "load_case",
    "parse_case",
    "solve_dcopf",
]
