"""Abelian networks: processors, the functions they compute, and gate-level synthesis."""
from .core import (AbelianProcessor, ZilepFunction, check_abelian, eval_processor, exponent,
                   processor_to_zilep, zilep_to_processor)
from .gates import GateSpec, adder, gate_processor, splitter, toppler
from .kernel import BACKEND
from .network import Builder, Network, Schedule, check_halting, evaluate, run
from .pseudomin import eval_M

__version__ = "0.1.0"

__all__ = [
    "AbelianProcessor", "ZilepFunction", "check_abelian", "eval_processor", "exponent",
    "processor_to_zilep", "zilep_to_processor", "GateSpec", "adder", "gate_processor", "splitter",
    "toppler", "BACKEND", "Builder", "Network", "Schedule", "check_halting", "evaluate", "run",
    "eval_M",
]
