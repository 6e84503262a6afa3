"""Numerical core: linear algebra, circuits, polarization, protocols, reduction, trace norm approximation"""

from .circuit import Circuit, Gate, gate, parse_circuit, read_circuit
from .errors import (
    ArgumentError,
    CapacityError,
    NumericError,
    ParseError,
    PrecisionError,
    PreconditionError,
    QsdError,
    UnsupportedError,
)
from .polarize import PolarizationParams, derive_params, polarize
from .states import QsdDecision, QsdInstance, decide_qsd

__all__ = [
    "ArgumentError",
    "CapacityError",
    "Circuit",
    "Gate",
    "NumericError",
    "ParseError",
    "PolarizationParams",
    "PrecisionError",
    "PreconditionError",
    "QsdDecision",
    "QsdError",
    "QsdInstance",
    "UnsupportedError",
    "decide_qsd",
    "derive_params",
    "gate",
    "parse_circuit",
    "polarize",
    "read_circuit",
]
