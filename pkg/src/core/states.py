"""
QSD semantics: circuits to states

A circuit prepares ``c|0^m>``; the mixed state it describes is what remains
on the output qubits after discarding the rest.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from config.settings import get_config

from .circuit import Circuit, apply_circuit, zero_state
from .errors import ArgumentError
from .linalg import ComplexMatrix, StateVector, check_dim, trace_distance

logger = logging.getLogger(__name__)


class QsdDecision(Enum):
    """Outcome of the brute-force QSD oracle"""
    YES = "yes"
    NO = "no"
    PROMISE_VIOLATED = "promise-violated"


@dataclass(frozen=True)
class QsdOutcome:
    decision: QsdDecision
    distance: float

    def to_dict(self):
        return {"decision": self.decision.value, "distance": self.distance}


@dataclass(frozen=True)
class QsdInstance:
    """Two state-preparation circuits and the promise thresholds"""
    q0: Circuit
    q1: Circuit
    alpha: float
    beta: float

    def __post_init__(self):
        if len(self.q0.outputs) != len(self.q1.outputs):
            raise ArgumentError(
                f"output sizes differ: {len(self.q0.outputs)} vs {len(self.q1.outputs)}"
            )
        if not 0.0 <= self.alpha < 1.0:
            raise ArgumentError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not 0.0 < self.beta <= 1.0:
            raise ArgumentError(f"beta must lie in (0, 1], got {self.beta}")
        if self.alpha >= self.beta:
            raise ArgumentError(f"alpha ({self.alpha}) must be below beta ({self.beta})")

    @property
    def output_size(self) -> int:
        return len(self.q0.outputs)

    def require_polarizable(self):
        if self.alpha >= self.beta ** 2:
            raise ArgumentError(f"alpha >= beta^2 ({self.alpha} >= {self.beta ** 2:.6g})")


def prepare_pure(c: Circuit) -> StateVector:
    """Full-width state ``c|0^m>``"""
    return apply_circuit(c, zero_state(c.width))


def reduce_pure(psi, width: int, keep) -> ComplexMatrix:
    """Density matrix of qubits ``keep`` (in that order) for a pure state on ``width`` qubits"""
    keep = [int(q) for q in keep]
    rest = [q for q in range(width) if q not in keep]
    check_dim(2 ** len(keep), "reduced state side")
    t = np.asarray(psi, dtype=np.complex128).reshape((2,) * width)
    m = t.transpose(keep + rest).reshape(2 ** len(keep), 2 ** len(rest))
    return m @ m.conj().T


def prepare_mixed(c: Circuit) -> ComplexMatrix:
    """Density matrix on the output qubits after tracing out the others"""
    return reduce_pure(prepare_pure(c), c.width, c.outputs)


def prepare_pair(inst: QsdInstance) -> Tuple[ComplexMatrix, ComplexMatrix]:
    return prepare_mixed(inst.q0), prepare_mixed(inst.q1)


def decide_qsd(inst: QsdInstance, method: str = "eig", bits: int = 30,
               tol: Optional[float] = None) -> QsdOutcome:
    """
    Brute-force QSD oracle

    Computes the trace distance of the two prepared states and compares it
    against the thresholds. Exponential in the circuit width; meant for
    checking constructions, not for solving instances at scale.

    Args:
        inst: QSD instance
        method: "eig" (eigendecomposition) or "charpoly" (trace norm
            approximation over the characteristic polynomial)
        bits: Precision for the charpoly route
        tol: Slack applied to both thresholds

    Returns:
        QsdOutcome carrying the computed distance
    """
    tol = get_config().numerics.predicate_tol if tol is None else tol
    rho0, rho1 = prepare_pair(inst)
    if method == "eig":
        distance = trace_distance(rho0, rho1)
    elif method == "charpoly":
        from .tna import tna

        distance = tna(rho0 - rho1, bits)
    else:
        raise ArgumentError(f"unknown decision method {method!r}")

    if distance >= inst.beta - tol:
        decision = QsdDecision.YES
    elif distance <= inst.alpha + tol:
        decision = QsdDecision.NO
    else:
        decision = QsdDecision.PROMISE_VIOLATED
        logger.info("promise violated: distance %.6g outside [%g, %g]", distance, inst.alpha, inst.beta)
    return QsdOutcome(decision, float(distance))
