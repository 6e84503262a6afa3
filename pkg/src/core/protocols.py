"""
Distance test and closeness test

Both protocols run on the polarized pair (R0, R1) of a QSD instance and are
evaluated exactly from density matrices: no sampling is involved in the
acceptance probabilities or in the verifier views.

Distance test: the verifier picks b uniformly, sends the state prepared by
R_b and accepts when the prover names b.

Closeness test: the verifier runs R0, sends the non-output qubits, gets
them back, undoes R1 and accepts on the all-zero outcome.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import polar

from .circuit import Circuit
from .errors import ArgumentError
from .linalg import (
    ComplexMatrix,
    StateVector,
    as_square,
    fidelity,
    is_state,
    positive_projection,
    projector,
    trace_distance,
    trace_norm,
)
from .polarize import PolarizationParams, derive_params, polarize
from .sampling import rng_from
from .states import QsdInstance, prepare_mixed, prepare_pure

if TYPE_CHECKING:
    from ..provers.base import ProverStrategy

logger = logging.getLogger(__name__)

DISTANCE = "distance"
CLOSENESS = "closeness"


class HelstromMeasurement(NamedTuple):
    pi0: ComplexMatrix
    pi1: ComplexMatrix
    p_opt: float


@dataclass
class ProtocolTranscript:
    """Record of one exact protocol evaluation"""
    protocol: str
    prover: str
    params: PolarizationParams
    views: List[ComplexMatrix]
    acceptance: float
    completeness_error: float
    zk_bound: float
    extras: Dict[str, float] = field(default_factory=dict)

    def view_digests(self) -> List[str]:
        out = []
        for v in self.views:
            rounded = np.round(np.asarray(v, dtype=np.complex128), 10) + 0.0
            out.append(hashlib.sha256(rounded.tobytes()).hexdigest()[:16])
        return out

    def to_dict(self):
        return {
            "protocol": self.protocol,
            "prover": self.prover,
            "params": self.params.to_dict(),
            "acceptance": self.acceptance,
            "completeness_error": self.completeness_error,
            "zk_bound": self.zk_bound,
            "views": [f"dim={v.shape[0]} digest={d}" for v, d in zip(self.views, self.view_digests())],
            **self.extras,
        }


# ---------------------------------------------------------------------------
# Measurements and alignments
# ---------------------------------------------------------------------------

def helstrom(xi0, xi1) -> HelstromMeasurement:
    """
    Optimal two-outcome measurement for telling xi0 from xi1

    Pi0 projects onto the nonnegative eigenspace of xi0 - xi1 (zero modes
    included), Pi1 = I - Pi0.
    """
    a, b = as_square(xi0, "xi0"), as_square(xi1, "xi1")
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch {a.shape} vs {b.shape}")
    pi0 = positive_projection(a - b)
    pi1 = np.eye(a.shape[0], dtype=np.complex128) - pi0
    p_opt = 0.5 + 0.5 * trace_norm(a - b)
    return HelstromMeasurement(pi0, pi1, p_opt)


def success_probability(xi0, xi1, e0, e1) -> float:
    """Probability of naming b correctly with POVM (e0, e1) and a uniform b"""
    return float(0.5 * (np.trace(e0 @ xi0).real + np.trace(e1 @ xi1).real))


def _split_check(v: StateVector, dims: Tuple[int, int], name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if dims[0] * dims[1] != v.size:
        raise ArgumentError(f"{name}: split {dims} does not match dimension {v.size}")
    return v.reshape(dims)


def align_isometry(phi, psi, keep: int) -> ComplexMatrix:
    """
    Isometry W from phi's environment into psi's maximizing <psi|(I (x) W)|phi>

    ``phi`` lives on keep x dA and ``psi`` on keep x dB with dB >= dA. The
    returned W (dB x dA) makes the overlap real and nonnegative; its value
    is the trace norm (unhalved) of the cross matrix, i.e. the fidelity of
    the two reduced states on the kept system.
    """
    phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if phi.size % keep or psi.size % keep:
        raise ArgumentError(f"kept dimension {keep} does not divide {phi.size} and {psi.size}")
    da, db = phi.size // keep, psi.size // keep
    if db < da:
        raise ArgumentError(f"target environment ({db}) smaller than source ({da})")
    xi = phi.reshape(keep, da)
    ph = psi.reshape(keep, db)
    cross = ph.conj().T @ xi
    w, _ = polar(cross.conj(), side="right")
    return np.asarray(w, dtype=np.complex128)


def apply_env(phi, op, split: Tuple[int, int]) -> StateVector:
    """(I (x) op)|phi> for ``op`` acting on the environment factor"""
    m = _split_check(phi, split, "phi")
    return (m @ np.asarray(op).T).reshape(-1)


def uhlmann_unitary(phi, psi, split: Tuple[int, int]) -> ComplexMatrix:
    """
    Environment unitary U maximizing |<psi|(I (x) U)|phi>|

    The overlap reached is F(tr_env phi, tr_env psi), real and nonnegative.
    Both vectors must be unit state vectors.
    """
    for name, v in (("phi", phi), ("psi", psi)):
        _split_check(v, split, name)
        if not is_state(np.asarray(v).reshape(-1)):
            raise ArgumentError(f"{name} is not a unit state vector")
    return align_isometry(phi, psi, split[0])


def overlap(phi, psi) -> complex:
    return complex(np.vdot(np.asarray(psi).reshape(-1), np.asarray(phi).reshape(-1)))


# ---------------------------------------------------------------------------
# Protocol runs
# ---------------------------------------------------------------------------

def _params_for(inst: QsdInstance, params: Optional[PolarizationParams], n: int, closeness: bool):
    if params is not None:
        return params
    # the closeness test polarizes with security parameter n + 1
    return derive_params(inst.alpha, inst.beta, n + 1 if closeness else n)


def polarized_circuits(inst: QsdInstance, params: PolarizationParams) -> Tuple[Circuit, Circuit]:
    r0, r1, _ = polarize(inst.q0, inst.q1, params.n, override=params)
    return r0, r1


def _pure_split(c: Circuit) -> Tuple[StateVector, Tuple[int, int]]:
    """c|0> with qubits reordered to (outputs, non-outputs)"""
    psi = prepare_pure(c).reshape((2,) * c.width)
    order = list(c.outputs) + list(c.non_outputs)
    split = (2 ** len(c.outputs), 2 ** (c.width - len(c.outputs)))
    return psi.transpose(order).reshape(-1), split


def _distance_views(xi0, xi1, e0, e1) -> List[ComplexMatrix]:
    d = xi0.shape[0]
    view1 = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    view1[:d, :d] = 0.5 * xi0
    view1[d:, d:] = 0.5 * xi1
    answers = [[np.trace(e @ xi).real for e in (e0, e1)] for xi in (xi0, xi1)]
    view2 = np.diag([0.5 * answers[b][a] for b in (0, 1) for a in (0, 1)]).astype(np.complex128)
    return [view1, view2]


def run_distance_test(inst: QsdInstance, prover: "ProverStrategy",
                      params: Optional[PolarizationParams] = None, n: int = 1) -> ProtocolTranscript:
    """
    Exact distance test

    Views: after message 1 the verifier's coin and the sent state,
    (1/2) sum_b |b><b| (x) xi_b; after message 2 the coin and the prover's
    answer bit.
    """
    params = _params_for(inst, params, n, closeness=False)
    r0, r1 = polarized_circuits(inst, params)
    xi0, xi1 = prepare_mixed(r0), prepare_mixed(r1)
    e0, e1 = prover.distance_povm(xi0, xi1)
    acceptance = success_probability(xi0, xi1, e0, e1)
    optimum = helstrom(xi0, xi1)
    error = max(0.0, 1.0 - acceptance)
    logger.debug("distance test: acceptance %.9f (optimum %.9f)", acceptance, optimum.p_opt)
    return ProtocolTranscript(
        protocol=DISTANCE,
        prover=prover.kind,
        params=params,
        views=_distance_views(xi0, xi1, e0, e1),
        acceptance=acceptance,
        completeness_error=error,
        zk_bound=error,
        extras={"p_opt": optimum.p_opt, "distance": trace_distance(xi0, xi1)},
    )


def run_closeness_test(inst: QsdInstance, prover: "ProverStrategy",
                       params: Optional[PolarizationParams] = None, n: int = 1) -> ProtocolTranscript:
    """
    Exact closeness test

    The verifier keeps the output qubits of R0|0>, the prover acts on the
    rest with its channel, and acceptance is <psi|sigma|psi> for
    psi = R1|0>. The honest prover applies the Uhlmann unitary, reaching
    F(xi0, xi1)^2.

    The verifier's view after the prover's reply is pure for the honest
    prover, so its distance to the simulated view is sqrt(1 - acceptance);
    that is the zero-knowledge bound recorded here.
    """
    params = _params_for(inst, params, n, closeness=True)
    r0, r1 = polarized_circuits(inst, params)
    phi, split = _pure_split(r0)
    psi, split1 = _pure_split(r1)
    if split != split1:
        raise ArgumentError(f"polarized circuits disagree on the output split: {split} vs {split1}")

    kraus = prover.closeness_kraus(phi, psi, split)
    for k in kraus:
        if k.shape != (split[1], split[1]):
            raise ArgumentError(f"prover operator {k.shape} does not act on a {split[1]}-dim message")
    returned = [apply_env(phi, k, split) for k in kraus]
    sigma = sum(np.outer(v, v.conj()) for v in returned)
    acceptance = float(sum(abs(overlap(v, psi)) ** 2 for v in returned))

    honest_u = uhlmann_unitary(phi, psi, split)
    delta = psi - apply_env(phi, honest_u, split)
    lower = (1.0 - 0.5 * float(np.vdot(delta, delta).real)) ** 2
    xi0, xi1 = prepare_mixed(r0), prepare_mixed(r1)
    f = fidelity(xi0, xi1, validate=False)
    error = max(0.0, 1.0 - acceptance)
    logger.debug("closeness test: acceptance %.9f (F^2 %.9f)", acceptance, f * f)
    return ProtocolTranscript(
        protocol=CLOSENESS,
        prover=prover.kind,
        params=params,
        views=[projector(phi), sigma],
        acceptance=acceptance,
        completeness_error=error,
        zk_bound=float(np.sqrt(error)),
        extras={"fidelity": f, "fidelity_squared": f * f, "completeness_lower": lower},
    )


def simulator_views_distance(inst: QsdInstance, params: Optional[PolarizationParams] = None,
                             n: int = 1) -> List[ComplexMatrix]:
    """Simulated views: the honest first message, then the coin echoed back"""
    params = _params_for(inst, params, n, closeness=False)
    r0, r1 = polarized_circuits(inst, params)
    xi0, xi1 = prepare_mixed(r0), prepare_mixed(r1)
    eye = np.eye(xi0.shape[0], dtype=np.complex128)
    view1, _ = _distance_views(xi0, xi1, eye, 0 * eye)
    view2 = np.diag([0.5, 0.0, 0.0, 0.5]).astype(np.complex128)
    return [view1, view2]


def simulator_views_closeness(inst: QsdInstance, params: Optional[PolarizationParams] = None,
                              n: int = 1) -> List[ComplexMatrix]:
    """Simulated views: R0|0> before the prover's reply, R1|0> after it"""
    params = _params_for(inst, params, n, closeness=True)
    r0, r1 = polarized_circuits(inst, params)
    phi, _ = _pure_split(r0)
    psi, _ = _pure_split(r1)
    return [projector(phi), projector(psi)]


def zero_knowledge_gap(honest: Sequence[ComplexMatrix], simulated: Sequence[ComplexMatrix]) -> float:
    """Largest trace distance between matching views"""
    if len(honest) != len(simulated):
        raise ArgumentError(f"view counts differ: {len(honest)} vs {len(simulated)}")
    return max((trace_distance(a, b) for a, b in zip(honest, simulated)), default=0.0)


def sample_acceptance(transcript: ProtocolTranscript, shots: int, seed=None) -> int:
    """Seeded Bernoulli sampling of accept outcomes (demonstration only)"""
    if shots < 0:
        raise ArgumentError(f"shots must be >= 0, got {shots}")
    p = min(1.0, max(0.0, transcript.acceptance))
    return int(rng_from(seed).binomial(shots, p))
