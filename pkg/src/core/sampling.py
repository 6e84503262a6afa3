"""Seeded random states, unitaries and circuits for property checks"""

from typing import Optional, Sequence

import numpy as np
from scipy.stats import unitary_group

from .circuit import GATE_PRESETS, Circuit, Gate
from .linalg import ComplexMatrix, StateVector

_ONE_QUBIT = ("h", "x", "y", "z", "s", "sdg", "t", "tdg")
_TWO_QUBIT = ("cx", "cz", "swap")


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(dim: int, rng=None) -> ComplexMatrix:
    """Haar-random unitary"""
    if dim == 1:
        phase = rng_from(rng).uniform(0, 2 * np.pi)
        return np.array([[np.exp(1j * phase)]], dtype=np.complex128)
    return np.asarray(unitary_group.rvs(dim, random_state=rng_from(rng)), dtype=np.complex128)


def random_pure(dim: int, rng=None) -> StateVector:
    rng = rng_from(rng)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng=None, rank: Optional[int] = None) -> ComplexMatrix:
    """Random density matrix ``G G^dagger / tr`` with a Ginibre factor of the given rank"""
    rng = rng_from(rng)
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_circuit(width: int, depth: int, rng=None, outputs: Optional[Sequence[int]] = None,
                   generic: float = 0.2) -> Circuit:
    """
    Random circuit over the preset gates, with a share of Haar-random ``u`` gates

    Args:
        width: Qubit count
        depth: Number of gates
        rng: Seed or Generator
        outputs: Output qubits; default every qubit
        generic: Probability that a gate is a random ``u`` gate
    """
    rng = rng_from(rng)
    gates = []
    for _ in range(depth):
        two = width >= 2 and rng.random() < 0.3
        arity = 2 if two else 1
        targets = tuple(int(q) for q in rng.choice(width, size=arity, replace=False))
        if rng.random() < generic:
            gates.append(Gate(random_unitary(2 ** arity, rng), targets, "u"))
        else:
            label = str(rng.choice(_TWO_QUBIT if two else _ONE_QUBIT))
            gates.append(Gate(GATE_PRESETS[label], targets, label))
    outs = tuple(range(width)) if outputs is None else tuple(outputs)
    return Circuit(width, tuple(gates), outs)
