"""Base prover strategy"""

from abc import ABC, abstractmethod
from typing import List, Tuple

import numpy as np

from ..core.errors import ArgumentError
from ..core.linalg import ComplexMatrix, is_unitary


class ProverStrategy(ABC):
    """A prover for the distance and closeness tests"""

    @property
    @abstractmethod
    def kind(self) -> str:
        """Short name used in reports"""
        pass

    @abstractmethod
    def distance_povm(self, xi0, xi1) -> Tuple[ComplexMatrix, ComplexMatrix]:
        """POVM (E0, E1) the prover measures on the state it receives"""
        pass

    @abstractmethod
    def closeness_kraus(self, phi, psi, split: Tuple[int, int]) -> List[ComplexMatrix]:
        """Kraus operators applied to the message (environment) register"""
        pass


class ChannelProver(ProverStrategy):
    """
    Prover described by one fixed channel on its message register

    In the distance test the channel output is measured on its first qubit
    and the outcome is the answer bit.
    """

    @abstractmethod
    def kraus(self, dim: int) -> List[ComplexMatrix]:
        pass

    def distance_povm(self, xi0, xi1) -> Tuple[ComplexMatrix, ComplexMatrix]:
        d = np.asarray(xi0).shape[0]
        if d < 2:
            raise ArgumentError("distance test needs at least one message qubit")
        first = np.zeros((d, d), dtype=np.complex128)
        first[: d // 2, : d // 2] = np.eye(d // 2)
        e0 = sum(k.conj().T @ first @ k for k in self.kraus(d))
        e1 = np.eye(d, dtype=np.complex128) - e0
        return e0, e1

    def closeness_kraus(self, phi, psi, split: Tuple[int, int]) -> List[ComplexMatrix]:
        return self.kraus(split[1])


def check_kraus(ops: List[ComplexMatrix], tol: float = 1e-8):
    if not ops:
        raise ArgumentError("a channel needs at least one Kraus operator")
    d = ops[0].shape[1]
    for k in ops:
        if k.ndim != 2 or k.shape != (d, d):
            raise ArgumentError(f"Kraus operators must all be {d}x{d}, got {k.shape}")
    total = sum(k.conj().T @ k for k in ops)
    if not np.allclose(total, np.eye(d), rtol=0.0, atol=tol):
        raise ArgumentError("Kraus operators do not satisfy completeness")


def check_unitary(u: ComplexMatrix):
    if not is_unitary(u):
        raise ArgumentError("prover unitary is not unitary")
