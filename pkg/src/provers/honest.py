"""Optimal prover: Helstrom measurement and Uhlmann alignment"""

from typing import List, Tuple

from ..core.linalg import ComplexMatrix
from ..core.protocols import helstrom, uhlmann_unitary
from .base import ProverStrategy


class HonestProver(ProverStrategy):
    """Prover that plays each test optimally"""

    @property
    def kind(self) -> str:
        return "honest"

    def distance_povm(self, xi0, xi1) -> Tuple[ComplexMatrix, ComplexMatrix]:
        measurement = helstrom(xi0, xi1)
        return measurement.pi0, measurement.pi1

    def closeness_kraus(self, phi, psi, split: Tuple[int, int]) -> List[ComplexMatrix]:
        return [uhlmann_unitary(phi, psi, split)]
