"""Seeded random cheating prover"""

from typing import List

from ..core.linalg import ComplexMatrix, check_dim
from ..core.sampling import random_unitary, rng_from
from .base import ChannelProver


class RandomProver(ChannelProver):
    """
    Haar-random unitary on message (x) private register

    The private register has the message's width and starts in |0>; tracing
    it out gives Kraus operators K_j = (I (x) <j|) U (I (x) |0>).
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    @property
    def kind(self) -> str:
        return f"random:{self.seed}"

    def kraus(self, dim: int) -> List[ComplexMatrix]:
        check_dim(dim * dim, "prover register")
        u = random_unitary(dim * dim, rng_from(self.seed)).reshape(dim, dim, dim, dim)
        return [u[:, j, :, 0].copy() for j in range(dim)]
