"""Provers given by an explicit unitary or channel"""

from typing import List, Sequence

import numpy as np

from ..core.errors import ArgumentError
from ..core.linalg import ComplexMatrix
from .base import ChannelProver, check_kraus, check_unitary


class FixedUnitaryProver(ChannelProver):
    def __init__(self, unitary):
        self.unitary = np.asarray(unitary, dtype=np.complex128)
        check_unitary(self.unitary)

    @property
    def kind(self) -> str:
        return "fixed-unitary"

    def kraus(self, dim: int) -> List[ComplexMatrix]:
        if self.unitary.shape[0] != dim:
            raise ArgumentError(f"prover unitary is {self.unitary.shape[0]}-dimensional, message is {dim}")
        return [self.unitary]


class FixedChannelProver(ChannelProver):
    def __init__(self, kraus: Sequence):
        self.ops = [np.asarray(k, dtype=np.complex128) for k in kraus]
        check_kraus(self.ops)

    @property
    def kind(self) -> str:
        return "fixed-channel"

    def kraus(self, dim: int) -> List[ComplexMatrix]:
        if self.ops[0].shape[0] != dim:
            raise ArgumentError(f"prover channel is {self.ops[0].shape[0]}-dimensional, message is {dim}")
        return self.ops
