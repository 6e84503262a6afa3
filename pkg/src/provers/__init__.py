"""Prover strategies for the protocol simulations"""

import re

from ..core.errors import ArgumentError
from ..core.matrix_io import read_matrices
from .base import ChannelProver, ProverStrategy
from .fixed import FixedChannelProver, FixedUnitaryProver
from .honest import HonestProver
from .random_prover import RandomProver

PROVER_PATTERNS = {
    "honest": r"^honest$",
    "random": r"^random:(?P<seed>-?\d+)$",
    "file": r"^file:(?P<path>.+)$",
}


def parse_prover(text: str) -> ProverStrategy:
    """
    Build a prover from its command-line description

    Args:
        text: ``honest``, ``random:<seed>`` or ``file:<path>``; the file holds
            one unitary or a list of Kraus matrices in matrix text format

    Returns:
        ProverStrategy
    """
    text = (text or "").strip()
    for kind, pattern in PROVER_PATTERNS.items():
        match = re.match(pattern, text, re.IGNORECASE)
        if not match:
            continue
        if kind == "honest":
            return HonestProver()
        if kind == "random":
            return RandomProver(int(match.group("seed")))
        ops = read_matrices(match.group("path"))
        if len(ops) == 1:
            return FixedUnitaryProver(ops[0])
        return FixedChannelProver(ops)
    raise ArgumentError(f"unknown prover {text!r} (expected honest, random:<seed> or file:<path>)")


__all__ = [
    "ChannelProver",
    "FixedChannelProver",
    "FixedUnitaryProver",
    "HonestProver",
    "ProverStrategy",
    "RandomProver",
    "parse_prover",
]
