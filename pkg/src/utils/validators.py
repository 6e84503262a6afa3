"""Input file validation utilities"""

import hashlib
from pathlib import Path
from typing import Iterable

from ..core.errors import ArgumentError

CIRCUIT_SUFFIXES = (".qc",)
PROOF_SYSTEM_SUFFIXES = (".qps",)


def has_suffix(path, suffixes) -> bool:
    return Path(path).suffix.lower() in suffixes


def require_file(path, suffixes=None) -> Path:
    """Check that ``path`` is a readable file with one of ``suffixes``"""
    p = Path(path)
    if not p.is_file():
        raise ArgumentError(f"no such file: {p}")
    if suffixes and not has_suffix(p, suffixes):
        raise ArgumentError(f"{p}: expected a {' or '.join(suffixes)} file")
    return p


def input_digest(paths: Iterable) -> str:
    """sha256 over the concatenated file contents, first 16 hex digits"""
    h = hashlib.sha256()
    for path in paths:
        h.update(Path(path).read_bytes())
    return h.hexdigest()[:16]
