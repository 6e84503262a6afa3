"""
Matrix text format

    # comment
    matrix <rows> <cols>
    <entry> <entry> ...

Entries are whitespace separated, row-major, written ``re±imj``. Real and
imaginary parts may be decimals or rationals ``a/b`` (``1/2-3/4j``). A file
may hold several matrices one after another (Kraus lists).
"""

import re
from fractions import Fraction
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .errors import ParseError

_UNSIGNED = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>[+-]?{_UNSIGNED})(?P<im>[+-](?:{_UNSIGNED})?)[jJ]$")
_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_UNSIGNED})?)[jJ]$")
_REAL = re.compile(rf"^(?P<re>[+-]?{_UNSIGNED})$")


def _part(text: str) -> Fraction:
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    if "/" in text:
        num, den = text.split("/")
        if Fraction(den) == 0:
            raise ZeroDivisionError(text)
        return Fraction(num) / Fraction(den)
    return Fraction(text)


def parse_scalar_exact(token: str) -> Tuple[Fraction, Fraction]:
    """Parse ``re±imj`` into exact (real, imaginary) fractions"""
    m = _COMPLEX.match(token)
    if m:
        return _part(m.group("re")), _part(m.group("im"))
    m = _IMAG.match(token)
    if m:
        return Fraction(0), _part(m.group("im"))
    m = _REAL.match(token)
    if m:
        return _part(m.group("re")), Fraction(0)
    raise ValueError(f"malformed entry {token!r}")


def parse_scalar(token: str) -> complex:
    real, imag = parse_scalar_exact(token)
    return complex(float(real), float(imag))


def format_scalar(z: complex) -> str:
    """Shortest round-tripping ``re±imj`` text"""
    z = complex(z)
    return f"{z.real!r}{z.imag:+}j"


def _tokens(text: str) -> Iterator[Tuple[str, int, int]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for m in re.finditer(r"\S+", line):
            yield m.group(0), lineno, m.start() + 1


def parse_matrices(text: str, source: Optional[str] = None) -> List[np.ndarray]:
    """Parse every matrix block in ``text``"""
    tokens = list(_tokens(text))
    out: List[np.ndarray] = []
    i = 0
    while i < len(tokens):
        word, line, col = tokens[i]
        if word != "matrix":
            raise ParseError(f"expected 'matrix', got {word!r}", line, col, source)
        if i + 2 >= len(tokens):
            raise ParseError("missing matrix dimensions", line, col, source)
        try:
            rows, cols = int(tokens[i + 1][0]), int(tokens[i + 2][0])
        except ValueError:
            raise ParseError("matrix dimensions must be integers", line, col, source) from None
        if rows < 1 or cols < 1:
            raise ParseError(f"matrix dimensions must be positive, got {rows}x{cols}", line, col, source)
        i += 3
        entries = tokens[i:i + rows * cols]
        if len(entries) < rows * cols:
            raise ParseError(f"expected {rows * cols} entries, found {len(entries)}", line, col, source)
        values = []
        for token, eline, ecol in entries:
            if token == "matrix":
                raise ParseError(f"expected {rows * cols} entries before next matrix", eline, ecol, source)
            try:
                values.append(parse_scalar(token))
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"malformed entry {token!r}", eline, ecol, source) from None
        out.append(np.array(values, dtype=np.complex128).reshape(rows, cols))
        i += rows * cols
    if not out:
        raise ParseError("no matrix found", 1, 1, source)
    return out


def parse_matrix(text: str, source: Optional[str] = None) -> np.ndarray:
    matrices = parse_matrices(text, source)
    if len(matrices) != 1:
        raise ParseError(f"expected one matrix, found {len(matrices)}", 1, 1, source)
    return matrices[0]


def serialize_matrix(a) -> str:
    m = np.asarray(a, dtype=np.complex128)
    lines = [f"matrix {m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(format_scalar(z) for z in row))
    return "\n".join(lines) + "\n"


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    return parse_matrix(path.read_text(), str(path))


def read_matrices(path) -> List[np.ndarray]:
    path = Path(path)
    return parse_matrices(path.read_text(), str(path))


def write_matrix(a, path):
    Path(path).write_text(serialize_matrix(a))
