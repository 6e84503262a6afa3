"""
Circuit intermediate representation

A circuit is an immutable list of unitary gates over ``width`` qubits plus
an ordered list of output qubits. Qubit 0 is the most significant bit of
basis-state labels: on two qubits ``|q0 q1>`` has index ``2*q0 + q1``.

Text format (``.qc``)::

    qubits 2
    outputs 0
    h 0
    cx 0 1
    u 1 1 [ 0.0+0.0j 1.0+0.0j 1.0+0.0j 0.0+0.0j ]
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.settings import get_config

from .errors import ArgumentError, CapacityError, ParseError
from .linalg import ComplexMatrix, StateVector, check_dim, is_unitary
from .matrix_io import format_scalar, parse_scalar

logger = logging.getLogger(__name__)

_S2 = 1 / np.sqrt(2)

GATE_PRESETS: Dict[str, np.ndarray] = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "s": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    "tdg": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=np.complex128),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
    "cz": np.diag([1, 1, 1, -1]).astype(np.complex128),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128),
}

ADJOINT_LABELS = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}
CONTROLLED_LABELS = {"x": "cx", "z": "cz"}


def _arity(matrix: np.ndarray) -> int:
    return int(matrix.shape[0]).bit_length() - 1


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary on an ordered tuple of target qubits (first target most significant)"""
    matrix: ComplexMatrix
    targets: Tuple[int, ...]
    label: str = "u"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        a = len(self.targets)
        if a == 0 or m.shape != (2 ** a, 2 ** a):
            raise ArgumentError(f"gate {self.label!r}: matrix {m.shape} does not match {a} targets")
        if len(set(self.targets)) != a or min(self.targets) < 0:
            raise ArgumentError(f"gate {self.label!r}: targets {self.targets} must be distinct and >= 0")
        if not is_unitary(m):
            raise ArgumentError(f"gate {self.label!r} on {self.targets} is not unitary")

    @property
    def arity(self) -> int:
        return len(self.targets)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.label == other.label
            and self.targets == other.targets
            and np.allclose(self.matrix, other.matrix, rtol=0.0, atol=1e-12)
        )

    def __hash__(self):
        return hash((self.label, self.targets))


@dataclass(frozen=True, eq=False)
class Circuit:
    """Gates over ``width`` qubits with designated output qubits"""
    width: int
    gates: Tuple[Gate, ...] = ()
    outputs: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "outputs", tuple(int(o) for o in self.outputs))
        if self.width < 1:
            raise ArgumentError(f"circuit width must be >= 1, got {self.width}")
        for g in self.gates:
            if max(g.targets) >= self.width:
                raise ArgumentError(f"gate {g.label!r} targets {g.targets} outside width {self.width}")
        if len(set(self.outputs)) != len(self.outputs):
            raise ArgumentError(f"outputs {self.outputs} are not distinct")
        if any(o < 0 or o >= self.width for o in self.outputs):
            raise ArgumentError(f"outputs {self.outputs} outside width {self.width}")

    @property
    def non_outputs(self) -> Tuple[int, ...]:
        out = set(self.outputs)
        return tuple(q for q in range(self.width) if q not in out)

    @property
    def touched(self) -> set:
        return {t for g in self.gates for t in g.targets}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.width == other.width
            and self.outputs == other.outputs
            and len(self.gates) == len(other.gates)
            and all(a == b for a, b in zip(self.gates, other.gates))
        )

    def __hash__(self):
        return hash((self.width, self.outputs, len(self.gates)))

    def __repr__(self) -> str:
        return f"Circuit(width={self.width}, gates={len(self.gates)}, outputs={list(self.outputs)})"


def gate(label: str, *targets: int) -> Gate:
    """Preset gate by mnemonic"""
    key = label.lower()
    if key not in GATE_PRESETS:
        raise ArgumentError(f"unknown gate mnemonic {label!r}")
    matrix = GATE_PRESETS[key]
    if len(targets) != _arity(matrix):
        raise ArgumentError(f"gate {key!r} takes {_arity(matrix)} targets, got {len(targets)}")
    return Gate(matrix, tuple(targets), key)


def unitary_gate(matrix, targets: Sequence[int]) -> Gate:
    return Gate(np.asarray(matrix, dtype=np.complex128), tuple(targets), "u")


def circuit(width: int, gates: Iterable[Gate] = (), outputs: Optional[Sequence[int]] = None) -> Circuit:
    """Convenience constructor; outputs default to every qubit"""
    outs = tuple(range(width)) if outputs is None else tuple(outputs)
    return Circuit(width, tuple(gates), outs)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def check_width(width: int, what: str = "circuit width"):
    limit = get_config().capacity.max_circuit_qubits
    if width > limit:
        logger.warning("refusing %s of %d qubits (cap %d)", what, width, limit)
        raise CapacityError(what, width, limit)


def _apply_matrix(tensor: np.ndarray, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    a = len(targets)
    m = matrix.reshape((2,) * (2 * a))
    out = np.tensordot(m, tensor, axes=(list(range(a, 2 * a)), list(targets)))
    return np.moveaxis(out, list(range(a)), list(targets))


def basis_state(bits: Sequence[int]) -> StateVector:
    """|b_0 b_1 ...> with b_0 on qubit 0 (most significant)"""
    if not bits or any(int(b) not in (0, 1) for b in bits):
        raise ArgumentError(f"basis state needs a nonempty bit string, got {list(bits)}")
    check_width(len(bits), "state width")
    psi = np.zeros(2 ** len(bits), dtype=np.complex128)
    psi[int("".join(str(int(b)) for b in bits), 2)] = 1.0
    return psi


def zero_state(width: int) -> StateVector:
    if width < 1:
        raise ArgumentError(f"state width must be >= 1, got {width}")
    return basis_state([0] * width)


def apply_gate(g: Gate, psi: StateVector, width: int) -> StateVector:
    t = np.asarray(psi, dtype=np.complex128).reshape((2,) * width)
    return _apply_matrix(t, g.matrix, g.targets).reshape(-1)


def apply_circuit(c: Circuit, psi) -> StateVector:
    """Apply the gates of ``c`` in order to a full-width state vector"""
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if v.size != 2 ** c.width:
        raise ArgumentError(f"state of dimension {v.size} does not match circuit width {c.width}")
    check_width(c.width)
    t = v.reshape((2,) * c.width)
    for g in c.gates:
        t = _apply_matrix(t, g.matrix, g.targets)
    return t.reshape(-1).copy()


def circuit_unitary(c: Circuit) -> ComplexMatrix:
    """Full 2^width matrix of the circuit"""
    dim = 2 ** c.width
    check_dim(dim, "circuit unitary side")
    t = np.eye(dim, dtype=np.complex128).reshape((2,) * c.width + (dim,))
    for g in c.gates:
        t = _apply_matrix(t, g.matrix, g.targets)
    return t.reshape(dim, dim)


# ---------------------------------------------------------------------------
# Combinators
# ---------------------------------------------------------------------------

def adjoint(c: Circuit) -> Circuit:
    """Reversed gate list with conjugate-transposed matrices"""
    gates = tuple(
        Gate(g.matrix.conj().T, g.targets, ADJOINT_LABELS.get(g.label, g.label))
        for g in reversed(c.gates)
    )
    return Circuit(c.width, gates, c.outputs)


def controlled_gate(g: Gate, control: int) -> Gate:
    """|0><0| (x) I + |1><1| (x) G on (control, *targets)"""
    if control in g.targets:
        raise ArgumentError(f"control {control} collides with gate targets {g.targets}")
    d = g.matrix.shape[0]
    m = np.eye(2 * d, dtype=np.complex128)
    m[d:, d:] = g.matrix
    return Gate(m, (control,) + g.targets, CONTROLLED_LABELS.get(g.label, "u"))


def add_control(c: Circuit, control: Optional[int] = None) -> Circuit:
    """
    Condition every gate of ``c`` on qubit ``control``

    The control may be a fresh index (default ``c.width``) or an existing
    qubit that no gate touches and that is not an output.
    """
    control = c.width if control is None else int(control)
    if control < 0:
        raise ArgumentError(f"control index {control} is negative")
    if control < c.width and (control in c.touched or control in c.outputs):
        raise ArgumentError(f"control index {control} collides with a qubit of the circuit")
    width = max(c.width, control + 1)
    return Circuit(width, tuple(controlled_gate(g, control) for g in c.gates), c.outputs)


def relabel(c: Circuit, mapping, width: Optional[int] = None, outputs: Optional[Sequence[int]] = None) -> Circuit:
    """
    Move qubit ``q`` to ``mapping[q]``

    Args:
        c: Circuit to relabel
        mapping: Sequence or mapping over all of c's qubits (injective)
        width: Width of the result; defaults to the largest image + 1
        outputs: Outputs of the result; defaults to the mapped outputs
    """
    if isinstance(mapping, Mapping):
        table = {int(k): int(v) for k, v in mapping.items()}
    else:
        table = {i: int(v) for i, v in enumerate(mapping)}
    missing = [q for q in range(c.width) if q not in table]
    if missing:
        raise ArgumentError(f"relabel mapping misses qubits {missing}")
    images = [table[q] for q in range(c.width)]
    if len(set(images)) != len(images) or min(images) < 0:
        raise ArgumentError(f"relabel mapping {images} is not injective")
    new_width = max(images) + 1 if width is None else width
    gates = tuple(Gate(g.matrix, tuple(table[t] for t in g.targets), g.label) for g in c.gates)
    outs = tuple(table[o] for o in c.outputs) if outputs is None else tuple(outputs)
    return Circuit(new_width, gates, outs)


def canonicalize_outputs(c: Circuit) -> Circuit:
    """Relabel so outputs occupy qubits 0..k-1 in order, other qubits follow ascending"""
    order = list(c.outputs) + list(c.non_outputs)
    mapping = {q: i for i, q in enumerate(order)}
    return relabel(c, mapping, c.width)


def compose(a: Circuit, b: Circuit, wiring: Optional[Mapping[int, int]] = None,
            outputs: Optional[Sequence[int]] = None) -> Circuit:
    """
    Run ``a`` then ``b``

    Args:
        a: First circuit
        b: Second circuit
        wiring: b-qubit -> result qubit. Indices below a.width share a's
            qubits, larger ones are fresh. Unwired b-qubits get fresh qubits.
            Defaults to the identity on the qubits the two widths share.
        outputs: Result outputs; defaults to a's outputs followed by b's
            (mapped) outputs not already present

    Returns:
        Composed circuit
    """
    if wiring is None:
        wiring = {q: q for q in range(min(a.width, b.width))}
    table = {int(k): int(v) for k, v in wiring.items()}
    if any(k < 0 or k >= b.width for k in table):
        raise ArgumentError(f"wiring keys {sorted(table)} outside b's width {b.width}")
    images = list(table.values())
    if len(set(images)) != len(images) or (images and min(images) < 0):
        raise ArgumentError(f"wiring {table} is not injective")
    fresh = max([a.width] + [v + 1 for v in images])
    for q in range(b.width):
        if q not in table:
            table[q] = fresh
            fresh += 1
    width = max([a.width] + [v + 1 for v in table.values()])
    moved = relabel(b, table, width)
    if outputs is None:
        outs = list(a.outputs) + [o for o in moved.outputs if o not in a.outputs]
    else:
        outs = list(outputs)
    return Circuit(width, a.gates + moved.gates, tuple(outs))


def parallel(a: Circuit, b: Circuit) -> Circuit:
    """``b`` on fresh qubits after ``a``; outputs concatenated"""
    shifted = relabel(b, {q: a.width + q for q in range(b.width)}, a.width + b.width)
    return Circuit(a.width + b.width, a.gates + shifted.gates, a.outputs + shifted.outputs)


def repeat_parallel(c: Circuit, copies: int) -> Circuit:
    if copies < 1:
        raise ArgumentError(f"copies must be >= 1, got {copies}")
    out = c
    for _ in range(copies - 1):
        out = parallel(out, c)
    return out


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

Token = Tuple[str, int, int]


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        col = 0
        for word in line.split():
            col = line.index(word, col)
            tokens.append((word, lineno, col + 1))
            col += len(word)
    return tokens


class CircuitParser:
    """Token-stream parser shared by the .qc and .qps readers"""

    def __init__(self, text: str, source: Optional[str] = None):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.source = source

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        if token is None:
            token = self.tokens[-1] if self.tokens else ("", 1, 1)
            return ParseError(message, token[1], token[2] + len(token[0]), self.source)
        return ParseError(message, token[1], token[2], self.source)

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> Optional[Token]:
        return None if self.at_end() else self.tokens[self.pos]

    def take(self) -> Token:
        if self.at_end():
            raise self.error("unexpected end of input")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def rest_of_line(self, line: int) -> List[Token]:
        out = []
        while not self.at_end() and self.tokens[self.pos][1] == line:
            out.append(self.tokens[self.pos])
            self.pos += 1
        return out

    def integer(self, tok: Token, what: str) -> int:
        try:
            return int(tok[0])
        except ValueError:
            raise self.error(f"expected integer {what}, got {tok[0]!r}", tok) from None

    def header(self, keyword: str) -> List[Token]:
        tok = self.take()
        if tok[0].lower() != keyword:
            raise self.error(f"expected '{keyword}', got {tok[0]!r}", tok)
        return self.rest_of_line(tok[1])

    def qubit_list(self, toks: List[Token], width: int, what: str) -> Tuple[int, ...]:
        out = []
        for tok in toks:
            q = self.integer(tok, what)
            if q < 0 or q >= width:
                raise self.error(f"qubit index {q} out of range for width {width}", tok)
            if q in out:
                raise self.error(f"duplicate qubit index {q} in {what}", tok)
            out.append(q)
        return tuple(out)

    def _matrix(self, arity: int, head: Token) -> np.ndarray:
        count = 4 ** arity
        entries: List[Token] = []
        nxt = self.peek()
        if nxt is not None and nxt[0] == "[":
            self.take()
            while True:
                tok = self.take() if not self.at_end() else None
                if tok is None:
                    raise self.error("unterminated matrix literal, expected ']'", head)
                if tok[0] == "]":
                    break
                entries.append(tok)
            if len(entries) != count:
                raise self.error(f"u gate of arity {arity} needs {count} entries, got {len(entries)}", head)
        else:
            for _ in range(count):
                if self.at_end():
                    raise self.error(f"u gate of arity {arity} needs {count} entries", head)
                entries.append(self.take())
        values = []
        for tok in entries:
            try:
                values.append(parse_scalar(tok[0]))
            except (ValueError, ZeroDivisionError):
                raise self.error(f"malformed matrix entry {tok[0]!r}", tok) from None
        return np.array(values, dtype=np.complex128).reshape(2 ** arity, 2 ** arity)

    def gate(self, width: int) -> Gate:
        head = self.take()
        label = head[0].lower()
        if label == "u":
            args = []
            line = head[1]
            arity_tok = self.take()
            if arity_tok[1] != line:
                raise self.error("u gate needs '<arity> <targets...>' on its line", head)
            arity = self.integer(arity_tok, "arity")
            if arity < 1:
                raise self.error(f"u gate arity must be >= 1, got {arity}", arity_tok)
            for _ in range(arity):
                tok = self.take()
                if tok[1] != line:
                    raise self.error(f"u gate of arity {arity} needs {arity} targets on its line", head)
                args.append(tok)
            targets = self.qubit_list(args, width, "gate targets")
            matrix = self._matrix(arity, head)
            if not is_unitary(matrix):
                raise self.error("inline matrix is not unitary", head)
            return Gate(matrix, targets, "u")

        if label not in GATE_PRESETS:
            raise self.error(f"unknown gate mnemonic {head[0]!r}", head)
        args = self.rest_of_line(head[1])
        expected = _arity(GATE_PRESETS[label])
        if len(args) != expected:
            raise self.error(f"gate {label!r} takes {expected} targets, got {len(args)}", head)
        targets = self.qubit_list(args, width, "gate targets")
        return Gate(GATE_PRESETS[label], targets, label)

    def gates_until(self, width: int, stop: Optional[str] = None) -> List[Gate]:
        gates = []
        while not self.at_end():
            tok = self.peek()
            if stop is not None and tok[0].lower() == stop:
                return gates
            gates.append(self.gate(width))
        if stop is not None:
            raise self.error(f"missing '{stop}'")
        return gates

    def circuit_header(self) -> Tuple[int, Tuple[int, ...]]:
        qtoks = self.header("qubits")
        if len(qtoks) != 1:
            raise self.error("'qubits' takes exactly one count", qtoks[0] if qtoks else None)
        width = self.integer(qtoks[0], "qubit count")
        if width < 1:
            raise self.error(f"qubit count must be >= 1, got {width}", qtoks[0])
        outputs = self.qubit_list(self.header("outputs"), width, "outputs")
        return width, outputs

    def circuit(self) -> Circuit:
        width, outputs = self.circuit_header()
        gates = self.gates_until(width)
        return Circuit(width, tuple(gates), outputs)


def parse_circuit(text: str, source: Optional[str] = None) -> Circuit:
    """Parse ``.qc`` text; errors carry 1-based line and column"""
    return CircuitParser(text, source).circuit()


def serialize_gate(g: Gate) -> str:
    if g.label in GATE_PRESETS and np.allclose(g.matrix, GATE_PRESETS[g.label], rtol=0.0, atol=1e-12):
        return " ".join([g.label] + [str(t) for t in g.targets])
    entries = " ".join(format_scalar(z) for z in g.matrix.reshape(-1))
    targets = " ".join(str(t) for t in g.targets)
    return f"u {g.arity} {targets} [ {entries} ]"


def serialize_circuit(c: Circuit, header: Sequence[str] = ()) -> str:
    """Canonical ``.qc`` text; ``header`` lines become leading comments"""
    lines = [f"# {h}" for h in header]
    lines.append(f"qubits {c.width}")
    lines.append(" ".join(["outputs"] + [str(o) for o in c.outputs]))
    lines.extend(serialize_gate(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def read_circuit(path) -> Circuit:
    path = Path(path)
    return parse_circuit(path.read_text(), str(path))


def write_circuit(c: Circuit, path, header: Sequence[str] = ()):
    Path(path).write_text(serialize_circuit(c, header))
