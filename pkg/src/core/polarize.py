"""
Trace-distance polarization

Three stages drive the distance between two prepared states towards 0 or 1:
an XOR stage with exponent r, an s-fold amplification, and a final XOR
stage with exponent n. Every stage exists as a circuit-to-circuit
transform and as an operator-level transform on density matrices.
"""

import itertools
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import get_config

from .circuit import (
    Circuit,
    add_control,
    canonicalize_outputs,
    check_width,
    gate,
    relabel,
    repeat_parallel,
)
from .errors import ArgumentError
from .linalg import ComplexMatrix, as_square, check_dim, tensor_all

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^\s*#?\s*polarize:\s*(?P<body>.*)$")


@dataclass(frozen=True)
class PolarizationParams:
    """Exponents of the three polarization stages"""
    n: int
    r: int
    s: int
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        for name in ("n", "r", "s"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_dict(self):
        return asdict(self)

    def header_lines(self) -> List[str]:
        parts = [f"n={self.n}", f"r={self.r}", f"s={self.s}"]
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha!r}")
        if self.beta is not None:
            parts.append(f"beta={self.beta!r}")
        return ["polarize: " + " ".join(parts)]

    @classmethod
    def from_header(cls, text: str) -> "PolarizationParams":
        for line in text.splitlines():
            m = _HEADER.match(line)
            if not m:
                continue
            fields = dict(item.split("=", 1) for item in m.group("body").split() if "=" in item)
            try:
                return cls(
                    n=int(fields["n"]),
                    r=int(fields["r"]),
                    s=int(fields["s"]),
                    alpha=float(fields["alpha"]) if "alpha" in fields else None,
                    beta=float(fields["beta"]) if "beta" in fields else None,
                )
            except (KeyError, ValueError) as e:
                raise ArgumentError(f"malformed polarize header {line!r}") from e
        raise ArgumentError("no polarize header found")


def check_thresholds(alpha: float, beta: float):
    if not 0.0 <= alpha < 1.0 or not 0.0 < beta <= 1.0:
        raise ArgumentError(f"thresholds out of range: alpha={alpha}, beta={beta}")
    if alpha >= beta ** 2:
        raise ArgumentError(f"alpha >= beta^2 ({alpha} >= {beta ** 2:.6g})")


def derive_params(alpha: float, beta: float, n: int) -> PolarizationParams:
    """
    Default stage exponents for thresholds (alpha, beta) and security parameter n

    r = ceil(log(8n) / log(beta^2 / alpha)), s = floor(alpha^-r / 2). The
    power alpha^-r is evaluated on the decimal value of alpha so that
    0.1^-2 gives exactly 100.
    """
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    check_thresholds(alpha, beta)
    if alpha == 0.0:
        cap = get_config().capacity.max_amplification
        logger.warning("alpha = 0: using r = 1 and capping s at %d", cap)
        return PolarizationParams(n=n, r=1, s=cap, alpha=alpha, beta=beta)
    ratio = math.log(8 * n) / math.log(beta ** 2 / alpha)
    r = max(1, math.ceil(ratio - 1e-12))
    s = max(1, math.floor(Fraction(repr(alpha)) ** -r / 2))
    return PolarizationParams(n=n, r=r, s=s, alpha=alpha, beta=beta)


def _check_pair(q0: Circuit, q1: Circuit):
    if len(q0.outputs) != len(q1.outputs):
        raise ArgumentError(f"output sizes differ: {len(q0.outputs)} vs {len(q1.outputs)}")


def _xor_circuit(a: Circuit, b: Circuit, r: int, flip: bool) -> Circuit:
    w = max(a.width, b.width)
    k = len(a.outputs)
    width = r * w + r
    check_width(width, "xor circuit width")
    controls = [r * w + j for j in range(r - 1)]
    parity = r * w + r - 1

    gates = [gate("h", c) for c in controls]
    gates += [gate("cx", c, parity) for c in controls]
    if flip:
        gates.append(gate("x", parity))
    for i in range(r):
        ctrl = controls[i] if i < r - 1 else parity
        block = {q: i * w + q for q in range(w)}
        on_zero = add_control(relabel(a, {q: block[q] for q in range(a.width)}, width), ctrl)
        on_one = add_control(relabel(b, {q: block[q] for q in range(b.width)}, width), ctrl)
        gates.append(gate("x", ctrl))
        gates.extend(on_zero.gates)
        gates.append(gate("x", ctrl))
        gates.extend(on_one.gates)
    outputs = tuple(i * w + o for i in range(r) for o in range(k))
    return Circuit(width, tuple(gates), outputs)


def xor_transform(q0: Circuit, q1: Circuit, r: int) -> Tuple[Circuit, Circuit]:
    """
    XOR stage: distance d becomes d^r

    Block i runs q0 or q1 depending on bit b_i. Bits b_1..b_{r-1} come from
    Hadamard-prepared control qubits, b_r is their parity (complemented for
    the second circuit). Controls and parity are non-output, so the output
    state is the uniform mixture over bit strings of even (odd) parity.
    """
    _check_pair(q0, q1)
    if r < 1:
        raise ArgumentError(f"r must be >= 1, got {r}")
    a, b = canonicalize_outputs(q0), canonicalize_outputs(q1)
    return _xor_circuit(a, b, r, flip=False), _xor_circuit(a, b, r, flip=True)


def amplify_transform(q0: Circuit, q1: Circuit, s: int) -> Tuple[Circuit, Circuit]:
    """s independent copies of each circuit"""
    _check_pair(q0, q1)
    if s < 1:
        raise ArgumentError(f"s must be >= 1, got {s}")
    check_width(s * max(q0.width, q1.width), "amplified circuit width")
    return repeat_parallel(q0, s), repeat_parallel(q1, s)


def polarized_width(width: int, params: PolarizationParams) -> int:
    first = params.r * width + params.r
    return params.n * (params.s * first) + params.n


Override = Union[PolarizationParams, Tuple[int, int]]


def resolve_params(n: int, alpha: Optional[float] = None, beta: Optional[float] = None,
                   override: Optional[Override] = None, final_n: Optional[int] = None) -> PolarizationParams:
    if override is None:
        if alpha is None or beta is None:
            raise ArgumentError("alpha and beta are required unless (r, s) is overridden")
        params = derive_params(alpha, beta, n)
    elif isinstance(override, PolarizationParams):
        params = override
    else:
        r, s = override
        params = PolarizationParams(n=n, r=int(r), s=int(s), alpha=alpha, beta=beta)
    if final_n is not None:
        params = replace(params, n=final_n)
    return params


def polarize(q0: Circuit, q1: Circuit, n: int, alpha: Optional[float] = None,
             beta: Optional[float] = None, override: Optional[Override] = None,
             final_n: Optional[int] = None) -> Tuple[Circuit, Circuit, PolarizationParams]:
    """
    Full polarization pipeline: xor(r), then amplify(s), then xor(n)

    Args:
        q0: First circuit
        q1: Second circuit
        n: Security parameter (exponent of the final XOR stage)
        alpha: Lower threshold
        beta: Upper threshold
        override: (r, s) or full params replacing the derived defaults
        final_n: Exponent of the final XOR stage when it differs from n

    Returns:
        (R0, R1, params)

    Raises:
        ArgumentError: alpha >= beta^2 or bad parameters
        CapacityError: the emitted circuits would exceed the qubit cap
    """
    _check_pair(q0, q1)
    params = resolve_params(n, alpha, beta, override, final_n)
    check_width(polarized_width(max(q0.width, q1.width), params), "polarized circuit width")
    logger.debug("polarizing with n=%d r=%d s=%d", params.n, params.r, params.s)
    a0, a1 = xor_transform(q0, q1, params.r)
    b0, b1 = amplify_transform(a0, a1, params.s)
    r0, r1 = xor_transform(b0, b1, params.n)
    return r0, r1, params


def polarize_bounds(d_in: float, params: PolarizationParams) -> Tuple[float, float]:
    """
    Analytic interval for the polarized distance

    The XOR stages are exact (d -> d^r), the amplification stage is bounded
    by max(d, 1 - exp(-s d^2 / 2)) from below and min(1, s d) from above.
    """
    if not 0.0 <= d_in <= 1.0:
        raise ArgumentError(f"input distance must lie in [0, 1], got {d_in}")
    d1 = d_in ** params.r
    lower = max(d1, 1.0 - math.exp(-params.s * d1 * d1 / 2.0))
    upper = min(1.0, params.s * d1)
    return lower ** params.n, upper ** params.n


# ---------------------------------------------------------------------------
# Operator level
# ---------------------------------------------------------------------------

def _mixture_term(rhos: Sequence[ComplexMatrix], bits: Tuple[int, ...]) -> ComplexMatrix:
    return tensor_all([rhos[b] for b in bits])


def _parity_strings(r: int, flip: int) -> List[Tuple[int, ...]]:
    out = []
    for head in itertools.product((0, 1), repeat=r - 1):
        out.append(head + ((sum(head) + flip) % 2,))
    return out


def xor_states(rho0, rho1, r: int, workers: Optional[int] = None) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """
    Explicit XOR mixtures: average of rho_{b_1} (x) ... (x) rho_{b_r} over even (odd) parity strings

    With ``workers > 1`` the terms are evaluated on a thread pool; the sum
    is always accumulated in string order.
    """
    a, b = as_square(rho0, "rho0"), as_square(rho1, "rho1")
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch {a.shape} vs {b.shape}")
    if r < 1:
        raise ArgumentError(f"r must be >= 1, got {r}")
    check_dim(a.shape[0] ** r, "xor state side")
    workers = workers or get_config().protocol.workers
    weight = 1.0 / 2 ** (r - 1)
    out = []
    for flip in (0, 1):
        strings = _parity_strings(r, flip)
        if workers > 1 and len(strings) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                terms = list(executor.map(lambda bits: _mixture_term((a, b), bits), strings))
        else:
            terms = [_mixture_term((a, b), bits) for bits in strings]
        total = np.zeros_like(terms[0])
        for t in terms:
            total += t
        out.append(weight * total)
    return out[0], out[1]


def amplify_states(rho0, rho1, s: int) -> Tuple[ComplexMatrix, ComplexMatrix]:
    a, b = as_square(rho0, "rho0"), as_square(rho1, "rho1")
    if s < 1:
        raise ArgumentError(f"s must be >= 1, got {s}")
    check_dim(a.shape[0] ** s, "amplified state side")
    return tensor_all([a] * s), tensor_all([b] * s)


def polarize_states(rho0, rho1, params: PolarizationParams) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Operator-level pipeline matching :func:`polarize`"""
    a0, a1 = xor_states(rho0, rho1, params.r)
    b0, b1 = amplify_states(a0, a1, params.s)
    return xor_states(b0, b1, params.n)
