"""
Trace norm approximation over the characteristic polynomial

For a square X the route is: form Y = X X^dagger, compute the
characteristic polynomial of Y, find its n roots to O(k + log n) bits and
return half the sum of their square roots.

Doubles convert to rationals exactly, so the Gram matrix and the
Faddeev-LeVerrier recurrence run over the (Gaussian) integers after scaling
by the common denominator. Roots are found with a simultaneous Aberth
iteration in extended precision on the square-free factors.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from config.settings import get_config

from .errors import ArgumentError, CapacityError, NumericError, PrecisionError
from .linalg import as_square, is_hermitian, trace_norm

logger = logging.getLogger(__name__)

Poly = List[Fraction]  # coefficients, lowest degree first

_GUARD_BITS = 32
_MAX_PREC = 1 << 14


@dataclass(frozen=True)
class CharPoly:
    """Monic det(lambda I - Y): coefficients c_0..c_n, stored exactly"""
    coefficients: Tuple[Fraction, ...]
    imaginary: Tuple[Fraction, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_real(self) -> bool:
        return all(c == 0 for c in self.imaginary)

    def as_array(self) -> np.ndarray:
        re = np.array([float(c) for c in self.coefficients])
        if self.is_real:
            return re
        return re + 1j * np.array([float(c) for c in self.imaginary])

    def evaluate(self, x) -> complex:
        total = 0j
        for c in self.as_array()[::-1]:
            total = total * x + c
        return total


# ---------------------------------------------------------------------------
# Exact characteristic polynomial
# ---------------------------------------------------------------------------

def _exact_parts(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    re = np.empty(m.shape, dtype=object)
    im = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(m.shape):
        re[idx] = Fraction(float(m[idx].real))
        im[idx] = Fraction(float(m[idx].imag))
    return re, im


def _common_denominator(*parts: np.ndarray) -> int:
    return math.lcm(*(f.denominator for p in parts for f in p.flat))


def _scaled(part: np.ndarray, d: int) -> np.ndarray:
    out = np.empty(part.shape, dtype=object)
    for idx in np.ndindex(part.shape):
        out[idx] = int(part[idx] * d)
    return out


def _exact_div(t, k: int):
    if isinstance(t, int) and t % k == 0:
        return t // k
    return Fraction(t) / k


def _faddeev_leverrier(ar: np.ndarray, ai: Optional[np.ndarray]) -> List[Tuple[object, object]]:
    """Coefficients c_0..c_n of det(lambda I - A) for A = ar + i ai (exact entries)"""
    n = ar.shape[0]
    ident = np.zeros((n, n), dtype=object)
    for i in range(n):
        ident[i, i] = 1
    mr = np.zeros((n, n), dtype=object)
    mi = np.zeros((n, n), dtype=object)
    coeffs: List[Tuple[object, object]] = [(0, 0)] * (n + 1)
    coeffs[n] = (1, 0)
    amr = np.zeros((n, n), dtype=object)
    ami = np.zeros((n, n), dtype=object)
    for k in range(1, n + 1):
        cr, ci = coeffs[n - k + 1]
        mr = amr + cr * ident
        mi = ami + ci * ident
        if ai is None:
            amr = ar.dot(mr)
            ami = ar.dot(mi)
        else:
            amr = ar.dot(mr) - ai.dot(mi)
            ami = ar.dot(mi) + ai.dot(mr)
        tr_r = sum(amr[i, i] for i in range(n))
        tr_i = sum(ami[i, i] for i in range(n))
        coeffs[n - k] = (_exact_div(-tr_r, k), _exact_div(-tr_i, k))
    return coeffs


def _charpoly_of_integer(ar: np.ndarray, ai: Optional[np.ndarray], scale: int) -> CharPoly:
    """Characteristic polynomial of (ar + i ai) / scale"""
    n = ar.shape[0]
    raw = _faddeev_leverrier(ar, ai)
    re = tuple(Fraction(c[0]) / Fraction(scale) ** (n - j) for j, c in enumerate(raw))
    im = tuple(Fraction(c[1]) / Fraction(scale) ** (n - j) for j, c in enumerate(raw))
    return CharPoly(re, im)


def _check_side(n: int):
    limit = get_config().capacity.max_charpoly_side
    if n > limit:
        logger.warning("refusing characteristic polynomial of side %d (cap %d)", n, limit)
        raise CapacityError("characteristic polynomial side", n, limit)
    if n > 16:
        logger.warning("characteristic polynomial of side %d: Faddeev-LeVerrier is poorly conditioned here", n)


def char_poly(y, tol: Optional[float] = None) -> CharPoly:
    """
    Exact characteristic polynomial of a square matrix of doubles

    A matrix Hermitian within ``tol`` is symmetrized exactly first, so its
    coefficients come out real.
    """
    m = as_square(y, "y")
    n = m.shape[0]
    _check_side(n)
    re, im = _exact_parts(m)
    if is_hermitian(m, tol):
        re = (re + re.T) / 2
        im = (im - im.T) / 2
    d = _common_denominator(re, im)
    ar = _scaled(re, d)
    ai = _scaled(im, d)
    real_input = all(v == 0 for v in ai.flat)
    return _charpoly_of_integer(ar, None if real_input else ai, d)


def gram_char_poly(x) -> CharPoly:
    """Exact characteristic polynomial of X X^dagger"""
    m = as_square(x, "x")
    _check_side(m.shape[0])
    re, im = _exact_parts(m)
    d = _common_denominator(re, im)
    xr, xi = _scaled(re, d), _scaled(im, d)
    # (xr + i xi)(xr - i xi)^T
    yr = xr.dot(xr.T) + xi.dot(xi.T)
    yi = xi.dot(xr.T) - xr.dot(xi.T)
    real_input = all(v == 0 for v in yi.flat)
    return _charpoly_of_integer(yr, None if real_input else yi, d * d)


# ---------------------------------------------------------------------------
# Polynomial arithmetic over Q
# ---------------------------------------------------------------------------

def _trim(p: Poly) -> Poly:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _deriv(p: Poly) -> Poly:
    if len(p) == 1:
        return [Fraction(0)]
    return _trim([i * p[i] for i in range(1, len(p))])


def _sub(a: Poly, b: Poly) -> Poly:
    size = max(len(a), len(b))
    a = a + [Fraction(0)] * (size - len(a))
    b = b + [Fraction(0)] * (size - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _divmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    a, b = _trim(a), _trim(b)
    if len(b) == 1 and b[0] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    if len(r) < len(b):
        return [Fraction(0)], r
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for shift in range(len(a) - len(b), -1, -1):
        factor = r[shift + len(b) - 1] / lead
        q[shift] = factor
        if factor:
            for i, c in enumerate(b):
                r[shift + i] -= factor * c
    return _trim(q), _trim(r[: len(b) - 1] or [Fraction(0)])


def _monic(p: Poly) -> Poly:
    return [c / p[-1] for c in p]


def _is_zero(p: Poly) -> bool:
    return len(p) == 1 and p[0] == 0


def _gcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(a), _trim(b)
    while not _is_zero(b):
        a, b = b, _divmod(a, b)[1]
    return _monic(a)


def square_free_factors(p: Poly) -> List[Tuple[Poly, int]]:
    """Yun's factorization: [(g_i, i)] with p = prod g_i^i up to a constant"""
    f = _monic(_trim(p))
    if len(f) == 1:
        return []
    fp = _deriv(f)
    a = _gcd(f, fp)
    b = _divmod(f, a)[0]
    c = _divmod(fp, a)[0]
    d = _sub(c, _deriv(b))
    out = []
    i = 1
    while len(b) > 1:
        a = _gcd(b, d)
        b = _divmod(b, a)[0]
        c = _divmod(d, a)[0]
        d = _sub(c, _deriv(b))
        if len(a) > 1:
            out.append((a, i))
        i += 1
    return out


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------

def _bound_bits(p: Poly) -> int:
    lead = p[-1]
    bound = 1 + max((abs(c / lead) for c in p[:-1]), default=Fraction(0))
    return max(1, bound.numerator.bit_length() - bound.denominator.bit_length() + 1)


def _mp_coeffs(p: Poly) -> list:
    # mpmath wants highest degree first
    return [mpmath.mpf(c.numerator) / c.denominator for c in reversed(p)]


def _aberth(p: Poly, prec: int, bits: int, max_iter: int = 1000) -> Optional[list]:
    degree = len(p) - 1
    with mpmath.workprec(prec):
        coeffs = _mp_coeffs(p)
        if degree == 1:
            return [-coeffs[1] / coeffs[0]]
        lead = coeffs[0]
        radius = 1 + max(abs(c / lead) for c in coeffs[1:])
        z = [radius * mpmath.expjpi(2 * (j + mpmath.mpf(0.25)) / degree) for j in range(degree)]
        eps = mpmath.ldexp(1, -(bits + 4))
        for _ in range(max_iter):
            worst = mpmath.mpf(0)
            for j in range(degree):
                value, slope = mpmath.polyval(coeffs, z[j], derivative=True)
                if value == 0:
                    continue
                if slope == 0:
                    slope = eps
                ratio = value / slope
                repulse = mpmath.fsum(1 / (z[j] - z[i]) for i in range(degree) if i != j)
                step = ratio / (1 - ratio * repulse)
                z[j] -= step
                worst = max(worst, abs(step))
            if worst <= eps:
                return z
    return None


def _newton_deflation(p: Poly, prec: int, bits: int, max_iter: int = 500) -> Optional[list]:
    with mpmath.workprec(prec):
        work = _mp_coeffs(p)
        full = list(work)
        roots = []
        eps = mpmath.ldexp(1, -(bits + 4))
        while len(work) > 2:
            z = mpmath.mpc(0.5, 0.5)
            for _ in range(max_iter):
                value, slope = mpmath.polyval(work, z, derivative=True)
                if slope == 0:
                    z += eps
                    continue
                step = value / slope
                z -= step
                if abs(step) <= eps:
                    break
            else:
                return None
            # polish on the undeflated polynomial
            for _ in range(8):
                value, slope = mpmath.polyval(full, z, derivative=True)
                if slope == 0:
                    break
                z -= value / slope
            roots.append(z)
            quotient = [work[0]]
            for c in work[1:-1]:
                quotient.append(c + quotient[-1] * z)
            work = quotient
        roots.append(-work[1] / work[0])
        return roots


def _agree(a: list, b: list, eps) -> bool:
    key = lambda z: (float(mpmath.re(z)), float(mpmath.im(z)))
    return all(abs(x - y) <= eps for x, y in zip(sorted(a, key=key), sorted(b, key=key)))


def _squarefree_roots(p: Poly, bits: int) -> list:
    prec = bits + _bound_bits(p) + _GUARD_BITS
    eps = mpmath.ldexp(1, -(bits + 1))
    while prec <= _MAX_PREC:
        low = _aberth(p, prec, bits)
        high = _aberth(p, prec + 64, bits)
        if low is not None and high is not None and _agree(low, high, eps):
            return high
        logger.debug("root iteration unstable at %d bits, escalating", prec)
        prec *= 2
    roots = _newton_deflation(p, _MAX_PREC, bits)
    if roots is None:
        raise NumericError(f"root iteration did not converge for a degree-{len(p) - 1} factor")
    return roots


def _as_charpoly(p: Union[CharPoly, Sequence]) -> CharPoly:
    if isinstance(p, CharPoly):
        return p
    coeffs = [c if isinstance(c, Fraction) else Fraction(c) for c in p]
    if not coeffs or coeffs[-1] == 0:
        raise ArgumentError("polynomial needs a nonzero leading coefficient")
    return CharPoly(tuple(c / coeffs[-1] for c in coeffs))


def roots_mp(p: Union[CharPoly, Sequence], bits: int, nonnegative: bool = True) -> list:
    """Real roots of p as mpmath numbers, each within 2^-bits of a true root"""
    poly = _as_charpoly(p)
    if not poly.is_real:
        raise ArgumentError("root finding needs real coefficients (Hermitian input)")
    coeffs = _trim(list(poly.coefficients))
    zeros = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
        zeros += 1
    out = [mpmath.mpf(0)] * zeros
    for factor, multiplicity in square_free_factors(coeffs):
        for z in _squarefree_roots(factor, bits):
            if abs(mpmath.im(z)) > mpmath.ldexp(1, -bits) * max(1, abs(z)):
                raise NumericError(f"non-real root {mpmath.nstr(z, 12)} of a Hermitian polynomial")
            out.extend([mpmath.re(z)] * multiplicity)
    if nonnegative:
        floor = -mpmath.ldexp(1, -bits)
        for z in out:
            if z < floor:
                raise ArgumentError(f"negative root {mpmath.nstr(z, 12)} of a PSD polynomial")
        out = [max(z, mpmath.mpf(0)) for z in out]
    return sorted(out)


def poly_roots(p: Union[CharPoly, Sequence], bits: int, nonnegative: bool = True) -> List[float]:
    """
    Roots of a real monic polynomial to ``bits`` bits

    Args:
        p: CharPoly or coefficients c_0..c_n (lowest degree first)
        bits: Absolute accuracy 2^-bits
        nonnegative: Clamp roots in [-2^-bits, 0) to 0 and reject lower ones

    Returns:
        n roots, ascending
    """
    with mpmath.workprec(max(53, 2 * bits + 64)):
        return [float(z) for z in roots_mp(p, bits, nonnegative)]


def tna(x, k: int, method: str = "charpoly") -> float:
    """
    Trace norm approximation: r with |r - ||X||tr| < 2^-k

    Args:
        x: Square matrix
        k: Bits of accuracy
        method: "charpoly" (polynomial route) or "eig" (eigendecomposition)

    Raises:
        PrecisionError: k above the configured ceiling or finer than the
            result's double resolution
    """
    m = as_square(x, "x")
    if method == "eig":
        return trace_norm(m)
    if method != "charpoly":
        raise ArgumentError(f"unknown trace norm method {method!r}")
    limit = get_config().capacity.max_tna_bits
    if k < 1 or k > limit:
        raise PrecisionError(f"precision of {k} bits outside 1..{limit}")

    n = m.shape[0]
    root_bits = 2 * (k + max(1, math.ceil(math.log2(n))) + 2)
    poly = gram_char_poly(m)
    with mpmath.workprec(2 * root_bits + 64):
        roots = roots_mp(poly, root_bits)
        r = mpmath.fsum(mpmath.sqrt(z) for z in roots) / 2
        value = float(r)
    if math.ulp(value) > 2.0 ** -k / 4:
        raise PrecisionError(f"result {value:.6g} cannot be represented to {k} bits in double precision")
    logger.debug("tna: %d roots at %d bits, result %.17g", n, root_bits, value)
    return value
