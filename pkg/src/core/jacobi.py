"""Cyclic Jacobi eigensolver for complex Hermitian matrices

Each rotation first removes the phase of the pivot a[p, q] with a diagonal
unitary, then applies the real symmetric rotation that zeroes it. The sweep
kernel is compiled with numba.
"""

import logging
from typing import Tuple

import numpy as np
from numba import njit

from .errors import NumericError

logger = logging.getLogger(__name__)


@njit(cache=True)
def _off_norm(a):
    n = a.shape[0]
    total = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            total += abs(a[p, q]) ** 2
    return np.sqrt(2.0 * total)


@njit(cache=True)
def _rotate(a, v, p, q):
    n = a.shape[0]
    apq = a[p, q]
    mag = abs(apq)
    if mag == 0.0:
        return
    phase = apq / mag
    theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    ph = phase.conjugate()
    gpp = complex(c, 0.0)
    gpq = complex(s, 0.0)
    gqp = -s * ph
    gqq = c * ph
    # a <- a g
    for r in range(n):
        arp = a[r, p]
        arq = a[r, q]
        a[r, p] = arp * gpp + arq * gqp
        a[r, q] = arp * gpq + arq * gqq
    # a <- g^H a
    for r in range(n):
        apr = a[p, r]
        aqr = a[q, r]
        a[p, r] = gpp.conjugate() * apr + gqp.conjugate() * aqr
        a[q, r] = gpq.conjugate() * apr + gqq.conjugate() * aqr
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    for r in range(n):
        vrp = v[r, p]
        vrq = v[r, q]
        v[r, p] = vrp * gpp + vrq * gqp
        v[r, q] = vrp * gpq + vrq * gqq


@njit(cache=True)
def _sweeps(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        if _off_norm(a) <= tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
    if _off_norm(a) <= tol:
        return max_sweeps
    return -1


def jacobi_eigh(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps

    Args:
        a: Hermitian matrix (not modified)
        tol: Off-diagonal Frobenius threshold, relative to the matrix norm
        max_sweeps: Sweep cap

    Returns:
        (eigenvalues ascending, eigenvector columns)
    """
    work = np.array(a, dtype=np.complex128, copy=True)
    n = work.shape[0]
    vectors = np.eye(n, dtype=np.complex128)
    scale = max(float(np.linalg.norm(work)), 1.0)
    sweeps = _sweeps(work, vectors, tol * scale, max_sweeps)
    if sweeps < 0:
        raise NumericError(f"Jacobi did not converge within {max_sweeps} sweeps (n={n})")
    logger.debug("jacobi converged in %d sweeps (n=%d)", sweeps, n)
    values = np.real(np.diag(work)).copy()
    order = np.argsort(values)
    return values[order], vectors[:, order]
