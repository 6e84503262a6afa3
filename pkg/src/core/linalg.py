"""
Dense complex linear algebra kernel

Matrices are ``numpy`` complex128 arrays. Trace norms use the halved
convention ``||X||tr = 1/2 tr sqrt(X^dagger X)`` throughout, so the trace
distance between two density matrices lies in [0, 1].
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from config.settings import get_config

from .errors import ArgumentError, CapacityError, NumericError
from .jacobi import jacobi_eigh

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
StateVector = npt.NDArray[np.complex128]


def _tol(tol: Optional[float]) -> float:
    return get_config().numerics.predicate_tol if tol is None else tol


def as_matrix(a, name: str = "matrix") -> ComplexMatrix:
    """Coerce to a 2-D complex128 array"""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ArgumentError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def as_square(a, name: str = "matrix") -> ComplexMatrix:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ArgumentError(f"{name} must be square, got shape {m.shape}")
    return m


def check_dim(dim: int, what: str = "matrix side"):
    """Raise CapacityError when ``dim`` exceeds the configured side cap"""
    limit = get_config().capacity.max_dim
    if dim > limit:
        logger.warning("refusing %s of %d (cap %d)", what, dim, limit)
        raise CapacityError(what, dim, limit)


def is_hermitian(a, tol: Optional[float] = None) -> bool:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m, m.conj().T, rtol=0.0, atol=_tol(tol)))


def is_unitary(a, tol: Optional[float] = None) -> bool:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    eye = np.eye(m.shape[0])
    return bool(np.allclose(m.conj().T @ m, eye, rtol=0.0, atol=_tol(tol)))


def is_psd(a, tol: Optional[float] = None) -> bool:
    if not is_hermitian(a, tol):
        return False
    values = np.linalg.eigvalsh(np.asarray(a, dtype=np.complex128))
    return bool(values.min(initial=0.0) >= -_tol(tol))


def is_density(a, tol: Optional[float] = None) -> bool:
    """Hermitian, positive semidefinite and unit trace"""
    if not is_psd(a, tol):
        return False
    return abs(np.trace(np.asarray(a)) - 1.0) <= _tol(tol)


def is_state(psi, tol: Optional[float] = None) -> bool:
    v = np.asarray(psi, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0 or v.size & (v.size - 1):
        return False
    return abs(np.vdot(v, v).real - 1.0) <= _tol(tol)


def projector(psi) -> ComplexMatrix:
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def tensor(a, b) -> ComplexMatrix:
    """Kronecker product with ``a`` as the major index"""
    ma = np.asarray(a, dtype=np.complex128)
    mb = np.asarray(b, dtype=np.complex128)
    if ma.ndim == 1 and mb.ndim == 1:
        check_dim(ma.size * mb.size, "tensor product dimension")
        return np.kron(ma, mb)
    ma, mb = as_matrix(ma, "a"), as_matrix(mb, "b")
    check_dim(max(ma.shape[0] * mb.shape[0], ma.shape[1] * mb.shape[1]), "tensor product side")
    return np.kron(ma, mb)


def tensor_all(factors: Sequence) -> ComplexMatrix:
    if not factors:
        raise ArgumentError("tensor_all needs at least one factor")
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]) -> ComplexMatrix:
    """
    Trace out every subsystem not listed in ``keep``

    Args:
        rho: Square matrix on the product space of ``dims``
        dims: Per-subsystem dimensions, most significant first
        keep: Subsystems to keep; the result follows this order

    Returns:
        Reduced matrix of dimension prod(dims[i] for i in keep)
    """
    m = as_square(rho, "rho")
    dims = [int(d) for d in dims]
    keep = [int(k) for k in keep]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != m.shape[0]:
        raise ArgumentError(f"dims {dims} do not factor a {m.shape[0]}-dimensional matrix")
    if len(set(keep)) != len(keep) or any(k < 0 or k >= len(dims) for k in keep):
        raise ArgumentError(f"keep {keep} is not a set of subsystem indices for dims {dims}")

    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = m.reshape(dims + dims)
    order = keep + traced
    t = t.transpose(order + [n + i for i in order]).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def _lapack_eigh(m: ComplexMatrix) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"eigendecomposition failed: {e}") from e


def hermitian_eig(a, tol: Optional[float] = None, backend: Optional[str] = None) -> Tuple[np.ndarray, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix

    Args:
        a: Hermitian matrix
        tol: Hermiticity tolerance
        backend: "lapack" or "jacobi"; defaults to the configured backend

    Returns:
        (eigenvalues descending, unitary matrix of eigenvector columns)
    """
    m = as_square(a, "a")
    if not is_hermitian(m, tol):
        raise ArgumentError("hermitian_eig requires a Hermitian matrix")
    m = (m + m.conj().T) / 2
    settings = get_config().numerics
    backend = backend or settings.eig_backend
    if backend == "jacobi":
        values, vectors = jacobi_eigh(m, max_sweeps=settings.jacobi_max_sweeps)
    elif backend == "lapack":
        values, vectors = _lapack_eigh(m)
    else:
        raise ArgumentError(f"unknown eigen backend {backend!r}")
    return values[::-1].copy(), vectors[:, ::-1].copy()


def _clamped_spectrum(a, tol: Optional[float]) -> Tuple[np.ndarray, ComplexMatrix]:
    clamp = get_config().numerics.psd_clamp if tol is None else tol
    values, vectors = hermitian_eig(a)
    if values.size and values.min() < -clamp:
        raise ArgumentError(f"matrix is not PSD: eigenvalue {values.min():.3e} below -{clamp:g}")
    if values.size and values.min() < -1e-12:
        logger.debug("clamping eigenvalue %.3e to zero", values.min())
    return np.clip(values, 0.0, None), vectors


def matrix_sqrt_psd(a, tol: Optional[float] = None) -> ComplexMatrix:
    """Unique PSD square root; eigenvalues in [-tol, 0) are clamped to 0"""
    values, vectors = _clamped_spectrum(a, tol)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def _svd_via_eig(m: ComplexMatrix) -> Tuple[ComplexMatrix, np.ndarray, ComplexMatrix]:
    rows, cols = m.shape
    values, v = hermitian_eig(m.conj().T @ m)
    s = np.sqrt(np.clip(values, 0.0, None))
    k = min(rows, cols)
    s = s[:k]
    u = np.zeros((rows, rows), dtype=np.complex128)
    cutoff = max(s[0] if s.size else 0.0, 1.0) * 1e-12
    filled = 0
    for i in range(k):
        if s[i] > cutoff:
            u[:, i] = (m @ v[:, i]) / s[i]
            filled += 1
    # polar completion: extend the computed columns to an orthonormal basis
    if filled < rows:
        basis = np.concatenate([u[:, :filled], np.eye(rows, dtype=np.complex128)], axis=1)
        q, _ = np.linalg.qr(basis)
        u[:, filled:] = q[:, filled:rows]
    return u, s, v


def svd(a, backend: Optional[str] = None) -> Tuple[ComplexMatrix, np.ndarray, ComplexMatrix]:
    """
    Singular value decomposition ``a = U diag(s) V^dagger``

    Returns:
        (U unitary, singular values descending, V unitary)
    """
    m = as_matrix(a, "a")
    backend = backend or get_config().numerics.eig_backend
    if backend == "jacobi":
        return _svd_via_eig(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"svd did not converge: {e}") from e
    return u, s, vh.conj().T


def singular_values(a) -> np.ndarray:
    m = as_matrix(a, "a")
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"svd did not converge: {e}") from e


def trace_norm(x) -> float:
    """Half the sum of singular values (halved trace norm)"""
    m = as_square(x, "x")
    if is_hermitian(m):
        values, _ = hermitian_eig(m)
        return 0.5 * float(np.abs(values).sum())
    return 0.5 * float(singular_values(m).sum())


def trace_distance(rho, xi) -> float:
    a, b = as_square(rho, "rho"), as_square(xi, "xi")
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch {a.shape} vs {b.shape}")
    return trace_norm(a - b)


def fidelity(rho, xi, validate: bool = True) -> float:
    """
    F(rho, xi) = tr sqrt(sqrt(rho) xi sqrt(rho)), unsquared

    Computed as the nuclear norm of sqrt(rho) sqrt(xi).
    """
    a, b = as_square(rho, "rho"), as_square(xi, "xi")
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch {a.shape} vs {b.shape}")
    if validate:
        tol = max(_tol(None), 1e-8)
        if not is_density(a, tol):
            raise ArgumentError("fidelity: rho is not a density matrix")
        if not is_density(b, tol):
            raise ArgumentError("fidelity: xi is not a density matrix")
    return float(singular_values(matrix_sqrt_psd(a) @ matrix_sqrt_psd(b)).sum())


def schmidt_decomposition(psi, split: Tuple[int, int]) -> Tuple[np.ndarray, ComplexMatrix, ComplexMatrix]:
    """
    Schmidt decomposition of a bipartite pure state

    Args:
        psi: State vector on a (da x db) space, first factor major
        split: (da, db)

    Returns:
        (coefficients descending, left vectors as columns, right vectors as columns)
    """
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    da, db = split
    if da * db != v.size:
        raise ArgumentError(f"split {split} does not match state dimension {v.size}")
    u, s, w = svd(v.reshape(da, db))
    k = min(da, db)
    return s[:k], u[:, :k], w[:, :k].conj()


def purify(rho) -> StateVector:
    """Purification on (system x copy) with tr_copy |psi><psi| = rho"""
    values, vectors = _clamped_spectrum(as_square(rho, "rho"), None)
    d = vectors.shape[0]
    check_dim(d * d, "purification dimension")
    psi = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        if values[i] > 0.0:
            psi += np.sqrt(values[i]) * np.kron(vectors[:, i], np.eye(d)[i])
    return psi


def positive_projection(x, tol: Optional[float] = None) -> ComplexMatrix:
    """Projection onto the nonnegative eigenspace of a Hermitian matrix (zero modes included)"""
    values, vectors = hermitian_eig(x)
    cut = 1e-12 if tol is None else tol
    keep = vectors[:, values >= -cut]
    return keep @ keep.conj().T
