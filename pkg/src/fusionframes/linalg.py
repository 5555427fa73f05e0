"""Dense complex linear-algebra kernel.

All matrices are plain ``numpy`` arrays of dtype ``complex128``; the adjoint
is always the conjugate transpose. Tolerances are relative to the largest
singular value of the matrix at hand unless stated otherwise.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    AllZeroInput,
    DimensionMismatch,
    NotHermitian,
    NotPositiveDefinite,
    NumericalFailure,
)

DEFAULT_TOL = 1e-10


class EigDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns


class SvdDecomposition(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray  # descending
    v: np.ndarray


def as_cmatrix(a, name="matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def svd(a) -> SvdDecomposition:
    a = as_cmatrix(a)
    if a.size == 0:
        raise DimensionMismatch("svd of an empty matrix")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    return SvdDecomposition(u, s, adjoint(vh))


def numerical_rank(a, tol: float = DEFAULT_TOL) -> int:
    a = as_cmatrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def orthonormalize(raw, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``raw``.

    The rank cut is relative to the largest singular value; an input whose
    columns are all (numerically) zero raises :class:`AllZeroInput`.
    """
    raw = as_cmatrix(raw, "raw")
    if raw.shape[1] == 0:
        raise DimensionMismatch("orthonormalize needs at least one column")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if np.all(np.linalg.norm(raw, axis=0) <= tol):
        raise AllZeroInput("every column has norm below tolerance")
    u, s, _ = svd(raw)
    basis = u[:, s > tol * s[0]]
    # fix the phase of each column so that results are reproducible
    pivots = np.argmax(np.abs(basis) > 1e-8 * np.abs(basis).max(axis=0), axis=0)
    phase = basis[pivots, np.arange(basis.shape[1])]
    return basis * (np.abs(phase) / phase)


def polar_factor(x) -> np.ndarray:
    """Isometric factor ``U V*`` of a full-column-rank ``x = U s V*``.

    This is the orthonormal basis of ``range(x)`` closest to ``x`` itself, so
    it returns ``x`` unchanged when ``x`` already has orthonormal columns.
    """
    u, s, v = svd(x)
    if s[-1] <= DEFAULT_TOL * s[0]:
        raise NumericalFailure("polar factor of a rank-deficient matrix")
    return u @ adjoint(v)


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(np.linalg.norm(a, 2), 1.0)
    return bool(np.linalg.norm(a - adjoint(a), 2) <= tol * scale)


def hermitian_eig(a, tol: float = DEFAULT_TOL) -> EigDecomposition:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1] or not is_hermitian(a, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    h = 0.5 * (a + adjoint(a))
    try:
        lam, vec = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    return EigDecomposition(lam, vec)


def pinv(a, rank_tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with a relative singular-value cut."""
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    a = as_cmatrix(a)
    if a.size == 0:
        return np.zeros(a.shape[::-1], dtype=complex)
    u, s, v = svd(a)
    keep = s > rank_tol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    return (v[:, keep] / s[keep]) @ adjoint(u[:, keep])


def psd_power(s, exponent: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``V diag(lam**exponent) V*`` for a Hermitian positive-definite ``s``."""
    lam, vec = hermitian_eig(s, tol)
    if lam[0] <= tol * max(abs(lam[-1]), 1.0) or lam[0] <= 0:
        raise NotPositiveDefinite(f"smallest eigenvalue {lam[0]:.3e} not positive")
    out = (vec * lam**exponent) @ adjoint(vec)
    return 0.5 * (out + adjoint(out))


def op_norm2(a) -> float:
    a = as_cmatrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def range_projector(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto range(a); zero for a zero matrix."""
    a = as_cmatrix(a)
    if a.size == 0 or not np.any(np.abs(a) > 0):
        return np.zeros((a.shape[0], a.shape[0]), dtype=complex)
    u, s, _ = svd(a)
    u = u[:, s > tol * s[0]]
    return u @ adjoint(u)


def moore_penrose_defects(a, x) -> tuple[float, float, float, float]:
    """Residuals of the four Penrose identities, each relative to ``max(1, ||.||)``.

    Returns ``(AXA - A, XAX - X, (AX)* - AX, (XA)* - XA)`` in spectral norm.
    """
    a = as_cmatrix(a)
    x = as_cmatrix(x)
    na = max(op_norm2(a), 1.0)
    nx = max(op_norm2(x), 1.0)
    ax = a @ x
    xa = x @ a
    return (
        op_norm2(a @ xa - a) / na,
        op_norm2(x @ ax - x) / nx,
        op_norm2(adjoint(ax) - ax) / max(op_norm2(ax), 1.0),
        op_norm2(adjoint(xa) - xa) / max(op_norm2(xa), 1.0),
    )


# -- random generators used by tests and verification suites -----------------


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_cmatrix(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_rank_deficient(n: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    return random_cmatrix(n, rank, rng) @ random_cmatrix(rank, n, rng)
