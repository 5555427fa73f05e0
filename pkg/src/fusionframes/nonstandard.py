"""Haar multiresolution on C^(2^J) and the nonstandard form of an operator.

Scale ``j`` approximation space ``V_j`` is spanned by normalised indicators
of the dyadic intervals of length ``2^j`` and the detail space ``W_j`` by the
matching Haar wavelets, so ``V_{j-1} = V_j (+) W_j`` and the spaces shrink as
``j`` grows. ``V_0`` is the full space unless ``base > 0``, in which case scale
0 is the fine level ``base`` and operators are first compressed onto it.

Shifts by ``2^j`` samples are taken periodically, so a circulant operator
has exactly Toeplitz coefficient matrices at every level.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .blocks import BlockOpMatrix
from .errors import DimensionMismatch, InvalidLevels, LevelMismatch
from .frames import FrameBounds, FusionSequence, frame_bounds
from .linalg import adjoint, as_cmatrix
from .representation import op_from_matrix


def haar_scaling_basis(big_j: int, j: int) -> np.ndarray:
    n = 2**big_j
    width = 2**j
    phi = np.zeros((n, n // width))
    for k in range(n // width):
        phi[k * width:(k + 1) * width, k] = width**-0.5
    return phi


def haar_wavelet_basis(big_j: int, j: int) -> np.ndarray:
    if j < 1:
        raise InvalidLevels("wavelet spaces start at level 1")
    n = 2**big_j
    width = 2**j
    half = width // 2
    psi = np.zeros((n, n // width))
    for k in range(n // width):
        psi[k * width:k * width + half, k] = width**-0.5
        psi[k * width + half:(k + 1) * width, k] = -(width**-0.5)
    return psi


@dataclass(frozen=True, eq=False)
class HaarMRA:
    big_j: int
    levels: int
    base: int = 0

    def __post_init__(self):
        if self.big_j < 0 or self.levels < 0 or self.base < 0:
            raise InvalidLevels("levels must be non-negative")
        if self.levels + self.base > self.big_j:
            raise InvalidLevels(
                f"{self.levels} levels above base {self.base} do not fit in 2^{self.big_j} samples"
            )

    @property
    def size(self) -> int:
        return 2**self.big_j

    def scaling_basis(self, j: int) -> np.ndarray:
        """Orthonormal basis of ``V_j``, ``0 <= j <= levels``."""
        self._check(j, lo=0)
        return haar_scaling_basis(self.big_j, self.base + j)

    def wavelet_basis(self, j: int) -> np.ndarray:
        """Orthonormal basis of ``W_j``, ``1 <= j <= levels``."""
        self._check(j, lo=1)
        return haar_wavelet_basis(self.big_j, self.base + j)

    def _check(self, j: int, lo: int):
        if not lo <= j <= self.levels:
            raise InvalidLevels(f"level {j} outside {lo}..{self.levels}")

    @cached_property
    def projections(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """``([P_0, ..., P_n], [Q_1, ..., Q_n])`` as dense ``2^J x 2^J`` matrices."""
        ps = [b @ b.T for b in (self.scaling_basis(j) for j in range(self.levels + 1))]
        qs = [b @ b.T for b in (self.wavelet_basis(j) for j in range(1, self.levels + 1))]
        return ps, qs

    def P(self, j: int) -> np.ndarray:
        return self.projections[0][j]

    def Q(self, j: int) -> np.ndarray:
        return self.projections[1][j - 1]

    def fusion_sequence(self) -> FusionSequence:
        """``F_n = (V_n, V_{n-1}, ..., V_1, W_n, ..., W_1)`` with unit weights."""
        n = self.levels
        bases = [self.scaling_basis(j) for j in range(n, 0, -1)]
        bases += [self.wavelet_basis(j) for j in range(n, 0, -1)]
        return FusionSequence.from_bases(bases)


def haar_mra(big_j: int, levels: int, base: int = 0) -> HaarMRA:
    return HaarMRA(big_j, levels, base)


@dataclass(frozen=True, eq=False)
class NonstandardForm:
    coarse: np.ndarray  # T_n = P_n T P_n
    levels: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]  # (A_j, B_j, Gamma_j), j = 1..n

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def triplet(self, j: int):
        return self.levels[j - 1]

    def reconstruct(self) -> np.ndarray:
        """``T_n + sum_j (A_j + B_j + Gamma_j)``."""
        out = np.array(self.coarse, dtype=complex)
        for a, b, g in self.levels:
            out += a + b + g
        return out


def nonstandard_decompose(t, mra: HaarMRA) -> NonstandardForm:
    t = as_cmatrix(t, "operator")
    if t.shape != (mra.size, mra.size):
        raise DimensionMismatch(f"operator is {t.shape}, MRA needs {mra.size} x {mra.size}")
    n = mra.levels
    trip = []
    for j in range(1, n + 1):
        p, q = mra.P(j), mra.Q(j)
        trip.append((q @ t @ q, q @ t @ p, p @ t @ q))
    pn = mra.P(n)
    return NonstandardForm(pn @ t @ pn, tuple(trip))


def nonstandard_block_matrix(form: NonstandardForm, mra: HaarMRA) -> BlockOpMatrix:
    """Block matrix of the nonstandard form over ``F_n`` in local coordinates.

    With ``F_n`` ordered as ``(V_n, ..., V_1, W_n, ..., W_1)`` the only nonzero
    blocks are ``T_n`` at ``(V_n, V_n)``, ``Gamma_j`` at ``(V_j, W_j)``, ``B_j``
    at ``(W_j, V_j)`` and ``A_j`` at ``(W_j, W_j)``.
    """
    n = mra.levels
    if form.n_levels != n:
        raise LevelMismatch(f"form has {form.n_levels} levels, MRA has {n}")
    phis = {j: mra.scaling_basis(j) for j in range(1, n + 1)}
    psis = {j: mra.wavelet_basis(j) for j in range(1, n + 1)}
    bases = [phis[j] for j in range(n, 0, -1)] + [psis[j] for j in range(n, 0, -1)]
    grid = [[np.zeros((r.shape[1], c.shape[1]), complex) for c in bases] for r in bases]

    def v_idx(j):
        return n - j

    def w_idx(j):
        return n + (n - j)

    grid[v_idx(n)][v_idx(n)] = adjoint(phis[n]) @ form.coarse @ phis[n]
    for j in range(1, n + 1):
        a, b, g = form.triplet(j)
        grid[v_idx(j)][w_idx(j)] = adjoint(phis[j]) @ g @ psis[j]
        grid[w_idx(j)][v_idx(j)] = adjoint(psis[j]) @ b @ phis[j]
        grid[w_idx(j)][w_idx(j)] = adjoint(psis[j]) @ a @ psis[j]
    return BlockOpMatrix.from_blocks(grid)


def nonstandard_pattern(n: int) -> np.ndarray:
    """Boolean ``2n x 2n`` mask of the grid cells allowed to be nonzero."""
    mask = np.zeros((2 * n, 2 * n), dtype=bool)
    if n == 0:
        return mask
    mask[0, 0] = True
    for j in range(1, n + 1):
        v, w = n - j, n + (n - j)
        mask[v, w] = mask[w, v] = mask[w, w] = True
    return mask


def fn_bounds(mra: HaarMRA) -> FrameBounds:
    """Optimal bounds of ``F_n``; an upper bound above 1 means the family is redundant."""
    return frame_bounds(mra.fusion_sequence())


def coefficient_matrix(form: NonstandardForm, mra: HaarMRA, level: int, which: str = "A") -> np.ndarray:
    """Coefficients of ``A_j``, ``B_j`` or ``Gamma_j`` in the level-``j`` Haar bases."""
    a, b, g = form.triplet(level)
    phi, psi = mra.scaling_basis(level), mra.wavelet_basis(level)
    if which == "A":
        return adjoint(psi) @ a @ psi
    if which == "B":
        return adjoint(psi) @ b @ phi
    if which in ("G", "Gamma"):
        return adjoint(phi) @ g @ psi
    raise ValueError(f"which must be 'A', 'B' or 'G', got {which!r}")


def toeplitz_spread(c: np.ndarray) -> float:
    """Largest deviation of an entry from the mean of its diagonal."""
    rows, cols = c.shape
    worst = 0.0
    for k in range(-(rows - 1), cols):
        d = np.diagonal(c, offset=k)
        worst = max(worst, float(np.max(np.abs(d - d.mean()))))
    return worst


def toeplitz_deviation(form: NonstandardForm, mra: HaarMRA, level: int, which: str = "A") -> float:
    return toeplitz_spread(coefficient_matrix(form, mra, level, which))


def circulant(first_column) -> np.ndarray:
    c = np.asarray(first_column, dtype=complex).reshape(-1)
    n = c.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx]


def nonstandard_report(t, mra: HaarMRA, threshold: float = 1e-8) -> dict:
    """Per-level block norms, sparsity counts and Toeplitz deviations."""
    form = nonstandard_decompose(t, mra)
    m = nonstandard_block_matrix(form, mra)
    fn = mra.fusion_sequence()
    t0 = mra.P(0) @ as_cmatrix(t) @ mra.P(0)
    levels = []
    for j in range(1, mra.levels + 1):
        entry = {"level": j}
        for key, label in (("A", "A"), ("B", "B"), ("G", "Gamma")):
            c = coefficient_matrix(form, mra, j, key)
            entry[label] = {
                "norm": float(np.linalg.norm(c, 2)) if c.size else 0.0,
                "nonzeros": int(np.count_nonzero(np.abs(c) > threshold)),
                "entries": int(c.size),
                "toeplitz_deviation": toeplitz_spread(c),
            }
        levels.append(entry)
    bounds = frame_bounds(fn)
    return {
        "size": mra.size,
        "levels": mra.levels,
        "base": mra.base,
        "threshold": threshold,
        "coarse_norm": float(np.linalg.norm(form.coarse, 2)),
        "reconstruction_defect": float(np.linalg.norm(form.reconstruct() - t0)),
        "block_reconstruction_defect": float(np.linalg.norm(op_from_matrix(fn, fn, m) - t0)),
        "fn_bounds": {"lower": bounds.lower, "upper": bounds.upper},
        "per_level": levels,
    }
