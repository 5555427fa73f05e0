"""Weighted subspaces of C^n and the operators of a fusion frame.

A subspace is always stored through an orthonormal basis ``B`` (n x k) so
that the orthogonal projection is ``B B*``. Elements of the l2 direct sum
of the subspaces are kept in local coordinates: the i-th component is a
length-``k_i`` vector ``c_i`` standing for the ambient vector ``B_i c_i``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg
from .errors import CountMismatch, DimensionMismatch, NotAFrame
from .linalg import DEFAULT_TOL, adjoint

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WeightedSubspace:
    basis: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        b = linalg.as_cmatrix(self.basis, "basis")
        if not self.weight > 0:
            raise ValueError(f"weight must be positive, got {self.weight}")
        gram = adjoint(b) @ b
        if np.linalg.norm(gram - np.eye(b.shape[1]), 2) > 1e-8:
            raise ValueError("basis columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "weight", float(self.weight))

    @classmethod
    def span(cls, vectors, weight: float = 1.0, tol: float = DEFAULT_TOL):
        """Subspace spanned by the columns of ``vectors``."""
        return cls(linalg.orthonormalize(vectors, tol), weight)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        return self.basis @ adjoint(self.basis)


@dataclass(frozen=True, eq=False)
class FusionSequence:
    ambient_dim: int
    subspaces: tuple[WeightedSubspace, ...]

    def __post_init__(self):
        subs = tuple(self.subspaces)
        if not subs:
            raise ValueError("a fusion sequence needs at least one subspace")
        for i, w in enumerate(subs):
            if w.ambient_dim != self.ambient_dim:
                raise DimensionMismatch(
                    f"subspace {i} lives in C^{w.ambient_dim}, expected C^{self.ambient_dim}"
                )
        object.__setattr__(self, "subspaces", subs)

    @classmethod
    def from_bases(cls, bases: Sequence, weights: Sequence[float] | None = None):
        bases = [linalg.as_cmatrix(b) for b in bases]
        if weights is None:
            weights = [1.0] * len(bases)
        if len(weights) != len(bases):
            raise CountMismatch("one weight per basis required")
        subs = tuple(WeightedSubspace(b, w) for b, w in zip(bases, weights))
        return cls(bases[0].shape[0], subs)

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __getitem__(self, i):
        return self.subspaces[i]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w.weight for w in self.subspaces])

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(w.dim for w in self.subspaces)

    @property
    def total_dim(self) -> int:
        """Dimension of the l2 direct sum, i.e. the sum of the ``k_i``."""
        return sum(self.dims)

    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.dims)])

    def with_weights(self, weights) -> "FusionSequence":
        return FusionSequence.from_bases([w.basis for w in self], weights)

    def uniformized(self) -> "FusionSequence":
        return self.with_weights([1.0] * len(self))

    @cached_property
    def synthesis_matrix(self) -> np.ndarray:
        """Dense ``n x sum(k_i)`` matrix of T_W; column block i is ``w_i B_i``."""
        m = np.hstack([w.weight * w.basis for w in self.subspaces])
        m.setflags(write=False)
        return m

    @cached_property
    def frame_operator(self) -> np.ndarray:
        s = sum(w.weight**2 * w.projector for w in self.subspaces)
        s = 0.5 * (s + adjoint(s))
        s.setflags(write=False)
        return s

    @cached_property
    def _spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.frame_operator)

    def is_frame(self, tol: float = DEFAULT_TOL) -> bool:
        lam = self._spectrum
        return bool(lam[0] > tol * lam[-1])

    def require_frame(self, tol: float = DEFAULT_TOL, what: str = "W"):
        if not self.is_frame(tol):
            raise NotAFrame(f"{what} is not a fusion frame: lambda_min(S) = {self._spectrum[0]:.3e}")

    @cached_property
    def frame_operator_inv(self) -> np.ndarray:
        self.require_frame()
        return linalg.psd_power(self.frame_operator, -1.0)

    @cached_property
    def frame_operator_inv_sqrt(self) -> np.ndarray:
        self.require_frame()
        return linalg.psd_power(self.frame_operator, -0.5)

    @cached_property
    def frame_operator_sqrt(self) -> np.ndarray:
        self.require_frame()
        return linalg.psd_power(self.frame_operator, 0.5)


@dataclass(frozen=True, eq=False)
class DirectSumVector:
    coords: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coords", tuple(np.asarray(c, dtype=complex).reshape(-1) for c in self.coords)
        )

    @classmethod
    def from_flat(cls, dims: Sequence[int], flat) -> "DirectSumVector":
        flat = np.asarray(flat, dtype=complex).reshape(-1)
        if flat.size != sum(dims):
            raise DimensionMismatch(f"expected {sum(dims)} coordinates, got {flat.size}")
        cuts = np.cumsum(dims)[:-1]
        return cls(tuple(np.split(flat, cuts)))

    @classmethod
    def zeros(cls, w: FusionSequence) -> "DirectSumVector":
        return cls(tuple(np.zeros(k, dtype=complex) for k in w.dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.coords)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.coords) if self.coords else np.zeros(0, complex)

    def norm(self) -> float:
        return float(np.sqrt(sum(np.vdot(c, c).real for c in self.coords)))

    def inner(self, other: "DirectSumVector") -> complex:
        """``<self, other>``, conjugate-linear in ``self``."""
        return complex(sum(np.vdot(a, b) for a, b in zip(self.coords, other.coords)))


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float


@dataclass(frozen=True)
class FrameClass:
    bessel: bool
    frame: bool
    tight: bool
    parseval: bool
    uniform_1: bool
    riesz_basis: bool
    orthonormal_basis: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _vector(f, n: int) -> np.ndarray:
    f = np.asarray(f, dtype=complex).reshape(-1)
    if f.size != n:
        raise DimensionMismatch(f"vector has length {f.size}, expected {n}")
    return f


def project(w: WeightedSubspace, f) -> np.ndarray:
    f = _vector(f, w.ambient_dim)
    return w.basis @ (adjoint(w.basis) @ f)


def synthesis(w: FusionSequence, c: DirectSumVector) -> np.ndarray:
    if c.dims != w.dims:
        raise DimensionMismatch(f"coefficient dims {c.dims} do not match {w.dims}")
    out = np.zeros(w.ambient_dim, dtype=complex)
    for sub, ci in zip(w, c.coords):
        out += sub.weight * (sub.basis @ ci)
    return out


def analysis(w: FusionSequence, f) -> DirectSumVector:
    f = _vector(f, w.ambient_dim)
    return DirectSumVector(tuple(sub.weight * (adjoint(sub.basis) @ f) for sub in w))


def frame_operator(w: FusionSequence) -> np.ndarray:
    return np.array(w.frame_operator)


def frame_bounds(w: FusionSequence) -> FrameBounds:
    lam = w._spectrum
    return FrameBounds(max(float(lam[0]), 0.0), max(float(lam[-1]), 0.0))


def classify(w: FusionSequence, tol: float = DEFAULT_TOL) -> FrameClass:
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = frame_bounds(w)
    frame = w.is_frame(tol)
    tight = abs(b.upper - b.lower) <= tol * b.upper
    parseval = tight and abs(b.lower - 1.0) <= tol
    uniform_1 = bool(np.all(np.abs(w.weights - 1.0) <= tol))
    riesz = frame and w.total_dim == w.ambient_dim
    return FrameClass(
        bessel=True,
        frame=frame,
        tight=tight,
        parseval=parseval,
        uniform_1=uniform_1,
        riesz_basis=riesz,
        orthonormal_basis=uniform_1 and parseval,
    )


def canonical_dual(w: FusionSequence, tol: float = DEFAULT_TOL) -> FusionSequence:
    """The fusion frame ``(S_W^{-1} W_i, w_i)``.

    The basis of ``S_W^{-1} W_i`` is the polar factor of ``S_W^{-1} B_i``, so a
    Parseval frame is its own dual basis for basis.
    """
    w.require_frame(tol)
    s_inv = w.frame_operator_inv
    return FusionSequence.from_bases([linalg.polar_factor(s_inv @ sub.basis) for sub in w], w.weights)


def phi(v: FusionSequence, w: FusionSequence, tol: float = DEFAULT_TOL):
    """Block-diagonal map ``{f_i} -> {pi_{V_i} S_W^{-1} f_i}`` from the W- to the V-direct sum.

    Argument order follows the subscript: ``phi(v, w)`` is phi_VW.
    """
    from .blocks import BlockOpMatrix

    if len(v) != len(w):
        raise CountMismatch(f"{len(v)} subspaces in V but {len(w)} in W")
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatch("V and W live in different spaces")
    w.require_frame(tol)
    s_inv = w.frame_operator_inv
    diag = [adjoint(bv.basis) @ s_inv @ bw.basis for bv, bw in zip(v, w)]
    return BlockOpMatrix.block_diag(diag)


def is_dual(v: FusionSequence, w: FusionSequence, tol: float = 1e-9) -> bool:
    """Whether ``T_V phi_VW T_W* = I`` holds to ``tol`` in spectral norm."""
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatch("V and W live in different spaces")
    if len(v) != len(w) or not w.is_frame():
        return False
    recon = v.synthesis_matrix @ phi(v, w).dense @ adjoint(w.synthesis_matrix)
    return bool(np.linalg.norm(recon - np.eye(w.ambient_dim), 2) <= tol)


def riesz_residual(w: FusionSequence) -> float:
    """Largest ``||w_i^2 pi_i S^{-1} pi_j - delta_ij pi_j||`` over all pairs ``(i, j)``."""
    s_inv = w.frame_operator_inv
    worst = 0.0
    for i, wi in enumerate(w):
        for j, wj in enumerate(w):
            lhs = wi.weight**2 * wi.projector @ s_inv @ wj.projector
            rhs = wj.projector if i == j else 0.0
            worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


# -- seeded generators --------------------------------------------------------


def random_subspace(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return linalg.random_unitary(n, rng)[:, :k]


def _log_uniform_weights(m: int, rng: np.random.Generator, lo=0.5, hi=2.0) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=m))


def random_fusion_frame(
    n: int,
    rng: np.random.Generator,
    n_subspaces: int | None = None,
    weights: bool = True,
    min_lower: float = 1e-3,
) -> FusionSequence:
    """Random fusion frame for C^n.

    Subspace dimensions are drawn from ``1..max(1, n // 2)``, bases are
    Haar-random and weights log-uniform on ``[1/2, 2]``. Subspaces are added
    until the dimensions sum past ``n`` and the lower bound exceeds
    ``min_lower``.
    """
    kmax = max(1, n // 2)
    for _ in range(100):
        bases = []
        while True:
            k = int(rng.integers(1, kmax + 1))
            bases.append(random_subspace(n, k, rng))
            total = sum(b.shape[1] for b in bases)
            enough = len(bases) >= n_subspaces if n_subspaces else total > n
            if enough:
                break
        ws = _log_uniform_weights(len(bases), rng) if weights else np.ones(len(bases))
        fs = FusionSequence.from_bases(bases, ws)
        if frame_bounds(fs).lower > min_lower:
            return fs
    raise RuntimeError("could not draw a well-conditioned fusion frame")


def random_partition(n: int, rng: np.random.Generator, kmax: int | None = None) -> list[int]:
    kmax = kmax or max(1, n // 2)
    parts = []
    left = n
    while left:
        k = int(rng.integers(1, min(kmax, left) + 1))
        parts.append(k)
        left -= k
    return parts


def random_riesz_decomposition(
    n: int,
    rng: np.random.Generator,
    weights: bool = True,
    cond_max: float = 50.0,
) -> FusionSequence:
    """Partition an orthonormal basis and push it through a random invertible map."""
    parts = random_partition(n, rng)
    while True:
        g = linalg.random_cmatrix(n, n, rng)
        if np.linalg.cond(g) < cond_max:
            break
    cuts = np.cumsum(parts)[:-1]
    bases = [linalg.orthonormalize(blk) for blk in np.split(g, cuts, axis=1)]
    ws = _log_uniform_weights(len(bases), rng) if weights else np.ones(len(bases))
    return FusionSequence.from_bases(bases, ws)


def random_fusion_onb(n: int, rng: np.random.Generator) -> FusionSequence:
    parts = random_partition(n, rng)
    u = linalg.random_unitary(n, rng)
    cuts = np.cumsum(parts)[:-1]
    return FusionSequence.from_bases(np.split(u, cuts, axis=1))


def random_parseval_frame(n: int, rng: np.random.Generator) -> FusionSequence:
    """Redundant Parseval fusion frame that is neither uniform-1 nor an ONB.

    Two independent fusion orthonormal bases with all weights ``1/sqrt(2)``.
    """
    a = random_fusion_onb(n, rng)
    b = random_fusion_onb(n, rng)
    bases = [s.basis for s in a] + [s.basis for s in b]
    return FusionSequence.from_bases(bases, [1 / np.sqrt(2)] * len(bases))


def log_input_deviation(raw, basis, tol: float = DEFAULT_TOL, label: str = "subspace"):
    """Warn when a loaded basis had to be re-orthonormalised."""
    raw = linalg.as_cmatrix(raw)
    if raw.shape != basis.shape or np.linalg.norm(raw - basis) > tol * max(1.0, np.linalg.norm(raw)):
        log.warning("%s: input basis deviated from an orthonormal basis and was re-orthonormalised", label)
        return True
    return False

