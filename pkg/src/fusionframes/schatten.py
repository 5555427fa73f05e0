"""Schatten norms and fusion frames on the Hilbert-Schmidt space S_2(C^n).

``S_2(C^n)`` is identified with ``C^{n*n}`` by row-major vectorisation, which
is an isometry for the trace inner product. Under this identification
``X -> A X B`` becomes ``kron(A, B.T)``; in particular the tensor frame
operator ``O -> S_W O S_V`` is ``kron(S_W, S_V.T)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidP
from .frames import FusionSequence, WeightedSubspace
from .linalg import adjoint
from .representation import mat_repr


def schatten_norm(o, p: float) -> float:
    """``(sum_n s_n^p)^(1/p)`` over the singular values; a quasi-norm for ``p < 1``."""
    if not p > 0:
        raise InvalidP(f"p must be positive, got {p}")
    o = linalg.as_cmatrix(o)
    if o.size == 0:
        return 0.0
    s = np.linalg.svd(o, compute_uv=False)
    if s[0] == 0.0:
        return 0.0
    # scale out the largest value to keep s**p in range
    return float(s[0] * np.sum((s / s[0]) ** p) ** (1.0 / p))


def hs_inner(u1, u2) -> complex:
    """``trace(u1* u2)``."""
    u1 = linalg.as_cmatrix(u1)
    u2 = linalg.as_cmatrix(u2)
    if u1.shape != u2.shape:
        raise DimensionMismatch(f"shapes {u1.shape} and {u2.shape} differ")
    return complex(np.trace(adjoint(u1) @ u2))


def vec(o) -> np.ndarray:
    return linalg.as_cmatrix(o).reshape(-1)


def unvec(x, shape) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(shape)


@dataclass(frozen=True, eq=False)
class TensorSubspace:
    """The subspace of operators ``pi_{W_j} O pi_{V_i}``, spanned by ``w_a v_b*``."""

    left: WeightedSubspace
    right: WeightedSubspace

    @property
    def weight(self) -> float:
        return self.left.weight * self.right.weight

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    @property
    def basis(self) -> list[np.ndarray]:
        """Rank-one operators ``E_ab``, ordered row-major in ``(a, b)``."""
        bw, bv = self.left.basis, self.right.basis
        return [np.outer(bw[:, a], np.conj(bv[:, b])) for a in range(bw.shape[1]) for b in range(bv.shape[1])]

    def vectorized_basis(self) -> np.ndarray:
        # vec(w v*) = kron(w, conj(v)) in row-major order
        return np.kron(self.left.basis, np.conj(self.right.basis))


def tensor_projection(ts: TensorSubspace, o) -> np.ndarray:
    o = linalg.as_cmatrix(o)
    n = ts.left.ambient_dim
    if o.shape != (n, ts.right.ambient_dim):
        raise DimensionMismatch(f"operator shape {o.shape} does not fit the tensor subspace")
    return ts.left.projector @ o @ ts.right.projector


def tensor_subspaces(w: FusionSequence, v: FusionSequence) -> list[list[TensorSubspace]]:
    """Grid ``[j][i]`` of ``W_j (x) V_i``."""
    return [[TensorSubspace(wj, vi) for vi in v] for wj in w]


def tensor_fusion_frame(w: FusionSequence, v: FusionSequence) -> FusionSequence:
    """``W (x) V`` as a fusion sequence in ``C^{n_w * n_v}``, ordered ``(j, i)`` row-major."""
    subs = [ts for row in tensor_subspaces(w, v) for ts in row]
    return FusionSequence(
        w.ambient_dim * v.ambient_dim,
        tuple(WeightedSubspace(ts.vectorized_basis(), ts.weight) for ts in subs),
    )


def tensor_frame_operator(w: FusionSequence, v: FusionSequence) -> np.ndarray:
    """Closed form of the frame operator of ``W (x) V``: ``O -> S_W O S_V``."""
    return np.kron(w.frame_operator, v.frame_operator.T)


@dataclass
class SchattenTransferReport:
    p: float
    operator_norm: float
    matrix_norm: float
    forward_bound: float  # sqrt(B_W B_V) ||O||_p
    backward_bound: float  # ||S_W^{-1} T_W|| ||M(O)||_p ||T_V* S_V^{-1}||
    forward_ok: bool
    backward_ok: bool

    def as_dict(self):
        return asdict(self)


def schatten_transfer_check(w: FusionSequence, v: FusionSequence, o, p: float, slack: float = 1e-9):
    """Two-sided Schatten-p comparison between ``O`` and ``M^(W,V)(O)``."""
    w.require_frame(what="W")
    v.require_frame(what="V")
    m = mat_repr(w, v, o)
    op_p = schatten_norm(o, p)
    m_p = schatten_norm(m.dense, p)
    b_w = float(np.linalg.eigvalsh(w.frame_operator)[-1])
    b_v = float(np.linalg.eigvalsh(v.frame_operator)[-1])
    fwd = np.sqrt(b_w * b_v) * op_p
    left = linalg.op_norm2(w.frame_operator_inv @ w.synthesis_matrix)
    right = linalg.op_norm2(adjoint(v.synthesis_matrix) @ v.frame_operator_inv)
    bwd = left * m_p * right
    scale = max(1.0, op_p, m_p)
    return SchattenTransferReport(
        p=p,
        operator_norm=op_p,
        matrix_norm=m_p,
        forward_bound=float(fwd),
        backward_bound=float(bwd),
        forward_ok=bool(m_p <= fwd + slack * scale),
        backward_ok=bool(op_p <= bwd + slack * scale),
    )


# -- the restricted maps on S_2 as matrices ----------------------------------


def hs_mat_repr_matrix(w: FusionSequence, v: FusionSequence) -> np.ndarray:
    """Matrix of ``O -> T_W* O T_V`` from ``vec(O)`` to ``vec(flatten(M))``."""
    return np.kron(adjoint(w.synthesis_matrix), v.synthesis_matrix.T)


@dataclass
class HsPinvReport:
    """Penrose defects of the two readings of the pseudo-inverse of ``M_HS``.

    ``scaled`` is ``M -> S_W^{-1} T_W M T_V* S_V^{-1}``; ``plain`` is
    ``M -> T_W M T_V*`` (the adjoint of ``M_HS``).
    """

    scaled_defects: tuple[float, float, float, float]
    plain_defects: tuple[float, float, float, float]
    otimes_defects: tuple[float, float, float, float]

    @property
    def scaled_is_pinv(self) -> bool:
        return max(self.scaled_defects) <= 1e-9

    @property
    def plain_is_pinv(self) -> bool:
        return max(self.plain_defects) <= 1e-9

    def as_dict(self):
        d = asdict(self)
        d["scaled_is_pinv"] = self.scaled_is_pinv
        d["plain_is_pinv"] = self.plain_is_pinv
        return d


def hs_pinv_candidates(w: FusionSequence, v: FusionSequence) -> HsPinvReport:
    w.require_frame(what="W")
    v.require_frame(what="V")
    tw, tv = w.synthesis_matrix, v.synthesis_matrix
    m_hs = hs_mat_repr_matrix(w, v)
    plain = np.kron(tw, np.conj(tv))  # vec(T_W M T_V*) = kron(T_W, conj(T_V)) vec(M)
    scaled = np.kron(w.frame_operator_inv, v.frame_operator_inv.T) @ plain
    sw, sv = w.frame_operator_inv_sqrt, v.frame_operator_inv_sqrt
    m_ot = m_hs @ np.kron(sw, sv.T)
    o_ot = np.kron(sw, sv.T) @ plain
    return HsPinvReport(
        scaled_defects=linalg.moore_penrose_defects(m_hs, scaled),
        plain_defects=linalg.moore_penrose_defects(m_hs, plain),
        otimes_defects=linalg.moore_penrose_defects(m_ot, o_ot),
    )
