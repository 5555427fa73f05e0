"""Fusion frame systems and discretisations of ``O f = g``.

A fusion frame system attaches to every subspace ``W_i`` a local frame
``psi_{i1}, ..., psi_{im_i}`` of ``W_i`` (stored as ambient columns). The
weighted union ``{w_i psi_ij}`` is then a frame of the whole space.

Each linear-system form replaces ``O f = g`` by a square system in a
coefficient space. The unknown is a coefficient vector ``c`` of a known
vector (for instance ``c = T_W* S_W^{-1} f``) and ``f`` is recovered from
``c`` by a fixed synthesis step; see :data:`FORMS`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .blocks import BlockOpMatrix, OplusOperator
from .errors import DimensionMismatch, IndexMismatch, Inconsistent, LocalVectorOutsideSubspace
from .frames import FrameBounds, FusionSequence, canonical_dual, phi, random_fusion_frame
from .linalg import DEFAULT_TOL, adjoint
from .representation import mat_repr, mat_repr_otimes


class LinearSystemForm(str, enum.Enum):
    LinEq1 = "LinEq1"
    LinEq1Prime = "LinEq1p"
    LinEq2 = "LinEq2"
    LinEq3 = "LinEq3"
    LinEq4 = "LinEq4"

    @classmethod
    def parse(cls, tag: str) -> "LinearSystemForm":
        aliases = {"LinEq1'": "LinEq1p", "LinEq1Prime": "LinEq1p"}
        return cls(aliases.get(tag, tag))


FORMS = tuple(LinearSystemForm)


@dataclass(frozen=True, eq=False)
class FusionFrameSystem:
    spaces: FusionSequence
    local_frames: tuple[np.ndarray, ...]

    def __post_init__(self, tol: float = 1e-8):
        frames = tuple(linalg.as_cmatrix(f, "local frame") for f in self.local_frames)
        if len(frames) != len(self.spaces):
            raise IndexMismatch(f"{len(frames)} local frames for {len(self.spaces)} subspaces")
        for i, (sub, psi) in enumerate(zip(self.spaces, frames)):
            if psi.shape[0] != self.spaces.ambient_dim:
                raise DimensionMismatch(f"local frame {i} has {psi.shape[0]} rows")
            off = psi - sub.projector @ psi
            if np.linalg.norm(off) > tol * max(1.0, np.linalg.norm(psi)):
                raise LocalVectorOutsideSubspace(f"local frame {i} leaves its subspace")
        object.__setattr__(self, "local_frames", frames)
        bounds = self.local_bounds
        if min(b.lower for b in bounds) <= 0:
            raise ValueError("every local family must be a frame of its subspace")

    @classmethod
    def with_orthonormal_local_bases(cls, spaces: FusionSequence) -> "FusionFrameSystem":
        return cls(spaces, tuple(np.array(s.basis) for s in spaces))

    def local_coordinates(self, i: int) -> np.ndarray:
        """``B_i* Psi^(i)``: the local frame written in the basis of ``W_i``."""
        return adjoint(self.spaces[i].basis) @ self.local_frames[i]

    @property
    def local_bounds(self) -> list[FrameBounds]:
        out = []
        for i in range(len(self.spaces)):
            lam = np.linalg.eigvalsh(self._local_frame_op(i))
            out.append(FrameBounds(max(float(lam[0]), 0.0), float(lam[-1])))
        return out

    def _local_frame_op(self, i: int) -> np.ndarray:
        c = self.local_coordinates(i)
        return c @ adjoint(c)

    @property
    def index_dims(self) -> tuple[int, ...]:
        return tuple(f.shape[1] for f in self.local_frames)


def global_frame(sys: FusionFrameSystem) -> np.ndarray:
    """Columns ``w_i psi_ij``, ordered subspace-major."""
    return np.hstack([sub.weight * psi for sub, psi in zip(sys.spaces, sys.local_frames)])


def oplus_local_synthesis(sys: FusionFrameSystem) -> BlockOpMatrix:
    """``(+) T_{Psi^(i)}`` from the stacked coefficient space to the W direct sum."""
    return BlockOpMatrix.block_diag([sys.local_coordinates(i) for i in range(len(sys.spaces))])


def oplus_local_frame_op(sys: FusionFrameSystem) -> OplusOperator:
    return OplusOperator([sys._local_frame_op(i) for i in range(len(sys.spaces))])


def sisi_defects(sys: FusionFrameSystem) -> tuple[float, float]:
    """Defects of ``T_W (+)T_Psi(i) = T_Psi`` and ``S_Psi = T_W (+)S_Psi(i) T_W*``."""
    psi = global_frame(sys)
    tw = sys.spaces.synthesis_matrix
    d1 = np.linalg.norm(tw @ oplus_local_synthesis(sys).dense - psi, 2)
    s_psi = psi @ adjoint(psi)
    d2 = np.linalg.norm(tw @ oplus_local_frame_op(sys).dense @ adjoint(tw) - s_psi, 2)
    return float(d1), float(d2)


def discrete_mat_repr(psi, phi_, o) -> np.ndarray:
    """Gram matrix ``Psi* O Phi`` of an operator with respect to two frames."""
    psi = linalg.as_cmatrix(psi)
    phi_ = linalg.as_cmatrix(phi_)
    o = linalg.as_cmatrix(o)
    if o.shape != (psi.shape[0], phi_.shape[0]):
        raise DimensionMismatch(f"operator {o.shape} vs frames in C^{psi.shape[0]}, C^{phi_.shape[0]}")
    return adjoint(psi) @ o @ phi_


def block_gram_check(sys_w: FusionFrameSystem, sys_v: FusionFrameSystem, o) -> float:
    """Max entrywise gap between ``Psi* O Phi`` and its assembly through ``M^(W,V)(O)``."""
    if len(sys_w.spaces) != len(sys_v.spaces):
        raise IndexMismatch("systems have different numbers of subspaces")
    direct = discrete_mat_repr(global_frame(sys_w), global_frame(sys_v), o)
    m = mat_repr(sys_w.spaces, sys_v.spaces, o)
    rows = []
    for j in range(len(sys_w.spaces)):
        lw = adjoint(sys_w.local_coordinates(j))
        rows.append([lw @ m.block(j, i) @ sys_v.local_coordinates(i) for i in range(len(sys_v.spaces))])
    blockwise = np.block(rows)
    return float(np.max(np.abs(direct - blockwise), initial=0.0))


# -- linear systems -----------------------------------------------------------


@dataclass
class LinearSystem:
    form: LinearSystemForm
    lhs: np.ndarray
    rhs: np.ndarray
    range_projector: np.ndarray  # onto the admissible coefficient vectors
    recover: np.ndarray  # f = recover @ c


def build_lin_system(form, sys: FusionFrameSystem, o, g) -> LinearSystem:
    """Coefficient-space system for ``O f = g`` in the given form.

    ======== ======================== ============================ ====================
    form     matrix                   unknown c                    right-hand side
    ======== ======================== ============================ ====================
    LinEq1   M(O)                     T* S^{-1} f                  T* g
    LinEq1p  M(O S^{-1})              T* f                         T* g
    LinEq2   M^(Psi,Psi)(O S_Psi^-1)  T_Psi* f                     T_Psi* g
    LinEq3   M_otimes(O)              T* S^{-1/2} f                T* S^{-1/2} g
    LinEq4   M_otimes^(dual, W)(O)    T* S^{-1/2} f                T_dual* S_dual^{-1/2} g
    ======== ======================== ============================ ====================

    Here ``T, S`` belong to ``W`` and ``M = M^(W,W)``.
    """
    form = LinearSystemForm.parse(form) if isinstance(form, str) else form
    w = sys.spaces
    w.require_frame()
    n = w.ambient_dim
    o = linalg.as_cmatrix(o, "operator")
    if o.shape != (n, n):
        raise DimensionMismatch(f"operator must be {n} x {n}")
    g = np.asarray(g, dtype=complex).reshape(-1)
    if g.size != n:
        raise DimensionMismatch(f"rhs has length {g.size}, expected {n}")
    t = w.synthesis_matrix
    ts = adjoint(t)
    s_inv = w.frame_operator_inv
    s_isq = w.frame_operator_inv_sqrt
    p_w = ts @ s_inv @ t

    if form is LinearSystemForm.LinEq1:
        return LinearSystem(form, mat_repr(w, w, o).dense, ts @ g, p_w, t)
    if form is LinearSystemForm.LinEq1Prime:
        return LinearSystem(form, mat_repr(w, w, o @ s_inv).dense, ts @ g, p_w, s_inv @ t)
    if form is LinearSystemForm.LinEq2:
        psi = global_frame(sys)
        s_psi_inv = linalg.psd_power(psi @ adjoint(psi), -1.0)
        lhs = discrete_mat_repr(psi, psi, o @ s_psi_inv)
        p_psi = adjoint(psi) @ s_psi_inv @ psi
        return LinearSystem(form, lhs, adjoint(psi) @ g, p_psi, s_psi_inv @ psi)
    if form is LinearSystemForm.LinEq3:
        return LinearSystem(form, mat_repr_otimes(w, w, o).dense, ts @ s_isq @ g, p_w, s_isq @ t)
    if form is LinearSystemForm.LinEq4:
        d = canonical_dual(w)
        rhs = adjoint(d.synthesis_matrix) @ d.frame_operator_inv_sqrt @ g
        return LinearSystem(form, mat_repr_otimes(d, w, o).dense, rhs, p_w, s_isq @ t)
    raise ValueError(f"unknown form {form!r}")


def solve_operator_eq(form, sys: FusionFrameSystem, o, g, rank_tol: float = DEFAULT_TOL, tol: float = 1e-8):
    """Solve ``O f = g`` through the coefficient system of ``form``.

    The coefficient system is solved with the Moore-Penrose inverse, the
    solution is projected onto the admissible coefficients and ``f`` is
    synthesised from it. Raises :class:`Inconsistent` (carrying ``f`` and
    the residual) when ``||O f - g|| > tol ||g||``.

    For an inconsistent system ``f`` is a least-squares solution in the norm
    ``<G x, x>^(1/2)`` with ``G`` from :func:`residual_weight`: ``S_W`` for
    LinEq1 and LinEq1p, ``S_Psi`` for LinEq2 and the identity for LinEq3 and
    LinEq4, which therefore return ``O^+ g``.
    """
    ls = build_lin_system(form, sys, o, g)
    c = linalg.pinv(ls.lhs, rank_tol) @ ls.rhs
    c = ls.range_projector @ c
    f = ls.recover @ c
    g = np.asarray(g, dtype=complex).reshape(-1)
    o = linalg.as_cmatrix(o)
    residual = float(np.linalg.norm(o @ f - g))
    if residual > tol * max(np.linalg.norm(g), np.finfo(float).tiny):
        raise Inconsistent(f"residual {residual:.3e} exceeds tolerance", f=f, residual=residual)
    return f


def residual_weight(form, sys: FusionFrameSystem) -> np.ndarray:
    """Gram operator of the residual norm minimised by ``form``."""
    form = LinearSystemForm.parse(form) if isinstance(form, str) else form
    n = sys.spaces.ambient_dim
    if form in (LinearSystemForm.LinEq1, LinearSystemForm.LinEq1Prime):
        return np.array(sys.spaces.frame_operator)
    if form is LinearSystemForm.LinEq2:
        psi = global_frame(sys)
        return psi @ adjoint(psi)
    return np.eye(n)


def block_representation(w: FusionSequence, o) -> float:
    """Relative defect of ``O = T_dual phi_dual,W U (T_dual phi_dual,W)*`` with ``U = M^(W,W)(O)``.

    The right factor is taken as the adjoint of the left one, which is the
    only reading under which the blocks compose.
    """
    w.require_frame()
    o = linalg.as_cmatrix(o)
    d = canonical_dual(w)
    left = d.synthesis_matrix @ phi(d, w).dense
    assembled = left @ mat_repr(w, w, o).dense @ adjoint(left)
    return float(np.linalg.norm(o - assembled) / max(1.0, np.linalg.norm(o)))


def random_system(n: int, rng: np.random.Generator, redundancy: int = 1) -> FusionFrameSystem:
    """Random fusion frame with random local frames of ``redundancy`` extra vectors each."""
    w = random_fusion_frame(n, rng)
    frames = []
    for sub in w:
        k = sub.dim
        while True:
            coeffs = linalg.random_cmatrix(k, k + redundancy, rng)
            if np.linalg.svd(coeffs, compute_uv=False)[-1] > 0.2:
                break
        frames.append(sub.basis @ coeffs)
    return FusionFrameSystem(w, tuple(frames))


def parse_forms(tags: Sequence[str] | None) -> tuple[LinearSystemForm, ...]:
    return FORMS if not tags else tuple(LinearSystemForm.parse(t) for t in tags)
