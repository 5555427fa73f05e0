"""Matrix representations of operators with respect to pairs of fusion frames.

For fusion sequences ``W`` (rows) and ``V`` (columns) an operator ``O`` from
the ambient space of ``V`` to that of ``W`` induces the block matrix with
entries ``w_j v_i pi_{W_j} O pi_{V_i}``, which as a whole is
``T_W* O T_V``. In the other direction a block matrix ``M`` induces the
operator ``T_W M T_V*``. The ``_otimes`` variants first sandwich the
operator between ``S_W^{-1/2}`` and ``S_V^{-1/2}``, which turns the pair
into an exact left inverse of each other.

All identities below are checked on dense matrices; block matrices are
compared through their flattened form.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .blocks import BlockOpMatrix, OplusOperator, adjoint_block
from .errors import DimensionMismatch, NotRieszBasis, SingularOperator
from .frames import FusionSequence, canonical_dual, classify, phi
from .linalg import DEFAULT_TOL, adjoint

__all__ = [
    "mat_repr",
    "op_from_matrix",
    "mat_repr_otimes",
    "op_from_matrix_otimes",
    "adjoint_block",
    "algebra_check",
    "oplus_frame_op",
    "inverse_repr",
    "inverse_repr_otimes",
    "dual_transfer_check",
    "pinv_repr",
    "pinv_repr_otimes",
    "cross_gram",
    "cross_gram_reconstruction_defect",
    "alt_frame_operator",
    "is_riesz_basis",
]


def _check_operator(w: FusionSequence, v: FusionSequence, o) -> np.ndarray:
    o = linalg.as_cmatrix(o, "operator")
    if o.shape != (w.ambient_dim, v.ambient_dim):
        raise DimensionMismatch(
            f"operator has shape {o.shape}, expected {(w.ambient_dim, v.ambient_dim)}"
        )
    return o


def _check_matrix(w: FusionSequence, v: FusionSequence, m: BlockOpMatrix):
    if m.row_dims != w.dims or m.col_dims != v.dims:
        raise DimensionMismatch(
            f"block structure {m.row_dims} x {m.col_dims} does not match {w.dims} x {v.dims}"
        )


def mat_repr(w: FusionSequence, v: FusionSequence, o) -> BlockOpMatrix:
    """Block matrix induced by ``o``; block ``(j, i)`` is ``w_j v_i B_j* O B_i``."""
    o = _check_operator(w, v, o)
    rows = []
    for wj in w:
        left = wj.weight * adjoint(wj.basis) @ o
        rows.append([left @ (vi.weight * vi.basis) for vi in v])
    return BlockOpMatrix.from_blocks(rows)


def op_from_matrix(w: FusionSequence, v: FusionSequence, m: BlockOpMatrix) -> np.ndarray:
    """Operator ``T_W M T_V*`` induced by the block matrix ``m``."""
    _check_matrix(w, v, m)
    return w.synthesis_matrix @ m.dense @ adjoint(v.synthesis_matrix)


def mat_repr_otimes(w: FusionSequence, v: FusionSequence, o) -> BlockOpMatrix:
    o = _check_operator(w, v, o)
    w.require_frame(what="W")
    v.require_frame(what="V")
    return mat_repr(w, v, w.frame_operator_inv_sqrt @ o @ v.frame_operator_inv_sqrt)


def op_from_matrix_otimes(w: FusionSequence, v: FusionSequence, m: BlockOpMatrix) -> np.ndarray:
    w.require_frame(what="W")
    v.require_frame(what="V")
    return w.frame_operator_inv_sqrt @ op_from_matrix(w, v, m) @ v.frame_operator_inv_sqrt


def is_riesz_basis(w: FusionSequence, tol: float = DEFAULT_TOL) -> bool:
    return w.total_dim == w.ambient_dim and w.is_frame(tol)


def _require_riesz(w: FusionSequence, name: str, tol: float):
    if not is_riesz_basis(w, tol):
        raise NotRieszBasis(
            f"{name} is not a fusion Riesz basis (sum of dims {w.total_dim}, ambient {w.ambient_dim})"
        )


def _require_invertible(o: np.ndarray, tol: float):
    if o.shape[0] != o.shape[1] or linalg.numerical_rank(o, tol) < o.shape[0]:
        raise SingularOperator("operator is not invertible at the working tolerance")


# -- algebra ------------------------------------------------------------------


@dataclass
class AlgebraReport:
    plain_defect: float
    otimes_defect: float
    operator_norm: float
    reconstructed_norm: float
    injective: bool
    fusion_onb: bool

    def as_dict(self):
        return asdict(self)


def algebra_check(w: FusionSequence, o1, o2, tol: float = 1e-9) -> AlgebraReport:
    """Multiplicativity defects of ``M^(W,W)`` and ``M_otimes^(W,W)`` on ``o1, o2``."""
    w.require_frame()
    o1 = _check_operator(w, w, o1)
    o2 = _check_operator(w, w, o2)
    plain = (mat_repr(w, w, o1) @ mat_repr(w, w, o2)) - mat_repr(w, w, o1 @ o2)
    m1, m2 = mat_repr_otimes(w, w, o1), mat_repr_otimes(w, w, o2)
    otimes = (m1 @ m2) - mat_repr_otimes(w, w, o1 @ o2)
    back = op_from_matrix_otimes(w, w, m1)
    return AlgebraReport(
        plain_defect=plain.norm(),
        otimes_defect=otimes.norm(),
        operator_norm=linalg.op_norm2(o1),
        reconstructed_norm=linalg.op_norm2(back),
        injective=bool(np.linalg.norm(back - o1, 2) <= tol * max(1.0, linalg.op_norm2(o1))),
        fusion_onb=classify(w).orthonormal_basis,
    )


# -- dual transfer ------------------------------------------------------------


def oplus_frame_op(w: FusionSequence, dual: FusionSequence | None = None) -> OplusOperator:
    """Componentwise ``S_W`` from the canonical-dual direct sum to the W direct sum.

    Entry ``i`` is ``B_i^W* S_W B_i^D`` where ``B_i^D`` is the stored basis of
    ``S_W^{-1} W_i``; with these coordinates ``S_W^{-1} T_W (+)S_W`` equals the
    synthesis operator of the dual.
    """
    w.require_frame()
    dual = canonical_dual(w) if dual is None else dual
    s = w.frame_operator
    return OplusOperator([adjoint(bw.basis) @ s @ bd.basis for bw, bd in zip(w, dual)])


@dataclass
class TransferItem:
    item: int
    factorization_defect: float
    lhs_rank: int
    rhs_rank: int
    lhs_invertible: bool
    rhs_invertible: bool

    @property
    def agree(self) -> bool:
        return self.lhs_invertible == self.rhs_invertible


@dataclass
class DualTransferReport:
    synthesis_identity_defect: float
    items: list[TransferItem] = field(default_factory=list)

    @property
    def max_defect(self) -> float:
        return max([self.synthesis_identity_defect] + [it.factorization_defect for it in self.items])

    @property
    def verdicts_agree(self) -> bool:
        return all(it.agree for it in self.items)

    def as_dict(self):
        d = asdict(self)
        d["max_defect"] = self.max_defect
        d["verdicts_agree"] = self.verdicts_agree
        return d


def dual_transfer_check(w: FusionSequence, o, rank_tol: float = DEFAULT_TOL) -> DualTransferReport:
    """Compare representations over the canonical dual with ones over ``W`` itself.

    Every representation involving the dual factors through ``(+)S_W`` and a
    representation over ``(W, W)`` of a modified operator, so the two sides
    are invertible together. The sixth item uses ``S_dual^{-1/2}`` on both
    sides of ``O``, which is what the factorisation actually produces.
    """
    w.require_frame()
    o = _check_operator(w, w, o)
    d = canonical_dual(w)
    os_ = oplus_frame_op(w, d)
    s_inv = w.frame_operator_inv
    s_isq = w.frame_operator_inv_sqrt
    d_isq = d.frame_operator_inv_sqrt

    syn_defect = float(
        np.linalg.norm(d.synthesis_matrix - s_inv @ w.synthesis_matrix @ os_.dense, 2)
    )
    osa = os_.adjoint()
    pairs = [
        (mat_repr(w, d, o), mat_repr(w, w, o @ s_inv) @ os_, mat_repr(w, w, o @ s_inv)),
        (mat_repr(d, w, o), osa @ mat_repr(w, w, s_inv @ o), mat_repr(w, w, s_inv @ o)),
        (
            mat_repr(d, d, o),
            osa @ mat_repr(w, w, s_inv @ o @ s_inv) @ os_,
            mat_repr(w, w, s_inv @ o @ s_inv),
        ),
        (
            mat_repr_otimes(w, d, o),
            mat_repr_otimes(w, w, o @ d_isq @ s_isq) @ os_,
            mat_repr_otimes(w, w, o @ d_isq @ s_isq),
        ),
        (
            mat_repr_otimes(d, w, o),
            osa @ mat_repr_otimes(w, w, s_isq @ d_isq @ o),
            mat_repr_otimes(w, w, s_isq @ d_isq @ o),
        ),
        (
            mat_repr_otimes(d, d, o),
            osa @ mat_repr_otimes(w, w, s_isq @ d_isq @ o @ d_isq @ s_isq) @ os_,
            mat_repr_otimes(w, w, s_isq @ d_isq @ o @ d_isq @ s_isq),
        ),
    ]
    report = DualTransferReport(synthesis_identity_defect=syn_defect)
    for k, (lhs, factored, core) in enumerate(pairs, start=1):
        scale = max(1.0, lhs.norm())
        lr = linalg.numerical_rank(lhs.dense, rank_tol)
        rr = linalg.numerical_rank(core.dense, rank_tol)
        report.items.append(
            TransferItem(
                item=k,
                factorization_defect=(lhs - factored).norm() / scale,
                lhs_rank=lr,
                rhs_rank=rr,
                lhs_invertible=lhs.is_square() and lr == lhs.dense.shape[0],
                rhs_invertible=core.is_square() and rr == core.dense.shape[0],
            )
        )
    return report


# -- inverses -----------------------------------------------------------------


def inverse_repr(w: FusionSequence, v: FusionSequence, o, tol: float = DEFAULT_TOL) -> BlockOpMatrix:
    """Inverse of ``M^(W,V)(O)`` for Riesz bases: ``M^(V,W)(S_V^{-1} O^{-1} S_W^{-1})``."""
    o = _check_operator(w, v, o)
    _require_riesz(w, "W", tol)
    _require_riesz(v, "V", tol)
    _require_invertible(o, tol)
    return mat_repr(v, w, v.frame_operator_inv @ np.linalg.inv(o) @ w.frame_operator_inv)


def inverse_repr_otimes(w: FusionSequence, v: FusionSequence, o, tol: float = DEFAULT_TOL) -> BlockOpMatrix:
    o = _check_operator(w, v, o)
    _require_riesz(w, "W", tol)
    _require_riesz(v, "V", tol)
    _require_invertible(o, tol)
    return mat_repr_otimes(v, w, np.linalg.inv(o))


# -- pseudo-inverses ----------------------------------------------------------


def _invariant_under(s: np.ndarray, proj: np.ndarray) -> float:
    """``||(I - P) S P||``: zero iff ``S range(P) = range(P)`` for invertible ``S``."""
    comp = np.eye(proj.shape[0]) - proj
    return float(np.linalg.norm(comp @ s @ proj, 2))


@dataclass
class PinvResult:
    matrix: BlockOpMatrix
    domain_condition: bool  # S_V range(O*) = range(O*)
    range_condition: bool  # S_W range(O) = range(O)
    domain_defect: float
    range_defect: float
    weak_inverse_defect: float  # ||M X M - M|| / max(1, ||M||)
    mp_defects: tuple[float, float, float, float]

    @property
    def certified(self) -> bool:
        return self.domain_condition and self.range_condition

    def as_dict(self):
        return {
            "certified": self.certified,
            "domain_condition": self.domain_condition,
            "range_condition": self.range_condition,
            "domain_defect": self.domain_defect,
            "range_defect": self.range_defect,
            "weak_inverse_defect": self.weak_inverse_defect,
            "mp_defects": list(self.mp_defects),
        }


def pinv_repr(
    w: FusionSequence,
    v: FusionSequence,
    o,
    rank_tol: float = DEFAULT_TOL,
    cond_tol: float = 1e-8,
) -> PinvResult:
    """Candidate pseudo-inverse ``M^(V,W)(S_V^{-1} O^+ S_W^{-1})`` of ``M^(W,V)(O)``.

    The candidate is the Moore-Penrose inverse exactly when ``S_V`` leaves
    ``range(O*)`` invariant and ``S_W`` leaves ``range(O)`` invariant; the
    result carries both flags. ``M X M = M`` holds in either case.
    """
    o = _check_operator(w, v, o)
    w.require_frame(what="W")
    v.require_frame(what="V")
    m = mat_repr(w, v, o)
    x = mat_repr(v, w, v.frame_operator_inv @ linalg.pinv(o, rank_tol) @ w.frame_operator_inv)
    p_dom = linalg.range_projector(adjoint(o), rank_tol)
    p_ran = linalg.range_projector(o, rank_tol)
    dom_defect = _invariant_under(v.frame_operator, p_dom) / linalg.op_norm2(v.frame_operator)
    ran_defect = _invariant_under(w.frame_operator, p_ran) / linalg.op_norm2(w.frame_operator)
    weak = (m @ x @ m - m).norm() / max(1.0, m.norm())
    return PinvResult(
        matrix=x,
        domain_condition=dom_defect <= cond_tol,
        range_condition=ran_defect <= cond_tol,
        domain_defect=dom_defect,
        range_defect=ran_defect,
        weak_inverse_defect=weak,
        mp_defects=linalg.moore_penrose_defects(m.dense, x.dense),
    )


def pinv_repr_otimes(w: FusionSequence, v: FusionSequence, o, rank_tol: float = DEFAULT_TOL) -> BlockOpMatrix:
    """``M_otimes^(V,W)(O^+)``, the Moore-Penrose inverse of ``M_otimes^(W,V)(O)``."""
    o = _check_operator(w, v, o)
    return mat_repr_otimes(v, w, linalg.pinv(o, rank_tol))


# -- cross Gram and the alternate frame operator ------------------------------


def cross_gram(o, w: FusionSequence, v: FusionSequence) -> BlockOpMatrix:
    """``phi_VW M^(W,V)(O)``, i.e. components ``pi_{V_i} S_W^{-1} (M^(W,V)(O) f)_i``.

    With ``o = I`` this is the fusion cross Gram matrix; with ``v = w`` the
    fusion Gram matrix.
    """
    return phi(v, w) @ mat_repr(w, v, o)


def cross_gram_reconstruction_defect(o, w: FusionSequence, v: FusionSequence) -> float:
    """``||T_V G T_V* S_V^{-1} - O||``, which vanishes whenever ``V`` is a dual of ``W``."""
    o = _check_operator(w, v, o)
    g = cross_gram(o, w, v)
    v.require_frame(what="V")
    rec = v.synthesis_matrix @ g.dense @ adjoint(v.synthesis_matrix) @ v.frame_operator_inv
    return float(np.linalg.norm(rec - o, 2) / max(1.0, linalg.op_norm2(o)))


def alt_frame_operator(w: FusionSequence) -> np.ndarray:
    """``L_W = T_W phi_WW T_W* = sum_i w_i^2 pi_i S_W^{-1} pi_i``."""
    w.require_frame()
    return w.synthesis_matrix @ phi(w, w).dense @ adjoint(w.synthesis_matrix)
