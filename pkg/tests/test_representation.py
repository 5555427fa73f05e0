import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionframes import linalg
from fusionframes.blocks import BlockOpMatrix, adjoint_block
from fusionframes.errors import DimensionMismatch, NotRieszBasis, SingularOperator
from fusionframes.frames import (
    FusionSequence,
    canonical_dual,
    phi,
    random_fusion_frame,
    random_fusion_onb,
    random_parseval_frame,
    random_riesz_decomposition,
)
from fusionframes.representation import (
    algebra_check,
    alt_frame_operator,
    cross_gram,
    dual_transfer_check,
    inverse_repr,
    inverse_repr_otimes,
    mat_repr,
    mat_repr_otimes,
    op_from_matrix,
    op_from_matrix_otimes,
    oplus_frame_op,
    pinv_repr,
    pinv_repr_otimes,
)

seeds = st.integers(0, 2**32 - 1)


# -- M and O ------------------------------------------------------------------


def test_mat_repr_coordinates(coord_split2):
    o = np.array([[1.0, 2.0], [3.0, 4.0]])
    m = mat_repr(coord_split2, coord_split2, o)
    assert np.allclose(m.dense, o)
    assert m.block(0, 1) == pytest.approx(2.0)


def test_mat_repr_weights(coord_split2):
    w = coord_split2.with_weights([2, 1])
    assert np.allclose(mat_repr(w, w, np.eye(2)).dense, np.diag([4, 1]))


def test_mat_repr_zero(rng):
    w, v = random_fusion_frame(4, rng), random_fusion_frame(3, rng)
    assert np.all(mat_repr(w, v, np.zeros((4, 3))).dense == 0)


def test_mat_repr_is_dense_sandwich(rng):
    w, v = random_fusion_frame(5, rng), random_fusion_frame(4, rng)
    o = linalg.random_cmatrix(5, 4, rng)
    dense = linalg.adjoint(w.synthesis_matrix) @ o @ v.synthesis_matrix
    assert np.allclose(mat_repr(w, v, o).dense, dense)


def test_mat_repr_shape_checked(rng):
    w = random_fusion_frame(4, rng)
    with pytest.raises(DimensionMismatch):
        mat_repr(w, w, np.eye(3))


def test_op_from_matrix_examples(rng):
    w = random_fusion_onb(5, rng)
    assert np.allclose(op_from_matrix(w, w, mat_repr(w, w, np.eye(5))), np.eye(5))
    v = random_fusion_frame(5, rng)
    assert np.allclose(op_from_matrix(v, v, BlockOpMatrix.identity(v.dims)), v.frame_operator)
    assert np.all(op_from_matrix(v, v, BlockOpMatrix.zeros(v.dims, v.dims)) == 0)


def test_otimes_equals_plain_for_parseval(rng):
    w, v = random_parseval_frame(4, rng), random_parseval_frame(4, rng)
    o = linalg.random_cmatrix(4, 4, rng)
    assert mat_repr_otimes(w, v, o).allclose(mat_repr(w, v, o), atol=1e-12)
    m = mat_repr(w, v, o)
    assert np.allclose(op_from_matrix_otimes(w, v, m), op_from_matrix(w, v, m))


def test_otimes_cancels_square_roots(rng):
    w, v = random_fusion_frame(4, rng), random_fusion_frame(4, rng)
    o = w.frame_operator_sqrt @ v.frame_operator_sqrt
    assert mat_repr_otimes(w, v, o).allclose(mat_repr(w, v, np.eye(4)), atol=1e-10)


def test_otimes_dense_oracle(rng):
    w, v = random_fusion_frame(4, rng), random_fusion_frame(4, rng)
    o = linalg.random_cmatrix(4, 4, rng)
    sw = np.linalg.inv(linalg.psd_power(w.frame_operator, 0.5))
    sv = np.linalg.inv(linalg.psd_power(v.frame_operator, 0.5))
    dense = linalg.adjoint(w.synthesis_matrix) @ sw @ o @ sv @ v.synthesis_matrix
    assert np.allclose(mat_repr_otimes(w, v, o).dense, dense)


def test_otimes_reconstruction_in_c8(rng):
    w, v = random_fusion_frame(8, rng), random_fusion_frame(8, rng)
    o = linalg.random_cmatrix(8, 8, rng)
    assert np.allclose(op_from_matrix_otimes(w, v, mat_repr_otimes(w, v, o)), o, atol=1e-10)


def test_otimes_of_identity_blocks_is_identity(rng):
    w = random_fusion_frame(6, rng)
    assert np.allclose(op_from_matrix_otimes(w, w, BlockOpMatrix.identity(w.dims)), np.eye(6))


def test_plain_reconstruction_fails_without_parseval(rng):
    w = random_fusion_frame(5, rng)
    o = linalg.random_cmatrix(5, 5, rng)
    assert not np.allclose(op_from_matrix(w, w, mat_repr(w, w, o)), o)


def test_adjoint_compatibility(rng):
    w, v = random_fusion_frame(5, rng), random_fusion_frame(3, rng)
    o = linalg.random_cmatrix(5, 3, rng)
    lhs = adjoint_block(mat_repr(w, v, o))
    assert np.max(np.abs(lhs.dense - mat_repr(v, w, linalg.adjoint(o)).dense)) <= 1e-12
    h = o @ linalg.adjoint(o)
    m = mat_repr(w, w, h)
    assert np.allclose(m.dense, adjoint_block(m).dense)


# -- algebra ------------------------------------------------------------------


def test_algebra_onb(rng):
    w = random_fusion_onb(5, rng)
    rep = algebra_check(w, linalg.random_cmatrix(5, 5, rng), linalg.random_cmatrix(5, 5, rng))
    assert rep.plain_defect < 1e-12 and rep.otimes_defect < 1e-12 and rep.fusion_onb


def test_algebra_non_parseval_identity(rng):
    w = random_fusion_frame(5, rng)
    rep = algebra_check(w, np.eye(5), np.eye(5))
    t = w.synthesis_matrix
    expected = linalg.op_norm2(linalg.adjoint(t) @ (w.frame_operator - np.eye(5)) @ t)
    assert rep.plain_defect == pytest.approx(expected)
    assert rep.otimes_defect < 1e-12


def test_algebra_parseval_frames_are_multiplicative_too(rng):
    # S_W = I is all the plain identity needs; a redundant Parseval frame is not an ONB
    w = random_parseval_frame(5, rng)
    rep = algebra_check(w, linalg.random_cmatrix(5, 5, rng), linalg.random_cmatrix(5, 5, rng))
    assert rep.plain_defect < 1e-12 and not rep.fusion_onb


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 9), seeds)
def test_otimes_multiplicative_and_norm_preserving(n, seed):
    rng = np.random.default_rng(seed)
    w = random_fusion_frame(n, rng)
    o1, o2 = linalg.random_cmatrix(n, n, rng), linalg.random_cmatrix(n, n, rng)
    rep = algebra_check(w, o1, o2)
    assert rep.otimes_defect <= 1e-9 * max(1.0, linalg.op_norm2(o1) * linalg.op_norm2(o2))
    assert rep.injective
    assert rep.reconstructed_norm == pytest.approx(rep.operator_norm)


# -- dual transfer ------------------------------------------------------------


def test_oplus_frame_op_parseval_is_identity(rng):
    w = random_parseval_frame(4, rng)
    for e in oplus_frame_op(w).entries:
        assert np.allclose(e, np.eye(e.shape[0]))


def test_oplus_frame_op_two_lines(two_lines):
    # B_1 = e1, dual basis (1,-1)/sqrt2; B_2 = (1,1)/sqrt2, dual basis e2
    entries = oplus_frame_op(two_lines).entries
    s = np.array([[1.5, 0.5], [0.5, 0.5]])
    r = 1 / np.sqrt(2)
    assert entries[0] == pytest.approx(np.array([1, 0]) @ s @ np.array([r, -r]))
    assert entries[1] == pytest.approx(np.array([r, r]) @ s @ np.array([0, 1]))


def test_oplus_frame_op_entries_invertible(rng):
    w = random_fusion_frame(6, rng)
    for e in oplus_frame_op(w).entries:
        assert linalg.numerical_rank(e) == e.shape[0]


def test_dual_transfer_parseval_trivial(rng):
    w = random_parseval_frame(4, rng)
    o = linalg.random_cmatrix(4, 4, rng)
    d = canonical_dual(w)
    assert mat_repr(w, d, o).allclose(mat_repr(w, w, o), atol=1e-12)
    assert dual_transfer_check(w, o).max_defect < 1e-12


@pytest.mark.parametrize("riesz", [True, False])
def test_dual_transfer_verdicts(rng, riesz):
    w = random_riesz_decomposition(5, rng) if riesz else random_fusion_frame(5, rng)
    rep = dual_transfer_check(w, linalg.random_cmatrix(5, 5, rng))
    assert rep.max_defect < 1e-10 and rep.verdicts_agree
    assert all(it.lhs_invertible == riesz for it in rep.items)
    rep = dual_transfer_check(w, linalg.random_rank_deficient(5, 3, rng))
    assert rep.max_defect < 1e-10 and rep.verdicts_agree
    assert not any(it.lhs_invertible or it.rhs_invertible for it in rep.items)


# -- inverses -----------------------------------------------------------------


def test_inverse_onb_identity(rng):
    w = random_fusion_onb(4, rng)
    eye = BlockOpMatrix.identity(w.dims)
    assert inverse_repr(w, w, np.eye(4)).allclose(eye, atol=1e-12)
    assert inverse_repr_otimes(w, w, np.eye(4)).allclose(eye, atol=1e-12)


def test_inverse_random_riesz_c6(rng):
    w, v = random_riesz_decomposition(6, rng), random_riesz_decomposition(6, rng)
    o = linalg.random_cmatrix(6, 6, rng)
    for fwd, inv in ((mat_repr, inverse_repr), (mat_repr_otimes, inverse_repr_otimes)):
        m, x = fwd(w, v, o), inv(w, v, o)
        assert np.linalg.norm((x @ m).dense - np.eye(6), 2) <= 1e-8
        assert np.linalg.norm((m @ x).dense - np.eye(6), 2) <= 1e-8


def test_inverse_requires_riesz(rng):
    w, v = random_fusion_frame(5, rng), random_riesz_decomposition(5, rng)
    with pytest.raises(NotRieszBasis):
        inverse_repr(w, v, np.eye(5))
    with pytest.raises(NotRieszBasis):
        inverse_repr_otimes(v, w, np.eye(5))


def test_inverse_requires_invertible_operator(rng):
    w = random_riesz_decomposition(5, rng)
    with pytest.raises(SingularOperator):
        inverse_repr(w, w, linalg.random_rank_deficient(5, 4, rng))
    with pytest.raises(SingularOperator):
        inverse_repr_otimes(w, w, np.zeros((5, 5)))


# -- pseudo-inverses ----------------------------------------------------------


def test_pinv_fusion_onb_certified(rng):
    w, v = random_fusion_onb(5, rng), random_fusion_onb(4, rng)
    o = linalg.random_rank_deficient(5, 2, rng)[:, :4]
    res = pinv_repr(w, v, o)
    assert res.certified and max(res.mp_defects) < 1e-10
    assert np.allclose(res.matrix.dense, mat_repr(v, w, linalg.pinv(o)).dense)


def test_pinv_certified_by_construction(rng):
    w = random_fusion_frame(6, rng)
    lam, u = np.linalg.eigh(w.frame_operator)
    o = u[:, :3] @ np.diag([1.0, 2.0, 3.0]) @ linalg.adjoint(u[:, :3])
    res = pinv_repr(w, w, o)
    assert res.certified
    assert max(res.mp_defects) <= 1e-8


def test_pinv_generic_not_certified(rng):
    w, v = random_fusion_frame(6, rng), random_fusion_frame(6, rng)
    o = linalg.random_rank_deficient(6, 3, rng)
    res = pinv_repr(w, v, o)
    assert not res.certified
    assert max(res.mp_defects) > 1e-6
    assert res.weak_inverse_defect <= 1e-9


def test_pinv_otimes_matches_inverse_for_riesz(rng):
    w, v = random_riesz_decomposition(5, rng), random_riesz_decomposition(5, rng)
    o = linalg.random_cmatrix(5, 5, rng)
    assert pinv_repr_otimes(w, v, o).allclose(inverse_repr_otimes(w, v, o), atol=1e-9)


def test_pinv_otimes_penrose_c8(rng):
    w, v = random_fusion_frame(8, rng), random_fusion_frame(8, rng)
    o = linalg.random_rank_deficient(8, 4, rng)
    m = mat_repr_otimes(w, v, o).dense
    x = pinv_repr_otimes(w, v, o).dense
    assert max(linalg.moore_penrose_defects(m, x)) <= 1e-8
    assert np.allclose(x, np.linalg.pinv(m, rcond=1e-10), atol=1e-9)


def test_pinv_otimes_of_zero(rng):
    w = random_fusion_frame(4, rng)
    assert np.all(pinv_repr_otimes(w, w, np.zeros((4, 4))).dense == 0)


# -- cross Gram and alternate frame operator ----------------------------------


def test_cross_gram_onb_identity(rng):
    w = random_fusion_onb(5, rng)
    assert np.allclose(cross_gram(np.eye(5), w, w).dense, np.eye(5))


def test_phi_is_diagonal_of_uniform_representation(rng):
    w = random_fusion_frame(5, rng)
    v = random_fusion_frame(5, rng, n_subspaces=len(w))
    m = mat_repr(w.uniformized(), v.uniformized(), v.frame_operator_inv)
    p = phi(w, v)
    for i in range(len(w)):
        assert np.allclose(m.block(i, i), p.block(i, i))


def test_cross_gram_invertible_for_riesz(rng):
    w = random_riesz_decomposition(6, rng)
    g = cross_gram(linalg.random_cmatrix(6, 6, rng), w, w)
    assert g.is_invertible()


def test_cross_gram_inverse_uses_uniform_frame_operator(rng):
    w = random_riesz_decomposition(5, rng)
    o = linalg.random_cmatrix(5, 5, rng)
    su_inv = w.uniformized().frame_operator_inv
    lhs = np.linalg.inv(cross_gram(o, w, w).dense)
    rhs = cross_gram(su_inv @ np.linalg.inv(o) @ su_inv, w, w).dense
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_alt_frame_operator_examples(rng, two_lines):
    w = random_fusion_onb(4, rng)
    assert np.allclose(alt_frame_operator(w), np.eye(4))
    p = random_parseval_frame(4, rng)
    weighted_sum = sum(s.weight**2 * s.projector for s in p)
    assert np.allclose(alt_frame_operator(p), weighted_sum)
    assert np.allclose(alt_frame_operator(p), np.eye(4))
    # pi_1 S^-1 pi_1 = diag(1, 0) and pi_2 S^-1 pi_2 = pi_2 for S^-1 = [[1,-1],[-1,3]]
    assert np.allclose(alt_frame_operator(two_lines), [[1.5, 0.5], [0.5, 0.5]])
