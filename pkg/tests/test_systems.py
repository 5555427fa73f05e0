import itertools

import numpy as np
import pytest

from fusionframes import linalg
from fusionframes.errors import IndexMismatch, Inconsistent, LocalVectorOutsideSubspace
from fusionframes.frames import FusionSequence, canonical_dual, random_fusion_frame, random_fusion_onb, random_parseval_frame
from fusionframes.representation import mat_repr, mat_repr_otimes
from fusionframes.systems import (
    FORMS,
    FusionFrameSystem,
    LinearSystemForm,
    block_gram_check,
    block_representation,
    build_lin_system,
    discrete_mat_repr,
    global_frame,
    parse_forms,
    random_system,
    residual_weight,
    sisi_defects,
    solve_operator_eq,
)


def test_local_onbs_of_fusion_onb_give_onb(rng):
    sys = FusionFrameSystem.with_orthonormal_local_bases(random_fusion_onb(5, rng))
    psi = global_frame(sys)
    assert np.allclose(linalg.adjoint(psi) @ psi, np.eye(5))


def test_weighted_coordinate_system(coord_split2):
    sys = FusionFrameSystem.with_orthonormal_local_bases(coord_split2.with_weights([2, 1]))
    psi = global_frame(sys)
    assert np.allclose(psi, [[2, 0], [0, 1]])
    assert np.allclose(psi @ linalg.adjoint(psi), np.diag([4, 1]))


def test_parseval_local_frames_keep_frame_operator(rng):
    w = random_fusion_frame(4, rng)
    frames = []
    for sub in w:
        k = sub.dim
        u = linalg.random_unitary(2 * k, rng)[:k, :]  # rows of a unitary: Parseval frame of C^k
        frames.append(sub.basis @ u)
    sys = FusionFrameSystem(w, tuple(frames))
    psi = global_frame(sys)
    assert np.allclose(psi @ linalg.adjoint(psi), w.frame_operator)


def test_local_frame_must_stay_in_subspace(rng):
    w = random_fusion_frame(4, rng)
    bad = [np.array(s.basis) for s in w]
    bad[0] = linalg.random_cmatrix(4, bad[0].shape[1], rng)
    with pytest.raises(LocalVectorOutsideSubspace):
        FusionFrameSystem(w, tuple(bad))
    with pytest.raises(IndexMismatch):
        FusionFrameSystem(w, tuple(bad[1:]))


def test_sisi_factorisations(rng):
    d1, d2 = sisi_defects(random_system(6, rng, redundancy=2))
    assert d1 < 1e-12 and d2 < 1e-12


def test_discrete_mat_repr_examples(rng):
    u = linalg.random_unitary(4, rng)
    o = linalg.random_cmatrix(4, 4, rng)
    assert np.allclose(discrete_mat_repr(u, u, o), linalg.adjoint(u) @ o @ u)
    psi, ph = linalg.random_cmatrix(4, 6, rng), linalg.random_cmatrix(4, 5, rng)
    assert np.allclose(discrete_mat_repr(psi, ph, np.eye(4)), linalg.adjoint(psi) @ ph)
    dup = np.hstack([psi, psi[:, :2]])
    assert linalg.numerical_rank(discrete_mat_repr(dup, dup, np.eye(4))) == 4


def test_block_gram_local_onbs(rng):
    w = random_fusion_frame(5, rng)
    sys = FusionFrameSystem.with_orthonormal_local_bases(w)
    assert block_gram_check(sys, sys, linalg.random_cmatrix(5, 5, rng)) <= 1e-12


def test_block_gram_random_c8(rng):
    a = random_system(8, rng)
    b = FusionFrameSystem(a.spaces, tuple(f @ linalg.random_unitary(f.shape[1], rng) for f in a.local_frames))
    assert block_gram_check(a, b, linalg.random_cmatrix(8, 8, rng)) <= 1e-10
    assert block_gram_check(a, b, np.zeros((8, 8))) == 0


def test_form_tags():
    assert LinearSystemForm.parse("LinEq1'") is LinearSystemForm.LinEq1Prime
    assert parse_forms(None) == FORMS
    assert parse_forms(["LinEq3"]) == (LinearSystemForm.LinEq3,)
    with pytest.raises(ValueError):
        LinearSystemForm.parse("LinEq9")


def test_lin_system_identity_on_onb(rng):
    w = random_fusion_onb(4, rng)
    sys = FusionFrameSystem.with_orthonormal_local_bases(w)
    g = linalg.random_cmatrix(4, 1, rng).ravel()
    for form in FORMS:
        ls = build_lin_system(form, sys, np.eye(4), g)
        assert np.allclose(ls.lhs, ls.range_projector)
    ls = build_lin_system("LinEq1", sys, np.eye(4), g)
    assert np.allclose(ls.rhs, linalg.adjoint(w.synthesis_matrix) @ g)


def test_lin_system_matrices(rng):
    sys = random_system(5, rng)
    w = sys.spaces
    o = linalg.random_cmatrix(5, 5, rng)
    g = np.ones(5)
    ls = build_lin_system("LinEq1", sys, o, g)
    assert np.allclose(ls.lhs, linalg.adjoint(w.synthesis_matrix) @ o @ w.synthesis_matrix)
    ls = build_lin_system("LinEq4", sys, o, g)
    assert np.allclose(ls.lhs, mat_repr_otimes(canonical_dual(w), w, o).flatten())


def test_solve_identity_returns_rhs(rng):
    sys = random_system(5, rng)
    g = linalg.random_cmatrix(5, 1, rng).ravel()
    for form in FORMS:
        assert np.allclose(solve_operator_eq(form, sys, np.eye(5), g), g)


def test_solve_diagonal_example(rng):
    sys = random_system(4, rng)
    o = np.diag([1.0, 2.0, 3.0, 4.0])
    for form in FORMS:
        assert np.allclose(solve_operator_eq(form, sys, o, [1, 2, 3, 4]), np.ones(4))


def test_forms_agree(rng):
    sys = random_system(9, rng)
    o = linalg.random_cmatrix(9, 9, rng)
    g = linalg.random_cmatrix(9, 1, rng).ravel()
    sols = [solve_operator_eq(form, sys, o, g) for form in FORMS]
    for a, b in itertools.combinations(sols, 2):
        assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(a)


@pytest.mark.parametrize("form", FORMS)
def test_inconsistent_system_reports_least_squares(rng, form):
    sys = random_system(5, rng)
    o = linalg.random_rank_deficient(5, 3, rng)
    g = linalg.random_cmatrix(5, 1, rng).ravel()
    with pytest.raises(Inconsistent) as info:
        solve_operator_eq(form, sys, o, g)
    f = info.value.f
    weight = residual_weight(form, sys)
    # weighted normal equations O* G (O f - g) = 0
    assert np.linalg.norm(linalg.adjoint(o) @ weight @ (o @ f - g)) <= 1e-9 * np.linalg.norm(g)
    assert info.value.residual == pytest.approx(np.linalg.norm(o @ f - g))
    if form in (LinearSystemForm.LinEq3, LinearSystemForm.LinEq4):
        assert np.allclose(f, linalg.pinv(o) @ g)


def test_block_representation_examples(rng):
    assert block_representation(random_fusion_onb(5, rng), linalg.random_cmatrix(5, 5, rng)) <= 1e-10
    assert block_representation(random_parseval_frame(4, rng), linalg.random_cmatrix(4, 4, rng)) <= 1e-10
    assert block_representation(random_fusion_frame(6, rng), linalg.random_cmatrix(6, 6, rng)) <= 1e-10
    assert block_representation(random_fusion_frame(4, rng), np.zeros((4, 4))) == 0
