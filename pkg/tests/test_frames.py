import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionframes import linalg
from fusionframes.errors import CountMismatch, DimensionMismatch, NotAFrame
from fusionframes.frames import (
    DirectSumVector,
    FusionSequence,
    WeightedSubspace,
    analysis,
    canonical_dual,
    classify,
    frame_bounds,
    frame_operator,
    is_dual,
    phi,
    project,
    random_fusion_frame,
    random_fusion_onb,
    random_parseval_frame,
    random_riesz_decomposition,
    riesz_residual,
    synthesis,
)

S2 = 1 / np.sqrt(2)


def line(*v):
    return WeightedSubspace(np.array(v, dtype=float).reshape(-1, 1) / np.linalg.norm(v))


def test_project_examples():
    assert np.allclose(project(line(1, 0), [3, 4]), [3, 0])
    assert np.allclose(project(line(1, 1), [1, 0]), [0.5, 0.5])
    f = np.array([2.0, 2.0])
    assert np.allclose(project(line(1, 1), f), f)


def test_synthesis_examples(coord_split2):
    c = DirectSumVector(([1.0], [1.0]))
    assert np.allclose(synthesis(coord_split2, c), [1, 1])
    assert np.allclose(synthesis(coord_split2.with_weights([2, 3]), c), [2, 3])
    assert np.allclose(synthesis(coord_split2, DirectSumVector.zeros(coord_split2)), 0)


def test_analysis_examples(coord_split2):
    c = analysis(coord_split2, [5, 7])
    assert np.allclose(c.flat(), [5, 7]) and c.dims == (1, 1)
    single = FusionSequence.from_bases([[[1.0], [0.0]]], [2.0])
    assert np.allclose(analysis(single, [1, 1]).flat(), [2])


def test_analysis_length_checked(coord_split2):
    with pytest.raises(DimensionMismatch):
        analysis(coord_split2, [1, 2, 3])


def test_frame_operator_examples(coord_split2, two_lines):
    assert np.allclose(frame_operator(coord_split2), np.eye(2))
    assert np.allclose(frame_operator(two_lines), [[1.5, 0.5], [0.5, 0.5]])
    single = FusionSequence.from_bases([[[1.0], [0.0]]], [3.0])
    assert np.allclose(frame_operator(single), np.diag([9, 0]))


def test_frame_bounds_examples(coord_split2, two_lines):
    b = frame_bounds(coord_split2)
    assert (b.lower, b.upper) == pytest.approx((1, 1))
    b = frame_bounds(two_lines)
    assert (b.lower, b.upper) == pytest.approx((1 - S2, 1 + S2))
    single = FusionSequence.from_bases([[[1.0], [0.0]]])
    b = frame_bounds(single)
    assert (b.lower, b.upper) == pytest.approx((0, 1))
    assert not single.is_frame()


def test_classify_examples():
    e = np.eye(4)
    split = FusionSequence.from_bases([e[:, :2], e[:, 2:]])
    assert all(classify(split).as_dict().values())
    three = FusionSequence.from_bases([[[1.0], [0.0]], [[0.0], [1.0]], [[S2], [S2]]])
    c = classify(three)
    assert c.frame and not c.riesz_basis
    c = classify(FusionSequence.from_bases([[[1.0], [0.0]]]))
    assert c.bessel and not c.frame and not c.tight and not c.riesz_basis


def test_classify_parseval_frame_is_not_onb(rng):
    c = classify(random_parseval_frame(5, rng))
    assert c.parseval and c.tight and not c.orthonormal_basis and not c.riesz_basis


def test_canonical_dual_of_parseval_is_itself(rng):
    w = random_parseval_frame(4, rng)
    d = canonical_dual(w)
    for a, b in zip(w, d):
        assert np.allclose(a.projector, b.projector)
    assert np.allclose(d.weights, w.weights)


def test_canonical_dual_two_lines(two_lines):
    # S^{-1} = [[1, -1], [-1, 3]]: e1 -> (1, -1), (1, 1)/sqrt2 -> (0, 2)/sqrt2
    d = canonical_dual(two_lines)
    assert np.allclose(d[0].basis.ravel(), [S2, -S2])
    assert np.allclose(d[1].basis.ravel(), [0, 1])
    assert np.allclose(two_lines.frame_operator_inv, [[1, -1], [-1, 3]])


def test_canonical_dual_reconstruction(rng):
    w = random_fusion_frame(6, rng)
    d = canonical_dual(w)
    f = linalg.random_cmatrix(6, 1, rng).ravel()
    s_inv = w.frame_operator_inv
    rec = sum(wi.weight * di.weight * di.projector @ s_inv @ wi.projector @ f for wi, di in zip(w, d))
    assert np.allclose(rec, f)


def test_canonical_dual_of_non_frame_raises():
    with pytest.raises(NotAFrame):
        canonical_dual(FusionSequence.from_bases([[[1.0], [0.0]]]))


def test_phi_identity_for_onb(rng):
    w = random_fusion_onb(5, rng)
    assert np.allclose(phi(w, w).dense, np.eye(5))


def test_phi_two_lines_against_dual(two_lines):
    d = canonical_dual(two_lines)
    assert np.allclose(phi(d, two_lines).dense, np.diag([np.sqrt(2), np.sqrt(2)]))


def test_phi_norm_bound(rng):
    for _ in range(10):
        w = random_fusion_frame(6, rng)
        v = random_fusion_frame(6, rng, n_subspaces=len(w))
        assert phi(v, w).norm() <= linalg.op_norm2(w.frame_operator_inv) * (1 + 1e-12)


def test_phi_count_mismatch(rng):
    w = random_fusion_frame(4, rng, n_subspaces=3)
    v = random_fusion_frame(4, rng, n_subspaces=4)
    with pytest.raises(CountMismatch):
        phi(v, w)


def test_is_dual_examples(rng):
    w = random_fusion_frame(5, rng)
    assert is_dual(canonical_dual(w), w)
    other = random_fusion_frame(5, rng, n_subspaces=len(w))
    assert not is_dual(other, w)
    onb = random_fusion_onb(5, rng)
    assert is_dual(onb, onb)


def test_riesz_residual_vanishes_for_riesz(rng):
    assert riesz_residual(random_riesz_decomposition(6, rng)) < 1e-10
    assert riesz_residual(random_fusion_frame(6, rng)) > 1e-3


def test_dual_of_dual_recovers_riesz_basis(rng):
    w = random_riesz_decomposition(6, rng)
    dd = canonical_dual(canonical_dual(w))
    for a, b in zip(w, dd):
        assert np.allclose(a.projector, b.projector, atol=1e-10)


def test_dual_of_dual_differs_for_redundant_frames(rng):
    # S_dual is not S_W^{-1} once the frame is redundant, so the subspaces move
    w = random_fusion_frame(6, rng)
    dd = canonical_dual(canonical_dual(w))
    gap = max(np.linalg.norm(a.projector - b.projector, 2) for a, b in zip(w, dd))
    assert gap > 1e-3


def test_weighted_subspace_validation():
    with pytest.raises(ValueError):
        WeightedSubspace(np.array([[1.0], [1.0]]))
    with pytest.raises(ValueError):
        WeightedSubspace(np.array([[1.0], [0.0]]), weight=0.0)
    with pytest.raises(CountMismatch):
        FusionSequence.from_bases([np.eye(2)], [1.0, 2.0])


def test_span_orthonormalises():
    s = WeightedSubspace.span([[1.0, 2.0], [1.0, 2.0]])
    assert s.dim == 1


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), seeds)
def test_analysis_is_adjoint_of_synthesis(n, seed):
    rng = np.random.default_rng(seed)
    w = random_fusion_frame(n, rng)
    f = linalg.random_cmatrix(n, 1, rng).ravel()
    c = DirectSumVector.from_flat(w.dims, linalg.random_cmatrix(w.total_dim, 1, rng).ravel())
    assert np.isclose(analysis(w, f).inner(c), np.vdot(f, synthesis(w, c)))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), seeds)
def test_frame_operator_is_t_tstar_and_bounds_sandwich(n, seed):
    rng = np.random.default_rng(seed)
    w = random_fusion_frame(n, rng)
    t = w.synthesis_matrix
    assert np.allclose(t @ linalg.adjoint(t), w.frame_operator)
    b = frame_bounds(w)
    f = linalg.random_cmatrix(n, 1, rng).ravel()
    energy = analysis(w, f).norm() ** 2
    nf = np.vdot(f, f).real
    assert b.lower * nf * (1 - 1e-10) <= energy <= b.upper * nf * (1 + 1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), seeds)
def test_canonical_dual_is_dual(n, seed):
    w = random_fusion_frame(n, np.random.default_rng(seed))
    assert is_dual(canonical_dual(w), w)
