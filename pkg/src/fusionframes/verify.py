"""Seeded property suites over random instances.

Every suite draws its instances from its own generator, seeded with
``(seed, suite index)``, so a suite gives the same result whether it runs
alone or with the others. Each returns a :class:`SuiteResult` holding the
pass flag, the worst defect seen per quantity and a description of the
first few failures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import convolution as conv
from . import linalg
from . import nonstandard as ns
from .errors import NotRieszBasis
from .frames import (
    canonical_dual,
    classify,
    frame_bounds,
    is_dual,
    random_fusion_frame,
    random_fusion_onb,
    random_parseval_frame,
    random_riesz_decomposition,
    riesz_residual,
)
from .representation import (
    algebra_check,
    cross_gram_reconstruction_defect,
    dual_transfer_check,
    inverse_repr,
    inverse_repr_otimes,
    mat_repr,
    mat_repr_otimes,
    op_from_matrix,
    op_from_matrix_otimes,
    pinv_repr,
    pinv_repr_otimes,
)
from .blocks import BlockOpMatrix
from .schatten import hs_pinv_candidates, schatten_transfer_check, tensor_frame_operator, tensor_fusion_frame
from .systems import FORMS, block_gram_check, block_representation, random_system, sisi_defects, solve_operator_eq

MAX_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    title: str
    instances: int = 0
    worst: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    n_failed: int = 0

    @property
    def passed(self) -> bool:
        return self.n_failed == 0

    def track(self, key: str, value: float):
        value = float(value)
        if key not in self.worst or value > self.worst[key]:
            self.worst[key] = value

    def track_min(self, key: str, value: float):
        """For quantities that must stay large; the worst case is the smallest."""
        value = float(value)
        if key not in self.worst or value < self.worst[key]:
            self.worst[key] = value

    def check(self, ok: bool, message: str):
        if not ok:
            self.n_failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(message)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "title": self.title,
            "passed": self.passed,
            "instances": self.instances,
            "failed": self.n_failed,
            "worst": dict(sorted(self.worst.items())),
            "failures": list(self.failures),
        }

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{k}={v:.2e}" for k, v in sorted(self.worst.items()))
        return f"{tag} {self.name}: {self.title} ({self.instances} instances; {worst})"


def _rel(x: float, scale: float) -> float:
    return x / max(1.0, scale)


def _well_conditioned(n: int, rng: np.random.Generator, cond_max: float = 1e3) -> np.ndarray:
    while True:
        o = linalg.random_cmatrix(n, n, rng)
        if np.linalg.cond(o) < cond_max:
            return o


def _random_block_matrix(row_dims, col_dims, rng) -> BlockOpMatrix:
    return BlockOpMatrix(row_dims, col_dims, linalg.random_cmatrix(sum(row_dims), sum(col_dims), rng))


# -- acceptance suites --------------------------------------------------------


def suite_reconstruction(rng, count=200, tol=1e-9) -> SuiteResult:
    r = SuiteResult("reconstruction", "O_otimes(M_otimes(O)) = O")
    for k in range(count):
        nw, nv = (int(x) for x in rng.integers(2, 17, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        o = linalg.random_cmatrix(nw, nv, rng)
        back = op_from_matrix_otimes(w, v, mat_repr_otimes(w, v, o))
        d = _rel(np.linalg.norm(back - o), np.linalg.norm(o))
        r.track("relative_frobenius", d)
        r.check(d <= tol, f"instance {k} (dims {nw}, {nv}): defect {d:.3e}")
        r.instances += 1
    return r


def suite_norm_bound(rng, count=200, tol=1e-9) -> SuiteResult:
    r = SuiteResult("norm-bound", "||M(O)|| <= sqrt(B_W B_V) ||O|| and dually")
    for k in range(count):
        nw, nv = (int(x) for x in rng.integers(2, 17, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        o = linalg.random_cmatrix(nw, nv, rng)
        c = np.sqrt(frame_bounds(w).upper * frame_bounds(v).upper)
        m_norm = linalg.op_norm2(mat_repr(w, v, o).flatten())
        bound = c * linalg.op_norm2(o)
        r.track("forward_ratio", m_norm / bound)
        r.check(m_norm <= bound + tol, f"instance {k}: ||M(O)|| {m_norm:.6g} > {bound:.6g}")
        m = _random_block_matrix(w.dims, v.dims, rng)
        o_norm = linalg.op_norm2(op_from_matrix(w, v, m))
        bound = c * m.norm()
        r.track("backward_ratio", o_norm / bound)
        r.check(o_norm <= bound + tol, f"instance {k}: ||O(M)|| {o_norm:.6g} > {bound:.6g}")
        r.instances += 1
    return r


def suite_riesz(rng, count=100, tol=1e-9) -> SuiteResult:
    r = SuiteResult("riesz", "Riesz characterisation of fusion frames")
    for k in range(count):
        n = int(rng.integers(2, 13))
        w = random_riesz_decomposition(n, rng)
        res = riesz_residual(w)
        r.track("riesz_residual", res)
        r.check(classify(w).riesz_basis, f"Riesz instance {k} not classified as Riesz")
        r.check(res <= tol, f"Riesz instance {k}: residual {res:.3e}")
        r.instances += 1
    for k in range(count):
        n = int(rng.integers(2, 13))
        w = random_fusion_frame(n, rng)
        r.track_min("redundant_min_residual", riesz_residual(w))
        r.check(not classify(w).riesz_basis, f"redundant instance {k} classified as Riesz")
        r.instances += 1
    return r


def suite_inv_riesz(rng, count=100, tol=1e-8) -> SuiteResult:
    r = SuiteResult("inv-riesz", "inverse of M(O) for Riesz bases, NotRieszBasis otherwise")
    for k in range(count):
        n = int(rng.integers(2, 13))
        w, v = random_riesz_decomposition(n, rng), random_riesz_decomposition(n, rng)
        o = _well_conditioned(n, rng)
        eye = np.eye(n)
        for label, fwd, inv in (
            ("plain", mat_repr(w, v, o), inverse_repr(w, v, o)),
            ("otimes", mat_repr_otimes(w, v, o), inverse_repr_otimes(w, v, o)),
        ):
            left = linalg.op_norm2((inv @ fwd).dense - eye)
            right = linalg.op_norm2((fwd @ inv).dense - eye)
            r.track(f"{label}_identity_defect", max(left, right))
            r.check(max(left, right) <= tol, f"instance {k} ({label}): defect {max(left, right):.3e}")
        r.instances += 1
    for k in range(count // 2):
        n = int(rng.integers(2, 13))
        redundant = random_fusion_frame(n, rng)
        riesz = random_riesz_decomposition(n, rng)
        w, v = (redundant, riesz) if k % 2 == 0 else (riesz, redundant)
        o = _well_conditioned(n, rng)
        raised = 0
        for fn in (inverse_repr, inverse_repr_otimes):
            try:
                fn(w, v, o)
            except NotRieszBasis:
                raised += 1
        r.check(raised == 2, f"redundant instance {k}: NotRieszBasis not raised")
        r.instances += 1
    return r


def _certified_operator(w, v, rank, rng) -> np.ndarray:
    """Operator whose range and co-range are spanned by eigenvectors of ``S_W`` and ``S_V``."""
    uw = np.linalg.eigh(w.frame_operator)[1][:, :rank]
    uv = np.linalg.eigh(v.frame_operator)[1][:, :rank]
    return uw @ linalg.random_cmatrix(rank, rank, rng) @ linalg.adjoint(uv)


def suite_pinv(rng, count=100, tol=1e-8) -> SuiteResult:
    r = SuiteResult("pinv", "Moore-Penrose inverse of block representations")
    for k in range(count):
        nw, nv = (int(x) for x in rng.integers(2, 13, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        rank = int(rng.integers(1, min(nw, nv)))
        o = linalg.random_cmatrix(nw, rank, rng) @ linalg.random_cmatrix(rank, nv, rng)
        m = mat_repr_otimes(w, v, o).dense
        x = pinv_repr_otimes(w, v, o).dense
        mp = max(linalg.moore_penrose_defects(m, x))
        ref = np.linalg.pinv(m, rcond=1e-10)
        gap = _rel(linalg.op_norm2(x - ref), linalg.op_norm2(ref))
        r.track("otimes_penrose_defect", mp)
        r.track("otimes_vs_svd_pinv", gap)
        r.check(mp <= tol and gap <= tol, f"instance {k}: Penrose {mp:.3e}, vs SVD {gap:.3e}")
        r.instances += 1
    # certified branch: ranges spanned by frame-operator eigenvectors
    for k in range(count // 4):
        nw, nv = (int(x) for x in rng.integers(2, 13, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        o = _certified_operator(w, v, int(rng.integers(1, min(nw, nv) + 1)), rng)
        _check_certification(r, w, v, o, True, f"certified instance {k}", tol)
    # uncertified branch: generic rank-deficient operators
    for k in range(count // 4):
        nw, nv = (int(x) for x in rng.integers(3, 13, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        o = linalg.random_rank_deficient(max(nw, nv), min(nw, nv) - 1, rng)[:nw, :nv]
        _check_certification(r, w, v, o, False, f"generic instance {k}", tol)
    return r


def _check_certification(r: SuiteResult, w, v, o, expect: bool, label: str, tol: float):
    res = pinv_repr(w, v, o)
    mp = max(res.mp_defects)
    r.track("weak_inverse_defect", res.weak_inverse_defect)
    if expect:
        r.track("certified_penrose_defect", mp)
    r.check(res.certified == expect, f"{label}: certified={res.certified}")
    r.check(res.certified == (mp <= tol), f"{label}: certified={res.certified} but Penrose defect {mp:.3e}")
    r.check(res.weak_inverse_defect <= tol, f"{label}: M X M != M ({res.weak_inverse_defect:.3e})")
    r.instances += 1


def suite_tensor(rng, count=50, tol=1e-9) -> SuiteResult:
    r = SuiteResult("tensor", "bounds of W (x) V are products of bounds")
    for k in range(count):
        nw, nv = (int(x) for x in rng.integers(2, 9, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        tf = tensor_fusion_frame(w, v)
        lam = np.linalg.eigvalsh(tf.frame_operator)
        bw, bv = frame_bounds(w), frame_bounds(v)
        lo = abs(lam[0] - bw.lower * bv.lower) / (bw.lower * bv.lower)
        hi = abs(lam[-1] - bw.upper * bv.upper) / (bw.upper * bv.upper)
        closed = _rel(linalg.op_norm2(tf.frame_operator - tensor_frame_operator(w, v)), lam[-1])
        r.track("lower_bound_rel", lo)
        r.track("upper_bound_rel", hi)
        r.track("closed_form_rel", closed)
        r.check(max(lo, hi, closed) <= tol, f"instance {k}: lower {lo:.3e}, upper {hi:.3e}, closed form {closed:.3e}")
        r.instances += 1
    return r


def suite_dual_transfer(rng, count=50, tol=1e-8) -> SuiteResult:
    r = SuiteResult("dual-transfer", "representations over the canonical dual factor through W")
    for k in range(count):
        n = int(rng.integers(2, 11))
        w = random_riesz_decomposition(n, rng) if k % 2 else random_fusion_frame(n, rng)
        singular = (k // 2) % 2 == 1
        o = linalg.random_rank_deficient(n, n - 1, rng) if singular else _well_conditioned(n, rng)
        rep = dual_transfer_check(w, o)
        r.track("factorization_defect", rep.max_defect)
        r.check(rep.max_defect <= tol, f"instance {k}: defect {rep.max_defect:.3e}")
        r.check(rep.verdicts_agree, f"instance {k}: invertibility verdicts disagree")
        expected = (not singular) and bool(k % 2)
        r.check(
            all(it.lhs_invertible == expected for it in rep.items),
            f"instance {k}: expected invertible={expected}",
        )
        r.instances += 1
    return r


def suite_solver(rng, count=50, tol=1e-8) -> SuiteResult:
    r = SuiteResult("solver", "all five linear-system forms solve O f = g")
    for k in range(count):
        n = int(rng.integers(2, 17))
        sys = random_system(n, rng)
        o = _well_conditioned(n, rng)
        g = linalg.random_cmatrix(n, 1, rng).ravel()
        sols = {}
        for form in FORMS:
            try:
                f = solve_operator_eq(form, sys, o, g, tol=tol)
            except Exception as exc:  # reported, never swallowed
                r.check(False, f"instance {k} {form.value}: {type(exc).__name__}: {exc}")
                continue
            res = np.linalg.norm(o @ f - g) / np.linalg.norm(g)
            r.track("relative_residual", res)
            sols[form] = f
        for a, b in itertools.combinations(sols, 2):
            gap = _rel(np.linalg.norm(sols[a] - sols[b]), np.linalg.norm(sols[a]))
            r.track("pairwise_gap", gap)
            r.check(gap <= tol, f"instance {k}: {a.value} vs {b.value} differ by {gap:.3e}")
        r.instances += 1
    return r


def suite_conv(rng, count=100, tol=1e-10) -> SuiteResult:
    r = SuiteResult("conv", "overlap-add and overlap-save equal direct convolution")
    for k in range(count):
        n = int(rng.integers(1, 4097))
        lh = int(rng.integers(1, 65))
        b = int(rng.integers(16, 513))
        f = linalg.random_cmatrix(n, 1, rng).ravel()
        h = linalg.random_cmatrix(lh, 1, rng).ravel()
        ref = conv.direct_conv(f, h).samples
        scale = np.linalg.norm(ref)
        for label, method in (("oa", conv.overlap_add), ("os", conv.overlap_save)):
            d = np.linalg.norm(method(f, h, b).samples - ref) / scale
            r.track(f"{label}_relative", d)
            r.check(d <= tol, f"instance {k} ({label}, N={n}, L={lh}, B={b}): {d:.3e}")
        young = np.linalg.norm(ref) / (np.sum(np.abs(h)) * np.linalg.norm(f))
        r.track("young_ratio", young)
        r.check(young <= 1 + 1e-12, f"instance {k}: Young bound violated ({young:.6f})")
        r.instances += 1
    for k in range(count // 5):
        n = int(rng.integers(1, 257))
        lh = int(rng.integers(1, 65))
        b = int(rng.integers(16, 129))
        h = linalg.random_cmatrix(lh, 1, rng).ravel()
        scheme = conv.BlockingScheme.for_signal(n, b, lh)
        w, v = conv.slice_frames(n, scheme)
        dense = conv.toeplitz_matrix(h, scheme.n_blocks * b)
        got = op_from_matrix(v, w, conv.oa_block_matrix(h, scheme))
        d = np.max(np.abs(got - dense)) / np.max(np.abs(dense))
        r.track("toeplitz_reproduction", d)
        r.check(d <= tol, f"block instance {k}: {d:.3e}")
        upper = frame_bounds(v).upper
        over = conv.max_overlap(n, scheme)
        r.track("bessel_bound_gap", abs(upper - over))
        r.check(abs(upper - over) <= 1e-9 * over, f"block instance {k}: B_V {upper} vs overlap {over}")
        r.check(np.array_equal(w.frame_operator, np.eye(w.ambient_dim)), f"block instance {k}: S_W != I")
        r.instances += 1
    return r


def suite_nonstandard(rng, count=6, tol=1e-10) -> SuiteResult:
    r = SuiteResult("nonstandard", "nonstandard form reconstruction and Toeplitz structure")
    for big_j in range(1, count + 1):
        size = 2**big_j
        for levels in range(big_j + 1):
            mra = ns.haar_mra(big_j, levels)
            t = linalg.random_cmatrix(size, size, rng)
            form = ns.nonstandard_decompose(t, mra)
            d = np.linalg.norm(form.reconstruct() - t)
            r.track("reconstruction", d)
            r.check(d <= tol, f"J={big_j}, n={levels}: reconstruction {d:.3e}")
            if levels:
                fn = mra.fusion_sequence()
                m = ns.nonstandard_block_matrix(form, mra)
                db = np.linalg.norm(op_from_matrix(fn, fn, m) - t)
                r.track("block_reconstruction", db)
                r.check(db <= 1e-9, f"J={big_j}, n={levels}: block reconstruction {db:.3e}")
                c = ns.circulant(linalg.random_cmatrix(size, 1, rng).ravel())
                cform = ns.nonstandard_decompose(c, mra)
                for j in range(1, levels + 1):
                    for which in "ABG":
                        dev = ns.toeplitz_deviation(cform, mra, j, which)
                        r.track("circulant_toeplitz_deviation", dev)
                        r.check(dev <= tol, f"J={big_j}, n={levels}, level {j} {which}: {dev:.3e}")
            r.instances += 1
    return r


def suite_algebra(rng, count=25, tol=1e-9) -> SuiteResult:
    r = SuiteResult("algebra", "M_otimes is multiplicative, plain M only for fusion ONBs")
    for k in range(2 * count):
        n = int(rng.integers(2, 11))
        onb = k < count
        w = random_fusion_onb(n, rng) if onb else random_fusion_frame(n, rng)
        o1, o2 = linalg.random_cmatrix(n, n, rng), linalg.random_cmatrix(n, n, rng)
        rep = algebra_check(w, o1, o2)
        scale = linalg.op_norm2(o1) * linalg.op_norm2(o2)
        plain, otimes = _rel(rep.plain_defect, scale), _rel(rep.otimes_defect, scale)
        r.track("otimes_defect", otimes)
        if onb:
            r.track("onb_plain_defect", plain)
        else:
            r.track_min("frame_plain_defect_min", plain)
        r.check(otimes <= tol, f"instance {k}: otimes defect {otimes:.3e}")
        r.check((plain <= tol) == onb, f"instance {k} (onb={onb}): plain defect {plain:.3e}")
        r.check(rep.injective, f"instance {k}: O_otimes(M_otimes(O)) != O")
        r.instances += 1
    return r


# -- further module invariants ------------------------------------------------


def suite_duals(rng, count=30, tol=1e-9) -> SuiteResult:
    r = SuiteResult("duals", "canonical duals and cross-Gram reconstruction")
    for k in range(count):
        n = int(rng.integers(2, 11))
        w = random_fusion_frame(n, rng)
        d = canonical_dual(w)
        r.check(is_dual(d, w), f"instance {k}: canonical dual is not a dual")
        o = linalg.random_cmatrix(n, n, rng)
        g = cross_gram_reconstruction_defect(o, w, d)
        r.track("cross_gram_reconstruction", g)
        r.check(g <= tol, f"instance {k}: cross-Gram reconstruction {g:.3e}")
        riesz = random_riesz_decomposition(n, rng)
        dd = canonical_dual(canonical_dual(riesz))
        gap = max(linalg.op_norm2(a.projector - b.projector) for a, b in zip(dd, riesz))
        r.track("riesz_double_dual", gap)
        r.check(gap <= tol, f"instance {k}: dual of dual differs by {gap:.3e}")
        r.instances += 1
    return r


def suite_schatten(rng, count=30, tol=1e-9) -> SuiteResult:
    r = SuiteResult("schatten", "Schatten-p norms transfer between O and M(O); HS pseudo-inverse")
    for k in range(count):
        nw, nv = (int(x) for x in rng.integers(2, 7, size=2))
        w, v = random_fusion_frame(nw, rng), random_fusion_frame(nv, rng)
        o = linalg.random_cmatrix(nw, nv, rng)
        for p in (0.5, 1.0, 2.0, 3.0, np.inf):
            rep = schatten_transfer_check(w, v, o, p)
            r.track("forward_ratio", rep.matrix_norm / rep.forward_bound)
            r.track("backward_ratio", rep.operator_norm / rep.backward_bound)
            ok = rep.forward_ok and rep.backward_ok
            if p < 1:
                continue  # quasi-norm: reported, not asserted
            r.check(ok, f"instance {k}, p={p}: forward {rep.forward_ok}, backward {rep.backward_ok}")
        hs = hs_pinv_candidates(w, v)
        r.track("hs_scaled_defect", max(hs.scaled_defects))
        r.track("hs_otimes_defect", max(hs.otimes_defects))
        r.check(max(hs.scaled_defects) <= tol, f"instance {k}: scaled HS inverse is not Moore-Penrose")
        r.check(max(hs.otimes_defects) <= tol, f"instance {k}: otimes HS inverse is not Moore-Penrose")
        r.instances += 1
    for k in range(count // 3):
        n = int(rng.integers(2, 6))
        w = random_parseval_frame(n, rng)
        hs = hs_pinv_candidates(w, w)
        r.track("hs_plain_parseval_defect", max(hs.plain_defects))
        r.check(hs.plain_is_pinv, f"Parseval instance {k}: plain HS inverse is not Moore-Penrose")
        r.instances += 1
    return r


def suite_systems(rng, count=30, tol=1e-9) -> SuiteResult:
    r = SuiteResult("systems", "fusion frame systems and block representations")
    for k in range(count):
        n = int(rng.integers(2, 13))
        sys_w, sys_v = random_system(n, rng), random_system(n, rng, redundancy=2)
        o = linalg.random_cmatrix(n, n, rng)
        d1, d2 = sisi_defects(sys_w)
        gram = block_gram_check(sys_w, sys_v, o) if len(sys_w.spaces) == len(sys_v.spaces) else 0.0
        blk = block_representation(sys_w.spaces, o)
        for key, val in (("synthesis_factorization", d1), ("frame_op_factorization", d2), ("block_gram", gram), ("block_representation", blk)):
            r.track(key, val)
            r.check(val <= tol * 10 * n, f"instance {k}: {key} {val:.3e}")
        r.instances += 1
    return r


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[..., SuiteResult]
    count: int
    tol: float
    criterion: int | None = None


SUITES: tuple[Suite, ...] = (
    Suite("reconstruction", suite_reconstruction, 200, 1e-9, 1),
    Suite("norm-bound", suite_norm_bound, 200, 1e-9, 2),
    Suite("riesz", suite_riesz, 100, 1e-9, 3),
    Suite("inv-riesz", suite_inv_riesz, 100, 1e-8, 4),
    Suite("pinv", suite_pinv, 100, 1e-8, 5),
    Suite("tensor", suite_tensor, 50, 1e-9, 6),
    Suite("dual-transfer", suite_dual_transfer, 50, 1e-8, 7),
    Suite("solver", suite_solver, 50, 1e-8, 8),
    Suite("conv", suite_conv, 100, 1e-10, 9),
    Suite("nonstandard", suite_nonstandard, 6, 1e-10, 10),
    Suite("algebra", suite_algebra, 25, 1e-9, 11),
    Suite("duals", suite_duals, 30, 1e-9),
    Suite("schatten", suite_schatten, 30, 1e-9),
    Suite("systems", suite_systems, 30, 1e-9),
)

SUITE_NAMES = tuple(s.name for s in SUITES)


def get_suite(name: str) -> Suite:
    for s in SUITES:
        if s.name == name:
            return s
    raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")


def run_suite(name: str, seed: int = 0, count: int | None = None, tol: float | None = None) -> SuiteResult:
    idx = SUITE_NAMES.index(get_suite(name).name)
    s = SUITES[idx]
    rng = np.random.default_rng([seed, idx])
    return s.run(rng, count=s.count if count is None else count, tol=s.tol if tol is None else tol)


def run_all(
    names=None,
    seed: int = 0,
    tol: float | None = None,
) -> list[SuiteResult]:
    names = SUITE_NAMES if not names else tuple(names)
    return [run_suite(n, seed=seed, tol=tol) for n in names]
