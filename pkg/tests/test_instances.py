"""Embedding and planted-generator tests: recovered solutions must satisfy
their original-problem residuals, and planted condition-measure bounds
must hold end to end."""

import numpy as np
import pytest

import conefeas as cf
from conefeas.instances import (
    delta_lower_bound,
    plant,
    random_frame,
    recover_linear_eq,
    recover_sdp,
    recover_strict_ineq,
)
from conefeas.solver import outer_bound


# ---------------------------------------------------------------------------
# linear equations with positivity

def test_embed_linear_eq_hand_case():
    basis, cone = cf.embed_linear_eq(np.array([[1.0, -1.0]]), np.array([0.0]))
    assert cone.ambient_dim == 3
    report = cf.solve(basis, scheme="smooth")
    assert report.status == "solved"
    x = recover_linear_eq(report.x)
    assert x[0] == pytest.approx(x[1], rel=1e-8)
    assert x.min() > 0.0


def test_embed_linear_eq_homogeneous_reduces_to_kernel():
    a = np.array([[1.0, 2.0, -1.0]])
    basis, cone = cf.embed_linear_eq(a, np.zeros(1))
    # with b = 0 the t coordinate is unconstrained: (0, ..., 0, 1) in L
    t_dir = np.zeros(4)
    t_dir[-1] = 1.0
    p = cf.Projector(basis)
    from conefeas.cones import AlgebraElement
    img = p.apply(AlgebraElement(cone, t_dir))
    assert np.allclose(img.coords, t_dir, atol=1e-10)


def test_embed_linear_eq_planted_end_to_end():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((5, 10))
    x0 = rng.uniform(0.5, 2.0, size=10)
    b = a @ x0
    basis, cone = cf.embed_linear_eq(a, b)
    report = cf.solve(basis, scheme="smooth")
    assert report.status == "solved"
    x = recover_linear_eq(report.x)
    assert np.abs(a @ x - b).max() <= 1e-6 * np.abs(b).max()
    assert x.min() > 0.0


def test_recover_linear_eq_rejects_tiny_t():
    cone = cf.make_cone(cf.orthant(3))
    point = cf.from_natural_blocks(cone, [[1.0, 1.0, 1e-14]])
    with pytest.raises(ValueError):
        recover_linear_eq(point)


# ---------------------------------------------------------------------------
# strict inequalities

def test_embed_strict_ineq_empty_constraint_matrix():
    c = np.array([1.0, 2.0])
    basis, cone = cf.embed_strict_ineq(np.zeros((0, 2)), c)
    # L = {(t c, t)}: one dimension, feasible precisely because c > 0
    assert basis.dim == 1
    report = cf.solve(basis, scheme="smooth")
    assert report.status == "solved"


def test_embed_strict_ineq_scalar_case():
    basis, cone = cf.embed_strict_ineq(np.array([[1.0]]), np.array([1.0]))
    report = cf.solve(basis, scheme="smooth")
    assert report.status == "solved"
    y = recover_strict_ineq(np.array([[1.0]]), np.array([1.0]), report.x)
    assert y[0] < 1.0


def test_embed_strict_ineq_random_recovery():
    hits = 0
    for seed in range(25):
        rng = np.random.default_rng(900 + seed)
        m, n = 3, 6
        a = rng.standard_normal((m, n))
        y0 = rng.standard_normal(m)
        slack = rng.uniform(0.2, 1.0, size=n)
        c = a.T @ y0 + slack          # guarantees A^T y0 < c
        basis, cone = cf.embed_strict_ineq(a, c)
        report = cf.solve(basis, scheme="smooth")
        assert report.status == "solved"
        y = recover_strict_ineq(a, c, report.x)
        assert np.all(a.T @ y < c)
        hits += 1
    assert hits == 25


# ---------------------------------------------------------------------------
# SDP feasibility

def test_embed_sdp_trace_constraint():
    n = 3
    basis, cone = cf.embed_sdp_feasibility([np.eye(n)], np.array([float(n)]))
    # (I, 1) satisfies trace(X) = n t and is strictly feasible
    x = cf.from_natural_blocks(cone, [np.eye(n), [1.0]])
    p = cf.Projector(basis)
    assert cf.norm_frob(p.apply(x) - x) <= 1e-10 * cf.norm_frob(x)
    report = cf.solve(basis, scheme="smooth")
    assert report.status == "solved"


def test_embed_sdp_planted_end_to_end():
    rng = np.random.default_rng(8)
    n, m = 3, 2
    g = rng.standard_normal((n, n))
    x0 = g @ g.T + n * np.eye(n)
    ops = [(lambda s: 0.5 * (s + s.T))(rng.standard_normal((n, n))) for _ in range(m)]
    b = np.array([float(np.trace(op @ x0)) for op in ops])
    basis, cone = cf.embed_sdp_feasibility(ops, b)
    report = cf.solve(basis, scheme="smooth")
    assert report.status == "solved"
    x, t = recover_sdp(report.x)
    got = np.array([float(np.trace(op @ x)) for op in ops])
    assert np.abs(got - b).max() <= 1e-6 * max(1.0, np.abs(b).max())
    assert np.linalg.eigvalsh(x).min() > 0.0


def test_embed_sdp_dual_side_constructed():
    # a subspace built inside the PSD x Orthant cone whose complement holds
    # an interior point: the extended mode must answer on the dual side
    cone = cf.make_cone(cf.psd(2), cf.orthant(1))
    rng = np.random.default_rng(21)
    inst = plant(cone, 2, np.array([1.0, 0.8, 1.2]), 21)
    report = cf.solve_extended(cf.complement(inst.basis), scheme="smooth")
    assert report.status == "dual_solved"
    assert cf.min_eigenvalue(report.x_hat) > 0.0


# ---------------------------------------------------------------------------
# planted generator

def test_plant_identity_spectrum_gives_delta_one(cone):
    inst = plant(cone, 1, np.ones(cone.rank), 3)
    assert inst.delta_lb == pytest.approx(1.0)
    assert cf.norm_frob(inst.x_star - cone.identity()) <= 1e-9
    report = cf.solve(inst.basis, scheme="smooth")
    assert report.status == "solved"
    assert len(report.rescalings) == 0


def test_plant_delta_formula_example():
    spectrum = np.array([4.0, 2.0, 1.0, 1.0])
    got = delta_lower_bound(spectrum)
    want = np.prod(spectrum) * (2.0 / np.sqrt(22.0)) ** 4
    assert got == pytest.approx(want, rel=1e-12)


def test_plant_delta_never_exceeds_one():
    rng = np.random.default_rng(31)
    for _ in range(200):
        r = int(rng.integers(1, 10))
        spectrum = rng.uniform(0.05, 5.0, size=r)
        assert delta_lower_bound(spectrum) <= 1.0 + 1e-12


def test_plant_membership_and_interiority(cone):
    rng = np.random.default_rng(41)
    for seed in range(5):
        spectrum = rng.uniform(0.2, 3.0, size=cone.rank)
        m = int(rng.integers(1, cone.ambient_dim + 1))
        inst = plant(cone, m, spectrum, seed)
        assert inst.basis.dim == m
        p = cf.Projector(inst.basis)
        res = cf.norm_frob(p.apply(inst.x_star) - inst.x_star)
        assert res <= 1e-12 * cf.norm_frob(inst.x_star)
        assert cf.min_eigenvalue(inst.x_star) > 0.0
        lam = np.sort(np.asarray(spectrum))
        from conefeas.cones import eigenvalues
        got = np.sort(eigenvalues(inst.x_star))
        assert np.allclose(got, lam, atol=1e-9)


def test_plant_validates_arguments():
    cone = cf.make_cone(cf.orthant(3))
    with pytest.raises(ValueError):
        plant(cone, 0, np.ones(3), 1)
    with pytest.raises(ValueError):
        plant(cone, 4, np.ones(3), 1)
    with pytest.raises(ValueError):
        plant(cone, 1, np.array([1.0, -1.0, 1.0]), 1)
    with pytest.raises(ValueError):
        plant(cone, 1, np.ones(2), 1)


def test_plant_reproducible_per_seed():
    cone = cf.make_cone(cf.orthant(2), cf.psd(2))
    a = plant(cone, 2, np.ones(4) * 1.5, 9)
    b = plant(cone, 2, np.ones(4) * 1.5, 9)
    assert np.array_equal(a.basis.matrix, b.basis.matrix)
    assert np.array_equal(a.x_star.coords, b.x_star.coords)


def test_random_frame_is_a_jordan_frame(cone):
    rng = np.random.default_rng(51)
    frame = random_frame(cone, rng)
    total = cone.zero()
    for c in frame:
        assert cf.norm_frob(cf.jordan_product(c, c) - c) <= 1e-10
        assert cf.trace(c) == pytest.approx(1.0, abs=1e-10)
        total = total + c
    assert cf.norm_frob(total - cone.identity()) <= 1e-10


def test_theorem_bound_holds_on_mixed_cone_sweep():
    cone = cf.make_cone(cf.orthant(3), cf.psd(2), cf.soc(3))
    for seed in range(20):
        rng = np.random.default_rng(7000 + seed)
        spectrum = np.exp(rng.uniform(-1.0, 1.0, size=cone.rank))
        m = int(rng.integers(1, cone.ambient_dim + 1))
        inst = plant(cone, m, spectrum, 7000 + seed)
        report = cf.solve(inst.basis, scheme="smooth")
        assert report.status == "solved"
        assert len(report.rescalings) <= outer_bound(inst.delta_lb)
