"""Outer-loop tests: certificates against the original subspace, the
orthant specialization coincidence, the extended primal/dual mode, and
recovery round trips."""

import math

import numpy as np
import pytest

import conefeas as cf
from conefeas.solver import (
    A_RESCALE,
    DUAL_SOLVED,
    OUTER_LIMIT,
    SOLVED,
    RescalingStep,
    outer_bound,
    recover_point,
)
from conefeas.instances import plant
from conftest import random_element

SQRT2 = math.sqrt(2.0)


def identity_line_basis(cone):
    return cf.orthonormalize([cone.identity()])


def residual_in_subspace(basis, x):
    p = cf.Projector(basis)
    return cf.norm_frob(p.apply(x) - x) / max(cf.norm_frob(x), 1e-30)


# ---------------------------------------------------------------------------
# outer_bound

def test_outer_bound_values():
    assert outer_bound(1.0) == 0
    assert outer_bound(1.0 / 1.5) == 1
    assert outer_bound(0.01) == 12   # ceil(ln 100 / ln 1.5)
    with pytest.raises(ValueError):
        outer_bound(0.0)
    with pytest.raises(ValueError):
        outer_bound(1.5)


# ---------------------------------------------------------------------------
# recover_point

def test_recover_point_empty_log():
    cone = cf.make_cone(cf.orthant(2))
    y = cf.from_natural_blocks(cone, [[1.0, 4.0]])
    assert np.allclose(recover_point([], y).coords, y.coords)


def test_recover_point_single_orthant_step():
    cone = cf.make_cone(cf.orthant(2))
    c = cf.from_natural_blocks(cone, [[0.0, 1.0]])
    step = RescalingStep(0, c, SQRT2 - 1.0)
    y = cf.from_natural_blocks(cone, [[1.0, 4.0]])
    assert np.allclose(recover_point([step], y).coords, [1.0, 2.0])


def test_recover_point_round_trip(cone):
    rng = np.random.default_rng(17)
    from conefeas.instances import random_frame
    frame = random_frame(cone, rng)
    log = []
    x = random_element(cone, rng)
    y = x
    for k in range(5):
        c = frame[int(rng.integers(len(frame)))]
        block = next(i for i in range(len(cone.blocks))
                     if np.any(c.coords[cone.block_slice(i)]))
        step = RescalingStep(block, c, A_RESCALE)
        y = cf.quadratic_rescale(c, step.a, y)
        log.append(step)
    back = recover_point(log, y)
    assert cf.norm_frob(back - x) <= 1e-9 * max(1.0, cf.norm_frob(x))


# ---------------------------------------------------------------------------
# solve

@pytest.mark.parametrize("scheme", ["perceptron", "vn", "smooth", "vn-away"])
def test_solve_identity_in_subspace_needs_no_rescaling(scheme, cone):
    report = cf.solve(identity_line_basis(cone), scheme=scheme)
    assert report.status == SOLVED
    assert len(report.rescalings) == 0
    assert cf.min_eigenvalue(report.x) > 0.0
    assert residual_in_subspace(identity_line_basis(cone), report.x) <= 1e-8


def test_solve_infeasible_line_hits_outer_limit():
    cone = cf.make_cone(cf.orthant(2))
    basis = cf.orthonormalize([cf.from_natural_blocks(cone, [[1.0, -1.0]])])
    report = cf.solve(basis, scheme="smooth", outer_limit=50)
    assert report.status == OUTER_LIMIT
    assert len(report.rescalings) == 50


def test_solve_planted_instances_certificates(cone):
    for seed in range(5):
        rng = np.random.default_rng(1000 + seed)
        spectrum = rng.uniform(0.3, 3.0, size=cone.rank)
        m = int(rng.integers(1, cone.ambient_dim + 1))
        inst = plant(cone, m, spectrum, 1000 + seed)
        report = cf.solve(inst.basis, scheme="smooth")
        assert report.status == SOLVED
        assert cf.min_eigenvalue(report.x) > 0.0
        assert residual_in_subspace(inst.basis, report.x) <= 1e-8
        assert len(report.rescalings) <= outer_bound(inst.delta_lb)


def test_solve_rescaling_count_bound_on_hard_instance():
    cone = cf.make_cone(cf.orthant(6))
    spectrum = np.array([8.0, 4.0, 1.0, 1.0, 0.5, 0.25])
    inst = plant(cone, 3, spectrum, 5)
    report = cf.solve(inst.basis, scheme="smooth")
    assert report.status == SOLVED
    assert len(report.rescalings) <= outer_bound(inst.delta_lb)
    for step in report.rescalings:
        c = step.idempotent
        assert cf.norm_frob(cf.jordan_product(c, c) - c) <= 1e-8
        assert step.a > 0.0


def test_cap_witnesses_along_a_solve_are_valid():
    # replay the outer loop by hand: every cap event must carry a witness
    # in the closed cone, nonzero, satisfying the cap inequality
    cone = cf.make_cone(cf.orthant(10))
    rng = np.random.default_rng(0)
    spectrum = np.exp(rng.uniform(-2.5, 2.5, 10))
    spectrum[-2:] = 0.002
    inst = plant(cone, 7, spectrum, 3, support=8)
    from conefeas.schemes import SchemeConfig, smooth_perceptron
    from conefeas.subspace import rescale_basis

    basis = inst.basis
    cfg = SchemeConfig.defaults(cone, "smooth")
    caps = 0
    for _ in range(60):
        out = smooth_perceptron(cf.Projector(basis), cfg)
        if out.status == "interior":
            break
        assert out.status == "cap"
        caps += 1
        z = out.witness
        assert cf.min_eigenvalue(z) >= -1e-10
        assert cf.norm_frob(z) > 0.0
        pz = cf.Projector(basis).apply(z)
        plus = cf.norm_frob(cf.cone_project(pz))
        assert plus <= cfg.epsilon * cf.norm_op(z) + 1e-12
        c, _, block = cf.max_idempotent(z)
        basis = rescale_basis(basis, block, c, A_RESCALE)
    else:
        pytest.fail("solve replay did not finish")
    assert caps <= outer_bound(inst.delta_lb)


def test_solve_determinism(cone):
    inst = plant(cone, max(1, cone.ambient_dim // 2),
                 np.linspace(0.5, 2.0, cone.rank), 77)
    r1 = cf.solve(inst.basis, scheme="smooth")
    r2 = cf.solve(inst.basis, scheme="smooth")
    assert r1.status == r2.status
    assert r1.outer_iterations == r2.outer_iterations
    assert r1.basic_procedure_iterations == r2.basic_procedure_iterations
    assert np.array_equal(r1.x.coords, r2.x.coords)


def test_solve_validates_outer_limit():
    cone = cf.make_cone(cf.orthant(2))
    with pytest.raises(ValueError):
        cf.solve(identity_line_basis(cone), outer_limit=0)


# ---------------------------------------------------------------------------
# orthant specialization

def test_generic_rescale_with_silver_ratio_equals_coordinate_doubling():
    # 2a + a^2 = 1 at a = sqrt(2) - 1, so the quadratic map on an orthant
    # block acts as I + e_i e_i^T
    cone = cf.make_cone(cf.orthant(7))
    rng = np.random.default_rng(3)
    c = cf.from_natural_blocks(cone, [np.eye(7)[4]])
    for _ in range(1000 // 4):
        x = random_element(cone, rng)
        mapped = cf.quadratic_rescale(c, A_RESCALE, x)
        doubled = x.coords.copy()
        doubled[4] *= 2.0
        assert np.abs(mapped.coords - doubled).max() <= 1e-12 * max(1.0, np.abs(x.coords).max())


def test_orthant_specialized_identity_line():
    cone = cf.make_cone(cf.orthant(5))
    report = cf.solve_orthant_specialized(identity_line_basis(cone))
    assert report.status == SOLVED
    assert len(report.rescalings) == 0


def test_orthant_specialized_rejects_mixed_cone():
    cone = cf.make_cone(cf.orthant(2), cf.soc(3))
    with pytest.raises(ValueError):
        cf.solve_orthant_specialized(identity_line_basis(cone))


def test_orthant_specialized_planted_instances():
    for seed in range(8):
        rng = np.random.default_rng(300 + seed)
        n = int(rng.integers(3, 31))
        cone = cf.make_cone(cf.orthant(n))
        spectrum = rng.uniform(0.4, 2.5, size=n)
        m = int(rng.integers(1, n + 1))
        inst = plant(cone, m, spectrum, 300 + seed)
        report = cf.solve_orthant_specialized(inst.basis)
        assert report.status == SOLVED
        assert cf.min_eigenvalue(report.x) > 0.0
        assert residual_in_subspace(inst.basis, report.x) <= 1e-8


# ---------------------------------------------------------------------------
# extended mode

def test_extended_dual_side_hand_example():
    cone = cf.make_cone(cf.orthant(2))
    basis = cf.orthonormalize([cf.from_natural_blocks(cone, [[1.0, -1.0]])])
    report = cf.solve_extended(basis, scheme="smooth")
    assert report.status == DUAL_SOLVED
    x_hat = report.x_hat.coords
    assert x_hat[0] == pytest.approx(x_hat[1], rel=1e-9)
    assert x_hat.min() > 0.0


def test_extended_primal_side_immediate(cone):
    report = cf.solve_extended(identity_line_basis(cone), scheme="smooth")
    assert report.status == SOLVED
    assert cf.min_eigenvalue(report.x) > 0.0


def test_extended_returns_correct_side_on_planted_instances(cone):
    if cone.ambient_dim < 2:
        pytest.skip("no proper subspace to complement")
    for seed in range(4):
        rng = np.random.default_rng(500 + seed)
        spectrum = rng.uniform(0.4, 2.0, size=cone.rank)
        m = int(rng.integers(1, cone.ambient_dim))
        inst = plant(cone, m, spectrum, 500 + seed)
        primal_report = cf.solve_extended(inst.basis, scheme="smooth")
        assert primal_report.status == SOLVED
        dual_report = cf.solve_extended(cf.complement(inst.basis), scheme="smooth")
        assert dual_report.status == DUAL_SOLVED
        x_hat = dual_report.x_hat
        assert cf.min_eigenvalue(x_hat) > 0.0
        # the dual certificate lies back in the planted subspace
        assert residual_in_subspace(inst.basis, x_hat) <= 1e-8
