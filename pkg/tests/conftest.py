import numpy as np
import pytest

from conefeas import make_cone, orthant, psd, soc
from conefeas.cones import AlgebraElement, cone_project, norm_frob
from conefeas.instances import element_with_spectrum


def cone_zoo():
    """Cones exercising every block kind alone and in products."""
    return [
        make_cone(orthant(1)),
        make_cone(orthant(4)),
        make_cone(psd(2)),
        make_cone(psd(3)),
        make_cone(soc(3)),
        make_cone(soc(5)),
        make_cone(orthant(3), psd(2), soc(3)),
        make_cone(psd(2), soc(4), orthant(2)),
    ]


@pytest.fixture(params=cone_zoo(), ids=lambda c: "x".join(
    f"{b.kind}{b.size}" for b in c.blocks))
def cone(request):
    return request.param


def random_element(cone, rng, scale=1.0):
    return AlgebraElement(cone, scale * rng.standard_normal(cone.ambient_dim))


def random_cone_point(cone, rng, unit=False):
    """Random point of the closed cone (optionally Frobenius-normalized)."""
    x = cone_project(random_element(cone, rng))
    if unit:
        nrm = norm_frob(x)
        if nrm == 0.0:
            return random_cone_point(cone, rng, unit=True)
        x = x / nrm
    return x


def random_spectraplex_point(cone, rng):
    """Random point of the trace-one slice of the cone."""
    weights = rng.dirichlet(np.ones(cone.rank))
    return element_with_spectrum(cone, weights, rng)


def random_primitive_idempotent(cone, rng):
    from conefeas.instances import random_frame

    frame = random_frame(cone, rng)
    return frame[rng.integers(len(frame))]
