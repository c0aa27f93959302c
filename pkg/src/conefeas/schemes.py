"""Basic procedures: given a projector P, search for z in the closed cone
with either Pz interior or ||(Pz)^+||_F <= eps * ||z||.

Four schemes are provided.  The perceptron and von Neumann schemes decay
the potential ||P z_t||_F^2 like 1/t, the smooth perceptron like
8/(t+1)^2, and the von Neumann variant with away steps like 8/t.  Every
scheme starts from the spectraplex barycenter e/r, checks the interior
condition before the cap condition at the top of each iteration, and is
fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cones import (
    AlgebraElement,
    ConeDescriptor,
    eigenvalues,
    min_eigenvalue,
    min_frame,
    norm_frob,
    spectral,
    spectraplex_prox,
)
from .subspace import Projector

INTERIOR = "interior"
CAP = "cap"
ITER_LIMIT = "iter_limit"

PERCEPTRON = "perceptron"
VON_NEUMANN = "vn"
SMOOTH = "smooth"
VON_NEUMANN_AWAY = "vn-away"

SCHEME_NAMES = (PERCEPTRON, VON_NEUMANN, SMOOTH, VON_NEUMANN_AWAY)

_SUPPORT_TOL = 1e-12   # spectral weights below this do not count as support
_AWAY_SINGLETON = 1.0 - 1e-12


def default_epsilon(cone: ConeDescriptor, orthant_mode: bool = False) -> float:
    """Cap threshold: 1/(4r), or 1/(3 sqrt(n)) in orthant-specialized mode."""
    if orthant_mode:
        return 1.0 / (3.0 * math.sqrt(cone.ambient_dim))
    return 1.0 / (4.0 * cone.rank)


def default_iteration_cap(scheme: str, cone: ConeDescriptor, orthant_mode: bool = False) -> int:
    """Worst-case iteration counts under which each scheme provably stops."""
    if orthant_mode:
        n = cone.ambient_dim
        if scheme in (PERCEPTRON, VON_NEUMANN):
            return 9 * n ** 3
        if scheme == SMOOTH:
            return math.ceil(6.0 * n * math.sqrt(2.0 * n))
        if scheme == VON_NEUMANN_AWAY:
            return 72 * n ** 3
    else:
        r = cone.rank
        if scheme in (PERCEPTRON, VON_NEUMANN):
            return 16 * r ** 4
        if scheme == SMOOTH:
            return math.ceil(8.0 * math.sqrt(2.0) * r * r)
        if scheme == VON_NEUMANN_AWAY:
            return 128 * r ** 4
    raise ValueError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class SchemeConfig:
    epsilon: float
    max_iterations: int
    interior_tol: float = 1e-12     # relative to ||Pz||_F
    record_potential: bool = False

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    @classmethod
    def defaults(cls, cone: ConeDescriptor, scheme: str, orthant_mode: bool = False,
                 epsilon: float | None = None, max_iterations: int | None = None,
                 **kwargs) -> "SchemeConfig":
        if epsilon is None:
            epsilon = default_epsilon(cone, orthant_mode)
        if max_iterations is None:
            max_iterations = default_iteration_cap(scheme, cone, orthant_mode)
        return cls(epsilon=epsilon, max_iterations=max_iterations, **kwargs)


@dataclass(eq=False)
class SchemeOutcome:
    """Result of one basic-procedure run.

    ``witness`` is the iterate satisfying the stopping condition (for the
    smooth scheme the interior witness is u_t, the cap witness z_t);
    ``image`` is its projection for interior outcomes.  potential_trace[t]
    records ||P z_t||_F^2 for every iterate that passed the stop checks.
    """

    status: str
    witness: AlgebraElement
    image: AlgebraElement | None
    iterations: int
    potential_trace: list[float] | None = field(default=None)


def _barycenter(cone: ConeDescriptor) -> AlgebraElement:
    return cone.identity() / cone.rank


def _is_interior_image(lam: np.ndarray, cfg: SchemeConfig) -> bool:
    return lam.min() > cfg.interior_tol * float(np.linalg.norm(lam))


def _cap_reached(lam: np.ndarray, z_opnorm: float, cfg: SchemeConfig) -> bool:
    plus = float(np.linalg.norm(np.maximum(lam, 0.0)))
    return plus <= cfg.epsilon * z_opnorm


def perceptron(p: Projector, cfg: SchemeConfig, observer=None) -> SchemeOutcome:
    """Relaxation scheme: mix in the spectraplex vertex most negatively
    aligned with P z_t, with weight 1/(t+1).

    An observer callable receives (t, z_t) at the top of every iteration,
    including the stopping one; likewise for the other vertex schemes.
    """
    z = _barycenter(p.basis.cone)
    trace_vals = [] if cfg.record_potential else None
    t = 0
    while True:
        if observer is not None:
            observer(t, z)
        pz = p.apply(z)
        sd = spectral(pz)
        lam = sd.eigenvalues
        if _is_interior_image(lam, cfg):
            return SchemeOutcome(INTERIOR, z, pz, t, trace_vals)
        if _cap_reached(lam, float(np.abs(eigenvalues(z)).max()), cfg):
            return SchemeOutcome(CAP, z, None, t, trace_vals)
        if t >= cfg.max_iterations:
            return SchemeOutcome(ITER_LIMIT, z, None, t, trace_vals)
        if trace_vals is not None:
            trace_vals.append(float(lam @ lam))
        u, _, _ = min_frame(sd)
        z = (t / (t + 1.0)) * z + (1.0 / (t + 1.0)) * u
        t += 1


def von_neumann(p: Projector, cfg: SchemeConfig, observer=None) -> SchemeOutcome:
    """Perceptron with an exact line search between z_t and the
    minimizing vertex."""
    z = _barycenter(p.basis.cone)
    trace_vals = [] if cfg.record_potential else None
    t = 0
    while True:
        if observer is not None:
            observer(t, z)
        pz = p.apply(z)
        sd = spectral(pz)
        lam = sd.eigenvalues
        if _is_interior_image(lam, cfg):
            return SchemeOutcome(INTERIOR, z, pz, t, trace_vals)
        if _cap_reached(lam, float(np.abs(eigenvalues(z)).max()), cfg):
            return SchemeOutcome(CAP, z, None, t, trace_vals)
        if t >= cfg.max_iterations:
            return SchemeOutcome(ITER_LIMIT, z, None, t, trace_vals)
        if trace_vals is not None:
            trace_vals.append(float(lam @ lam))
        u, _, _ = min_frame(sd)
        theta = von_neumann_step(p, z, pz, u)
        z = z + theta * (u - z)
        t += 1


def von_neumann_step(p: Projector, z: AlgebraElement, pz: AlgebraElement,
                     u: AlgebraElement) -> float:
    """Exact minimizer of ||P(z + theta (u - z))||_F^2 over [0, 1]."""
    pd = p.apply(u - z)
    den = float(pd.coords @ pd.coords)
    if den <= 1e-30:
        return 1.0
    theta = -float(pz.coords @ pd.coords) / den
    return min(1.0, max(0.0, theta))


def smooth_perceptron(p: Projector, cfg: SchemeConfig, observer=None) -> SchemeOutcome:
    """Accelerated scheme driven by the smoothed spectraplex subproblem.

    Maintains (u_t, mu_t, z_t) with mu_t = 4/((t+1)(t+2)); stops interior
    on P u_t with witness u_t, or cap on z_t with witness z_t.  The prox
    point feeding both updates is the smoothed minimizer at the image of
    the u iterate; taking it at P z_t instead loses the invariant
    0.5 ||P z_t||^2 <= phi_mu(u_t) and with it the 8/(t+1)^2 decay.  An
    observer callable receives (t, u_t, mu_t, z_t) at the top of every
    iteration, including the stopping one.
    """
    cone = p.basis.cone
    u_bar = _barycenter(cone)
    u = u_bar
    mu = 2.0
    pu = p.apply(u)
    w = spectraplex_prox(pu, mu, u_bar)    # u_mu(P u_t), reused across updates
    z = w
    trace_vals = [] if cfg.record_potential else None
    t = 0
    while True:
        if observer is not None:
            observer(t, u, mu, z)
        if min_eigenvalue(pu) > cfg.interior_tol * norm_frob(pu):
            return SchemeOutcome(INTERIOR, u, pu, t, trace_vals)
        pz = p.apply(z)
        lam = eigenvalues(pz)
        if _cap_reached(lam, float(np.abs(eigenvalues(z)).max()), cfg):
            return SchemeOutcome(CAP, z, None, t, trace_vals)
        if t >= cfg.max_iterations:
            return SchemeOutcome(ITER_LIMIT, z, None, t, trace_vals)
        if trace_vals is not None:
            trace_vals.append(float(lam @ lam))
        theta = 2.0 / (t + 3.0)
        u = (1.0 - theta) * (u + theta * z) + (theta * theta) * w
        mu = (1.0 - theta) * mu
        pu = p.apply(u)
        w = spectraplex_prox(pu, mu, u_bar)
        z = (1.0 - theta) * z + theta * w
        t += 1


def von_neumann_away(p: Projector, cfg: SchemeConfig, observer=None) -> SchemeOutcome:
    """Von Neumann scheme with away steps over the spectral support.

    The support of z_t is the set of frame idempotents with positive
    eigenvalue; an away step moves mass off the support idempotent most
    aligned with P z_t, capped at theta_max = w/(1-w) so the eigenvalues
    stay nonnegative.  A singleton support forces a regular step.
    """
    z = _barycenter(p.basis.cone)
    trace_vals = [] if cfg.record_potential else None
    t = 0
    while True:
        if observer is not None:
            observer(t, z)
        pz = p.apply(z)
        sd_pz = spectral(pz)
        lam = sd_pz.eigenvalues
        sd_z = spectral(z)
        if _is_interior_image(lam, cfg):
            return SchemeOutcome(INTERIOR, z, pz, t, trace_vals)
        if _cap_reached(lam, float(np.abs(sd_z.eigenvalues).max()), cfg):
            return SchemeOutcome(CAP, z, None, t, trace_vals)
        if t >= cfg.max_iterations:
            return SchemeOutcome(ITER_LIMIT, z, None, t, trace_vals)
        if trace_vals is not None:
            trace_vals.append(float(lam @ lam))
        u, _, _ = min_frame(sd_pz)
        away_idx = None
        away_score = -math.inf
        for k, w in enumerate(sd_z.eigenvalues):
            if w > _SUPPORT_TOL:
                score = float(sd_z.frame[k].coords @ pz.coords)
                if score > away_score:
                    away_score = score
                    away_idx = k
        pz_sq = float(lam @ lam)
        gap_fw = pz_sq - float(u.coords @ pz.coords)
        gap_away = away_score - pz_sq
        weight = float(sd_z.eigenvalues[away_idx])
        if gap_fw > gap_away or weight >= _AWAY_SINGLETON:
            direction = u - z
            theta_max = 1.0
        else:
            direction = z - sd_z.frame[away_idx]
            theta_max = weight / (1.0 - weight)
        pd = p.apply(direction)
        den = float(pd.coords @ pd.coords)
        if den <= 1e-30:
            theta = theta_max
        else:
            theta = min(theta_max, -float(z.coords @ pd.coords) / den)
            theta = max(0.0, theta)
        z = z + theta * direction
        t += 1


def phi(p: Projector, z: AlgebraElement) -> float:
    """Potential -0.5 ||Pz||_F^2 + min over the spectraplex of <u, Pz>."""
    pz = p.apply(z)
    return -0.5 * float(pz.coords @ pz.coords) + min_eigenvalue(pz)


def phi_mu(p: Projector, z: AlgebraElement, mu: float,
           u_bar: AlgebraElement | None = None) -> float:
    """Smoothed potential with the proximal spectraplex subproblem."""
    if u_bar is None:
        u_bar = _barycenter(p.basis.cone)
    pz = p.apply(z)
    u = spectraplex_prox(pz, mu, u_bar)
    diff = u - u_bar
    value = float(u.coords @ pz.coords) + 0.5 * mu * float(diff.coords @ diff.coords)
    return -0.5 * float(pz.coords @ pz.coords) + value


SCHEMES = {
    PERCEPTRON: perceptron,
    VON_NEUMANN: von_neumann,
    SMOOTH: smooth_perceptron,
    VON_NEUMANN_AWAY: von_neumann_away,
}
