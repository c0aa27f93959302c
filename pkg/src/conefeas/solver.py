"""Outer projection and rescaling loop with certificate recovery.

Each round runs a basic procedure on the projector of the current
(rescaled) subspace.  An interior image is mapped back to the original
subspace by undoing the logged quadratic rescalings in reverse order; a
cap witness determines the next rescaling direction through its top
eigen-idempotent.  The rescaling parameter is sqrt(2) - 1 throughout,
which multiplies the condition measure of a feasible instance by at
least 1.5 per rescaling, so the number of rescalings is at most
ceil(log_{1.5}(1 / delta)) for any lower bound delta on the measure.

The solver never materializes the rescaling operator; only the step log
and the updated orthonormal basis are kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cones import (
    AlgebraElement,
    inverse_rescale,
    max_idempotent,
    norm_frob,
)
from .schemes import (
    CAP,
    INTERIOR,
    SCHEMES,
    SMOOTH,
    SchemeConfig,
    SchemeOutcome,
)
from .subspace import (
    Projector,
    SubspaceBasis,
    complement,
    orthonormalize,
    rescale_basis,
)

SOLVED = "solved"
DUAL_SOLVED = "dual_solved"
OUTER_LIMIT = "outer_limit"

A_RESCALE = math.sqrt(2.0) - 1.0
REORTHOGONALIZE_EVERY = 50   # full re-orthonormalization cadence, bounds drift


@dataclass(frozen=True, eq=False)
class RescalingStep:
    block: int
    idempotent: AlgebraElement
    a: float


@dataclass(eq=False)
class SolveReport:
    status: str
    x: AlgebraElement | None = None
    x_hat: AlgebraElement | None = None
    outer_iterations: int = 0
    rescalings: list[RescalingStep] = field(default_factory=list)
    basic_procedure_iterations: int = 0
    scheme: str = SMOOTH


def outer_bound(delta_lb: float) -> int:
    """Rescaling budget sufficient for condition measure at least delta_lb.

    ceil(log(1/delta_lb) / log(1.5)), with a small downward nudge so that
    exact powers of 1/1.5 do not round up through floating point.
    """
    if not 0.0 < delta_lb <= 1.0:
        raise ValueError("delta_lb must lie in (0, 1]")
    ratio = math.log(1.0 / delta_lb) / math.log(1.5)
    return max(0, math.ceil(ratio - 1e-9))


def recover_point(log, y: AlgebraElement) -> AlgebraElement:
    """Undo the logged rescalings in reverse order."""
    for step in reversed(log):
        y = inverse_rescale(step.idempotent, step.a, y)
    return y


def _normalized_certificate(x: AlgebraElement) -> AlgebraElement:
    scale = norm_frob(x)
    if scale == 0.0:
        return x
    return x * (math.sqrt(x.cone.rank) / scale)


class _Loop:
    """Single projection-and-rescaling loop over one subspace."""

    def __init__(self, basis: SubspaceBasis, a: float = A_RESCALE):
        self.basis = basis
        self.log: list[RescalingStep] = []
        self.a = a

    def run_basic(self, scheme_fn, cfg: SchemeConfig) -> SchemeOutcome:
        return scheme_fn(Projector(self.basis), cfg)

    def recover(self, image: AlgebraElement) -> AlgebraElement:
        return _normalized_certificate(recover_point(self.log, image))

    def rescale(self, witness: AlgebraElement):
        c, _, block = max_idempotent(witness)
        self.log.append(RescalingStep(block, c, self.a))
        self.basis = rescale_basis(self.basis, block, c, self.a)
        if len(self.log) % REORTHOGONALIZE_EVERY == 0:
            self.basis = orthonormalize(self.basis.columns())


def solve(basis: SubspaceBasis, scheme: str = SMOOTH, cfg: SchemeConfig | None = None,
          outer_limit: int | None = None) -> SolveReport:
    """Find an interior cone point in the subspace spanned by the basis.

    Returns a Solved report with the certificate mapped back to the
    original subspace, or OuterLimit once ``outer_limit`` rescalings have
    been spent (infeasible instances never terminate on their own, so the
    budget defaults to 10x the ambient dimension).
    """
    scheme_fn = SCHEMES[scheme]
    cone = basis.cone
    if cfg is None:
        cfg = SchemeConfig.defaults(cone, scheme)
    if outer_limit is None:
        outer_limit = 10 * cone.ambient_dim
    if outer_limit < 1:
        raise ValueError("outer_limit must be at least 1")

    loop = _Loop(basis)
    rounds = 0
    bp_total = 0
    while True:
        out = loop.run_basic(scheme_fn, cfg)
        rounds += 1
        bp_total += out.iterations
        if out.status == INTERIOR:
            return SolveReport(SOLVED, x=loop.recover(out.image),
                               outer_iterations=rounds, rescalings=loop.log,
                               basic_procedure_iterations=bp_total, scheme=scheme)
        if out.status != CAP or len(loop.log) >= outer_limit:
            return SolveReport(OUTER_LIMIT, outer_iterations=rounds,
                               rescalings=loop.log,
                               basic_procedure_iterations=bp_total, scheme=scheme)
        loop.rescale(out.witness)


def solve_orthant_specialized(basis: SubspaceBasis, cfg: SchemeConfig | None = None,
                              outer_limit: int | None = None,
                              scheme: str = "vn") -> SolveReport:
    """Orthant-only mode: sharper cap threshold 1/(3 sqrt(n)) and the
    coordinate-doubling rescaling.

    Doubling coordinate i is exactly the quadratic rescaling with
    a = sqrt(2) - 1 (2a + a^2 = 1), so the generic loop machinery and the
    recovery path apply unchanged.
    """
    cone = basis.cone
    if not cone.is_pure_orthant:
        raise ValueError("orthant-specialized mode requires a pure orthant cone")
    if cfg is None:
        cfg = SchemeConfig.defaults(cone, scheme, orthant_mode=True)
    return solve(basis, scheme=scheme, cfg=cfg, outer_limit=outer_limit)


def solve_extended(basis: SubspaceBasis, scheme: str = SMOOTH,
                   cfg: SchemeConfig | None = None,
                   outer_limit: int | None = None) -> SolveReport:
    """Run the primal loop on L and the dual loop on its orthogonal
    complement in lockstep; return whichever side finds an interior point
    first (the primal wins a same-round tie)."""
    scheme_fn = SCHEMES[scheme]
    cone = basis.cone
    if cfg is None:
        cfg = SchemeConfig.defaults(cone, scheme)
    if outer_limit is None:
        outer_limit = 10 * cone.ambient_dim
    if outer_limit < 1:
        raise ValueError("outer_limit must be at least 1")
    if basis.dim == cone.ambient_dim:
        # the complement is trivial, so only the primal side can succeed
        return solve(basis, scheme=scheme, cfg=cfg, outer_limit=outer_limit)

    primal = _Loop(basis)
    dual = _Loop(complement(basis))
    rounds = 0
    bp_total = 0
    while True:
        out_p = primal.run_basic(scheme_fn, cfg)
        bp_total += out_p.iterations
        out_d = dual.run_basic(scheme_fn, cfg)
        bp_total += out_d.iterations
        rounds += 1
        if out_p.status == INTERIOR:
            return SolveReport(SOLVED, x=primal.recover(out_p.image),
                               outer_iterations=rounds, rescalings=primal.log,
                               basic_procedure_iterations=bp_total, scheme=scheme)
        if out_d.status == INTERIOR:
            return SolveReport(DUAL_SOLVED, x_hat=dual.recover(out_d.image),
                               outer_iterations=rounds, rescalings=dual.log,
                               basic_procedure_iterations=bp_total, scheme=scheme)
        if (out_p.status != CAP or out_d.status != CAP
                or len(primal.log) >= outer_limit):
            return SolveReport(OUTER_LIMIT, outer_iterations=rounds,
                               rescalings=primal.log,
                               basic_procedure_iterations=bp_total, scheme=scheme)
        primal.rescale(out_p.witness)
        dual.rescale(out_d.witness)
