"""conefeas: projection and rescaling solver for symmetric cone feasibility.

Finds a point in the intersection of a linear subspace with the interior
of a product of orthant, PSD and second-order cones, by alternating an
elementary basic procedure on the subspace projector with Jordan
algebraic rescalings that improve a condition measure of the instance.
"""

from .cones import (
    AlgebraElement,
    Block,
    ConeDescriptor,
    SpectralDecomposition,
    cone_project,
    det,
    from_natural_blocks,
    inverse_rescale,
    is_interior,
    jordan_product,
    make_cone,
    max_idempotent,
    min_eigenvalue,
    min_vertex,
    norm_frob,
    norm_op,
    orthant,
    psd,
    quadratic_rescale,
    soc,
    spectral,
    spectraplex_prox,
    to_natural_blocks,
    trace,
)
from .subspace import (
    Projector,
    SubspaceBasis,
    complement,
    from_kernel,
    orthonormalize,
    project,
    rescale_basis,
    rescale_basis_naive,
)
from .schemes import (
    CAP,
    INTERIOR,
    ITER_LIMIT,
    SchemeConfig,
    SchemeOutcome,
    perceptron,
    phi,
    phi_mu,
    smooth_perceptron,
    von_neumann,
    von_neumann_away,
)
from .solver import (
    DUAL_SOLVED,
    OUTER_LIMIT,
    SOLVED,
    RescalingStep,
    SolveReport,
    outer_bound,
    recover_point,
    solve,
    solve_extended,
    solve_orthant_specialized,
)
from .instances import (
    PlantedInstance,
    embed_linear_eq,
    embed_sdp_feasibility,
    embed_strict_ineq,
    plant,
)

__version__ = "0.1.0"
