"""Problem embeddings and a planted-instance generator.

The embeddings turn linear feasibility problems (Ax = b with x > 0,
strict inequalities A^T y < c, strict SDP feasibility) into the
homogeneous form "find x in L intersect the cone interior" by adding a
homogenizing coordinate t.

The planted generator builds instances with a known interior point and
hence a certified lower bound on the condition measure: for a planted
point with eigenvalue vector s, the bound is
prod(s_i) * (sqrt(r)/||s||_2)^r, the determinant of the Frobenius
normalization of the planted point.  All randomness flows through
numpy's default generator (PCG64) seeded explicitly, so fixtures are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cones import (
    ORTHANT,
    PSD,
    AlgebraElement,
    Block,
    ConeDescriptor,
    jordan_product,
    make_cone,
    min_eigenvalue,
    orthant,
    psd,
    sym_to_vec,
    to_natural_blocks,
)
from .subspace import SubspaceBasis, orthonormalize, from_kernel

T_THRESHOLD = 1e-10   # below this relative size the homogenizing ray is unusable


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    basis: SubspaceBasis
    cone: ConeDescriptor
    x_star: AlgebraElement
    delta_lb: float


def delta_lower_bound(spectrum: np.ndarray) -> float:
    """det of the Frobenius-normalized element with the given eigenvalues."""
    spectrum = np.asarray(spectrum, dtype=float)
    r = spectrum.size
    scale = np.sqrt(r) / np.linalg.norm(spectrum)
    return float(np.prod(scale * spectrum))


def random_frame(cone: ConeDescriptor, rng: np.random.Generator) -> list[AlgebraElement]:
    """Random Jordan frame: permuted units on orthant blocks, a random
    orthogonal eigenbasis on PSD blocks, a random unit direction on
    second-order blocks."""
    frame = []
    for i, b in enumerate(cone.blocks):
        sl = cone.block_slice(i)
        rows = _random_block_frame(b, rng)
        for k in range(b.rank):
            coords = np.zeros(cone.ambient_dim)
            coords[sl] = rows[k]
            frame.append(AlgebraElement(cone, coords))
    return frame


def _random_block_frame(b: Block, rng: np.random.Generator) -> np.ndarray:
    if b.kind == ORTHANT:
        return np.eye(b.size)[rng.permutation(b.size)]
    if b.kind == PSD:
        g = rng.standard_normal((b.size, b.size))
        q, r = np.linalg.qr(g)
        q = q * np.sign(np.diag(r))      # fix column signs for determinism
        return np.stack([sym_to_vec(np.outer(q[:, k], q[:, k])) for k in range(b.size)])
    ubar = rng.standard_normal(b.size - 1)
    ubar /= np.linalg.norm(ubar)
    rows = np.zeros((2, b.size))
    rows[:, 0] = 1.0 / np.sqrt(2.0)
    rows[0, 1:] = ubar / np.sqrt(2.0)
    rows[1, 1:] = -ubar / np.sqrt(2.0)
    return rows


def element_with_spectrum(cone: ConeDescriptor, spectrum,
                          rng: np.random.Generator) -> AlgebraElement:
    """Element with the given eigenvalues on a random Jordan frame."""
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.size != cone.rank:
        raise ValueError("spectrum length must equal the cone rank")
    frame = random_frame(cone, rng)
    coords = np.zeros(cone.ambient_dim)
    for lam, c in zip(spectrum, frame):
        coords += lam * c.coords
    return AlgebraElement(cone, coords)


def _assemble(cone: ConeDescriptor, frame, weights) -> AlgebraElement:
    coords = np.zeros(cone.ambient_dim)
    for w, c in zip(weights, frame):
        coords += w * c.coords
    return AlgebraElement(cone, coords)


def _peirce_project(c: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    # orthogonal projection onto the Peirce 1-space of the idempotent c
    cg = jordan_product(c, g)
    return 2.0 * jordan_product(c, cg) - cg


def _peirce_dim(cone: ConeDescriptor, frame_blocks, selected) -> int:
    total = 0
    for i, b in enumerate(cone.blocks):
        k = sum(1 for j in selected if frame_blocks[j] == i)
        if b.kind == ORTHANT:
            total += k
        elif b.kind == PSD:
            total += k * (k + 1) // 2
        else:
            total += b.dim if k == 2 else k
    return total


def plant(cone: ConeDescriptor, m: int, spectrum, seed: int,
          support: int | None = None) -> PlantedInstance:
    """Instance whose subspace contains a planted interior point.

    The subspace is the span of the planted point and m-1 random
    directions; the condition-measure lower bound comes straight from the
    planted spectrum.

    With ``support`` = k the random directions are confined to the Peirce
    subalgebra of the k largest-eigenvalue frame elements of the planted
    point.  Unconfined subspaces through a near-boundary point still tend
    to contain very interior points, so confinement is what makes the
    planted bound sharp and forces the solver to actually rescale.
    """
    spectrum = np.asarray(spectrum, dtype=float)
    if not 1 <= m <= cone.ambient_dim:
        raise ValueError("m must lie between 1 and the ambient dimension")
    if spectrum.size != cone.rank:
        raise ValueError("spectrum length must equal the cone rank")
    if np.any(spectrum <= 0.0):
        raise ValueError("spectrum must be strictly positive")
    rng = np.random.default_rng(seed)
    frame = random_frame(cone, rng)
    frame_blocks = []
    for i in range(len(cone.blocks)):
        frame_blocks += [i] * cone.blocks[i].rank
    x_star = _assemble(cone, frame, spectrum)

    confinement = None
    if support is not None:
        if not 1 <= support <= cone.rank:
            raise ValueError("support must lie between 1 and the cone rank")
        selected = np.argsort(-spectrum, kind="stable")[:support]
        room = _peirce_dim(cone, frame_blocks, selected)
        if support < cone.rank:
            room += 1                     # the planted point itself
        if m > room:
            raise ValueError(f"m={m} exceeds the confined dimension {room}")
        confinement = _assemble(cone, [frame[j] for j in selected], np.ones(support))

    cols = [x_star]
    while True:
        fresh = [AlgebraElement(cone, rng.standard_normal(cone.ambient_dim))
                 for _ in range(m - len(cols))]
        if confinement is not None:
            fresh = [_peirce_project(confinement, g) for g in fresh]
        cols += fresh
        basis = orthonormalize(cols)
        if basis.dim == m:
            break
        cols = [basis.column(j) for j in range(basis.dim)]
    delta = delta_lower_bound(spectrum)
    return PlantedInstance(basis, cone, x_star, delta)


# ---------------------------------------------------------------------------
# homogenization embeddings

def embed_linear_eq(a: np.ndarray, b: np.ndarray):
    """Ax = b with x > 0, as the kernel of [A | -b] over the orthant.

    A solved point (x, t) with t > 0 yields x/t satisfying Ax = b.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    n = a.shape[1]
    cone = make_cone(orthant(n + 1))
    rows = np.hstack([a, -b[:, None]])
    return from_kernel(cone, rows), cone


def recover_linear_eq(point: AlgebraElement) -> np.ndarray:
    """x/t from a solved homogenized point; rejects unusably tiny t."""
    coords = point.coords
    t = coords[-1]
    if t <= T_THRESHOLD * np.linalg.norm(coords):
        raise ValueError("homogenizing coordinate too small to recover a solution")
    return coords[:-1] / t


def embed_strict_ineq(a: np.ndarray, c: np.ndarray):
    """A^T y < c, as L = {(s, t): t c - s in range(A^T)} over the orthant.

    Encoded as a kernel: t c - s must be orthogonal to the null space of
    A (for empty A the subspace is the line through (c, 1)).
    """
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    n = c.size
    if a.size == 0:
        a = a.reshape((0, n))
    if a.shape[1] != n:
        raise ValueError("A must have one column per entry of c")
    cone = make_cone(orthant(n + 1))
    kernel_a = _null_space_or_none(a)
    if kernel_a is None:
        rows = np.zeros((1, n + 1))          # range(A^T) = R^n: no constraint
    else:
        rows = np.hstack([-kernel_a.T, (kernel_a.T @ c)[:, None]])
    return from_kernel(cone, rows), cone


def _null_space_or_none(a: np.ndarray):
    if a.shape[0] == 0:
        return np.eye(a.shape[1])
    ns = scipy.linalg.null_space(a)
    return ns if ns.shape[1] else None


def recover_strict_ineq(a: np.ndarray, c: np.ndarray, point: AlgebraElement) -> np.ndarray:
    """Least-squares y with A^T y = c - s/t from a solved point (s, t)."""
    coords = point.coords
    t = coords[-1]
    if t <= T_THRESHOLD * np.linalg.norm(coords):
        raise ValueError("homogenizing coordinate too small to recover a solution")
    a = np.asarray(a, dtype=float)
    target = c - coords[:-1] / t
    y, *_ = np.linalg.lstsq(a.T, target, rcond=None)
    return y


def embed_sdp_feasibility(a_ops, b: np.ndarray):
    """<A_i, X> = t b_i with X positive definite, over PSD(n) x Orthant(1)."""
    a_ops = [np.asarray(op, dtype=float) for op in a_ops]
    b = np.asarray(b, dtype=float)
    if not a_ops:
        raise ValueError("at least one constraint operator required")
    n = a_ops[0].shape[0]
    for op in a_ops:
        if op.shape != (n, n):
            raise ValueError("constraint operators must share their dimension")
    cone = make_cone(psd(n), orthant(1))
    rows = np.stack([np.concatenate([sym_to_vec(op), [-bi]])
                     for op, bi in zip(a_ops, b)])
    return from_kernel(cone, rows), cone


def recover_sdp(point: AlgebraElement):
    """(X/t, t) from a solved homogenized point."""
    x_part, t_part = to_natural_blocks(point)
    t = float(t_part[0])
    if t <= T_THRESHOLD * np.linalg.norm(point.coords):
        raise ValueError("homogenizing coordinate too small to recover a solution")
    return x_part / t, t


def is_strictly_feasible(x: AlgebraElement, tol: float = 0.0) -> bool:
    return min_eigenvalue(x) > tol
