"""Orthonormal bases of subspaces, projector application, and the
structured basis updates performed after each rescaling.

A subspace is carried as a matrix with orthonormal columns in isometric
coordinates, so the projector is z -> Q (Q^T z).  After a rescaling D
(the Jordan quadratic map on one block, identity elsewhere) the new
basis is obtained as D Q R where the correcting factor R comes either
from a Cholesky factorization of I + Q^T (2B + B^2) Q or from a low-rank
spectral formula, exploiting that Q^T (2B + B^2) Q has small rank.

Values are immutable and operations are pure; concurrent reads are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cones import (
    PSD,
    SOC,
    SQRT2,
    AlgebraElement,
    ConeDescriptor,
    jordan_product,
    norm_frob,
    quadratic_rescale,
    sym_to_vec,
    trace,
    vec_to_sym,
)

DROP_TOL = 1e-10
IDEMPOTENT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of a subspace, columns in isometric coordinates."""

    cone: ConeDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != self.cone.ambient_dim:
            raise ValueError("basis matrix must be ambient_dim x m")
        if m.shape[1] < 1:
            raise ValueError("basis needs at least one column")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def column(self, j: int) -> AlgebraElement:
        return AlgebraElement(self.cone, self.matrix[:, j].copy())

    def columns(self) -> list[AlgebraElement]:
        return [self.column(j) for j in range(self.dim)]


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector onto the basis span (trace inner product)."""

    basis: SubspaceBasis

    def apply(self, z: AlgebraElement) -> AlgebraElement:
        if z.cone != self.basis.cone:
            raise ValueError("cone mismatch between projector and element")
        q = self.basis.matrix
        return AlgebraElement(z.cone, q @ (q.T @ z.coords))

    def matrix(self) -> np.ndarray:
        q = self.basis.matrix
        return q @ q.T


def project(p: Projector, z: AlgebraElement) -> AlgebraElement:
    return p.apply(z)


def _orthonormal_columns(cols: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Columns whose residual falls below DROP_TOL times the largest input
    column norm are dropped as dependent.
    """
    scale = float(np.max(np.linalg.norm(cols, axis=0))) if cols.size else 0.0
    if scale == 0.0:
        raise ValueError("all inputs numerically zero")
    drop = DROP_TOL * scale
    kept: list[np.ndarray] = []
    for k in range(cols.shape[1]):
        w = cols[:, k].copy()
        for _ in range(2):
            for q in kept:
                w -= (q @ w) * q
        nrm = float(np.linalg.norm(w))
        if nrm > drop:
            kept.append(w / nrm)
    if not kept:
        raise ValueError("all inputs numerically zero")
    return np.column_stack(kept)


def orthonormalize(vectors) -> SubspaceBasis:
    """Orthonormal basis of the span of the given elements.

    Dependent inputs are dropped; raises if every input is numerically
    zero.
    """
    vectors = list(vectors)
    if not vectors:
        raise ValueError("no input vectors")
    cone = vectors[0].cone
    cols = np.column_stack([v.coords for v in vectors])
    return SubspaceBasis(cone, _orthonormal_columns(cols))


def from_kernel(cone: ConeDescriptor, rows: np.ndarray) -> SubspaceBasis:
    """Basis of the null space of the linear map given by rows in
    isometric coordinates."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != cone.ambient_dim:
        raise ValueError("row length must equal the ambient dimension")
    ns = scipy.linalg.null_space(rows)
    if ns.shape[1] == 0:
        raise ValueError("kernel is trivial")
    return SubspaceBasis(cone, ns)


def complement(basis: SubspaceBasis) -> SubspaceBasis:
    """Basis of the orthogonal complement."""
    if basis.dim >= basis.cone.ambient_dim:
        raise ValueError("subspace already fills the ambient space")
    ns = scipy.linalg.null_space(basis.matrix.T)
    return SubspaceBasis(basis.cone, ns)


# ---------------------------------------------------------------------------
# post-rescaling basis update

def _validate_rescale_args(basis: SubspaceBasis, block: int, c: AlgebraElement, a: float):
    cone = basis.cone
    if not 0 <= block < len(cone.blocks):
        raise ValueError(f"block index {block} out of range")
    if a <= 0.0:
        raise ValueError("rescaling parameter a must be positive")
    if c.cone != cone:
        raise ValueError("idempotent belongs to a different cone")
    sl = cone.block_slice(block)
    off = np.linalg.norm(np.delete(c.coords, np.arange(sl.start, sl.stop)))
    if off > IDEMPOTENT_TOL:
        raise ValueError("idempotent is not supported on the named block")
    cc = jordan_product(c, c)
    if norm_frob(cc - c) > IDEMPOTENT_TOL or abs(trace(c) - 1.0) > IDEMPOTENT_TOL:
        raise ValueError("c is not a primitive idempotent")


def _lowrank_r(p: np.ndarray, lam: np.ndarray, m: int) -> np.ndarray:
    """R = I - P diag(lam_bar) P^T with lam_bar = 1 + (1+lam)^(-1/2).

    Both roots 1 +- (1+lam)^(-1/2) restore orthonormality; the "+" root
    is used throughout.
    """
    lam_bar = 1.0 + 1.0 / np.sqrt(1.0 + lam)
    return np.eye(m) - (p * lam_bar) @ p.T


def _orthant_update(basis: SubspaceBasis, block: int, c: AlgebraElement, a: float):
    cone = basis.cone
    sl = cone.block_slice(block)
    local = int(np.argmax(c.coords[sl]))
    row = sl.start + local
    beta = 2.0 * a + a * a          # D on the block is I + beta e_j e_j^T
    kappa = 2.0 * beta + beta * beta
    qi = basis.matrix[row, :].copy()
    qn2 = float(qi @ qi)
    if qn2 == 0.0:
        return None
    dq = basis.matrix.copy()
    dq[row, :] *= 1.0 + beta
    m = basis.dim
    if m <= cone.blocks[block].dim:
        r = _cholesky_r(kappa * np.outer(qi, qi), m)
    else:
        factor = 1.0 + 1.0 / math.sqrt(1.0 + kappa * qn2)
        r = np.eye(m) - factor * np.outer(qi, qi) / qn2
    return dq, r


def _psd_update(basis: SubspaceBasis, block: int, c: AlgebraElement, a: float):
    cone = basis.cone
    b = cone.blocks[block]
    n = b.size
    sl = cone.block_slice(block)
    cm = vec_to_sym(c.coords[sl], n)
    w, v = np.linalg.eigh(cm)
    u = v[:, -1]                    # c = u u^T up to the idempotent tolerance
    beta = 2.0 * a + a * a
    m = basis.dim
    qi = basis.matrix[sl, :]
    # per-column data: A_j u and u^T A_j u
    au = np.empty((m, n))
    uau = np.empty(m)
    new_qi = np.empty_like(qi)
    uut = np.outer(u, u)
    for j in range(m):
        aj = vec_to_sym(qi[:, j], n)
        wj = aj @ u
        sj = float(u @ wj)
        au[j] = wj
        uau[j] = sj
        daj = aj + a * (np.outer(u, wj) + np.outer(wj, u)) + (a * a * sj) * uut
        new_qi[:, j] = sym_to_vec(daj)
    # Q^T (2B + B^2) Q = Y Y^T with Y = [sqrt(2 beta) A_j u | beta u^T A_j u]
    y = np.hstack([math.sqrt(2.0 * beta) * au, (beta * uau)[:, None]])
    if not np.any(y):
        return None
    dq = basis.matrix.copy()
    dq[sl, :] = new_qi
    if m <= n:
        r = _cholesky_r(y @ y.T, m)
    else:
        r = _spectral_r(y, m)
    return dq, r


def _soc_update(basis: SubspaceBasis, block: int, c: AlgebraElement, a: float):
    cone = basis.cone
    b = cone.blocks[block]
    n = b.size
    sl = cone.block_slice(block)
    cnat = c.coords[sl] / SQRT2     # (1/2, ubar/2)
    ubar = 2.0 * cnat[1:]
    arrow = np.eye(n)
    arrow[0, 1:] = ubar
    arrow[1:, 0] = ubar
    rank1 = np.empty((n, n))
    rank1[0, 0] = 1.0
    rank1[0, 1:] = ubar
    rank1[1:, 0] = ubar
    rank1[1:, 1:] = np.outer(ubar, ubar)
    beta = 2.0 * a + a * a
    bmat = a * arrow + 0.5 * a * a * rank1
    c2 = beta * (arrow + 0.5 * beta * rank1)   # 2B + B^2
    qi = basis.matrix[sl, :]
    bq = bmat @ qi
    if not np.any(bq):
        return None
    dq = basis.matrix.copy()
    dq[sl, :] = qi + bq
    m = basis.dim
    gram = qi.T @ (c2 @ qi)
    asym = np.abs(gram - gram.T).max()
    if asym > 1e-10 * (1.0 + np.abs(gram).max()):
        raise ValueError("assembled rescaling operator is not symmetric")
    gram = 0.5 * (gram + gram.T)
    if m <= n:
        r = _cholesky_r(gram, m)
    else:
        w, v = np.linalg.eigh(c2)
        h = v * np.sqrt(np.maximum(w, 0.0))
        r = _spectral_r(qi.T @ h, m)
    return dq, r


def _cholesky_r(gram: np.ndarray, m: int) -> np.ndarray:
    ell = np.linalg.cholesky(np.eye(m) + gram)
    return scipy.linalg.solve_triangular(ell, np.eye(m), lower=True, trans="T")


def _spectral_r(y: np.ndarray, m: int) -> np.ndarray:
    p, s, _ = np.linalg.svd(y, full_matrices=False)
    keep = s > 1e-14 * max(1.0, s[0])
    if not np.any(keep):
        return np.eye(m)
    return _lowrank_r(p[:, keep], s[keep] ** 2, m)


_UPDATES = {PSD: _psd_update, SOC: _soc_update}


def rescale_basis(basis: SubspaceBasis, block: int, c: AlgebraElement, a: float) -> SubspaceBasis:
    """Orthonormal basis of D(L) for the quadratic rescaling D along the
    primitive idempotent c of the named block (identity elsewhere).

    The Gram correction is assembled from the structured low-rank form of
    Q^T (2B + B^2) Q per block kind, then inverted via a dense Cholesky
    factor when the basis dimension is at most the rescaled block's
    dimension and via the low-rank spectral formula otherwise.  A zero
    interaction (e.g. the rescaled coordinate is orthogonal to L) returns
    the input basis unchanged.
    """
    _validate_rescale_args(basis, block, c, a)
    kind = basis.cone.blocks[block].kind
    update = _UPDATES.get(kind, _orthant_update)
    result = update(basis, block, c, a)
    if result is None:
        return basis
    dq, r = result
    new = dq @ r
    gram = new.T @ new
    drift = np.abs(gram - np.eye(basis.dim)).max()
    if drift > 1e-11:
        new = np.linalg.qr(new)[0]
    return SubspaceBasis(basis.cone, new)


def rescale_basis_naive(basis: SubspaceBasis, block: int, c: AlgebraElement, a: float) -> SubspaceBasis:
    """Oracle version of rescale_basis: map every column through the
    quadratic rescaling, then re-orthonormalize."""
    _validate_rescale_args(basis, block, c, a)
    cols = [quadratic_rescale(c, a, col) for col in basis.columns()]
    return orthonormalize(cols)
