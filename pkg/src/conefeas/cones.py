"""Euclidean Jordan algebra kernels for products of orthant, PSD and
second-order cone blocks.

Elements live in *isometric coordinates*: PSD blocks are stored as the
upper triangle of the symmetric matrix with off-diagonal entries scaled
by sqrt(2), second-order blocks are scaled by sqrt(2), orthant blocks
are stored as-is.  Under this layout the plain dot product of coordinate
vectors equals the trace inner product trace(x o y), which lets the
subspace machinery use ordinary Euclidean orthogonalization.

Everything in this module is immutable after construction and every
operation is a pure function, so values can be shared freely across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

SQRT2 = math.sqrt(2.0)

ORTHANT = "orthant"
PSD = "psd"
SOC = "soc"


@dataclass(frozen=True)
class Block:
    """One cone factor.

    ``size`` is the coordinate count for orthant and second-order blocks
    and the matrix side for PSD blocks.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in (ORTHANT, PSD, SOC):
            raise ValueError(f"unknown block kind {self.kind!r}")
        minimum = 2 if self.kind == SOC else 1
        if self.size < minimum:
            raise ValueError(f"{self.kind} block needs size >= {minimum}, got {self.size}")

    @property
    def dim(self) -> int:
        """Number of isometric coordinates the block occupies."""
        if self.kind == PSD:
            return self.size * (self.size + 1) // 2
        return self.size

    @property
    def rank(self) -> int:
        """Jordan rank contributed by the block."""
        return 2 if self.kind == SOC else self.size


def orthant(n: int) -> Block:
    return Block(ORTHANT, n)


def psd(n: int) -> Block:
    return Block(PSD, n)


def soc(n: int) -> Block:
    return Block(SOC, n)


@dataclass(frozen=True)
class ConeDescriptor:
    """Ordered product of cone blocks defining the ambient algebra."""

    blocks: tuple[Block, ...]

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("cone needs at least one block")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @cached_property
    def ambient_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    @cached_property
    def rank(self) -> int:
        return sum(b.rank for b in self.blocks)

    @cached_property
    def _offsets(self) -> tuple[int, ...]:
        offs = [0]
        for b in self.blocks:
            offs.append(offs[-1] + b.dim)
        return tuple(offs)

    def block_slice(self, i: int) -> slice:
        return slice(self._offsets[i], self._offsets[i + 1])

    @property
    def is_pure_orthant(self) -> bool:
        return all(b.kind == ORTHANT for b in self.blocks)

    def identity(self) -> "AlgebraElement":
        coords = np.zeros(self.ambient_dim)
        for i, b in enumerate(self.blocks):
            coords[self.block_slice(i)] = _block_identity(b)
        return AlgebraElement(self, coords)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, np.zeros(self.ambient_dim))


def make_cone(*blocks: Block) -> ConeDescriptor:
    return ConeDescriptor(tuple(blocks))


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A point of the algebra in isometric coordinates."""

    cone: ConeDescriptor
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (self.cone.ambient_dim,):
            raise ValueError(
                f"expected {self.cone.ambient_dim} coordinates, got shape {coords.shape}"
            )
        object.__setattr__(self, "coords", coords)

    def block(self, i: int) -> np.ndarray:
        return self.coords[self.cone.block_slice(i)]

    def inner(self, other: "AlgebraElement") -> float:
        _check_same_cone(self, other)
        return float(self.coords @ other.coords)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_cone(self, other)
        return AlgebraElement(self.cone, self.coords + other.coords)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_cone(self, other)
        return AlgebraElement(self.cone, self.coords - other.coords)

    def __mul__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(self.cone, self.coords * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(self.cone, self.coords / float(s))

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.cone, -self.coords)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues plus a Jordan frame of primitive idempotents.

    Eigenvalues are sorted descending within each block; ``blocks[i]``
    is the cone block owning frame element ``i``.
    """

    eigenvalues: np.ndarray
    frame: tuple[AlgebraElement, ...]
    blocks: tuple[int, ...]

    def reconstruct(self, values=None) -> AlgebraElement:
        """Assemble sum(values[i] * frame[i]); defaults to the eigenvalues."""
        if values is None:
            values = self.eigenvalues
        cone = self.frame[0].cone
        coords = np.zeros(cone.ambient_dim)
        for v, c in zip(values, self.frame):
            coords += float(v) * c.coords
        return AlgebraElement(cone, coords)


def _check_same_cone(x: AlgebraElement, y: AlgebraElement):
    if x.cone is not y.cone and x.cone != y.cone:
        raise ValueError("elements belong to different cones")


# ---------------------------------------------------------------------------
# symmetric matrix vectorization (upper triangle, row major, offdiag * sqrt2)

@lru_cache(maxsize=None)
def _triu_indices(n: int):
    i, j = np.triu_indices(n)
    return i, j, (i == j)


@lru_cache(maxsize=None)
def _diag_positions(n: int) -> np.ndarray:
    _, _, diag = _triu_indices(n)
    return np.nonzero(diag)[0]


def sym_to_vec(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    i, j, diag = _triu_indices(n)
    return np.where(diag, m[i, j], SQRT2 * m[i, j])


def vec_to_sym(v: np.ndarray, n: int) -> np.ndarray:
    i, j, diag = _triu_indices(n)
    vals = np.where(diag, v, v / SQRT2)
    m = np.zeros((n, n))
    m[i, j] = vals
    m[j, i] = vals
    return m


# ---------------------------------------------------------------------------
# per-block kernels (operate on isometric coordinate slices)

def _block_identity(b: Block) -> np.ndarray:
    if b.kind == ORTHANT:
        return np.ones(b.size)
    if b.kind == PSD:
        return sym_to_vec(np.eye(b.size))
    e = np.zeros(b.size)
    e[0] = SQRT2  # natural (1, 0, ..., 0)
    return e


def _block_jordan(b: Block, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if b.kind == ORTHANT:
        return x * y
    if b.kind == PSD:
        xm = vec_to_sym(x, b.size)
        ym = vec_to_sym(y, b.size)
        return sym_to_vec(0.5 * (xm @ ym + ym @ xm))
    xn = x / SQRT2
    yn = y / SQRT2
    out = np.empty_like(x)
    out[0] = xn @ yn
    out[1:] = xn[0] * yn[1:] + yn[0] * xn[1:]
    return SQRT2 * out


def _block_eigenvalues(b: Block, x: np.ndarray) -> np.ndarray:
    """Eigenvalues sorted descending (ties keep a deterministic order)."""
    if b.kind == ORTHANT:
        return x[np.argsort(-x, kind="stable")]
    if b.kind == PSD:
        w = np.linalg.eigvalsh(vec_to_sym(x, b.size))
        return w[::-1]
    x0 = x[0] / SQRT2
    tail = float(np.linalg.norm(x[1:])) / SQRT2
    return np.array([x0 + tail, x0 - tail])


def _soc_split(b: Block, x: np.ndarray):
    """Natural head coordinate, tail norm and unit tail direction.

    A zero tail uses the first coordinate direction so the split stays
    deterministic.
    """
    xn = x / SQRT2
    tail = xn[1:]
    nrm = float(np.linalg.norm(tail))
    if nrm > 0.0:
        ubar = tail / nrm
    else:
        ubar = np.zeros(b.size - 1)
        ubar[0] = 1.0
    return xn[0], nrm, ubar


def _soc_idempotents(b: Block, ubar: np.ndarray) -> np.ndarray:
    rows = np.zeros((2, b.size))
    rows[:, 0] = 1.0 / SQRT2
    rows[0, 1:] = ubar / SQRT2
    rows[1, 1:] = -ubar / SQRT2
    return rows


def _block_spectral(b: Block, x: np.ndarray):
    """Descending eigenvalues and frame rows (rank x dim, isometric)."""
    if b.kind == ORTHANT:
        order = np.argsort(-x, kind="stable")
        return x[order], np.eye(b.size)[order]
    if b.kind == PSD:
        w, v = np.linalg.eigh(vec_to_sym(x, b.size))
        order = np.argsort(-w, kind="stable")
        rows = np.empty((b.size, b.dim))
        for k, idx in enumerate(order):
            rows[k] = sym_to_vec(np.outer(v[:, idx], v[:, idx]))
        return w[order], rows
    x0, nrm, ubar = _soc_split(b, x)
    return np.array([x0 + nrm, x0 - nrm]), _soc_idempotents(b, ubar)


def _block_min_eig(b: Block, x: np.ndarray) -> float:
    if b.kind == ORTHANT:
        return float(x.min())
    if b.kind == PSD:
        return float(np.linalg.eigvalsh(vec_to_sym(x, b.size))[0])
    x0 = x[0] / SQRT2
    return float(x0 - np.linalg.norm(x[1:]) / SQRT2)


def _block_cone_project(b: Block, x: np.ndarray) -> np.ndarray:
    if b.kind == ORTHANT:
        return np.maximum(x, 0.0)
    if b.kind == PSD:
        w, v = np.linalg.eigh(vec_to_sym(x, b.size))
        return sym_to_vec((v * np.maximum(w, 0.0)) @ v.T)
    x0, nrm, ubar = _soc_split(b, x)
    lam = np.maximum([x0 + nrm, x0 - nrm], 0.0)
    out = np.empty(b.size)
    out[0] = 0.5 * (lam[0] + lam[1])
    out[1:] = 0.5 * (lam[0] - lam[1]) * ubar
    return SQRT2 * out


# ---------------------------------------------------------------------------
# public operations

def jordan_product(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Blockwise Jordan product x o y (commutative, bilinear)."""
    _check_same_cone(x, y)
    cone = x.cone
    out = np.empty(cone.ambient_dim)
    for i, b in enumerate(cone.blocks):
        sl = cone.block_slice(i)
        out[sl] = _block_jordan(b, x.coords[sl], y.coords[sl])
    return AlgebraElement(cone, out)


def spectral(x: AlgebraElement) -> SpectralDecomposition:
    """Spectral decomposition x = sum(lambda_i * c_i) with a Jordan frame.

    Frame elements are embedded in the full space and tagged with their
    owning block index; eigenvalues are sorted descending per block.
    """
    cone = x.cone
    eigenvalues = np.empty(cone.rank)
    frame = []
    owners = []
    pos = 0
    for i, b in enumerate(cone.blocks):
        sl = cone.block_slice(i)
        lam, rows = _block_spectral(b, x.coords[sl])
        eigenvalues[pos:pos + b.rank] = lam
        for k in range(b.rank):
            coords = np.zeros(cone.ambient_dim)
            coords[sl] = rows[k]
            frame.append(AlgebraElement(cone, coords))
            owners.append(i)
        pos += b.rank
    return SpectralDecomposition(eigenvalues, tuple(frame), tuple(owners))


def eigenvalues(x: AlgebraElement) -> np.ndarray:
    """All eigenvalues, block-major, descending within each block."""
    cone = x.cone
    out = np.empty(cone.rank)
    pos = 0
    for i, b in enumerate(cone.blocks):
        out[pos:pos + b.rank] = _block_eigenvalues(b, x.block(i))
        pos += b.rank
    return out


def trace(x: AlgebraElement) -> float:
    total = 0.0
    for i, b in enumerate(x.cone.blocks):
        xb = x.block(i)
        if b.kind == ORTHANT:
            total += xb.sum()
        elif b.kind == PSD:
            total += xb[_diag_positions(b.size)].sum()
        else:
            total += SQRT2 * xb[0]
    return float(total)


def det(x: AlgebraElement) -> float:
    total = 1.0
    for i, b in enumerate(x.cone.blocks):
        xb = x.block(i)
        if b.kind == SOC:
            total *= (xb[0] ** 2 - xb[1:] @ xb[1:]) / 2.0
        else:
            total *= float(np.prod(_block_eigenvalues(b, xb)))
    return float(total)


def norm_frob(x: AlgebraElement) -> float:
    """Frobenius norm: sqrt(<x, x>), equal to the l2 norm of lambda(x)."""
    return float(np.linalg.norm(x.coords))


def norm_op(x: AlgebraElement) -> float:
    """Operator norm: max |lambda_i(x)|."""
    return float(np.abs(eigenvalues(x)).max())


def min_eigenvalue(x: AlgebraElement) -> float:
    return min(_block_min_eig(b, x.block(i)) for i, b in enumerate(x.cone.blocks))


def cone_project(x: AlgebraElement) -> AlgebraElement:
    """Nearest point of the closed cone in Frobenius norm.

    Clamps the spectrum: sum(max(lambda_i, 0) * c_i).
    """
    cone = x.cone
    out = np.empty(cone.ambient_dim)
    for i, b in enumerate(cone.blocks):
        sl = cone.block_slice(i)
        out[sl] = _block_cone_project(b, x.coords[sl])
    return AlgebraElement(cone, out)


def is_interior(x: AlgebraElement, tol: float) -> bool:
    """True iff every eigenvalue exceeds tol."""
    return min_eigenvalue(x) > tol


def max_frame(sd: SpectralDecomposition):
    """Frame entry of the maximal eigenvalue.

    Ties go to the lowest block index, then the lowest frame index.
    """
    best = None
    for k, lam in enumerate(sd.eigenvalues):
        if best is None or lam > sd.eigenvalues[best]:
            best = k
    return sd.frame[best], float(sd.eigenvalues[best]), sd.blocks[best]


def min_frame(sd: SpectralDecomposition):
    """Frame entry of the minimal eigenvalue (same tie rule as max_frame)."""
    best = None
    for k, lam in enumerate(sd.eigenvalues):
        if best is None or lam < sd.eigenvalues[best]:
            best = k
    return sd.frame[best], float(sd.eigenvalues[best]), sd.blocks[best]


def max_idempotent(z: AlgebraElement):
    """Primitive idempotent c with z o c = lambda_max(z) c, plus the value
    and owning block index."""
    if not np.any(z.coords):
        raise ValueError("max_idempotent undefined for z = 0")
    return max_frame(spectral(z))


def min_vertex(v: AlgebraElement):
    """Vertex of the spectraplex minimizing <u, v>: the idempotent of the
    minimal eigenvalue, with that eigenvalue as the optimal value."""
    u, value, _ = min_frame(spectral(v))
    return u, value


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = 1} (sorted threshold)."""
    n = v.size
    a = np.sort(v)[::-1]
    levels = (np.cumsum(a) - 1.0) / np.arange(1, n + 1)
    k = np.nonzero(a > levels)[0][-1]
    return np.maximum(v - levels[k], 0.0)


def spectraplex_prox(v: AlgebraElement, mu: float, u_bar: AlgebraElement) -> AlgebraElement:
    """argmin over the spectraplex of <u, v> + (mu/2)||u - u_bar||_F^2.

    Reduces to a simplex projection of the eigenvalue vector of
    u_bar - v/mu, assembled back on that element's own frame.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    _check_same_cone(v, u_bar)
    if min_eigenvalue(u_bar) < -1e-8 or abs(trace(u_bar) - 1.0) > 1e-8:
        raise ValueError("u_bar must lie in the spectraplex")
    shifted = u_bar - v / mu
    sd = spectral(shifted)
    weights = project_to_simplex(sd.eigenvalues)
    return sd.reconstruct(weights)


def _quadratic_map(c: AlgebraElement, coeff: float, x: AlgebraElement) -> AlgebraElement:
    # quadratic representation of e + coeff*c, valid for any real coeff
    cx = jordan_product(c, x)
    ccx = jordan_product(c, cx)
    return x + (2.0 * coeff - coeff * coeff) * cx + (2.0 * coeff * coeff) * ccx


def quadratic_rescale(c: AlgebraElement, a: float, x: AlgebraElement) -> AlgebraElement:
    """Quadratic rescaling along the primitive idempotent c.

    Applies the quadratic representation of e + a*c; multiplies det(x)
    by (1+a)^2 and leaves the cone invariant.
    """
    return _quadratic_map(c, a, x)


def inverse_rescale(c: AlgebraElement, a: float, y: AlgebraElement) -> AlgebraElement:
    """Inverse of quadratic_rescale(c, a, .): the quadratic map of
    e - (a/(1+a))*c."""
    return _quadratic_map(c, -a / (1.0 + a), y)


# ---------------------------------------------------------------------------
# natural coordinate helpers (tests, instance generation, file formats)

def from_natural_blocks(cone: ConeDescriptor, parts) -> AlgebraElement:
    """Build an element from natural per-block data: a vector for orthant
    and second-order blocks, a symmetric matrix for PSD blocks."""
    if len(parts) != len(cone.blocks):
        raise ValueError("one part per block expected")
    coords = np.zeros(cone.ambient_dim)
    for i, (b, part) in enumerate(zip(cone.blocks, parts)):
        part = np.asarray(part, dtype=float)
        sl = cone.block_slice(i)
        if b.kind == ORTHANT:
            coords[sl] = part
        elif b.kind == PSD:
            coords[sl] = sym_to_vec(part)
        else:
            coords[sl] = SQRT2 * part
    return AlgebraElement(cone, coords)


def to_natural_blocks(x: AlgebraElement):
    """Inverse of from_natural_blocks."""
    parts = []
    for i, b in enumerate(x.cone.blocks):
        xb = x.block(i)
        if b.kind == ORTHANT:
            parts.append(xb.copy())
        elif b.kind == PSD:
            parts.append(vec_to_sym(xb, b.size))
        else:
            parts.append(xb / SQRT2)
    return parts
