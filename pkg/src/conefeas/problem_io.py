"""Problem and certificate file formats.

A problem file is plain text: cone block tags, a subspace mode, one
matrix row per line in isometric coordinates, and optional metadata.

    # conefeas problem file
    cone ORTHANT 3
    cone PSD 2
    cone SOC 3
    subspace span
    row 1.0 0.0 0.5 ...
    meta name example
    meta seed 42
    meta delta_lb 0.25

With ``subspace span`` the rows span the subspace; with ``subspace
kernel`` they are the rows of a linear map whose null space is the
subspace.  Numbers are written with full round-trip precision and the
writer is canonical, so write -> parse -> write is byte identical.

Certificates are JSON files carrying the cone layout, the side the
certificate belongs to, and the coordinate array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cones import ConeDescriptor, make_cone, orthant, psd, soc
from .subspace import SubspaceBasis, from_kernel, orthonormalize

HEADER = ("# conefeas problem file (isometric coordinates: psd upper triangle "
          "row-major with off-diagonals x sqrt2, soc x sqrt2)")

_KIND_TO_TAG = {"orthant": "ORTHANT", "psd": "PSD", "soc": "SOC"}
_TAG_TO_BLOCK = {"ORTHANT": orthant, "PSD": psd, "SOC": soc}


class ProblemParseError(ValueError):
    """Parse failure with the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(eq=False)
class ProblemFile:
    cone: ConeDescriptor
    mode: str                      # "span" or "kernel"
    rows: np.ndarray
    name: str | None = None
    seed: int | None = None
    delta_lb: float | None = None


def parse_problem(text: str) -> ProblemFile:
    blocks = []
    mode = None
    rows = []
    meta = {}
    expected_width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        keyword = tokens[0]
        if keyword == "cone":
            if len(tokens) != 3:
                raise ProblemParseError(lineno, "expected 'cone KIND SIZE'")
            tag, size_text = tokens[1], tokens[2]
            if tag not in _TAG_TO_BLOCK:
                raise ProblemParseError(lineno, f"unknown cone block {tag!r}")
            try:
                size = int(size_text)
            except ValueError:
                raise ProblemParseError(lineno, f"bad block size {size_text!r}") from None
            try:
                blocks.append(_TAG_TO_BLOCK[tag](size))
            except ValueError as exc:
                raise ProblemParseError(lineno, str(exc)) from None
        elif keyword == "subspace":
            if len(tokens) != 2 or tokens[1] not in ("span", "kernel"):
                raise ProblemParseError(lineno, "expected 'subspace span' or 'subspace kernel'")
            mode = tokens[1]
        elif keyword == "row":
            if not blocks:
                raise ProblemParseError(lineno, "row before any cone declaration")
            if expected_width is None:
                expected_width = sum(b.dim for b in blocks)
            values = tokens[1:]
            if len(values) != expected_width:
                raise ProblemParseError(
                    lineno, f"row has {len(values)} entries, expected {expected_width}")
            parsed = []
            for col, v in enumerate(values, start=1):
                try:
                    parsed.append(float(v))
                except ValueError:
                    raise ProblemParseError(
                        lineno, f"column {col}: {v!r} is not a number") from None
            rows.append(parsed)
        elif keyword == "meta":
            if len(tokens) < 3:
                raise ProblemParseError(lineno, "expected 'meta KEY VALUE'")
            key = tokens[1]
            value = " ".join(tokens[2:])
            if key == "seed":
                try:
                    meta["seed"] = int(value)
                except ValueError:
                    raise ProblemParseError(lineno, "meta seed must be an integer") from None
            elif key == "delta_lb":
                try:
                    meta["delta_lb"] = float(value)
                except ValueError:
                    raise ProblemParseError(lineno, "meta delta_lb must be a number") from None
            elif key == "name":
                meta["name"] = value
            else:
                raise ProblemParseError(lineno, f"unknown meta key {key!r}")
        else:
            raise ProblemParseError(lineno, f"unknown directive {keyword!r}")
    if not blocks:
        raise ProblemParseError(1, "no cone blocks declared")
    if mode is None:
        raise ProblemParseError(1, "no subspace mode declared")
    if not rows:
        raise ProblemParseError(1, "no subspace rows given")
    return ProblemFile(make_cone(*blocks), mode, np.array(rows, dtype=float), **meta)


def load_problem(path) -> ProblemFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read())


def write_problem(pf: ProblemFile) -> str:
    lines = [HEADER]
    for b in pf.cone.blocks:
        lines.append(f"cone {_KIND_TO_TAG[b.kind]} {b.size}")
    lines.append(f"subspace {pf.mode}")
    for row in np.atleast_2d(pf.rows):
        lines.append("row " + " ".join(repr(float(v)) for v in row))
    if pf.name is not None:
        lines.append(f"meta name {pf.name}")
    if pf.seed is not None:
        lines.append(f"meta seed {pf.seed}")
    if pf.delta_lb is not None:
        lines.append(f"meta delta_lb {repr(float(pf.delta_lb))}")
    return "\n".join(lines) + "\n"


def save_problem(pf: ProblemFile, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_problem(pf))


def build_basis(pf: ProblemFile) -> SubspaceBasis:
    """Subspace basis from a parsed problem (shared by solve and bench so
    iteration counts agree between them)."""
    from .cones import AlgebraElement

    if pf.mode == "kernel":
        return from_kernel(pf.cone, pf.rows)
    vectors = [AlgebraElement(pf.cone, row) for row in np.atleast_2d(pf.rows)]
    return orthonormalize(vectors)


# ---------------------------------------------------------------------------
# certificates

def certificate_json(cone: ConeDescriptor, side: str, coords: np.ndarray) -> str:
    payload = {
        "cone": [[b.kind, b.size] for b in cone.blocks],
        "side": side,
        "coords": [float(v) for v in coords],
    }
    return json.dumps(payload) + "\n"


def parse_certificate(text: str):
    payload = json.loads(text)
    blocks = [_TAG_TO_BLOCK[kind.upper()](int(size)) for kind, size in payload["cone"]]
    cone = make_cone(*blocks)
    side = payload.get("side", "primal")
    if side not in ("primal", "dual"):
        raise ValueError(f"unknown certificate side {side!r}")
    coords = np.asarray(payload["coords"], dtype=float)
    return cone, side, coords


def load_certificate(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_certificate(fh.read())
