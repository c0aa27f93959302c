"""Command-line front end.

Subcommands:

  solve PROBLEM    run the solver on a problem file, print a report
  verify PROBLEM CERT   recheck a certificate against the problem
  bench            iteration-count table over planted instances

Exit codes: 0 solved (or verified), 1 dual solved, 2 outer limit
reached, 64 parse/usage error, 65 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cones import AlgebraElement, min_eigenvalue, norm_frob
from .instances import plant
from .problem_io import (
    ProblemFile,
    build_basis,
    certificate_json,
    load_certificate,
    load_problem,
)
from .schemes import SCHEME_NAMES, SchemeConfig
from .solver import (
    DUAL_SOLVED,
    SOLVED,
    SolveReport,
    solve,
    solve_extended,
    solve_orthant_specialized,
)
from .subspace import Projector, complement

EXIT_SOLVED = 0
EXIT_DUAL = 1
EXIT_OUTER_LIMIT = 2
EXIT_PARSE = 64
EXIT_VERIFY_FAILED = 65

MODES = ("primal", "extended", "orthant")


def _certificate_coords(report: SolveReport):
    if report.status == SOLVED:
        return report.x.coords
    if report.status == DUAL_SOLVED:
        return report.x_hat.coords
    return None


def _report_payload(report: SolveReport):
    coords = _certificate_coords(report)
    return {
        "status": report.status,
        "outer_iterations": report.outer_iterations,
        "rescalings": len(report.rescalings),
        "bp_iterations": report.basic_procedure_iterations,
        "certificate": None if coords is None else [float(v) for v in coords],
    }


def cmd_solve(args) -> int:
    try:
        pf = load_problem(args.problem)
        basis = build_basis(pf)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    cone = pf.cone
    scheme = args.scheme
    orthant_mode = args.mode == "orthant"
    if orthant_mode and not cone.is_pure_orthant:
        print("error: orthant mode requires a pure orthant cone", file=sys.stderr)
        return EXIT_PARSE
    cfg = SchemeConfig.defaults(cone, scheme, orthant_mode=orthant_mode,
                                epsilon=args.eps)
    if args.mode == "extended":
        report = solve_extended(basis, scheme=scheme, cfg=cfg, outer_limit=args.max_outer)
    elif orthant_mode:
        report = solve_orthant_specialized(basis, cfg=cfg, outer_limit=args.max_outer,
                                           scheme=scheme)
    else:
        report = solve(basis, scheme=scheme, cfg=cfg, outer_limit=args.max_outer)

    payload = _report_payload(report)
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"status: {payload['status']}")
        print(f"outer_iterations: {payload['outer_iterations']}")
        print(f"rescalings: {payload['rescalings']}")
        print(f"bp_iterations: {payload['bp_iterations']}")
        if payload["certificate"] is not None:
            print("certificate: " + " ".join(repr(v) for v in payload["certificate"]))
    if args.cert_out and payload["certificate"] is not None:
        side = "dual" if report.status == DUAL_SOLVED else "primal"
        with open(args.cert_out, "w", encoding="utf-8") as fh:
            fh.write(certificate_json(cone, side, np.asarray(payload["certificate"])))
    if report.status == SOLVED:
        return EXIT_SOLVED
    if report.status == DUAL_SOLVED:
        return EXIT_DUAL
    return EXIT_OUTER_LIMIT


def cmd_verify(args) -> int:
    try:
        pf = load_problem(args.problem)
        basis = build_basis(pf)
        cone, side, coords = load_certificate(args.certificate)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if cone != pf.cone:
        print("error: certificate cone does not match the problem", file=sys.stderr)
        return EXIT_PARSE
    if side == "dual":
        basis = complement(basis)
    x = AlgebraElement(cone, coords)
    residual = norm_frob(Projector(basis).apply(x) - x) / max(norm_frob(x), 1e-300)
    lam_min = min_eigenvalue(x)
    ok = residual <= args.tol and lam_min > 0.0
    print(f"residual: {residual:.3e}")
    print(f"min_eigenvalue: {lam_min:.3e}")
    print("verified" if ok else "verification failed")
    return EXIT_SOLVED if ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# bench

def bench_instance(family: str, r: int, seed: int) -> ProblemFile:
    """Planted benchmark instance as a problem file (shared with tests so
    bench cells and solve runs see identical inputs).

    The planted point hugs the cone boundary along two frame directions
    and the subspace is confined around it, so the basic procedures do
    measurable work instead of stopping at the barycenter.
    """
    from .cones import make_cone, orthant, psd, soc

    if family == "orthant":
        if r < 4:
            raise ValueError("orthant family needs rank at least 4")
        cone = make_cone(orthant(r))
    elif family == "mixed":
        if r < 6:
            raise ValueError("mixed family needs rank at least 6")
        cone = make_cone(orthant(r - 4), psd(2), soc(3))
    else:
        raise ValueError(f"unknown family {family!r}")
    rng = np.random.default_rng(seed)
    spectrum = np.exp(rng.uniform(-2.0, 2.0, size=cone.rank))
    spectrum[-2:] = 0.01 * np.exp(rng.uniform(-1.0, 1.0, size=2))
    # codimension 2 inside the confined subalgebra keeps the instances hard
    confined_room = (cone.rank - 2 if family == "orthant" else cone.rank - 1) + 1
    m = max(1, confined_room - 2)
    inst = plant(cone, m, spectrum, seed, support=cone.rank - 2)
    return ProblemFile(cone, "span", inst.basis.matrix.T.copy(),
                       name=f"{family}-r{r}-s{seed}", seed=seed,
                       delta_lb=inst.delta_lb)


def _bench_cell(family: str, r: int, scheme: str, seed: int) -> SolveReport:
    pf = bench_instance(family, r, seed)
    basis = build_basis(pf)
    cfg = SchemeConfig.defaults(pf.cone, scheme)
    return solve(basis, scheme=scheme, cfg=cfg)


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
        schemes = args.schemes.split(",") if args.schemes != "all" else list(SCHEME_NAMES)
        for s in schemes:
            if s not in SCHEME_NAMES:
                raise ValueError(f"unknown scheme {s!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    rows = []
    for scheme in sorted(schemes):
        for r in sorted(sizes):
            counts = []
            rescales = []
            for seed in range(args.seeds):
                report = _bench_cell(args.family, r, scheme, seed)
                counts.append(report.basic_procedure_iterations)
                rescales.append(len(report.rescalings))
            rows.append((scheme, r, len(counts), float(np.mean(counts)),
                         int(np.max(counts)), float(np.mean(rescales))))

    if args.csv:
        print("scheme,r,runs,bp_mean,bp_max,rescalings_mean")
        for scheme, r, runs, mean, peak, resc in rows:
            print(f"{scheme},{r},{runs},{mean:.2f},{peak},{resc:.2f}")
    else:
        print(f"{'scheme':<12} {'r':>4} {'runs':>5} {'bp_mean':>10} {'bp_max':>8} {'resc_mean':>10}")
        for scheme, r, runs, mean, peak, resc in rows:
            print(f"{scheme:<12} {r:>4} {runs:>5} {mean:>10.2f} {peak:>8} {resc:>10.2f}")
    return EXIT_SOLVED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conefeas",
                                     description="symmetric cone feasibility solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("problem")
    p_solve.add_argument("--scheme", choices=SCHEME_NAMES, default="smooth")
    p_solve.add_argument("--mode", choices=MODES, default="primal")
    p_solve.add_argument("--eps", type=float, default=None,
                         help="cap threshold (default 1/(4r), orthant mode 1/(3 sqrt n))")
    p_solve.add_argument("--max-outer", type=int, default=None,
                         help="rescaling budget (default 10x ambient dimension)")
    p_solve.add_argument("--seed", type=int, default=0,
                         help="reproducibility bookkeeping; the solver is deterministic")
    p_solve.add_argument("--json", action="store_true")
    p_solve.add_argument("--cert-out", default=None,
                         help="write the certificate to this JSON file")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="recheck a certificate")
    p_verify.add_argument("problem")
    p_verify.add_argument("certificate")
    p_verify.add_argument("--tol", type=float, default=1e-8)
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="iteration-count table")
    p_bench.add_argument("--family", choices=("orthant", "mixed"), default="orthant")
    p_bench.add_argument("--sizes", default="8,16,32",
                         help="comma separated ranks")
    p_bench.add_argument("--schemes", default="all")
    p_bench.add_argument("--seeds", type=int, default=20)
    p_bench.add_argument("--csv", action="store_true")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
