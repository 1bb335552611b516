"""Command-line front end: ``symdisc validate|solve|certify|simulate|gallery``.

Every command that takes a PROBLEM accepts either a problem file or one of the
gallery ids ``ex1``/``ex2``/``ex3`` (``--n`` selects N for ex1).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, cxmat, gallery, optmeas, oracle, problemfile
from .symstates import FamilyError, as_problem

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_CONSTRUCTION = 5
EXIT_CERTIFY = 6
EXIT_SIMULATE = 7

SEED_ENV = "SYMDISC_SEED"

TOLERANCES = f"""\
fixed tolerances:
  optimality: pairwise residual <= {optmeas.PAIRWISE_TOL:g}, global min eigenvalue >= -{optmeas.GLOBAL_TOL:g}
  structure:  completeness <= {optmeas.COMPLETENESS_TOL:g}, Hermiticity <= {optmeas.HERMITIAN_TOL:g}
  positivity: POM eigenvalues >= -{optmeas.POSITIVITY_FLOOR:g}
  oracle gap: closed form - ansatz search <= {oracle.ORACLE_TOL:g} ({oracle.DEFAULT_GRID_STEPS} steps, {oracle.GRID_STEPS_3D} for d = 3)
  --tol-scale multiplies the optimality/structure thresholds and marks the report non-certifying.

exit codes: 0 ok, 2 invalid problem, 3 I/O error, 4 parse error / unknown id,
  5 construction error, 6 certification failure, 7 simulation outside 3 sigma.
environment: {SEED_ENV} sets the default simulation seed.
"""


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.12g}"


def load(spec: str, n: int | None):
    """Problem from a file path or a gallery id."""
    path = Path(spec)
    try:
        if not path.exists() and spec.lower() in gallery.GALLERY_IDS:
            return as_problem(gallery.build(spec, n))
        return problemfile.load_problem(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {spec}: {exc}") from exc
    except problemfile.ProblemFormatError as exc:
        raise CliError(EXIT_PARSE, f"parse error in {spec}: {exc}") from exc
    except gallery.GalleryError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    except FamilyError as exc:
        raise CliError(EXIT_INVALID, f"invalid problem ({exc.invariant}): {exc}") from exc
    except cxmat.MatrixError as exc:
        raise CliError(EXIT_INVALID, f"invalid problem (matrix): {exc}") from exc


def parse_phi0(text: str):
    if text == "uniform":
        return optmeas.UNIFORM
    if text == "canonical":
        return optmeas.CANONICAL
    try:
        arr = np.array(json.loads(text), dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise CliError(EXIT_PARSE, f"--phi0: expected 'uniform' or a JSON vector: {exc}") from exc
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 1:
        return arr.astype(np.complex128)
    raise CliError(EXIT_PARSE, "--phi0: expected a list of numbers or [re, im] pairs")


def cmd_validate(args) -> int:
    problem = load(args.problem, args.n)
    print(f"valid: N = {problem.n}, {len(problem.blocks)} block(s)")
    for i, (b, w) in enumerate(zip(problem.blocks, problem.block_traces)):
        print(f"  block {i}: d = {b.dim}, sign = {b.sym.sign:+d}, trace = {fmt(w)}, "
              f"phase graph {'connected' if b.connected else 'disconnected'}")
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = load(args.problem, args.n)
    phi0 = parse_phi0(args.phi0)
    try:
        poms, report = optmeas.solve(problem, phi0, tol_scale=args.tol_scale)
    except (optmeas.Phi0Error, optmeas.ConditionError, cxmat.MatrixError,
            ArithmeticError) as exc:
        raise CliError(EXIT_CONSTRUCTION, f"construction failed: {exc}") from exc
    if args.out:
        try:
            problemfile.dump_report(report, poms, args.out)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    print(fmt(report.p_error))
    return EXIT_OK


def cmd_certify(args) -> int:
    problem = load(args.problem, args.n)
    poms = None
    if args.inject_perturbation:
        poms, _ = optmeas.solve(problem)
        for i, fam in enumerate(problem.blocks):
            if fam.dim >= 2:
                poms[i] = oracle.perturb_pom(fam, poms[i], oracle.NEGATIVE_CONTROL_SCALE)
                break
    try:
        result = oracle.certify(problem, args.grid_steps, poms, args.tol_scale)
    except (optmeas.ConditionError, cxmat.MatrixError, ArithmeticError) as exc:
        raise CliError(EXIT_CONSTRUCTION, f"construction failed: {exc}") from exc
    rep = result.report
    rows = [
        ("p_error", rep.p_error, ""),
        ("pairwise_residual", rep.pairwise_residual, f"<= {optmeas.PAIRWISE_TOL * rep.tol_scale:g}"),
        ("global_min_eigenvalue", rep.global_min_eigenvalue, f">= {-optmeas.GLOBAL_TOL * rep.tol_scale:g}"),
        ("completeness_residual", rep.completeness_residual, f"<= {optmeas.COMPLETENESS_TOL * rep.tol_scale:g}"),
        ("pom_positivity_min", rep.pom_positivity_min, f">= {-optmeas.POSITIVITY_FLOOR * rep.tol_scale:g}"),
        ("hermiticity_residual", rep.hermiticity_residual, f"<= {optmeas.HERMITIAN_TOL * rep.tol_scale:g}"),
        ("oracle_p_error", result.oracle_p_error, ""),
        ("oracle_gap", result.gap, f"<= {result.tolerance:g}"),
    ]
    for name, value, bound in rows:
        print(f"{name:<24}{value: .6e}  {bound}")
    if not rep.certifying:
        print("tol-scale != 1: report is non-certifying")
    status = "CERTIFIED" if result.certified else "NOT CERTIFIED"
    print(status)
    return EXIT_OK if result.certified else EXIT_CERTIFY


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def cmd_simulate(args) -> int:
    problem = load(args.problem, args.n)
    if args.shots < 1:
        raise CliError(EXIT_PARSE, "--shots must be >= 1")
    seed = args.seed if args.seed is not None else default_seed()
    try:
        poms, _ = optmeas.solve(problem)
        res = oracle.simulate(problem, poms, args.shots, seed)
    except ValueError as exc:
        print(f"FAIL: {exc}")
        return EXIT_SIMULATE
    print(f"empirical {fmt(res.empirical_error_rate)}")
    print(f"analytic  {fmt(res.analytic_p_error)}")
    print(f"sigma     {fmt(res.sigma)}")
    print("PASS" if res.passed else "FAIL")
    return EXIT_OK if res.passed else EXIT_SIMULATE


def cmd_gallery(args) -> int:
    try:
        problem = gallery.build(args.id, args.n)
    except gallery.GalleryError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    text = json.dumps(problemfile.problem_to_dict(problem), indent=1) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdisc",
        description="Optimal minimum-error measurement for symmetric mixed-state ensembles.",
        epilog=TOLERANCES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, epilog=TOLERANCES,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    def problem_args(p):
        p.add_argument("problem", help="problem file, or gallery id ex1/ex2/ex3")
        p.add_argument("--n", type=int, default=None, help="N for gallery ex1 (default 3)")

    p = add("validate", cmd_validate, "check a problem file")
    problem_args(p)

    p = add("solve", cmd_solve, "construct the optimal POM and print P_error")
    problem_args(p)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--phi0", default="canonical",
                   help="'canonical' (default), 'uniform', or a JSON vector")
    p.add_argument("--tol-scale", type=float, default=1.0)

    p = add("certify", cmd_certify, "check optimality conditions and compare to the search oracle")
    problem_args(p)
    p.add_argument("--grid-steps", type=int, default=oracle.DEFAULT_GRID_STEPS)
    p.add_argument("--tol-scale", type=float, default=1.0)
    p.add_argument("--inject-perturbation", action="store_true", help=argparse.SUPPRESS)

    p = add("simulate", cmd_simulate, "Monte Carlo check of the error rate")
    problem_args(p)
    p.add_argument("--shots", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")

    p = add("gallery", cmd_gallery, "write a gallery example as a problem file")
    p.add_argument("id", help="ex1, ex2 or ex3")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
