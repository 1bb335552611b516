"""JSON problem and report files.

Complex numbers are stored as ``[re, im]`` pairs and matrices as row lists of
such pairs.  A problem file looks like::

    {"version": 1, "n": 3,
     "blocks": [{"sign": -1, "r": [[[re, im], ...], ...], "rho0": [...]}]}
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .optmeas import OptimalityReport, Pom
from .symstates import DirectSumProblem, FamilyError, as_problem, make_family

FORMAT_VERSION = 1


class ProblemFormatError(ValueError):
    """The file is not a well-formed problem file (syntax or schema)."""


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj, name: str = "matrix") -> np.ndarray:
    try:
        arr = np.array(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{name}: not a numeric [re, im] matrix") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] == 0:
        raise ProblemFormatError(f"{name}: expected rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def problem_to_dict(problem) -> dict:
    problem = as_problem(problem)
    return {
        "version": FORMAT_VERSION,
        "n": problem.n,
        "blocks": [{"sign": b.sym.sign,
                    "r": encode_matrix(b.sym.matrix),
                    "rho0": encode_matrix(b.rho0)} for b in problem.blocks],
    }


def parse_problem(data: dict) -> dict:
    """Schema check; returns ``{"n": int, "blocks": [(sign, r, rho0), ...]}``."""
    if not isinstance(data, dict):
        raise ProblemFormatError("top level must be an object")
    if data.get("version") != FORMAT_VERSION:
        raise ProblemFormatError(f"unsupported version {data.get('version')!r}")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFormatError(f"n must be a positive integer, got {n!r}")
    blocks = data.get("blocks")
    if not isinstance(blocks, list) or not blocks:
        raise ProblemFormatError("blocks must be a non-empty list")
    out = []
    for i, b in enumerate(blocks):
        if not isinstance(b, dict):
            raise ProblemFormatError(f"block {i} must be an object")
        sign = b.get("sign")
        if sign not in (1, -1) or isinstance(sign, bool):
            raise ProblemFormatError(f"block {i}: sign must be +1 or -1, got {sign!r}")
        out.append((sign, decode_matrix(b.get("r"), f"block {i} r"),
                    decode_matrix(b.get("rho0"), f"block {i} rho0")))
    return {"n": n, "blocks": out}


def build_problem(parsed: dict) -> DirectSumProblem:
    """Validate every block; raises :class:`FamilyError` on the first failure."""
    fams = []
    for i, (sign, r, rho0) in enumerate(parsed["blocks"]):
        weight = float(np.trace(rho0).real)
        try:
            fams.append(make_family(r, rho0, parsed["n"], sign, weight=weight))
        except FamilyError as exc:
            raise type(exc)(f"block {i}: {exc}", exc.invariant) from exc
    return DirectSumProblem(tuple(fams))


def load_problem(path) -> DirectSumProblem:
    """Read and validate a problem file.

    Raises ``OSError`` (unreadable), :class:`ProblemFormatError` (bad JSON or
    schema) or :class:`FamilyError` (invalid ensemble).
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return build_problem(parse_problem(data))


def dump_problem(problem, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=1) + "\n")


def report_to_dict(report: OptimalityReport, poms: list[Pom]) -> dict:
    per_block = []
    for pom, blk in zip(poms, report.blocks):
        res = asdict(blk)
        per_block.append({"pom": [encode_matrix(e) for e in pom],
                          "residuals": res})
    return {
        "p_error": report.p_error,
        "per_block": per_block,
        "conditions": {
            "pairwise_residual": report.pairwise_residual,
            "global_min_eigenvalue": report.global_min_eigenvalue,
            "completeness_residual": report.completeness_residual,
            "pom_positivity_min": report.pom_positivity_min,
            "hermiticity_residual": report.hermiticity_residual,
        },
        "optimal": report.optimal,
        "certifying": report.certifying,
        "tol_scale": report.tol_scale,
        "phase_graph_connected": report.phase_graph_connected,
        "tool_version": __version__,
    }


def dump_report(report: OptimalityReport, poms, path) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report, poms), indent=1) + "\n")
