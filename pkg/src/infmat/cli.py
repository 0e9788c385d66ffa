"""Command-line front end.

Loads JSON matrix / system / family specs, runs the mapped library
operation under a truncation schedule and convergence policy, and writes
a deterministic report document: sorted keys, floats rendered with 17
significant digits, so identical inputs give byte-identical output.

Exit status contract: 0 converged/success, 2 undetermined, 1 error /
diverged / precondition failure.  The environment variable
INFMAT_MAX_SIZE caps the schedule size globally.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from .algebra import matmul
from .bases_orth import transition_matrix, orthogonalize, OrthogonalRows
from .determinant import det_infinite, det_oracle
from .errors import (CertificateError, ConvergenceFailureError,
                     DependentRowsError, ExtentMismatchError,
                     GramConvergenceError, InfmatError, OracleValueError,
                     PreconditionError, SchemaError, SingularSystemError)
from .expr_dsl import EvalError, ParseError
from .inverse_solve import (check_compatibility, cramer_solve, neumann_inverse,
                            rank_of, solve_via_inverse)
from .matrix_core import (DenseMatrix, TruncationSchedule, is_finite_extent,
                          truncate)
from .series import ConvergencePolicy, ConvergenceReport
from .spectral import find_eigenvalues
from .specio import load_family_file, load_matrix_file, load_system_file

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDETERMINED = 2

_STATUS_EXIT = {"converged": EXIT_OK, "undetermined": EXIT_UNDETERMINED,
                "diverged": EXIT_ERROR}

_ERROR_CODES = [
    (ParseError, "parse-error"),
    (EvalError, "eval-error"),
    (SchemaError, "schema-error"),
    (PreconditionError, "precondition-error"),
    (ExtentMismatchError, "extent-mismatch"),
    (SingularSystemError, "singular-system"),
    (DependentRowsError, "dependent-rows"),
    (GramConvergenceError, "divergence"),
    (OracleValueError, "oracle-error"),
    (ConvergenceFailureError, "series-cap"),
    (CertificateError, "certificate-error"),
    (InfmatError, "error"),
]


# ---------------------------------------------------------------------------
# deterministic rendering

def _render(value, indent=0):
    pad = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return f"{v:.17g}"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f'{pad}  {json.dumps(str(k))}: {_render(v, indent + 1)}'
                for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        items = list(value)
        if not items:
            return "[]"
        if all(isinstance(x, (int, float, np.integer, np.floating)) for x in items):
            return "[" + ", ".join(_render(x) for x in items) + "]"
        rows = [f"{pad}  {_render(x, indent + 1)}" for x in items]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise TypeError(f"cannot render {type(value)!r}")


def render_document(doc) -> str:
    return _render(doc) + "\n"


def render_csv(matrix: DenseMatrix) -> str:
    lines = []
    for row in matrix.data:
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _report_doc(rep: ConvergenceReport) -> dict:
    return {"estimate": rep.estimate, "status": rep.status,
            "terms_used": rep.terms_used, "last_delta": rep.last_delta,
            "certified": rep.certified}


def _matrix_doc(dm: DenseMatrix) -> list:
    return [list(map(float, row)) for row in dm.data]


# ---------------------------------------------------------------------------
# argument plumbing

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="infmat",
        description="operations on finite and infinite matrices defined by "
                    "JSON specs")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--window", type=int, default=3)
    common.add_argument("--max-terms", type=int, default=100_000)
    common.add_argument("--start", type=int, default=8)
    common.add_argument("--growth", type=int, default=2)
    common.add_argument("--max-size", type=int, default=1024)
    common.add_argument("--output", default=None, help="report path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--quiet", action="store_true",
                        help="suppress per-schedule-step log lines")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("det", parents=[common], help="determinant of a square spec")
    p.add_argument("matrix")

    p = sub.add_parser("inv", parents=[common], help="inverse via the power series")
    p.add_argument("matrix")
    p.add_argument("--n", type=int, default=8, help="exported section size")

    p = sub.add_parser("mul", parents=[common], help="product of two specs")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--n", type=int, default=8, help="exported section size")

    p = sub.add_parser("solve", parents=[common], help="solve A x = b")
    p.add_argument("system")
    p.add_argument("--wanted", default=None,
                   help="comma-separated unknown indices (overrides the file)")
    p.add_argument("--route", choices=("cramer", "inverse"), default="cramer")
    p.add_argument("--check-compat", action="store_true",
                   help="also run the rank-comparison compatibility check")

    p = sub.add_parser("rank", parents=[common], help="stabilized rank")
    p.add_argument("matrix")

    p = sub.add_parser("eig", parents=[common], help="eigenvalues in an interval")
    p.add_argument("matrix")
    p.add_argument("--interval", nargs=2, type=float, required=True,
                   metavar=("LO", "HI"))
    p.add_argument("--max-roots", type=int, default=32)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--n", type=int, default=8, help="entries of each eigenvector shown")

    p = sub.add_parser("orth", parents=[common], help="row orthogonalization")
    p.add_argument("matrix")
    p.add_argument("--n", type=int, default=8,
                   help="exported section width for infinite columns")

    p = sub.add_parser("transition", parents=[common],
                       help="coordinates of one basis in another")
    p.add_argument("basis")
    p.add_argument("basis_prime")
    p.add_argument("--n", type=int, required=True, help="number of coordinates")

    p = sub.add_parser("truncate", parents=[common], help="materialize a section")
    p.add_argument("matrix")
    p.add_argument("--n", type=int, default=None, help="section size")
    return parser


def _resolve(args):
    policy = ConvergencePolicy(tol=args.tol, window=args.window,
                               max_terms=args.max_terms)
    max_size = args.max_size
    env_cap = os.environ.get("INFMAT_MAX_SIZE")
    if env_cap:
        max_size = min(max_size, int(env_cap))
    schedule = TruncationSchedule(start=args.start, growth=args.growth,
                                  max_size=max_size)
    config = {"tol": policy.tol, "window": policy.window,
              "max_terms": policy.max_terms, "start": schedule.start,
              "growth": schedule.growth, "max_size": schedule.max_size,
              "format": args.format}
    return policy, schedule, config


def _worst_status(statuses):
    for status in ("diverged", "undetermined"):
        if status in statuses:
            return status
    return "converged"


# ---------------------------------------------------------------------------
# command handlers: each returns (document, primary dense block or None, exit)

def _cmd_det(args, policy, schedule, config):
    spec = load_matrix_file(args.matrix)
    config["inputs"] = [args.matrix]
    if is_finite_extent(spec.rows) and is_finite_extent(spec.cols):
        if not spec.is_square:
            raise ExtentMismatchError("determinant of a non-square matrix")
        value = det_oracle(truncate(spec, spec.rows, spec.cols))
        result = {"value": value, "route": "lu-oracle"}
        return result, None, EXIT_OK
    rep = det_infinite(spec, schedule, policy)
    result = {"value": rep.value, "route": rep.route,
              "report": _report_doc(rep.report)}
    return result, None, _STATUS_EXIT[rep.report.status]


def _cmd_inv(args, policy, schedule, config):
    spec = load_matrix_file(args.matrix)
    config["inputs"] = [args.matrix]
    config["n"] = args.n
    rep = neumann_inverse(spec, policy, schedule)
    if isinstance(rep.matrix, DenseMatrix):
        section = rep.matrix
        result = {"matrix": _matrix_doc(section), "norm_check": rep.norm_check,
                  "series_terms": rep.series_terms, "residual": rep.residual}
        return result, section, EXIT_OK
    section, block_rep = rep.block_report(args.n, args.n)
    result = {"matrix": _matrix_doc(section), "norm_check": rep.norm_check,
              "series_terms": rep.series_terms, "residual": rep.residual,
              "block_report": _report_doc(block_rep)}
    return result, section, _STATUS_EXIT[block_rep.status]


def _cmd_mul(args, policy, schedule, config):
    left = load_matrix_file(args.left)
    right = load_matrix_file(args.right)
    config["inputs"] = [args.left, args.right]
    config["n"] = args.n
    product = matmul(left, right, policy)
    reports = {f"{i},{j}": _report_doc(rep)
               for (i, j), rep in product.per_entry_reports.items()}
    result = {"overall_status": product.overall_status,
              "per_entry_reports": reports}
    section = None
    if isinstance(product.matrix, DenseMatrix):
        section = product.matrix
        result["matrix"] = _matrix_doc(section)
    elif product.overall_status != "failed":
        m = args.n if not is_finite_extent(product.matrix.rows) \
            else min(args.n, product.matrix.rows)
        n = args.n if not is_finite_extent(product.matrix.cols) \
            else min(args.n, product.matrix.cols)
        section = truncate(product.matrix, m, n)
        result["matrix"] = _matrix_doc(section)
    exit_code = {"converged": EXIT_OK, "partial": EXIT_UNDETERMINED,
                 "failed": EXIT_ERROR}[product.overall_status]
    return result, section, exit_code


def _cmd_solve(args, policy, schedule, config):
    A, b, wanted = load_system_file(args.system)
    if args.wanted:
        try:
            wanted = [int(w) for w in args.wanted.split(",")]
        except ValueError as exc:
            raise SchemaError(f"--wanted must be comma-separated integers "
                              f"({args.wanted!r})") from exc
        if any(w < 1 for w in wanted):
            raise SchemaError("--wanted indices must be >= 1")
    config["inputs"] = [args.system]
    config["wanted"] = wanted
    config["route"] = args.route
    if args.route == "cramer":
        rep = cramer_solve(A, b, wanted, schedule, policy)
    else:
        rep = solve_via_inverse(A, b, policy, schedule, wanted=wanted)
    unknowns = {str(i): _report_doc(r) for i, r in rep.unknowns.items()}
    result = {"route": rep.route, "unknowns": unknowns,
              "residual": rep.residual}
    if rep.trace_reports is not None:
        result["trace_condition"] = {str(k): _report_doc(v)
                                     for k, v in rep.trace_reports.items()}
    if args.check_compat:
        compat = check_compatibility(A, b, schedule, policy)
        result["compatibility"] = {
            "verdict": compat.verdict,
            "rank_A": _report_doc(compat.rank_A),
            "rank_Ab": _report_doc(compat.rank_Ab)}
    status = _worst_status({r.status for r in rep.unknowns.values()} or {"converged"})
    return result, None, _STATUS_EXIT[status]


def _cmd_rank(args, policy, schedule, config):
    spec = load_matrix_file(args.matrix)
    config["inputs"] = [args.matrix]
    rep = rank_of(spec, schedule, policy)
    return {"rank": _report_doc(rep)}, None, _STATUS_EXIT[rep.status]


def _cmd_eig(args, policy, schedule, config):
    spec = load_matrix_file(args.matrix)
    config["inputs"] = [args.matrix]
    config["interval"] = list(args.interval)
    pairs = find_eigenvalues(spec, tuple(args.interval), schedule, policy,
                             max_roots=args.max_roots, grid_points=args.grid)
    roots = []
    for pair in pairs:
        shown = min(args.n, pair.vector.extent)
        roots.append({"lambda": pair.lam,
                      "char_residual": pair.char_residual,
                      "vec_residual": pair.vec_residual,
                      "stable": pair.stable,
                      "vector": [pair.vector.at(i) for i in range(1, shown + 1)]})
    result = {"roots": roots, "count": len(roots)}
    exit_code = EXIT_OK if all(p.stable for p in pairs) else EXIT_UNDETERMINED
    return result, None, exit_code


def _cmd_orth(args, policy, schedule, config):
    spec = load_matrix_file(args.matrix)
    config["inputs"] = [args.matrix]
    rep = orthogonalize(spec, policy)
    result = {"G": _matrix_doc(rep.G), "gram": _matrix_doc(rep.gram),
              "max_offdiag_dot": rep.max_offdiag_dot}
    if isinstance(rep.A_prime, OrthogonalRows):
        section = rep.A_prime.section(args.n)
        result["A_prime"] = {
            "coefficients": _matrix_doc(DenseMatrix(rep.A_prime.coefficients)),
            "section": _matrix_doc(section)}
    else:
        section = rep.A_prime
        result["A_prime"] = _matrix_doc(section)
    return result, section, EXIT_OK


def _cmd_transition(args, policy, schedule, config):
    B = load_family_file(args.basis)
    Bp = load_family_file(args.basis_prime)
    config["inputs"] = [args.basis, args.basis_prime]
    config["n"] = args.n
    res = transition_matrix(B, Bp, args.n, schedule, policy)
    result = {"matrix": _matrix_doc(res.matrix),
              "column_status": {str(i): s for i, s in res.column_status.items()}}
    ok = all(s == "converged" for s in res.column_status.values())
    return result, res.matrix, EXIT_OK if ok else EXIT_UNDETERMINED


def _cmd_truncate(args, policy, schedule, config):
    spec = load_matrix_file(args.matrix)
    config["inputs"] = [args.matrix]
    if args.n is None:
        if not (is_finite_extent(spec.rows) and is_finite_extent(spec.cols)):
            raise ExtentMismatchError("--n is required for an infinite spec")
        m, n = spec.rows, spec.cols
    else:
        m = args.n if not is_finite_extent(spec.rows) else min(args.n, spec.rows)
        n = args.n if not is_finite_extent(spec.cols) else min(args.n, spec.cols)
    config["n"] = args.n
    section = truncate(spec, m, n)
    return {"matrix": _matrix_doc(section), "rows": m, "cols": n}, section, EXIT_OK


_HANDLERS = {"det": _cmd_det, "inv": _cmd_inv, "mul": _cmd_mul,
             "solve": _cmd_solve, "rank": _cmd_rank, "eig": _cmd_eig,
             "orth": _cmd_orth, "transition": _cmd_transition,
             "truncate": _cmd_truncate}


def _error_code(exc) -> str:
    for klass, code in _ERROR_CODES:
        if isinstance(exc, klass):
            return code
    return "error"


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(message)s")
    if args.quiet:
        logging.getLogger("infmat").setLevel(logging.WARNING)
    try:
        policy, schedule, config = _resolve(args)
        config["command"] = args.command
        result, block, exit_code = _HANDLERS[args.command](args, policy,
                                                           schedule, config)
    except (InfmatError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        doc = {"error": {"code": _error_code(exc), "message": str(exc)}}
        if isinstance(exc, ParseError):
            doc["error"]["position"] = exc.position
        if isinstance(exc, PreconditionError) and exc.measured is not None:
            doc["error"]["measured"] = exc.measured
        if isinstance(exc, (FileNotFoundError, IsADirectoryError)):
            doc["error"]["code"] = "io-error"
        elif isinstance(exc, ValueError) and not isinstance(exc, InfmatError):
            doc["error"]["code"] = "config-error"
        _write(render_document(doc), getattr(args, "output", None))
        return EXIT_ERROR

    if args.format == "csv":
        if block is None:
            doc = {"error": {"code": "format-error",
                             "message": f"{args.command} has no dense block to "
                                        "export as csv"}}
            _write(render_document(doc), args.output)
            return EXIT_ERROR
        _write(render_csv(block), args.output)
        return exit_code

    doc = {"command": args.command, "config": config, "result": result,
           "status": {EXIT_OK: "ok", EXIT_UNDETERMINED: "undetermined",
                      EXIT_ERROR: "failed"}[exit_code]}
    _write(render_document(doc), args.output)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
