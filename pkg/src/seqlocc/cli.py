"""Command-line workbench.

Subcommands: classify, theta, discriminate, verify, synth. Matrix operands
are JSON files (or "-" for standard input); results print to standard
output unless --out redirects them. Exit codes: 0 ok, 2 input error,
3 indistinguishable pair, 4 construction failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io as sio
from .arcs import eigenphase_rows, parallel_query_count, smallest_arc
from .config import RunConfig
from .engine import discriminate, verify_scheme
from .errors import (
    CaseFailure,
    GeneratorPrimitive,
    Indistinguishable,
    SeqloccError,
    SynthesisFailed,
)
from .linalg import dagger, mat, phase_distance
from .structure import classify_primitive, operator_schmidt
from .synthesis import synthesize
from .templates import dumps_template

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INDISTINGUISHABLE = 3
EXIT_CONSTRUCTION = 4


def _read_matrix(path: str, tol: float):
    if path == "-":
        return sio.loads_matrix(sys.stdin.read(), tol)
    return sio.load_matrix_file(path, tol)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        unitarity_tol=args.tol_unitarity,
        distinct_tol=args.tol_distinct,
        overlap_tol=args.tol_overlap,
        epsilon=args.tol_epsilon,
        rank_tol=args.tol_rank,
        tol_angle=args.tol_angle,
        seed=args.seed,
        restarts=args.restarts,
        k_max=args.k_max,
        max_depth=args.max_depth,
        out=args.out,
        csv=getattr(args, "csv", None),
    )


def _add_common(parser: argparse.ArgumentParser):
    cfg = RunConfig()
    parser.add_argument("--tol-unitarity", type=float, default=cfg.unitarity_tol)
    parser.add_argument("--tol-distinct", type=float, default=cfg.distinct_tol)
    parser.add_argument("--tol-overlap", type=float, default=cfg.overlap_tol)
    parser.add_argument("--tol-epsilon", type=float, default=cfg.epsilon)
    parser.add_argument("--tol-rank", type=float, default=cfg.rank_tol)
    parser.add_argument("--tol-angle", type=float, default=cfg.tol_angle)
    parser.add_argument("--seed", type=int, default=cfg.seed)
    parser.add_argument("--restarts", type=int, default=cfg.restarts)
    parser.add_argument("--k-max", type=int, default=cfg.k_max)
    parser.add_argument("--max-depth", type=int, default=cfg.max_depth)
    parser.add_argument("--out", default=None, help="write the result here instead of stdout")


def cmd_classify(args) -> int:
    cfg = _config_from_args(args)
    U = _read_matrix(args.matrix, cfg.unitarity_tol)
    form = classify_primitive(U, cfg.rank_tol)
    dec = operator_schmidt(U)
    lines = [f"kind: {form.kind}", f"residual: {form.residual:.3e}"]
    coeffs = ", ".join(f"{c:.12g}" for c in dec.coefficients)
    lines.append(f"schmidt_coefficients: [{coeffs}]")
    if form.kind != "Imprimitive":
        lines.append("factor_a:")
        lines.extend("  " + "  ".join(f"{z.real:+.12g}{z.imag:+.12g}j" for z in row)
                     for row in form.factor_a)
        lines.append("factor_b:")
        lines.extend("  " + "  ".join(f"{z.real:+.12g}{z.imag:+.12g}j" for z in row)
                     for row in form.factor_b)
    else:
        lines.append(f"witness_second_coefficient: {form.witness_coefficient:.6g}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_theta(args) -> int:
    cfg = _config_from_args(args)
    U = _read_matrix(args.matrix, cfg.unitarity_tol)
    if args.matrix2 is not None:
        V = _read_matrix(args.matrix2, cfg.unitarity_tol)
        if (U.d_a, U.d_b) != (V.d_a, V.d_b):
            raise SeqloccError(
                f"dimension mismatch: ({U.d_a}, {U.d_b}) vs ({V.d_a}, {V.d_b})")
        W = dagger(U) @ mat(V)
        distinct = phase_distance(U.matrix, V.matrix) > cfg.distinct_tol
    else:
        W = U.matrix
        distinct = smallest_arc(W, cfg.tol_angle).theta > cfg.tol_angle
    info = smallest_arc(W, cfg.tol_angle)
    lines = [
        f"theta: {info.theta!r}",
        f"arc_start: {info.start_phase!r}",
        f"arc_end: {info.end_phase!r}",
        f"single_query_distinguishable: {info.theta >= np.pi - cfg.tol_angle}",
    ]
    if distinct and info.theta > cfg.tol_angle:
        n = max(1, int(np.ceil(np.pi / info.theta - 1e-12)))
        lines.append(f"parallel_query_count: {n}")
    else:
        lines.append("parallel_query_count: inf (operations phase-equivalent)")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(sio.eigenphase_csv(eigenphase_rows(W, cfg.tol_angle)))
        lines.append(f"eigenphases_csv: {args.csv}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_discriminate(args) -> int:
    cfg = _config_from_args(args)
    U = _read_matrix(args.matrix_u, cfg.unitarity_tol)
    V = _read_matrix(args.matrix_v, cfg.unitarity_tol)
    scheme, report = discriminate(U, V, cfg)
    _emit(sio.dumps_scheme(scheme, report) + "\n", args.out)
    summary = (f"case_trace: {'/'.join(scheme.case_trace)}\n"
               f"query_count: {report.query_count}\n"
               f"overlap: {report.overlap:.6e}\n"
               f"budget: {scheme.budget:.6e}\n"
               f"verified: {'pass' if report.passed else 'FAIL'}")
    print(summary, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CONSTRUCTION


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    scheme = sio.load_scheme_file(args.scheme)
    U = _read_matrix(args.matrix_u, cfg.unitarity_tol)
    V = _read_matrix(args.matrix_v, cfg.unitarity_tol)
    report = verify_scheme(scheme, U, V)
    lines = [
        f"overlap: {report.overlap:.6e}",
        f"budget: {scheme.budget:.6e}",
        f"query_count: {report.query_count}",
        f"verified: {'pass' if report.passed else 'FAIL'}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_CONSTRUCTION


def cmd_synth(args) -> int:
    cfg = _config_from_args(args)
    target = _read_matrix(args.target, cfg.unitarity_tol)
    generator = _read_matrix(args.generator, cfg.unitarity_tol)
    result = synthesize(target, generator, cfg)
    _emit(dumps_template(result.template) + "\n", args.out)
    print(f"query_count: {result.template.query_count}\ndelta: {result.delta:.6e}",
          file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqlocc",
        description="Construct and verify sequential LOCC discrimination "
                    "schemes for bipartite unitary operations (no inverses "
                    "of the unknown operation are ever applied).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="primitivity classification of one operator")
    p.add_argument("matrix")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("theta", help="smallest eigenphase arc (of W, or of U^dag V)")
    p.add_argument("matrix")
    p.add_argument("matrix2", nargs="?", default=None)
    p.add_argument("--csv", default=None, help="write eigenphase rows here")
    _add_common(p)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("discriminate", help="build a scheme for a pair of operators")
    p.add_argument("matrix_u")
    p.add_argument("matrix_v")
    _add_common(p)
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("verify", help="re-verify a scheme file against a pair")
    p.add_argument("scheme")
    p.add_argument("matrix_u")
    p.add_argument("matrix_v")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="compile a template for a target from a generator")
    p.add_argument("target")
    p.add_argument("generator")
    _add_common(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Indistinguishable as exc:
        print(f"indistinguishable: {exc}", file=sys.stderr)
        return EXIT_INDISTINGUISHABLE
    except (SynthesisFailed, GeneratorPrimitive, CaseFailure) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (SeqloccError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
