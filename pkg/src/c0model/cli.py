"""Command-line front end.

Exit status: 0 on success, 1 when a verified property fails (the failing
case is printed as JSON), 2 on invalid input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import serialize as io
from .calculus import jordan_model
from .corona import bezout_solve
from .equivalence import (
    hankel_distance,
    irreducibility_check,
    maximality_report,
    sarason_norm,
    similarity_synthesize,
    unitary_from_maximality,
)
from .errors import C0Error, CyclicSearchFailed, IllConditioned, InvalidInput, PropertyViolation
from .modelspace import jordan_block
from .report import SWEEP_COLUMNS, emit_report, render_table
from .verify import PROPERTIES, ExperimentConfig

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

# numerical failures count as violated properties, everything else as bad input
_VIOLATIONS = (PropertyViolation, IllConditioned, CyclicSearchFailed)


def _emit(obj, out) -> None:
    text = io.dumps(obj)
    if out:
        io.save(obj, out)
    else:
        print(text)


def _cmd_jordan_block(args):
    theta = io.load(args.theta, "blaschke")
    _emit(jordan_block(theta), args.out)
    return EXIT_OK


def _cmd_model(args):
    op = io.load(args.op, "operator")
    _emit(jordan_model(op), args.out)
    return EXIT_OK


def _cmd_sarason(args):
    theta = io.load(args.theta, "blaschke")
    u = io.load(args.symbol, "symbol")
    value = sarason_norm(u, theta)
    print(io.format_float(value))
    if args.oracle:
        print(io.format_float(hankel_distance(u, theta)))
    return EXIT_OK


def _cmd_bezout(args):
    t1 = io.load(args.theta1, "blaschke")
    t2 = io.load(args.theta2, "blaschke")
    _emit(bezout_solve(t1, t2), args.out)
    return EXIT_OK


def _cmd_maximality(args):
    op = io.load(args.op, "operator")
    theta = io.load(args.theta, "blaschke") if args.theta else None
    report = maximality_report(op, theta)
    rows = [
        {"zero": e.zero, "norm": e.opnorm, "sigma2": e.sigma2, "cyclic": e.cyclic} for e in report.entries
    ]
    sys.stdout.write(render_table(rows))
    if args.out:
        io.save(report, args.out)
    return EXIT_OK


def _cmd_unitary(args):
    op = io.load(args.op, "operator")
    _emit(io.matrix_to_dict(unitary_from_maximality(op)), args.out)
    return EXIT_OK


def _cmd_similarity(args):
    t1 = io.load(args.op1, "operator")
    t2 = io.load(args.op2, "operator")
    cert = similarity_synthesize(
        t1, t2, args.beta, args.beta_prime, seed=args.seed, check_operators=args.check_hypotheses
    )
    _emit(cert, args.out)
    if args.report:
        row = dict(zip(SWEEP_COLUMNS, (t1.n, cert.beta, cert.beta_prime, cert.norm_x, cert.norm_xinv, cert.residual)))
        emit_report([row], args.report, sweep=[row])
    return EXIT_OK


def _cmd_irreducible(args):
    op = io.load(args.op, "operator")
    res = irreducibility_check(op, seed=args.seed)
    doc = {
        "irreducible": res.irreducible,
        "commutantDim": res.commutant_dim,
        "reducingDim": res.reducing_dim,
        "witness": None if res.witness is None else io.matrix_to_dict(res.witness),
        "witnessResidual": res.witness_residual,
        "hasIdempotent": res.has_idempotent,
    }
    _emit(doc, args.out)
    return EXIT_OK


def _parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError
            out[name] = float(value)
        except ValueError:
            raise InvalidInput(f"--tol expects NAME=VALUE, got {item!r}") from None
    return out


def _cmd_verify(args):
    config = ExperimentConfig(
        seed=args.seed,
        trials=args.trials,
        max_degree=args.max_degree,
        tolerances=_parse_tolerances(args.tol),
        output=args.report,
        properties=tuple(args.property) if args.property else None,
    )
    result = config.run()
    sys.stdout.write(render_table(result.rows))
    if config.output:
        meta = {"seed": config.seed, "trials": config.trials, "maxDegree": config.max_degree,
                "tolerances": config.tolerances}
        rows = result.rows + ([{"failure": result.failure}] if result.failure else [])
        emit_report(rows, config.output, sweep=result.sweep, meta=meta)
    if result.failure is not None:
        print("FAILED " + result.failure["property"] + ": " + result.failure["reason"], file=sys.stderr)
        print(io.dumps(result.failure))
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="c0model", description="Finite Jordan blocks, model spaces and similarity certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("jordan-block", _cmd_jordan_block, "matrix of S(theta) in the Takenaka-Malmquist basis")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--out")

    sp = add("model", _cmd_model, "Jordan model of a contraction")
    sp.add_argument("--op", required=True)
    sp.add_argument("--out")

    sp = add("sarason", _cmd_sarason, "norm of u(S(theta)), the distance from u to theta H-infinity")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--symbol", required=True, help="rational or Blaschke record")
    sp.add_argument("--oracle", action="store_true", help="also print the Hankel-matrix value")

    sp = add("bezout", _cmd_bezout, "solve theta1 u1 + theta2 u2 = 1")
    sp.add_argument("--theta1", required=True)
    sp.add_argument("--theta2", required=True)
    sp.add_argument("--out")

    sp = add("maximality", _cmd_maximality, "norms of psi(T) over big divisors psi")
    sp.add_argument("--op", required=True)
    sp.add_argument("--theta", help="expected minimal function")
    sp.add_argument("--out", help="write the full report as JSON")

    sp = add("unitary", _cmd_unitary, "unitary W with W T = S(theta) W")
    sp.add_argument("--op", required=True)
    sp.add_argument("--out")

    sp = add("similarity", _cmd_similarity, "similarity certificate between two contractions")
    sp.add_argument("--op1", required=True)
    sp.add_argument("--op2", required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--beta-prime", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--check-hypotheses", action="store_true")
    sp.add_argument("--out")
    sp.add_argument("--report", help="prefix for JSON/TXT/CSV report files")

    sp = add("irreducible", _cmd_irreducible, "irreducibility of the commutant")
    sp.add_argument("--op", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = add("verify", _cmd_verify, "run the randomized property suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--max-degree", type=int, default=12)
    sp.add_argument("--property", action="append", choices=sorted(PROPERTIES))
    sp.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check limit")
    sp.add_argument("--report", help="prefix for JSON/TXT/CSV report files")
    return p


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except _VIOLATIONS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        case = getattr(exc, "case", None)
        if case is not None:
            print(io.dumps(case))
        return EXIT_VIOLATION
    except C0Error as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


def main() -> None:
    sys.exit(run_command())
