"""Command-line front door.

Subcommands: ``compute`` (cone Betti numbers and semi-characteristic of a
model), ``verify`` (mod-2 zero counting against a census), ``clifford``
(algebraic identity checks), ``oscillator`` (model operator kernel,
spectrum scaling and eta scaling for a coefficient matrix), ``suite``
(the ten builtin acceptance criteria).

Exit codes: 0 success, 1 assertion or verdict failure, 2 invalid input.
The arithmetic mode defaults to the SYMSEMI_MODE environment variable
("exact" unless set otherwise); ``--mode`` wins over the environment.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from random import Random
from time import perf_counter

from .census import MissingSigns, OddDimension, counting_check, \
    euler_cross_check
from .cliffordlab import (EXACT_DIM_LIMIT, FLOAT_DIM_LIMIT, BadDimension,
                          NoRationalRoot, NotUnit, Singular,
                          TruncationTooSmall, UnexpectedKernel, eta_scaling,
                          kernel_and_parity, model_L,
                          random_rational_unit_vector, spectrum_scaling,
                          verify_car, verify_complex_structure,
                          verify_volume_omega, verify_volume_star)
from .complexes import (ChainMapViolation, InvalidComplex, betti, cone,
                        euler_characteristic, semi_characteristic)
from .models import JacobiViolation, NotClosed, ShapeMismatch, UnknownName
from .modelio import (FormatError, format_rational, load_census,
                      load_matrix_rows, load_model)
from .qlinalg import NotSkewSymmetric
from .report import (CliffordReport, ComputeReport, OscillatorReport,
                     VerifyReport, spectrum_table)
from .suite import criteria_names, run_all

PASS, FAIL, USAGE = 0, 1, 2

_USAGE_ERRORS = (FormatError, OSError, UnknownName, NotClosed,
                 JacobiViolation, ShapeMismatch, InvalidComplex,
                 ChainMapViolation, BadDimension, Singular, NoRationalRoot,
                 NotUnit, NotSkewSymmetric, OddDimension, MissingSigns,
                 TruncationTooSmall, ValueError)


def _resolve_mode(args) -> str:
    mode = getattr(args, "mode", None) \
        or os.environ.get("SYMSEMI_MODE", "exact")
    if mode not in ("exact", "float"):
        raise FormatError(
            f"mode must be \"exact\" or \"float\", got {mode!r}")
    return mode


def _emit(report, args, out=None):
    out = out if out is not None else sys.stdout
    text = report.to_json() if args.format == "json" else report.to_text()
    if getattr(args, "out", None):
        with open(args.out, "w") as handle:
            handle.write(text)
        print(f"wrote report to {args.out}", file=out)
    else:
        out.write(text)


def _symplectic_dict(verdict) -> dict:
    return {"closed": verdict.closed,
            "nondegenerate": verdict.nondegenerate,
            "degree_ok": verdict.degree_ok,
            "detail": verdict.detail}


def cmd_compute(args) -> int:
    start = perf_counter()
    if args.p < 0:
        raise FormatError("--p must be >= 0")
    loaded = load_model(args.model)
    verdict = loaded.symplectic_verdict()
    warnings = []
    if not verdict.passed:
        degenerate_only = verdict.closed and verdict.degree_ok
        if args.allow_degenerate and degenerate_only:
            warnings.append("nondegeneracy waived by --allow-degenerate")
        else:
            extra = f": {verdict.detail}" if verdict.detail else ""
            print(f"error: symplectic check failed for {args.model}{extra}",
                  file=sys.stderr)
            return USAGE
    cn = cone(loaded.complex, loaded.omega_map, p=args.p)
    b = betti(cn)
    chi = euler_characteristic(b)
    k = semi_characteristic(b)
    report = ComputeReport(
        model=loaded.identity(),
        p=args.p,
        betti=tuple(b),
        euler_characteristic=chi,
        semi_characteristic=k,
        applicable=loaded.manifold_dim % 4 == 0,
        palindromic=tuple(b) == tuple(reversed(b)),
        symplectic=_symplectic_dict(verdict),
        omega=loaded.omega_terms(),
        warnings=tuple(warnings),
        elapsed=perf_counter() - start,
    )
    _emit(report, args)
    if chi != 0:
        print(f"internal invariant breach: cone Euler characteristic "
              f"{chi} != 0", file=sys.stderr)
        return FAIL
    return PASS


def cmd_verify(args) -> int:
    start = perf_counter()
    loaded = load_model(args.model)
    census = load_census(args.census)
    cn = cone(loaded.complex, loaded.omega_map)
    k = semi_characteristic(betti(cn))
    manifold_b = betti(loaded.complex)
    manifold_chi = euler_characteristic(manifold_b)
    verdict = counting_check(k, census, loaded.manifold_dim)
    warnings = []
    try:
        euler = euler_cross_check(census, manifold_chi)
        euler_dict = {"passed": euler.passed,
                      "signed_sum": euler.signed_sum,
                      "expected": euler.expected,
                      "detail": euler.detail}
    except MissingSigns as exc:
        euler_dict = {"skipped": str(exc)}
    if verdict.status == "not_applicable":
        warnings.append("counting statement not applicable: "
                        + verdict.detail)
    report = VerifyReport(
        model=loaded.identity(),
        semi_characteristic=k,
        manifold_euler=manifold_chi,
        census={"source": census.source,
                "nonvanishing": census.nonvanishing,
                "zero_count": census.count(),
                "signs": [z.det_sign for z in census.zeros]},
        counting={"status": verdict.status,
                  "semi_characteristic": verdict.semi_characteristic,
                  "zero_count": verdict.zero_count,
                  "parity_match": verdict.parity_match,
                  "detail": verdict.detail},
        euler=euler_dict,
        warnings=tuple(warnings),
        elapsed=perf_counter() - start,
    )
    _emit(report, args)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return PASS if report.passed else FAIL


_CLIFFORD_CHECKS = ("car", "star", "omega", "complex-structure")


def cmd_clifford(args) -> int:
    start = perf_counter()
    mode = _resolve_mode(args)
    m = 4 * args.n
    if args.n < 1:
        raise FormatError("--n must be >= 1")
    if m > FLOAT_DIM_LIMIT:
        raise FormatError(
            f"dimension 4n = {m} exceeds the float-mode limit "
            f"{FLOAT_DIM_LIMIT}")
    if mode == "exact" and m > EXACT_DIM_LIMIT:
        raise FormatError(
            f"dimension 4n = {m} exceeds the exact-mode limit "
            f"{EXACT_DIM_LIMIT}; rerun with --mode float")
    wanted = []
    for name in args.checks.split(","):
        name = name.strip()
        if name == "all":
            wanted = list(_CLIFFORD_CHECKS)
            break
        if name not in _CLIFFORD_CHECKS:
            raise FormatError(
                f"unknown check {name!r}; choose from "
                f"{', '.join(_CLIFFORD_CHECKS + ('all',))}")
        if name not in wanted:
            wanted.append(name)
    verdicts = []
    for name in wanted:
        if name == "car":
            verdicts.append(verify_car(m, mode))
        elif name == "star":
            verdicts.append(verify_volume_star(m, mode))
        elif name == "omega":
            verdicts.append(verify_volume_omega(m, mode))
        else:
            canonical = [Fraction(3, 5), Fraction(4, 5)] \
                + [Fraction(0)] * (m - 2)
            rng = Random(0)
            vectors = [canonical] + [random_rational_unit_vector(m, rng)
                                     for _ in range(5)]
            verdicts += [verify_complex_structure(v, mode) for v in vectors]
    identities = tuple(
        {"name": v.name, "passed": v.passed,
         "max_residual": v.max_residual, "detail": v.detail}
        for v in verdicts)
    passed = all(v.passed for v in verdicts)
    report = CliffordReport(args.n, m, mode, identities, passed,
                            perf_counter() - start)
    _emit(report, args)
    return PASS if passed else FAIL


def cmd_oscillator(args) -> int:
    start = perf_counter()
    mode = _resolve_mode(args)
    rows = load_matrix_rows(args.matrix)
    ts = tuple(args.T) if args.T else (Fraction(1), Fraction(4), Fraction(16))
    if args.degree_cap < 2:
        raise FormatError("--degree-cap must be >= 2 (spectrum window)")
    op = model_L(rows, ts[0], mode)
    ker_dim, parity = kernel_and_parity(op)
    parity_ok = parity == (0 if op.det_sign > 0 else 1)
    spec = spectrum_scaling(rows, ts, cap=args.degree_cap, mode=mode)
    eta = eta_scaling(rows, ts, mode=mode)
    exact = op.mode == "exact"
    passed = (ker_dim == 1 and parity_ok and spec.passed and eta.passed)
    report = OscillatorReport(
        matrix={"source": args.matrix, "size": op.m,
                "det_sign": "+" if op.det_sign > 0 else "-",
                "mode": op.mode},
        Ts=tuple(format_rational(t) for t in ts),
        degree_cap=args.degree_cap,
        kernel_dimension=ker_dim,
        parity="even" if parity == 0 else "odd",
        parity_matches_det=parity_ok,
        spectrum={"passed": spec.passed,
                  "table": spectrum_table(spec.spectrum),
                  "gap": round(spec.gap, 9),
                  "max_deviation": spec.max_deviation,
                  "detail": spec.detail},
        eta={"passed": eta.passed,
             "c1": eta.c1,
             "c1_squared": tuple(
                 format_rational(v) if exact else f"{float(v):.12g}"
                 for v in eta.c1_squared_list),
             "constant": eta.constant,
             "source_vanished": eta.source_vanished,
             "orthogonal": eta.orthogonal,
             "detail": eta.detail},
        passed=passed,
        elapsed=perf_counter() - start,
    )
    _emit(report, args)
    return PASS if passed else FAIL


def cmd_suite(args) -> int:
    if args.list:
        for line in criteria_names():
            print(line)
        return PASS
    results = run_all(emit=print)
    failed = [r for r in results if not r.passed]
    total = sum(r.elapsed for r in results)
    print(f"suite: {len(results) - len(failed)}/{len(results)} criteria "
          f"passed in {total:.1f} s")
    return PASS if not failed else FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symsemi",
        description="Exact semi-characteristic engine: mapping cones, "
                    "mod-2 zero counting, Clifford identities, and the "
                    "finite model operator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_output(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write the report to this path")

    p = sub.add_parser("compute",
                       help="cone Betti numbers and semi-characteristic")
    p.add_argument("model", help="model file or builtin:<name>")
    p.add_argument("--p", type=int, default=0,
                   help="cone parameter: pair degrees k and k-2p-1")
    p.add_argument("--allow-degenerate", action="store_true",
                   help="skip the nondegeneracy requirement")
    common_output(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify",
                       help="check the mod-2 zero count against a census")
    p.add_argument("model", help="model file or builtin:<name>")
    p.add_argument("--census", required=True, help="census JSON file")
    common_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("clifford", help="algebraic identity checks")
    p.add_argument("--n", type=int, default=1,
                   help="quarter dimension: operators act on R^(4n) forms")
    p.add_argument("--checks", default="all",
                   help="comma list from car, star, omega, "
                        "complex-structure, all")
    p.add_argument("--mode", choices=("exact", "float"))
    common_output(p)
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("oscillator",
                       help="model operator checks for a coefficient matrix")
    p.add_argument("--matrix", required=True,
                   help="text file with rows of rationals")
    p.add_argument("--T", action="append", type=Fraction,
                   help="coupling (repeatable; default 1, 4, 16)")
    p.add_argument("--degree-cap", type=int, default=2,
                   help="polynomial degree window for the spectrum")
    p.add_argument("--mode", choices=("exact", "float"))
    common_output(p)
    p.set_defaults(func=cmd_oscillator)

    p = sub.add_parser("suite", help="run the builtin acceptance criteria")
    p.add_argument("--list", action="store_true",
                   help="list criteria without running them")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else PASS
    try:
        return args.func(args)
    except UnexpectedKernel as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return FAIL
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
