"""Command line interface.

Exit codes of ``convert``: 0 success, 2 dominant-eigenvalue condition failed,
3 positive-density condition failed, 4 numeric failure (ill conditioning or
order limits), 1 unreadable or malformed input.  Failures print one
machine-parseable line ``error: <kind>: <detail>`` on stderr.
"""

import argparse
import json
import sys

import numpy as np

from .config import DEFAULT_TOL
from .errors import DecViolationError, Me2PhError, PositiveDensityError
from .io import read_me_file, read_ph_file, sniff_format, write_ph_file
from .pipeline import PaperBounds, convert
from .spectral import analyze_spectrum, check_dec
from .tail import phrep_pdf
from .validate import check_equivalence, check_markovian, check_positive_density, monte_carlo_check

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEC = 2
EXIT_DENSITY = 3
EXIT_NUMERIC = 4


def _fail(kind: str, detail: str, code: int) -> int:
    sys.stderr.write(f"error: {kind}: {detail}\n")
    return code


def _load_me(path):
    try:
        return read_me_file(path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise _CliInputError(str(exc)) from exc


class _CliInputError(Exception):
    pass


def cmd_convert(args) -> int:
    try:
        rep, tol = _load_me(args.input)
    except _CliInputError as exc:
        return _fail("input", str(exc), EXIT_INPUT)
    if args.tol is not None:
        tol = tol.replace(equivalence_rel=args.tol)
    try:
        ph, report = convert(
            rep,
            tol,
            paper_bounds=PaperBounds() if args.paper_bounds else None,
            max_order=args.max_order,
        )
    except DecViolationError as exc:
        return _fail("dec-violation", f"dominant eigenvalue condition violated: {exc.diagnostic}", EXIT_DEC)
    except PositiveDensityError as exc:
        return _fail("positive-density", str(exc), EXIT_DENSITY)
    except Me2PhError as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)
    write_ph_file(ph, args.output)
    for line in report.lines():
        print(line)
    if report.bounds is not None:
        b = report.bounds
        print("bounds: " + json.dumps({
            "tau": b.tau, "g": b.g, "gamma_norm": b.gamma_norm,
            "eps1": b.eps1, "eps2": b.eps2,
            "lambda_prime": b.lambda_prime, "lambda_dprime": b.lambda_dprime,
            "lambda": b.rate, "n": b.n,
        }))
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        kind = sniff_format(args.input)
        if kind == "me":
            rep, tol = read_me_file(args.input)
            obj = rep
        else:
            obj = read_ph_file(args.input)
            tol = DEFAULT_TOL
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail("input", str(exc), EXIT_INPUT)
    if args.tol is not None:
        tol = tol.replace(equivalence_rel=args.tol)

    verdict: dict = {}
    try:
        verdict["markovian"] = bool(check_markovian(obj, tol).ok)
        if kind == "me":
            spec = analyze_spectrum(obj, tol)
            verdict["dec"] = bool(check_dec(spec, tol).ok)
            verdict["positive_density"] = bool(check_positive_density(obj, spec, tol).ok)
        else:
            # structural: every block either carries the leading rate or has
            # its own dominant eigenvalue strictly below it; a Markovian
            # representation with reachable states has positive density
            lam1 = obj.lambda1
            dominant_ok = all(
                (b.degenerate and abs(b.sigma - lam1) <= 1e-12 * lam1)
                or b.r < -lam1 * (1 - 1e-12)
                for b in obj.blocks
            )
            verdict["dec"] = bool(dominant_ok)
            verdict["positive_density"] = bool(verdict["markovian"])
        if args.against is not None:
            other_kind = sniff_format(args.against)
            other = read_me_file(args.against)[0] if other_kind == "me" else read_ph_file(args.against)
            eq = check_equivalence(other, obj, rel_tol=args.tol or 1e-5, tol=tol)
            verdict["equivalence"] = {
                "max_rel_error": eq.max_rel_error,
                "moments_rel_error": eq.moments_rel_error,
                "pass": bool(eq.ok),
            }
        if args.monte_carlo:
            if kind != "ph":
                return _fail("input", "monte carlo check needs a structured file", EXIT_INPUT)
            ks = monte_carlo_check(obj, samples=args.monte_carlo, seed=args.seed)
            verdict["monte_carlo"] = {"ks": ks, "samples": args.monte_carlo, "seed": args.seed}
    except Me2PhError as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)
    print(json.dumps(verdict))
    return EXIT_OK


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:count, got {spec!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1 or stop < start or start < 0:
        raise ValueError(f"bad grid {spec!r}")
    return np.linspace(start, stop, count)


def cmd_pdf(args) -> int:
    try:
        grid = _parse_grid(args.grid)
        kind = sniff_format(args.input)
        if kind == "me":
            rep, _tol = read_me_file(args.input)
            from .core import pdf_eval_many

            vals = pdf_eval_many(rep, grid)
        else:
            ph = read_ph_file(args.input)
            vals = np.asarray(phrep_pdf(ph, grid))
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail("input", str(exc), EXIT_INPUT)
    except Me2PhError as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)
    print("x,f")
    for x, f in zip(grid, vals):
        print(f"{float(x)!r},{float(f)!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="me2ph",
        description="Convert matrix-exponential representations to Markovian phase type.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", help="run the construction end to end")
    c.add_argument("input")
    c.add_argument("output")
    c.add_argument("--paper-bounds", action="store_true",
                   help="substitute the published rounded constants of the bundled "
                        "regression example for the computed bounds")
    c.add_argument("--tol", type=float, default=None, help="equivalence tolerance override")
    c.add_argument("--seed", type=int, default=0, help="seed for sampling-based checks")
    c.add_argument("--max-order", type=int, default=10_000_000,
                   help="abort if the final order would exceed this")
    c.set_defaults(func=cmd_convert)

    v = sub.add_parser("validate", help="check a representation file")
    v.add_argument("input")
    v.add_argument("--against", default=None, help="second file for an equivalence check")
    v.add_argument("--monte-carlo", type=int, default=0, metavar="SAMPLES",
                   help="also simulate absorption times and report the KS statistic")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("pdf", help="print density values as CSV")
    g.add_argument("input")
    g.add_argument("--grid", required=True, help="start:stop:count")
    g.set_defaults(func=cmd_pdf)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
