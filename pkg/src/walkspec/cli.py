"""Command-line front end: ``walkspec <command> ...``.

Every command prints one JSON document (``search`` prints JSON lines) that
carries a ``"schema"`` field.  Exit codes: 0 success, 2 invalid input,
3 refusal (ambiguous lattice), 4 failed verification, 5 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import __version__
from ._numeric import DEFAULT_PRECISION
from .asymptotics import PLAIN, ALTERNATING, expansion, symbolic_A, verify_expansion
from .errors import Biased, NumericalFailure, Refusal, ValidationError
from .moment_map import iter_search, morse_certificate
from .muller_tables import muller_tables, rows_for_n
from .puiseux import (BranchPair, PuiseuxSeries, gamma_branches, gamma_branches_at_zero,
                      gamma_diff_at_infinity, gamma_diff_at_zero)
from .reconstruct import (guarantee, guarantee_for_shape, reconstruct_e1, reconstruct_from_branches,
                          reconstruct_from_diff)
from .spectrum import Spectrum, isospectral_through, return_probabilities, simulate
from .walk_core import load_json, reindex, shape_from_json

EXIT_OK, EXIT_VALIDATION, EXIT_REFUSAL, EXIT_VERIFY, EXIT_NUMERIC = 0, 2, 3, 4, 5
MIN_PRECISION = 64
DEFAULT_GRID = "50,100,200,400,800"


class VerificationFailed(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return load_json(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc.msg}") from None


def _shape(path: str):
    return shape_from_json(_read_json(path))


def _grid(text: str) -> List[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad grid {text!r}") from None


# -- commands --------------------------------------------------------------------------

def cmd_spectrum(args):
    shape = _shape(args.shape)
    if args.compare:
        other = _shape(args.compare)
        cmp_ = isospectral_through(shape, other, args.n)
        return {"schema": "walkspec.comparison/1", "equal": cmp_.equal, "n_checked": cmp_.n_checked,
                "first_difference": cmp_.first_difference, "message": cmp_.describe()}
    return return_probabilities(shape, args.n).to_json()


def cmd_simulate(args):
    shape = _shape(args.shape)
    return simulate(shape, args.n, args.samples, args.seed, args.method, args.threads).to_json()


def cmd_asymptotics(args):
    shape = _shape(args.shape)
    mode = ALTERNATING if args.tilde else PLAIN
    if not args.verify:
        exp_ = expansion(shape, args.m, mode, args.precision)
        out = exp_.to_json()
        out["symbolic_A"] = [str(p) for p in symbolic_A(args.m, mode)]
        return out
    if not shape.unbiased:
        raise Biased(f"mean step is {shape.mean}; the expansion is for unbiased shapes")
    report = verify_expansion(shape, args.m, _grid(args.grid), args.precision, args.tilde, args.threads)
    out = report.to_json()
    if not report.passed:
        raise VerificationFailed(out)
    return out


def cmd_verify(args):
    args.verify = True
    return cmd_asymptotics(args)


def cmd_series(args):
    shape = _shape(args.shape)
    if args.at == "zero":
        if args.branches:
            pair = gamma_branches_at_zero(shape, args.order, args.precision)
            return pair.to_json()
        return gamma_diff_at_zero(shape, args.order, args.precision).to_json()
    if args.branches:
        return gamma_branches(shape, args.order, args.precision).to_json()
    return gamma_diff_at_infinity(shape, args.order, args.precision).to_json()


def _kappa0(args):
    if args.kappa0 is None:
        raise ValidationError("--kappa0 (the value I_1) is required for series input")
    try:
        return Fraction(args.kappa0)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad --kappa0 {args.kappa0!r}") from None


def cmd_reconstruct(args):
    data = _read_json(args.input)
    schema = data.get("schema") if isinstance(data, dict) else None
    if schema == "walkspec.spectrum/1":
        if args.e not in (None, 1):
            raise ValidationError("reconstruction from a spectrum needs e = 1")
        if args.f is None:
            raise ValidationError("-f is required")
        shape = reconstruct_e1(Spectrum.from_json(data), args.f, args.precision)
    elif schema == "walkspec.series/1":
        if args.e is None or args.f is None:
            raise ValidationError("-e and -f are required for a difference series")
        diff = PuiseuxSeries.from_json(data)
        shape = reconstruct_from_diff(diff, args.e, args.f, _kappa0(args), args.precision)
    elif schema == "walkspec.branches/1":
        pair = BranchPair(PuiseuxSeries.from_json(data["gamma_plus"]),
                          PuiseuxSeries.from_json(data["gamma_minus"]))
        shape = reconstruct_from_branches(pair, _kappa0(args), args.precision)
    else:
        raise ValidationError(f"unrecognized input schema {schema!r}")
    return {
        "schema": "walkspec.reconstruction/1",
        "shape": shape.to_json()["coeffs"],
        "reflection": reindex(shape, -1).to_json()["coeffs"],
        "note": "the shape and its reflection t -> 1/t are equivalent and share the spectrum",
        "guarantee": guarantee_for_shape(shape).to_json(),
    }


def cmd_guarantee(args):
    return guarantee(args.e, args.f).to_json()


def cmd_search(args, out):
    blocks = iter_search(args.e, args.f, args.moments, args.denominators, not args.biased,
                         not args.keep_rescalings, args.max_cells, args.cursor)
    for block, hits in blocks:
        line = {"schema": "walkspec.search/1", "cursor": block, "next_cursor": block + 1,
                "pairs": [[h.first.to_json()["coeffs"], h.second.to_json()["coeffs"]] for h in hits]}
        out.write(json.dumps(line) + "\n")
    return None


def cmd_certify(args):
    return morse_certificate(_shape(args.shape), args.precision, args.method).to_json()


def cmd_tables(args):
    rows = [(r, None) for r in muller_tables()] if args.n is None else rows_for_n(args.n, not args.literal)
    return {"schema": "walkspec.tables/1", "n": args.n,
            "rows": [dict(r.to_json(), **({"parameters": p} if p is not None else {})) for r, p in rows]}


# -- plumbing ---------------------------------------------------------------------------

def _precision_default() -> int:
    raw = os.environ.get("WALKSPEC_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        return -1  # rejected after parsing with a proper error


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=_precision_default(),
                        help="working precision in bits (env WALKSPEC_PRECISION, default 256)")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="walkspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="exact return probabilities")
    p.add_argument("shape")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("--compare", metavar="SHAPE", help="compare spectra with another shape")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo return probabilities")
    p.add_argument("shape")
    p.add_argument("-n", type=int, default=4)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("frequency", "s_statistic"), default="frequency")
    p.set_defaults(func=cmd_simulate)

    for name in ("asymptotics", "verify"):
        p = sub.add_parser(name, parents=[common], help="large-s expansion of the Poissonized spectrum")
        p.add_argument("shape")
        p.add_argument("-m", type=int, default=1)
        p.add_argument("--grid", default=DEFAULT_GRID, help="comma separated increasing s values")
        p.add_argument("--tilde", action="store_true", help="use the real-exponential integral")
        if name == "asymptotics":
            p.add_argument("--verify", action="store_true")
            p.set_defaults(func=cmd_asymptotics)
        else:
            p.set_defaults(func=cmd_verify)

    p = sub.add_parser("series", parents=[common], help="Puiseux branches of the reciprocal derivative")
    p.add_argument("shape")
    p.add_argument("--at", choices=("infinity", "zero"), default="infinity")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--branches", action="store_true", help="print both branches instead of the difference")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("reconstruct", parents=[common], help="shape from a spectrum or series file")
    p.add_argument("input")
    p.add_argument("-e", type=int)
    p.add_argument("-f", type=int)
    p.add_argument("--kappa0", help="I_1, needed for series input")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("guarantee", parents=[common], help="which uniqueness statement covers (e, f)")
    p.add_argument("-e", type=int, required=True)
    p.add_argument("-f", type=int, required=True)
    p.set_defaults(func=cmd_guarantee)

    p = sub.add_parser("search", parents=[common], help="brute-force isospectral search (JSON lines)")
    p.add_argument("-e", type=int, required=True)
    p.add_argument("-f", type=int, required=True)
    p.add_argument("--moments", "-N", type=int, default=6)
    p.add_argument("--denominators", type=int, default=6)
    p.add_argument("--biased", action="store_true", help="include biased shapes")
    p.add_argument("--keep-rescalings", action="store_true", help="do not filter rational rescalings")
    p.add_argument("--max-cells", type=int, default=2_000_000)
    p.add_argument("--cursor", type=int, default=2, help="first grid block to report")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("certify", parents=[common], help="transposition certificate")
    p.add_argument("shape")
    p.add_argument("--method", choices=("exact", "numeric"), default="exact")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("tables", parents=[common], help="primitive groups with a two-cycle element")
    p.add_argument("-n", type=int)
    p.add_argument("--literal", action="store_true", help="only rows whose n is a number, not a family")
    p.set_defaults(func=cmd_tables)
    return parser


def _table(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            # prose entries get a line each, numbers share one
            if any(" " in str(v) for v in obj):
                return "\n".join(pad + str(v) for v in obj)
            return pad + "  ".join(str(v) for v in obj)
        return "\n".join(_table(v, indent) + ("\n" + pad + "-" if i < len(obj) - 1 else "")
                         for i, v in enumerate(obj))
    return f"{pad}{obj}"


def _emit(obj, fmt: str, out) -> None:
    if fmt == "table":
        out.write(_table(obj) + "\n")
    else:
        out.write(json.dumps(obj, indent=2) + "\n")


def _error(exc: BaseException) -> dict:
    return {"schema": "walkspec.error/1", "error": type(exc).__name__, "message": str(exc)}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.precision < MIN_PRECISION:
            raise ValidationError(f"precision must be at least {MIN_PRECISION} bits")
        if args.threads < 1:
            raise ValidationError("--threads must be positive")
        if args.command == "search":
            cmd_search(args, out)
            return EXIT_OK
        result = args.func(args)
    except VerificationFailed as exc:
        _emit(exc.payload, args.format, out)
        return EXIT_VERIFY
    except ValidationError as exc:
        _emit(_error(exc), args.format, out)
        return EXIT_VALIDATION
    except Refusal as exc:
        _emit(_error(exc), args.format, out)
        return EXIT_REFUSAL
    except NumericalFailure as exc:
        _emit(_error(exc), args.format, out)
        return EXIT_NUMERIC
    _emit(result, args.format, out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
