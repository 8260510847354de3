"""Command-line front end: eigenvalues, function tables, oracle comparisons, coefficient dumps.

Exit codes: 0 ok, 2 usage, 3 domain/admissibility, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .approx import Anchoring, Evaluator, RegimePartition
from .eigensystem import (SpectralState, alpha_of_sigma, as_mode, coefficient_table,
                          eigenvalue_oracle, solve_sigma)
from .errors import AdmissibilityError, ConvergenceError, DomainError, OverflowRangeError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def fmt(v):
    """Shortest round-trip float text; empty for missing values."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Writer:
    def __init__(self, stream, fields, form):
        self.stream, self.fields, self.form = stream, fields, form
        if form == "csv":
            self._csv = csv.writer(stream, lineterminator="\n")
            self._csv.writerow(fields)

    def row(self, rec):
        if self.form == "csv":
            self._csv.writerow([fmt(rec.get(f)) for f in self.fields])
        else:
            out = {f: rec.get(f) for f in self.fields}
            self.stream.write(json.dumps(out, allow_nan=True) + "\n")

    def footer(self, rec):
        if self.form == "csv":
            self.stream.write("# " + " ".join(f"{k}={fmt(v)}" for k, v in rec.items()) + "\n")
        else:
            self.stream.write(json.dumps({"summary": rec}, allow_nan=True) + "\n")


def parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be a:b:count, got {text!r}")
    try:
        a, b, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"malformed grid {text!r}") from exc
    if count < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"malformed grid {text!r}")
    if count == 1:
        return [a]
    return [a + (b - a) * i / (count - 1) for i in range(count)]


def _points(args):
    if (args.x is None) == (args.grid is None):
        raise UsageError("give exactly one of --x or --grid")
    xs = [args.x] if args.x is not None else parse_grid(args.grid)
    for x in xs:
        if args.kind == "angular" and not -1.0 < x < 1.0:
            raise UsageError(f"angular functions need -1 < x < 1 (got x={x})")
        if args.kind == "radial" and not x > 1.0:
            raise UsageError(f"radial functions need x > 1 (got x={x})")
    return xs


def _partition(args):
    try:
        return RegimePartition(delta=args.delta, delta0=args.delta0, sigma0=args.sigma0)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _evaluator(args):
    return Evaluator((args.m, args.n), args.gamma, partition=_partition(args),
                     anchoring=Anchoring(args.anchoring))


def _method(args):
    if args.method:
        return args.method
    return "uniform" if args.kind == "angular" else "bessel"


def _record(res):
    finite = math.isfinite(res.value)
    return {"x": res.x, "value": res.value if finite else None, "log_magnitude": res.log_magnitude,
            "sign": res.sign, "regime": res.regime.value, "err_estimate": res.err_estimate}


# ---------------------------------------------------------------------------
# commands

def cmd_eigen(args, out):
    mode = as_mode((args.m, args.n))
    fields = ["method", "lambda", "sigma", "alpha", "diagnostic"]
    w = Writer(out, fields, args.format)
    g = args.gamma
    methods = ["oracle", "asymptotic"] if args.method == "both" else [args.method]
    for method in methods:
        if method == "oracle":
            lam = eigenvalue_oracle(mode, g, trunc=args.trunc, tol=min(args.tol * 100, 1e-10))
            if g > 0:
                try:
                    st = SpectralState.from_lambda(g, lam)
                    sigma, alpha = st.sigma, st.alpha
                except AdmissibilityError:
                    sigma = alpha = math.nan
            else:
                sigma = alpha = math.nan
        else:
            sigma = solve_sigma(mode, g, args.delta)
            lam = -g * g * (1.0 - sigma * sigma)
            alpha = alpha_of_sigma(sigma)
        diag = lam + g * g - (2 * (mode.n - mode.m) + 1) * g
        w.row({"method": method, "lambda": float(lam), "sigma": float(sigma),
               "alpha": float(alpha), "diagnostic": float(diag)})


def cmd_eval(args, out):
    xs = _points(args)
    ev = _evaluator(args)
    method = _method(args)
    w = Writer(out, ["x", "value", "log_magnitude", "sign", "regime", "err_estimate"], args.format)
    for x in xs:
        res = ev.angular(x, method) if args.kind == "angular" else ev.radial(x, method)
        w.row(_record(res))


def cmd_compare(args, out):
    from .oracle import angular_series, radial_series
    xs = _points(args)
    ev = _evaluator(args)
    method = _method(args)
    fields = ["x", "value", "log_magnitude", "sign", "regime", "err_estimate",
              "oracle", "abs_err", "rel_err"]
    w = Writer(out, fields, args.format)
    max_rel = 0.0
    max_ratio = 0.0
    for x in xs:
        res = ev.angular(x, method) if args.kind == "angular" else ev.radial(x, method)
        ref = (angular_series if args.kind == "angular" else radial_series)(ev.mode, args.gamma, x).value
        rec = _record(res)
        abs_err = abs(res.value - ref)
        # relative to the local envelope amplitude, so zeros do not blow it up
        rel = abs_err / res.scale if res.scale > 0 else (0.0 if abs_err == 0 else math.inf)
        rec.update(oracle=ref, abs_err=abs_err, rel_err=rel)
        max_rel = max(max_rel, rel)
        if res.err_estimate > 0:
            max_ratio = max(max_ratio, abs_err / res.err_estimate)
        w.row(rec)
    w.footer({"max_rel_err": max_rel, "max_err_over_estimate": max_ratio, "points": len(xs)})


def cmd_coeffs(args, out):
    from .oracle import boundary_K, mp_table, norm_A_mp
    mode = as_mode((args.m, args.n))
    tab = coefficient_table(mode, args.gamma, trunc=args.trunc, tol=min(args.tol * 100, 1e-10))
    w = Writer(out, ["k", "l", "a"], args.format)
    for k in range(-mode.k_plus, tab.k_max + 1):
        a = tab[k]
        if a != 0.0:
            w.row({"k": k, "l": mode.n + 2 * k, "a": float(a)})
    mt = mp_table(mode, args.gamma)
    A = float(norm_A_mp(mt))
    K = boundary_K(mode, args.gamma)
    w.footer({"A": A, "K": K})


# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delta", type=float, default=0.05, help="admissibility margin (default 0.05)")
    common.add_argument("--delta0", type=float, default=None, help="angular regime split (default 0.25(1-sigma0))")
    common.add_argument("--sigma0", type=float, default=0.9, help="cap on sigma (default 0.9)")
    common.add_argument("--tol", type=float, default=1e-12, help="oracle tolerance (default 1e-12)")
    common.add_argument("--trunc", type=int, default=None, help="recurrence truncation (default auto)")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    mode_args = argparse.ArgumentParser(add_help=False)
    mode_args.add_argument("--m", type=int, required=True)
    mode_args.add_argument("--n", type=int, required=True)
    mode_args.add_argument("--gamma", type=float, required=True)

    parser = argparse.ArgumentParser(prog="prolate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", parents=[common, mode_args], help="separation constant lambda")
    p.add_argument("--method", choices=("oracle", "asymptotic", "both"), default="oracle")
    p.set_defaults(func=cmd_eigen)

    for name, func, helptext in (("eval", cmd_eval, "asymptotic function values"),
                                 ("compare", cmd_compare, "asymptotic values against the series oracle")):
        p = sub.add_parser(name, parents=[common, mode_args], help=helptext)
        p.add_argument("--kind", choices=("angular", "radial"), required=True)
        p.add_argument("--x", type=float, default=None)
        p.add_argument("--grid", default=None, help="a:b:count")
        p.add_argument("--method", choices=("uniform", "fixedn", "bessel", "lg"), default=None)
        p.add_argument("--anchoring", choices=("oracle", "asymptotic"), default="oracle")
        p.set_defaults(func=func)

    p = sub.add_parser("coeffs", parents=[common, mode_args], help="expansion coefficients a_{n,k}")
    p.set_defaults(func=cmd_coeffs)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.gamma < 0:
            raise UsageError("gamma must be non-negative")
        if args.command in ("eval", "compare"):
            bad = ({"bessel", "lg"} if args.kind == "angular" else {"uniform", "fixedn"})
            if args.method in bad:
                raise UsageError(f"method {args.method!r} does not apply to {args.kind} functions")
        as_mode((args.m, args.n))
        args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AdmissibilityError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, OverflowRangeError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main_entry():
    sys.exit(main())
