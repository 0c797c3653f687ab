"""Command-line access to the families and the validation suite.

Examples
--------
    varfam eval eps_gaussian --params lam=1 eps=1 --m 0.5 --u 1
    varfam moments wall --params q=0.5 --m-grid 0.2:0.8:4
    varfam coeffs sqrt --lambda 1 --n 10
    varfam free meixner --a 2 --b 0
    varfam free cumulants --series 1,1/2,0 --order 8
    varfam positivity sqrt --lambda 1 --n-max 60
    varfam validate --out report.json --csv report.csv
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from ..classical import first_negative_index, moment_report
from ..errors import VarfamError
from ..freefam import free_cumulants, free_meixner
from ..measures import VarianceSpec
from .registry import COEFFICIENT_GENERATORS, FAMILIES, get_family
from .validate import GridSpec, _encode, _fmt_float, emit_csv, emit_json, parse_m_grid, run_suite


def _number(text: str):
    """``int``, ``Fraction`` for ``p/q`` input, else ``float``."""
    if "/" in text:
        return Fraction(text)
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_params(items: Optional[Sequence[str]]) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"parameter {item!r} is not of the form key=value")
        v = _number(value)
        out[key] = float(v) if isinstance(v, Fraction) else v
    return out


def _print_json(obj) -> None:
    sys.stdout.write(_encode(obj, 2, 0) + "\n")


def cmd_eval(args) -> int:
    entry = get_family(args.family)
    params = entry.params(_parse_params(args.params))
    value = entry.weight(**params, m=args.m, u=args.u)
    print(_fmt_float(float(value)))
    return 0


def cmd_moments(args) -> int:
    entry = get_family(args.family)
    params = entry.params(_parse_params(args.params))
    if args.m_grid:
        lo, hi, n = parse_m_grid(args.m_grid)
        means = entry.m_grid(params, n, lo, hi)
    else:
        means = entry.m_grid(params)
    rows = []
    for m in means:
        member = entry.build(**params, m=m)
        rep = moment_report(member, tol=args.tol)
        rows.append({"m": m, "mass": rep.mass, "mean": rep.mean, "variance": rep.variance, "target_variance": member.variance})
    if args.json:
        _print_json({"family": args.family, "params": params, "moments": rows})
    else:
        print("m,mass,mean,variance,target_variance")
        for r in rows:
            print(",".join(_fmt_float(float(r[k])) for k in ("m", "mass", "mean", "variance", "target_variance")))
    return 0


def cmd_coeffs(args) -> int:
    phi = COEFFICIENT_GENERATORS[args.generator]
    print("n,phi_n")
    for n in range(args.n + 1):
        print(f"{n},{_fmt_float(phi(args.lam, n))}")
    return 0


def cmd_free_meixner(args) -> int:
    law = free_meixner(args.a, args.b)
    lo, hi = law.ac_support
    k = args.samples
    us = [lo + (hi - lo) * (i + 1) / (k + 1) for i in range(k)]
    _print_json(
        {
            "a": args.a,
            "b": args.b,
            "ac_support": list(law.ac_support),
            "atoms": [{"location": u, "mass": p} for u, p in law.atoms],
            "ac_mass": law.ac_mass(),
            "total_mass": law.total_mass(),
            "density": [{"u": u, "value": law.density(u)} for u in us],
        }
    )
    return 0


def cmd_free_cumulants(args) -> int:
    coeffs = [_number(c.strip()) for c in args.series.split(",") if c.strip()]
    if not args.truncated:
        # a finite list is a polynomial: pad with exact zeros
        coeffs += [0] * max(0, args.order - 1 - len(coeffs))
    spec = VarianceSpec.from_series(coeffs)
    seq = free_cumulants(spec, args.order)
    print("n,k_n")
    for n in sorted(seq.k):
        print(f"{n},{seq.k[n]}")
    return 0


def cmd_positivity(args) -> int:
    phi = COEFFICIENT_GENERATORS[args.family]
    n = first_negative_index(lambda j: phi(args.lam, j), args.n_max)
    print("none" if n is None else n)
    return 0


def cmd_validate(args) -> int:
    if args.grid:
        with open(args.grid) as fh:
            grid = GridSpec.from_dict(json.load(fh))
    else:
        grid = GridSpec.default()
    report = run_suite(grid, jobs=args.jobs)
    text = emit_json(report, timing=args.timing)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(emit_csv(report))
    if args.out != "-":
        status = "PASS" if report.passed else "FAIL"
        print(f"{status}: {len(report.families)} family grids, {len(report.counterexamples)} counterexamples -> {args.out}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varfam", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a family weight W(m, u)")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--params", nargs="*", metavar="K=V")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("moments", help="mass, mean and variance on an m-grid")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--params", nargs="*", metavar="K=V")
    p.add_argument("--m-grid", metavar="LO:HI:N")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("coeffs", help="table of the coefficients phi_n(lambda)")
    p.add_argument("generator", choices=sorted(COEFFICIENT_GENERATORS))
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("free", help="free-Meixner laws and free cumulants")
    fsub = p.add_subparsers(dest="free_command", required=True)
    q = fsub.add_parser("meixner", help="density samples and atoms")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--samples", type=int, default=21)
    q.set_defaults(func=cmd_free_meixner)
    q = fsub.add_parser("cumulants", help="free cumulants from the Taylor series of V")
    q.add_argument("--series", required=True, help="comma separated coefficients c0,c1,... (p/q allowed)")
    q.add_argument("--order", type=int, required=True)
    q.add_argument("--truncated", action="store_true", help="the series is truncated, not a polynomial")
    q.set_defaults(func=cmd_free_cumulants)

    p = sub.add_parser("positivity", help="first negative phi_n, or 'none'")
    p.add_argument("family", choices=sorted(COEFFICIENT_GENERATORS))
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_positivity)

    p = sub.add_parser("validate", help="run the validation suite")
    p.add_argument("--grid", help="JSON grid file (default grid when omitted)")
    p.add_argument("--out", default="report.json", help="JSON report path, '-' for stdout")
    p.add_argument("--csv", help="also write the flat CSV view")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (VarfamError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
