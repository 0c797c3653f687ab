"""Moment-triple and mean-derivative validation over a grid of families.

The report is a plain tree of dataclasses that serializes to a versioned
JSON document (``"schema": 1``) with every float written to 17
significant digits, and to a flat CSV with one row per grid point.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from ..classical import moment_report
from ..errors import DomainError
from ..freefam import free_meixner
from ..measures import ContinuousMeasure, DiscreteMeasure, FamilyMember, MixedMeasure
from .numerics import derivative, hahn_derivative, q_derivative
from .registry import COUNTEREXAMPLES, FAMILIES, get_family

__all__ = [
    "Tolerances",
    "FamilyGrid",
    "GridSpec",
    "PointResult",
    "FamilyReport",
    "CounterexampleReport",
    "LatticeResult",
    "ValidationReport",
    "validate_point",
    "run_suite",
    "emit_json",
    "parse_json",
    "emit_csv",
]

SCHEMA = 1


@dataclass(frozen=True)
class Tolerances:
    mass: float = 1e-6
    mean: float = 1e-6
    variance: float = 1e-5
    ode: float = 1e-10


@dataclass(frozen=True)
class FamilyGrid:
    """One family at one parameter set, sampled at ``n`` means.

    Without ``m_lo``/``m_hi`` the means are spread over the family's
    default interval.
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    n: int = 5
    m_lo: Optional[float] = None
    m_hi: Optional[float] = None

    def means(self) -> list[float]:
        entry = get_family(self.family)
        return entry.m_grid(entry.params(self.params), self.n, self.m_lo, self.m_hi)


@dataclass(frozen=True)
class GridSpec:
    """What ``run_suite`` evaluates.

    ``meixner_a``/``meixner_b`` span the lattice of free-Meixner laws whose
    total mass is checked.
    """

    families: tuple = ()
    counterexamples: tuple = ()
    meixner_a: tuple = ()
    meixner_b: tuple = ()
    tolerances: Tolerances = Tolerances()

    def __post_init__(self):
        for g in self.families:
            if g.n < 1:
                raise DomainError(f"{g.family}: m-grid needs at least one point")
            g.means()  # raises if the grid leaves the domain
        for name, _ in self.counterexamples:
            if name not in COUNTEREXAMPLES:
                raise DomainError(f"unknown counterexample {name!r}; choose from {sorted(COUNTEREXAMPLES)}")

    @classmethod
    def default(cls) -> "GridSpec":
        fams = [FamilyGrid(name) for name in FAMILIES]
        fams.append(FamilyGrid("q_infinity", {"generator": 1}))
        return cls(
            families=tuple(fams),
            counterexamples=tuple((name, {}) for name in COUNTEREXAMPLES),
            meixner_a=(-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0),
            meixner_b=(-0.9, -0.5, -0.2, 0.0, 0.3, 1.0, 2.5),
        )

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "GridSpec":
        """Build from ``{"families": [...], "counterexamples": [...], "meixner": {...}, "tolerances": {...}}``.

        A family item is ``{"family": name, "params": {...}, "m_grid": "lo:hi:n"}``;
        ``m_grid`` may also be a bare count.  ``{"default": true}`` starts from
        the default grid.
        """
        base = cls.default() if d.get("default") else cls()
        fams = list(base.families)
        for item in d.get("families", []):
            grid = item.get("m_grid", 5)
            lo = hi = None
            if isinstance(grid, str):
                lo, hi, n = parse_m_grid(grid)
            else:
                n = int(grid)
            fams.append(FamilyGrid(item["family"], dict(item.get("params", {})), n, lo, hi))
        cex = list(base.counterexamples)
        for item in d.get("counterexamples", []):
            cex.append((item["family"], dict(item.get("params", {}))))
        mx = d.get("meixner", {})
        tol = Tolerances(**{**base.tolerances.__dict__, **d.get("tolerances", {})})
        return cls(
            tuple(fams),
            tuple(cex),
            tuple(mx.get("a", base.meixner_a)),
            tuple(mx.get("b", base.meixner_b)),
            tol,
        )


def parse_m_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise DomainError(f"m-grid must look like lo:hi:n, got {text!r}") from None


# ------------------------------------------------------------------ results


@dataclass(frozen=True)
class PointResult:
    m: float
    mass_residual: Optional[float] = None
    mean_residual: Optional[float] = None
    variance_residual: Optional[float] = None
    ode_residual: Optional[float] = None
    passed: bool = False
    error: Optional[str] = None


@dataclass(frozen=True)
class FamilyReport:
    family: str
    params: Mapping[str, float]
    m_grid: tuple
    points: tuple
    passed: bool


@dataclass(frozen=True)
class CounterexampleReport:
    """``witness`` is ``(location or index, negative value)``; ``passed`` means it was found."""

    family: str
    params: Mapping[str, float]
    witness: Optional[tuple]
    expected_failure: bool = True
    passed: bool = False


@dataclass(frozen=True)
class LatticeResult:
    a: float
    b: float
    mass_residual: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    tolerances: Tolerances
    families: tuple = ()
    counterexamples: tuple = ()
    meixner: tuple = ()
    wall_time: Optional[float] = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return (
            all(f.passed for f in self.families)
            and all(c.passed for c in self.counterexamples)
            and all(x.passed for x in self.meixner)
        )

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "schema": SCHEMA,
            "passed": self.passed,
            "tolerances": dict(self.tolerances.__dict__),
            "families": [
                {
                    "family": f.family,
                    "params": dict(f.params),
                    "m_grid": list(f.m_grid),
                    "passed": f.passed,
                    "points": [dict(p.__dict__) for p in f.points],
                }
                for f in self.families
            ],
            "counterexamples": [
                {
                    "family": c.family,
                    "params": dict(c.params),
                    "witness": None if c.witness is None else list(c.witness),
                    "expected_failure": c.expected_failure,
                    "passed": c.passed,
                }
                for c in self.counterexamples
            ],
            "meixner": [dict(x.__dict__) for x in self.meixner],
        }
        if timing and self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ValidationReport":
        if d.get("schema") != SCHEMA:
            raise DomainError(f"unsupported report schema {d.get('schema')!r}")
        fams = tuple(
            FamilyReport(
                f["family"],
                dict(f["params"]),
                tuple(f["m_grid"]),
                tuple(PointResult(**p) for p in f["points"]),
                f["passed"],
            )
            for f in d["families"]
        )
        cex = tuple(
            CounterexampleReport(
                c["family"],
                dict(c["params"]),
                None if c["witness"] is None else tuple(c["witness"]),
                c["expected_failure"],
                c["passed"],
            )
            for c in d["counterexamples"]
        )
        mx = tuple(LatticeResult(**x) for x in d["meixner"])
        return cls(Tolerances(**d["tolerances"]), fams, cex, mx, d.get("wall_time"))


# ---------------------------------------------------------------- checking


def _sample_us(member: FamilyMember) -> list[float]:
    """A few abscissae around the mean where the weight is checked."""
    m = member.mean
    sd = math.sqrt(max(member.variance, 0.0))
    targets = [m - sd, m + 0.5 * sd, m + 2 * sd]
    meas = member.measure
    if isinstance(meas, MixedMeasure):
        meas = meas.continuous
    if isinstance(meas, DiscreteMeasure) and not meas.approximate:
        locs = meas.locations.tolist()
        picks = []
        for t in targets:
            u = min(locs, key=lambda x: (abs(x - t), x))
            if u not in picks and u != m:
                picks.append(u)
        return picks
    if isinstance(meas, DiscreteMeasure):
        lo, hi = float(meas.locations.min()), float(meas.locations.max())
    else:
        lo, hi = meas.support
    out = []
    for t in targets:
        u = min(max(t, lo + 1e-3 * (1 + abs(lo)) if math.isfinite(lo) else t), hi - 1e-3 * (1 + abs(hi)) if math.isfinite(hi) else t)
        if u > 0 or not (math.isfinite(lo) and lo >= 0):
            out.append(u)
    return out


def _ode_residual(entry, params: Mapping[str, float], member: FamilyMember) -> Optional[float]:
    rule = entry.ode_rule(params)
    if rule is None:
        return None
    kind, q, theta = rule
    m = member.mean
    v = member.variance
    weight = member.metadata["weight"]
    worst = 0.0
    for u in _sample_us(member):
        f = lambda mm: weight(mm, u)  # noqa: E731
        centre = 0.0 if kind == "q" else theta
        if kind == "d" or m == centre:
            # both difference operators extend continuously to f' at their centre
            lo, hi = member.spec.domain if member.spec is not None else (-math.inf, math.inf)
            h = 0.05 * min(1.0, m - lo, hi - m)
            lhs = derivative(f, m, h=h)
        elif kind == "q":
            lhs = q_derivative(f, q, m)
        else:
            lhs = hahn_derivative(f, q, theta, m)
        w = f(m)
        rhs = w * (u - m) / v
        worst = max(worst, abs(lhs - rhs) / (1 + abs(w)))
    return worst


def validate_point(name: str, params: Mapping[str, float], m: float, tol: Tolerances) -> PointResult:
    """Moment triple and mean-derivative residual of one member; errors are captured."""
    entry = get_family(name)
    try:
        member = entry.build(**params, m=m)
        rep = moment_report(member, tol=1e-10)
        mass = abs(rep.mass - 1)
        mean = abs(rep.mean - m)
        var = abs(rep.variance - member.variance)
        ode = _ode_residual(entry, params, member)
    except Exception as exc:  # reported, never raised: the suite must not abort
        return PointResult(m, error=f"{type(exc).__name__}: {exc}")
    ok = mass < tol.mass and mean < tol.mean and var < tol.variance and (ode is None or ode < tol.ode)
    return PointResult(m, mass, mean, var, ode, ok, None)


def _point_task(args):
    return validate_point(*args)


def _meixner_task(args):
    a, b, tol = args
    try:
        res = abs(free_meixner(a, b).total_mass() - 1)
    except Exception:
        return LatticeResult(a, b, math.inf, False)
    return LatticeResult(a, b, res, res < tol)


def run_suite(grid: GridSpec, jobs: int = 1) -> ValidationReport:
    """Evaluate every grid point; the result depends only on ``grid``.

    With ``jobs > 1`` the points are farmed out to worker processes; results
    are collected in grid order so the report is unchanged.
    """
    t0 = time.perf_counter()
    tol = grid.tolerances
    plans = []
    tasks = []
    for g in grid.families:
        entry = get_family(g.family)
        params = entry.params(g.params)
        means = g.means()
        plans.append((g.family, params, means))
        tasks.extend((g.family, params, m, tol) for m in means)
    lattice = [(a, b, 1e-8) for a in grid.meixner_a for b in grid.meixner_b]
    if jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_point_task, tasks))
            lat = list(ex.map(_meixner_task, lattice))
    else:
        results = [_point_task(t) for t in tasks]
        lat = [_meixner_task(t) for t in lattice]
    fams = []
    k = 0
    for name, params, means in plans:
        pts = tuple(results[k : k + len(means)])
        k += len(means)
        fams.append(FamilyReport(name, params, tuple(means), pts, all(p.passed for p in pts)))
    cex = []
    for name, overrides in grid.counterexamples:
        c = COUNTEREXAMPLES[name]
        params = {**c.defaults, **overrides}
        try:
            wit = c.find_witness(**params)
        except Exception:
            wit = None
        cex.append(CounterexampleReport(name, params, None if wit is None else tuple(float(x) for x in wit), True, wit is not None))
    return ValidationReport(tol, tuple(fams), tuple(cex), tuple(lat), time.perf_counter() - t0)


# --------------------------------------------------------------- encoding


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def emit_json(report: ValidationReport, timing: bool = False) -> str:
    """Deterministic JSON: sorted keys, floats as ``%.17g``."""
    return _encode(report.to_dict(timing), 2, 0) + "\n"


def parse_json(text: str) -> ValidationReport:
    return ValidationReport.from_dict(json.loads(text))


CSV_FIELDS = ["family", "params", "m", "mass_residual", "mean_residual", "variance_residual", "ode_residual", "passed", "error"]


def emit_csv(report: ValidationReport) -> str:
    """One row per (family, parameter set, mean)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)

    def num(x):
        return "" if x is None else _fmt_float(float(x))

    for f in report.families:
        params = ";".join(f"{k}={_fmt_float(float(v))}" for k, v in sorted(f.params.items()))
        for p in f.points:
            w.writerow(
                [
                    f.family,
                    params,
                    num(p.m),
                    num(p.mass_residual),
                    num(p.mean_residual),
                    num(p.variance_residual),
                    num(p.ode_residual),
                    "true" if p.passed else "false",
                    p.error or "",
                ]
            )
    return buf.getvalue()
