"""Charts, deterministic sample plans and residual reports.

Every identity in the package is checked the same way: build the residual
fields as expressions, evaluate them on a reproducible cloud of interior
points, and compare the largest absolute value with a tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import DomainError, Expr, as_expr, evaluate_many, var

__all__ = [
    "Chart",
    "SamplePlan",
    "ResidualReport",
    "DEFAULT_TOL",
    "PRNG_NAME",
    "sample_points",
    "residual_check",
    "evaluate_fields",
    "merge_reports",
]

DEFAULT_TOL = 1e-9
PRNG_NAME = "Philox4x64-10"


@dataclass(frozen=True)
class Chart:
    """A coordinate box ``prod_i [lo_i, hi_i]`` with named coordinates."""

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if not self.names:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(self.names)) != len(self.names):
            raise ValueError("coordinate names must be distinct")
        if not (len(self.lower) == len(self.upper) == len(self.names)):
            raise ValueError("box bounds do not match the number of coordinates")
        for name, lo, hi in zip(self.names, self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"empty interval for {name}: [{lo}, {hi}]")

    @classmethod
    def box(cls, names: Sequence[str], half_width: float = 1.0) -> "Chart":
        return cls(tuple(names), (-half_width,) * len(names), (half_width,) * len(names))

    @property
    def dim(self) -> int:
        return len(self.names)

    def coords(self) -> list[Expr]:
        return [var(n) for n in self.names]

    def extend(self, names: Sequence[str], lower: Sequence[float], upper: Sequence[float]) -> "Chart":
        return Chart(self.names + tuple(names), self.lower + tuple(lower), self.upper + tuple(upper))

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        pad = margin * (hi - lo)
        return np.all((points >= lo + pad) & (points <= hi - pad), axis=1)

    def env(self, points: np.ndarray) -> dict[str, np.ndarray]:
        return {name: points[:, k] for k, name in enumerate(self.names)}


@dataclass(frozen=True)
class SamplePlan:
    seed: int = 0
    count: int = 64
    margin: float = 0.05

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be positive")
        if not 0.0 <= self.margin < 0.5:
            raise ValueError("margin must lie in [0, 0.5)")

    def split(self, parts: int = 2) -> list["SamplePlan"]:
        """Sub-plans with derived seeds whose union has ``count`` points."""
        seeds = np.random.SeedSequence(self.seed).spawn(parts)
        base, extra = divmod(self.count, parts)
        out = []
        for k, ss in enumerate(seeds):
            n = base + (1 if k < extra else 0)
            out.append(SamplePlan(int(ss.generate_state(1, np.uint64)[0]), n, self.margin))
        return out


@dataclass
class ResidualReport:
    """Outcome of one residual check.

    ``per_point`` holds, for every sample point, the largest absolute value
    of any residual field there.
    """

    name: str
    max_residual: float
    worst_point: tuple[float, ...]
    tol: float
    passed: bool
    per_point: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    count: int = 0
    tag: str = ""
    note: str = ""
    prng: str = PRNG_NAME

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "tag": self.tag,
            "max_residual": float(self.max_residual),
            "worst_point": [float(v) for v in self.worst_point],
            "tol": float(self.tol),
            "passed": bool(self.passed),
            "points": int(self.count),
            "prng": self.prng,
            "note": self.note,
        }


def sample_points(chart: Chart, plan: SamplePlan) -> np.ndarray:
    """``plan.count`` points uniform in the margin-shrunk box, shape (count, dim)."""
    rng = np.random.Generator(np.random.Philox(plan.seed))
    lo = np.asarray(chart.lower)
    hi = np.asarray(chart.upper)
    pad = plan.margin * (hi - lo)
    u = rng.random((plan.count, chart.dim))
    return lo + pad + u * (hi - lo - 2 * pad)


def evaluate_fields(fields: Sequence, chart: Chart, points: np.ndarray) -> np.ndarray:
    """Values of every field at every point, shape (len(fields), len(points))."""
    env = chart.env(points)
    out = np.empty((len(fields), len(points)))
    for k, f in enumerate(fields):
        try:
            out[k] = evaluate_many(as_expr(f), env, len(points))
        except DomainError as err:
            raise DomainError(err.message, err.index, points[err.index]) from None
    return out


def residual_check(
    name: str,
    fields: Sequence,
    chart: Chart,
    plan: SamplePlan,
    tol: float = DEFAULT_TOL,
    tag: str = "",
    points: np.ndarray | None = None,
) -> ResidualReport:
    """Evaluate every residual field on the plan's points and aggregate by max."""
    if points is None:
        points = sample_points(chart, plan)
    fields = list(fields)
    if fields:
        per_point = np.abs(evaluate_fields(fields, chart, points)).max(axis=0)
    else:
        per_point = np.zeros(len(points))
    k = int(np.argmax(per_point))
    worst = float(per_point[k])
    return ResidualReport(
        name=name,
        max_residual=worst,
        worst_point=tuple(float(v) for v in points[k]),
        tol=tol,
        passed=bool(worst <= tol),
        per_point=per_point,
        count=len(points),
        tag=tag,
    )


def merge_reports(name: str, reports: Sequence[ResidualReport], tag: str = "") -> ResidualReport:
    """Combine reports over the same points by pointwise max."""
    if not reports:
        raise ValueError("nothing to merge")
    per_point = np.max(np.vstack([r.per_point for r in reports]), axis=0)
    best = max(reports, key=lambda r: r.max_residual)
    tol = min(r.tol for r in reports)
    return ResidualReport(
        name=name,
        max_residual=float(per_point.max()),
        worst_point=best.worst_point,
        tol=tol,
        passed=all(r.passed for r in reports),
        per_point=per_point,
        count=best.count,
        tag=tag,
    )
