"""Reading JSON problem files into package objects."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebroid import LieAlgebroid, obj_array
from .connection import Connection
from .expr import ParseError, parse
from .geometry import PoissonBivector, PreSymplectic
from .manifold import Chart, SamplePlan, evaluate_fields, sample_points
from .momentum import MomentumSection

__all__ = ["SchemaError", "Problem", "load_problem", "canonical_digest"]

KNOWN_KEYS = {"chart", "algebroid", "connection", "presymplectic", "poisson", "momentum", "hflux", "dirac", "options"}
DIRAC_KINDS = ("graph-omega", "graph-pi")


class SchemaError(ValueError):
    """Malformed problem file; ``where`` is a JSON path such as ``algebroid.rho[0][1]``."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


@dataclass
class Problem:
    chart: Chart
    algebroid: LieAlgebroid
    connection: Connection | None = None
    presymplectic: PreSymplectic | None = None
    poisson: PoissonBivector | None = None
    momentum: MomentumSection | None = None
    hflux: np.ndarray | None = None
    dirac: str | None = None
    options: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    def plan(self, points=None, seed=None) -> SamplePlan:
        return SamplePlan(
            seed=int(self.options.get("seed", 0) if seed is None else seed),
            count=int(self.options.get("points", 64) if points is None else points),
        )

    @property
    def tol(self) -> float:
        return float(self.options.get("tol", 1e-9))

    @property
    def pbox(self) -> float:
        return float(self.options.get("pbox", 1.0))


def canonical_digest(doc: dict) -> str:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _expr_array(data, shape, names, where):
    arr = np.array(data, dtype=object)
    if arr.shape != tuple(shape):
        raise SchemaError(where, f"expected shape {tuple(shape)}, got {arr.shape}")
    out = obj_array(shape)
    for idx in np.ndindex(*shape):
        src = arr[idx]
        loc = where + "".join(f"[{k}]" for k in idx)
        if isinstance(src, bool) or not isinstance(src, (str, int, float)):
            raise SchemaError(loc, f"expected an expression string, got {type(src).__name__}")
        try:
            out[idx] = parse(str(src), names)
        except ParseError as err:
            raise SchemaError(loc, f"{err} in {src!r}") from None
    return out


def _check_lower(full: np.ndarray, chart: Chart, where: str, pairs):
    """Lower entries must be absent-equivalent (zero) or the negated upper entry."""
    pts = sample_points(chart, SamplePlan(seed=12345, count=16))
    for hi, lo in pairs:
        vals = evaluate_fields([full[lo]], chart, pts)[0]
        if np.all(vals == 0):
            continue
        both = evaluate_fields([full[hi] + full[lo]], chart, pts)[0]
        if np.max(np.abs(both)) > 1e-12:
            raise SchemaError(where + "".join(f"[{k}]" for k in lo), "not the negative of the mirrored entry")


def load_problem(source) -> Problem:
    """``source`` is a dict, a JSON string, or a path to a JSON file."""
    if isinstance(source, (str, Path)) and not (isinstance(source, str) and source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as err:
            raise SchemaError("<file>", str(err)) from None
        source = text
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as err:
            raise SchemaError("<json>", f"invalid JSON at offset {err.pos}: {err.msg}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "top level must be an object")
    unknown = set(doc) - KNOWN_KEYS
    if unknown:
        raise SchemaError("<root>", f"unknown keys {sorted(unknown)}")
    for key in ("chart", "algebroid"):
        if key not in doc:
            raise SchemaError(key, "required")

    ch = doc["chart"]
    try:
        names = ch["coordinates"]
        box = ch.get("box") or [[-1.0, 1.0]] * len(names)
        chart = Chart(tuple(names), tuple(float(b[0]) for b in box), tuple(float(b[1]) for b in box))
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise SchemaError("chart", f"invalid chart ({err})") from None
    n = chart.dim

    alg = doc["algebroid"]
    try:
        r = int(alg["rank"])
    except (KeyError, TypeError, ValueError):
        raise SchemaError("algebroid.rank", "required integer") from None
    if r < 1:
        raise SchemaError("algebroid.rank", "must be positive")
    if "rho" not in alg or "C" not in alg:
        raise SchemaError("algebroid", "needs rho and C")
    rho = _expr_array(alg["rho"], (r, n), chart.names, "algebroid.rho")
    C = _expr_array(alg["C"], (r, r, r), chart.names, "algebroid.C")
    for a in range(r):
        for c in range(r):
            if not (C[a, a, c].free == frozenset() and float(parse_zero(C[a, a, c])) == 0.0):
                raise SchemaError(f"algebroid.C[{a}][{a}][{c}]", "diagonal entries must be 0")
    _check_lower(C, chart, "algebroid.C",
                 [((a, b, c), (b, a, c)) for a in range(r) for b in range(a + 1, r) for c in range(r)])
    A = LieAlgebroid(chart, rho, C)

    prob = Problem(chart=chart, algebroid=A, raw=doc)
    if "connection" in doc:
        om = _expr_array(doc["connection"].get("omega"), (r, r, n), chart.names, "connection.omega")
        prob.connection = Connection(om)
    for key, inner, cls in (("presymplectic", "omega", PreSymplectic), ("poisson", "pi", PoissonBivector)):
        if key in doc:
            arr = _expr_array(doc[key].get(inner), (n, n), chart.names, f"{key}.{inner}")
            _check_lower(arr, chart, f"{key}.{inner}", [((i, j), (j, i)) for i in range(n) for j in range(i + 1, n)])
            for i in range(n):
                if not (arr[i, i].free == frozenset() and parse_zero(arr[i, i]) == 0.0):
                    raise SchemaError(f"{key}.{inner}[{i}][{i}]", "diagonal entries must be 0")
            setattr(prob, key, cls(chart, arr))
    if "momentum" in doc:
        mu = doc["momentum"].get("mu")
        arr = _expr_array(mu, (r,), chart.names, "momentum.mu")
        prob.momentum = MomentumSection(list(arr))
    if "hflux" in doc:
        prob.hflux = _expr_array(doc["hflux"].get("H"), (n, n, n), chart.names, "hflux.H")
    if "dirac" in doc:
        kind = doc["dirac"].get("kind")
        if kind not in DIRAC_KINDS:
            raise SchemaError("dirac.kind", f"expected one of {DIRAC_KINDS}")
        prob.dirac = kind
    opts = doc.get("options", {}) or {}
    if not isinstance(opts, dict):
        raise SchemaError("options", "must be an object")
    for key, typ in (("tol", float), ("points", int), ("seed", int), ("pbox", float)):
        if key in opts:
            try:
                opts[key] = typ(opts[key])
            except (TypeError, ValueError):
                raise SchemaError(f"options.{key}", f"expected {typ.__name__}") from None
    prob.options = dict(opts)
    return prob


def parse_zero(e) -> float:
    from .expr import evaluate

    return evaluate(e, (), ())
