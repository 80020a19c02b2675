"""The standard Courant algebroid ``TM + T*M``, graph Dirac structures and
Dirac morphisms.

Generalized sections are pairs ``(u, alpha)`` of component lists.  Dirac
structures are represented by pointwise frames of ``n`` generalized sections;
membership of a bracket in the span is decided by least squares.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebroid import exterior_derivative, lie_bracket, lie_derivative_form, obj_array, to_expr_array, vector_apply
from .expr import ONE, ZERO, Expr, as_expr, const, differentiate, esum, eprod, is_zero, var
from .geometry import PoissonBivector, PreSymplectic, cotangent_anchor, flat
from .manifold import (
    DEFAULT_TOL,
    Chart,
    ResidualReport,
    SamplePlan,
    evaluate_fields,
    merge_reports,
    residual_check,
    sample_points,
)

__all__ = [
    "GeneralizedSection",
    "StandardCourant",
    "DiracFrame",
    "pairing",
    "dorfman",
    "d_map",
    "random_polynomial",
    "random_section",
    "courant_axiom_residuals",
    "check_courant_axioms",
    "graph_omega",
    "graph_pi",
    "check_dirac",
    "graph_closure_residuals",
    "DiracMorphismReport",
    "dirac_morphism_check",
    "MapOutsideChart",
    "MEMBERSHIP_TOL",
    "UNIQUE_SV",
    "INDETERMINATE_SV",
]

MEMBERSHIP_TOL = 1e-8
UNIQUE_SV = 1e-8
INDETERMINATE_SV = 1e-10


@dataclass
class GeneralizedSection:
    u: list
    alpha: list

    def __post_init__(self):
        self.u = [as_expr(c) for c in self.u]
        self.alpha = [as_expr(c) for c in self.alpha]
        if len(self.u) != len(self.alpha):
            raise ValueError("vector and covector parts must have the same length")

    def components(self) -> list[Expr]:
        return self.u + self.alpha

    def scale(self, f: Expr) -> "GeneralizedSection":
        return GeneralizedSection([f * c for c in self.u], [f * c for c in self.alpha])

    def __add__(self, other):
        return GeneralizedSection([a + b for a, b in zip(self.u, other.u)], [a + b for a, b in zip(self.alpha, other.alpha)])

    def __sub__(self, other):
        return GeneralizedSection([a - b for a, b in zip(self.u, other.u)], [a - b for a, b in zip(self.alpha, other.alpha)])


@dataclass
class StandardCourant:
    """``TM + T*M`` over ``chart``, optionally twisted by a 3-form ``H[i, j, k]``."""

    chart: Chart
    H: np.ndarray | None = None

    def __post_init__(self):
        if self.H is not None:
            self.H = to_expr_array(self.H, (self.chart.dim,) * 3, self.chart.names)


def pairing(s1: GeneralizedSection, s2: GeneralizedSection) -> Expr:
    """``iota_u beta + iota_v alpha``."""
    return esum([a * b for a, b in zip(s1.u, s2.alpha)] + [a * b for a, b in zip(s2.u, s1.alpha)])


def dorfman(E: StandardCourant, s1: GeneralizedSection, s2: GeneralizedSection) -> GeneralizedSection:
    """``[u, v] + L_u beta - iota_v d alpha + iota_u iota_v H``.

    ``(iota_v d alpha)_k = v^j (d_j alpha_k - d_k alpha_j)`` and
    ``(iota_u iota_v H)_k = H(u, v, .)_k = H_ijk u^i v^j``; the same reading
    ``iota_u iota_v w = w(u, v)`` is used for the 2-form twist in
    :func:`algebroidkit.morphism.am_bracket`.
    """
    names = E.chart.names
    n = E.chart.dim
    u, a, v, b = s1.u, s1.alpha, s2.u, s2.alpha
    vec = lie_bracket(u, v, names)
    lie = lie_derivative_form(u, b, names)
    da = [[differentiate(a[k], names[j]) - differentiate(a[j], names[k]) for k in range(n)] for j in range(n)]
    form = []
    for k in range(n):
        terms = [lie[k]] + [-(v[j] * da[j][k]) for j in range(n) if not is_zero(v[j])]
        if E.H is not None:
            terms += [E.H[i, j, k] * u[i] * v[j] for i in range(n) for j in range(n) if not is_zero(E.H[i, j, k])]
        form.append(esum(terms))
    return GeneralizedSection(vec, form)


def d_map(E: StandardCourant, f: Expr) -> GeneralizedSection:
    """``D f = 0 + df``, characterised by ``<D f, e> = rho(e) f``."""
    names = E.chart.names
    return GeneralizedSection([ZERO] * len(names), [differentiate(as_expr(f), x) for x in names])


# random test sections -------------------------------------------------------------

def random_polynomial(names: Sequence[str], rng: np.random.Generator, degree: int = 2, scale: float = 1.0) -> Expr:
    """Dense polynomial of total degree <= ``degree`` with N(0, scale) coefficients."""
    terms = []
    xs = [var(x) for x in names]
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(names)), d):
            c = float(rng.normal(0.0, scale))
            terms.append(eprod([const(c)] + [xs[i] for i in combo]))
    return esum(terms)


def random_section(chart: Chart, rng: np.random.Generator, degree: int = 2) -> GeneralizedSection:
    n = chart.dim
    return GeneralizedSection(
        [random_polynomial(chart.names, rng, degree) for _ in range(n)],
        [random_polynomial(chart.names, rng, degree) for _ in range(n)],
    )


AXIOM_NAMES = (
    "courant-1-jacobi",
    "courant-2-anchor",
    "courant-3-leibniz",
    "courant-4-symmetric-part",
    "courant-5-invariance",
)


def courant_axiom_residuals(E: StandardCourant, e1, e2, e3, f: Expr) -> dict:
    """Residual fields of the five Courant algebroid axioms for one triple and one function."""
    names = E.chart.names
    B = lambda s, t: dorfman(E, s, t)  # noqa: E731
    lhs = B(e1, B(e2, e3))
    rhs = B(B(e1, e2), e3) + B(e2, B(e1, e3))
    jac = (lhs - rhs).components()

    b12 = B(e1, e2)
    anc = [x - y for x, y in zip(b12.u, lie_bracket(e1.u, e2.u, names))]

    rf = vector_apply(e1.u, f, names)
    leib = (B(e1, e2.scale(f)) - b12.scale(f) - e2.scale(rf)).components()

    half = d_map(E, pairing(e1, e1)).scale(const(0.5))
    sym = (B(e1, e1) - half).components()

    inv = [
        vector_apply(e1.u, pairing(e2, e3), names)
        - pairing(b12, e3)
        - pairing(e2, B(e1, e3))
    ]
    return dict(zip(AXIOM_NAMES, (jac, anc, leib, sym, inv)))


def check_courant_axioms(E: StandardCourant, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL,
                         samples: int = 2, degree: int = 2) -> list[ResidualReport]:
    """Five reports, each over ``samples`` random polynomial triples and functions."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([plan.seed, 7])))
    fields = {k: [] for k in AXIOM_NAMES}
    for _ in range(samples):
        e1, e2, e3 = (random_section(E.chart, rng, degree) for _ in range(3))
        f = random_polynomial(E.chart.names, rng, degree)
        for k, v in courant_axiom_residuals(E, e1, e2, e3, f).items():
            fields[k].extend(v)
    points = sample_points(E.chart, plan)
    return [residual_check(k, fields[k], E.chart, plan, tol, tag=f"Courant axiom {k[8]}", points=points)
            for k in AXIOM_NAMES]


# Dirac structures -----------------------------------------------------------------

@dataclass
class DiracFrame:
    """``n`` generalized sections spanning a candidate Dirac structure pointwise."""

    chart: Chart
    sections: list
    kind: str = "frame"

    def matrix(self, points: np.ndarray) -> np.ndarray:
        """Frame values, shape ``(points, 2n, n)``; column ``k`` is section ``k``."""
        n = self.chart.dim
        comps = [c for s in self.sections for c in s.components()]
        vals = evaluate_fields(comps, self.chart, points)  # (k*2n, P)
        return vals.reshape(len(self.sections), 2 * n, len(points)).transpose(2, 1, 0)

    def ranks(self, points: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        return np.array([np.linalg.matrix_rank(m, tol=tol) for m in self.matrix(points)])


def graph_omega(w: PreSymplectic) -> DiracFrame:
    """Frame ``d_k + omega_flat(d_k)`` of ``{u + omega_flat(u)}``."""
    n = w.chart.dim
    secs = []
    for k in range(n):
        u = [ONE if i == k else ZERO for i in range(n)]
        secs.append(GeneralizedSection(u, flat(w, u)))
    return DiracFrame(w.chart, secs, "graph-omega")


def graph_pi(P: PoissonBivector) -> DiracFrame:
    """Frame ``X(dx^k) + dx^k`` of ``{X(alpha) + alpha}`` with ``X = -pi#`` the cotangent anchor."""
    n = P.chart.dim
    secs = []
    for k in range(n):
        a = [ONE if i == k else ZERO for i in range(n)]
        secs.append(GeneralizedSection(cotangent_anchor(P, a), a))
    return DiracFrame(P.chart, secs, "graph-pi")


def _membership(frame_vals: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Least-squares distance of each target column to the span, per point."""
    out = np.empty(frame_vals.shape[0])
    for p in range(frame_vals.shape[0]):
        F = frame_vals[p]
        c, *_ = np.linalg.lstsq(F, target[p], rcond=None)
        out[p] = np.max(np.abs(F @ c - target[p])) if target.shape[1] else 0.0
    return out


def check_dirac(E: StandardCourant, L: DiracFrame, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL,
                membership_tol: float = MEMBERSHIP_TOL) -> tuple[ResidualReport, ResidualReport]:
    """Isotropy of all frame pairs and closure of their brackets under the span."""
    points = sample_points(L.chart, plan)
    secs = L.sections
    iso = [pairing(s, t) for s, t in itertools.combinations_with_replacement(secs, 2)]
    rep_iso = residual_check("isotropy", iso, L.chart, plan, tol, tag="<L, L> = 0", points=points)
    brackets = [dorfman(E, s, t) for s, t in itertools.product(secs, repeat=2)]
    comps = [c for b in brackets for c in b.components()]
    n = L.chart.dim
    vals = evaluate_fields(comps, L.chart, points).reshape(len(brackets), 2 * n, len(points)).transpose(2, 1, 0)
    per_point = _membership(L.matrix(points), vals)
    k = int(np.argmax(per_point))
    rep_inv = ResidualReport(
        name="involutivity",
        max_residual=float(per_point[k]),
        worst_point=tuple(float(v) for v in points[k]),
        tol=membership_tol,
        passed=bool(per_point[k] <= membership_tol),
        per_point=per_point,
        count=len(points),
        tag="[L, L] in L",
    )
    return rep_iso, rep_inv


def graph_closure_residuals(E: StandardCourant, structure, u_or_alpha, v_or_beta) -> list[Expr]:
    """Closed-form brackets inside the two graph Dirac structures.

    For a 2-form: ``[[u + w(u), v + w(v)]] - ([u, v] + w([u, v]))``.
    For a bivector: ``[[X a + a, X b + b]] - (X [a, b]_pi + [a, b]_pi)``.
    """
    from .geometry import koszul_bracket

    names = E.chart.names
    if isinstance(structure, PreSymplectic):
        u, v = u_or_alpha, v_or_beta
        s1 = GeneralizedSection(u, flat(structure, u))
        s2 = GeneralizedSection(v, flat(structure, v))
        lb = lie_bracket(u, v, names)
        expected = GeneralizedSection(lb, flat(structure, lb))
    else:
        a, b = u_or_alpha, v_or_beta
        s1 = GeneralizedSection(cotangent_anchor(structure, a), a)
        s2 = GeneralizedSection(cotangent_anchor(structure, b), b)
        kb = koszul_bracket(structure, a, b)
        expected = GeneralizedSection(cotangent_anchor(structure, kb), kb)
    return (dorfman(E, s1, s2) - expected).components()


# Dirac morphisms ------------------------------------------------------------------

@dataclass
class DiracMorphismReport:
    existence: ResidualReport
    min_singular_value: float
    status: str  # "unique", "indeterminate" or "not-unique"
    per_point_sv: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    @property
    def passed(self) -> bool:
        return self.existence.passed and self.status == "unique"

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        d = self.existence.to_dict()
        d.update({"name": "dirac-morphism", "passed": self.passed,
                  "min_singular_value": self.min_singular_value, "uniqueness": self.status})
        return d


class MapOutsideChart(ValueError):
    def __init__(self, point):
        super().__init__(f"sample {tuple(float(v) for v in point)} is mapped outside the target chart")
        self.point = point


def dirac_morphism_check(phi: Sequence[Expr], L_M: DiracFrame, L_N: DiracFrame, plan: SamplePlan = SamplePlan(),
                         tol: float = DEFAULT_TOL) -> DiracMorphismReport:
    """Forward Dirac map test at sample points of the source chart.

    For every frame vector ``v + beta`` of ``L_N`` at ``phi(m)``, set
    ``alpha = dphi^T beta`` and solve ``[F_alpha; dphi F_u] c = [alpha; v]``
    for the coefficients ``c`` of an element of ``L_M``.  Existence is the
    least-squares residual; uniqueness is the smallest singular value of the
    system matrix (``> 1e-8`` unique, below ``1e-10`` not unique, otherwise
    indeterminate).
    """
    src, tgt = L_M.chart, L_N.chart
    n, m = src.dim, tgt.dim
    if len(phi) != m:
        raise ValueError("map needs one component per target coordinate")
    phi = [as_expr(p) for p in phi]
    points = sample_points(src, plan)
    img = evaluate_fields(phi, src, points).T
    inside = tgt.contains(img)
    if not inside.all():
        raise MapOutsideChart(points[int(np.argmin(inside))])
    jac = evaluate_fields([differentiate(p, x) for p in phi for x in src.names], src, points).T.reshape(len(points), m, n)
    FM = L_M.matrix(points)  # (P, 2n, kM)
    FN = L_N.matrix(img)     # (P, 2m, kN)
    resid = np.empty(len(points))
    svs = np.empty(len(points))
    for p in range(len(points)):
        J = jac[p]
        Fu, Fa = FM[p, :n], FM[p, n:]
        S = np.vstack([Fa, J @ Fu])
        v, beta = FN[p, :m], FN[p, m:]
        rhs = np.vstack([J.T @ beta, v])
        c, *_ = np.linalg.lstsq(S, rhs, rcond=None)
        resid[p] = np.max(np.abs(S @ c - rhs))
        svs[p] = np.linalg.svd(S, compute_uv=False).min() if S.shape[1] <= S.shape[0] else 0.0
    k = int(np.argmax(resid))
    exist = ResidualReport(
        name="dirac-morphism-existence",
        max_residual=float(resid[k]),
        worst_point=tuple(float(v) for v in points[k]),
        tol=max(tol, 0.0),
        passed=bool(resid[k] <= tol),
        per_point=resid,
        count=len(points),
        tag="forward Dirac map",
    )
    smin = float(svs.min())
    status = "unique" if smin > UNIQUE_SV else ("indeterminate" if smin >= INDETERMINATE_SV else "not-unique")
    return DiracMorphismReport(exist, smin, status, svs)
