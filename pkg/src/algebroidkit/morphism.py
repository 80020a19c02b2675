"""Lie algebroid morphisms, the extended algebroids ``TM + R`` and ``T*M + R``,
fiberwise-linear Poisson structures on dual bundles and Poisson maps.

Morphism checks work over a common base and only need frame sections: if
``phi`` respects brackets and anchors on a local frame it respects them on
all sections, because both sides obey the same Leibniz rule and ``phi`` is
``C^inf``-linear.

Sign conventions (see also :mod:`algebroidkit.geometry`):

* ``iota_u iota_v w = w(u, v)``;
* the cotangent anchor is ``X(alpha)^i = pi^{ji} alpha_j``;
* the scalar part of the ``T*M + R`` bracket is
  ``X(alpha) g - X(beta) f + pi^{ij} alpha_i beta_j``; the anchor terms are
  the ones the Leibniz rule forces for the anchor ``X``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebroid import (
    LieAlgebroid,
    anchor,
    bracket_sections,
    cotangent_algebroid,
    lie_bracket,
    obj_array,
    tangent_algebroid,
    to_expr_array,
    vector_apply,
)
from .connection import Connection, dual_covariant_derivative, trivial_connection
from .courant import (
    DiracMorphismReport,
    GeneralizedSection,
    MapOutsideChart,
    StandardCourant,
    dirac_morphism_check,
    dorfman,
    graph_pi,
)
from .expr import ONE, ZERO, Expr, as_expr, differentiate, esum, is_zero, substitute, var
from .geometry import (
    PoissonBivector,
    PreSymplectic,
    check_closed,
    check_poisson,
    cotangent_anchor,
    flat,
    koszul_bracket,
    pairing_bivector,
)
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
    "ExtendedAlgebroidTMR",
    "ExtendedAlgebroidTstarR",
    "AlgebroidTarget",
    "GraphTarget",
    "am_bracket",
    "tstar_r_bracket",
    "jacobiator_residuals",
    "check_jacobiator",
    "MorphismVerdict",
    "merge_morphism",
    "lie_algebroid_morphism_check",
    "PropositionVerdict",
    "check_am_morphism",
    "check_graph_omega_morphism",
    "check_tstar_r_morphism",
    "check_graph_pi_morphism",
    "check_cotangent_morphism",
    "FiberwiseLinearPoisson",
    "dual_poisson",
    "tangent_lift_poisson",
    "SmoothMap",
    "poisson_map_check",
    "momentum_poisson_map",
    "dual_bundle_map",
    "bundle_map_dual_cross_check",
    "poisson_dirac_cross_check",
]


def _mu(A: LieAlgebroid, mu) -> list[Expr]:
    mu = getattr(mu, "mu", mu)
    return [as_expr(m) for m in mu]


def _conn(A: LieAlgebroid, conn):
    return trivial_connection(A) if conn is None else conn


# extended algebroids --------------------------------------------------------------

def am_bracket(w: PreSymplectic, s1, s2):
    """``([u, v], u(g) - v(f) - w(u, v))`` for sections ``(u, f)`` and ``(v, g)``."""
    names = w.chart.names
    (u, f), (v, g) = s1, s2
    u, v, f, g = [as_expr(c) for c in u], [as_expr(c) for c in v], as_expr(f), as_expr(g)
    n = w.chart.dim
    twist = esum(w.omega[i, j] * u[i] * v[j] for i in range(n) for j in range(n) if not is_zero(w.omega[i, j]))
    return lie_bracket(u, v, names), vector_apply(u, g, names) - vector_apply(v, f, names) - twist


def tstar_r_bracket(P: PoissonBivector, s1, s2):
    """``([a, b]_pi, X(a) g - X(b) f + pi^{ij} a_i b_j)`` for sections ``(a, f)`` and ``(b, g)``.

    For exact forms ``a = dh``, ``b = dk`` this is
    ``(d{h, k}, {h, g} - {k, f} + {h, k})``.
    """
    names = P.chart.names
    (a, f), (b, g) = s1, s2
    a, b, f, g = [as_expr(c) for c in a], [as_expr(c) for c in b], as_expr(f), as_expr(g)
    scalar = (vector_apply(cotangent_anchor(P, a), g, names) - vector_apply(cotangent_anchor(P, b), f, names)
              + pairing_bivector(P, a, b))
    return koszul_bracket(P, a, b), scalar


class _PairTarget:
    """Sections are pairs ``(component list, scalar)``."""

    def combine(self, coeffs, secs):
        n = len(secs[0][0])
        return ([esum(c * s[0][i] for c, s in zip(coeffs, secs)) for i in range(n)],
                esum(c * as_expr(s[1]) for c, s in zip(coeffs, secs)))

    def components(self, s):
        return list(s[0]) + [as_expr(s[1])]


@dataclass
class ExtendedAlgebroidTMR(_PairTarget):
    """``TM + R`` with the bracket :func:`am_bracket` and anchor ``(u, f) -> u``."""

    w: PreSymplectic

    @property
    def chart(self):
        return self.w.chart

    def bracket(self, s1, s2):
        return am_bracket(self.w, s1, s2)

    def anchor(self, s):
        return list(s[0])


@dataclass
class ExtendedAlgebroidTstarR(_PairTarget):
    """``T*M + R`` with the bracket :func:`tstar_r_bracket` and anchor ``(a, f) -> X(a)``."""

    P: PoissonBivector

    @property
    def chart(self):
        return self.P.chart

    def bracket(self, s1, s2):
        return tstar_r_bracket(self.P, s1, s2)

    def anchor(self, s):
        return cotangent_anchor(self.P, s[0])


@dataclass
class AlgebroidTarget:
    """A stored Lie algebroid; sections are component lists in its frame."""

    A: LieAlgebroid

    @property
    def chart(self):
        return self.A.chart

    def bracket(self, s1, s2):
        return bracket_sections(self.A, s1, s2)

    def anchor(self, s):
        return anchor(self.A, s)

    def combine(self, coeffs, secs):
        return [esum(c * s[i] for c, s in zip(coeffs, secs)) for i in range(self.A.rank)]

    def components(self, s):
        return list(s)


@dataclass
class GraphTarget:
    """A graph Dirac structure inside ``TM + T*M`` as a Lie algebroid.

    ``structure`` is a :class:`PreSymplectic` (graph ``{u + w_flat(u)}``) or a
    :class:`PoissonBivector` (graph ``{X(a) + a}``).
    """

    structure: object

    @property
    def chart(self):
        return self.structure.chart

    def bracket(self, s1, s2):
        return dorfman(StandardCourant(self.chart), s1, s2)

    def anchor(self, s):
        return list(s.u)

    def combine(self, coeffs, secs):
        out = secs[0].scale(coeffs[0])
        for c, s in zip(coeffs[1:], secs[1:]):
            out = out + s.scale(c)
        return out

    def components(self, s):
        return s.components()

    def membership(self, s) -> list[Expr]:
        if isinstance(self.structure, PreSymplectic):
            return [a - b for a, b in zip(s.alpha, flat(self.structure, s.u))]
        return [a - b for a, b in zip(s.u, cotangent_anchor(self.structure, s.alpha))]


def jacobiator_residuals(target, s1, s2, s3) -> list[Expr]:
    """Components of ``[s1, [s2, s3]] + cyclic``."""
    B = target.bracket
    terms = [B(s1, B(s2, s3)), B(s2, B(s3, s1)), B(s3, B(s1, s2))]
    one = as_expr(1.0)
    return target.components(target.combine([one, one, one], terms))


def check_jacobiator(target, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL, samples: int = 2,
                     degree: int = 2) -> ResidualReport:
    """Jacobiator of random polynomial section triples of an extended algebroid."""
    from .courant import random_polynomial

    chart = target.chart
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([plan.seed, 11])))
    rp = lambda: random_polynomial(chart.names, rng, degree)  # noqa: E731
    fields = []
    for _ in range(samples):
        secs = [([rp() for _ in range(chart.dim)], rp()) for _ in range(3)]
        fields.extend(jacobiator_residuals(target, *secs))
    return residual_check("jacobiator", fields, chart, plan, tol, tag="[s1, [s2, s3]] + cyclic = 0")


# morphism checks ------------------------------------------------------------------

@dataclass
class MorphismVerdict:
    bracket: ResidualReport
    anchor: ResidualReport
    membership: ResidualReport | None = None

    @property
    def reports(self) -> list[ResidualReport]:
        return [r for r in (self.membership, self.bracket, self.anchor) if r is not None]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def __bool__(self):
        return self.passed


def merge_morphism(name: str, verdict: MorphismVerdict, tag: str = "") -> ResidualReport:
    """One report for a morphism verdict; the note keeps the individual maxima."""
    rep = merge_reports(name, verdict.reports, tag)
    rep.passed = verdict.passed
    rep.note = ", ".join(f"{r.name[9:]} {r.max_residual:.3e}" for r in verdict.reports)
    return rep


def lie_algebroid_morphism_check(images: Sequence, A: LieAlgebroid, target, plan: SamplePlan = SamplePlan(),
                                 tol: float = DEFAULT_TOL) -> MorphismVerdict:
    """Check that ``e_a -> images[a]`` defines a Lie algebroid morphism ``A -> target``.

    Bracket residuals ``[phi e_a, phi e_b] - C^c_ab phi e_c`` for ``a < b``;
    anchor residuals ``rho_target(phi e_a) - rho_a``.  If the target has a
    ``membership`` method (graph Dirac structures) the images are also
    checked to lie in it.
    """
    r = A.rank
    if len(images) != r:
        raise ValueError(f"need one image per frame element ({r}), got {len(images)}")
    fields = []
    for a, b in itertools.combinations(range(r), 2):
        lhs = target.bracket(images[a], images[b])
        rhs = target.combine([A.C[a, b, c] for c in range(r)], list(images))
        fields.extend(x - y for x, y in zip(target.components(lhs), target.components(rhs)))
    points = sample_points(A.chart, plan)
    rep_b = residual_check("morphism-bracket", fields, A.chart, plan, tol, tag="phi[e1, e2] = [phi e1, phi e2]",
                           points=points)
    anc = [x - y for a in range(r) for x, y in zip(target.anchor(images[a]), A.rho[a])]
    rep_a = residual_check("morphism-anchor", anc, A.chart, plan, tol, tag="rho_2 phi = rho_1", points=points)
    rep_m = None
    if hasattr(target, "membership"):
        mem = [c for s in images for c in target.membership(s)]
        rep_m = residual_check("morphism-membership", mem, A.chart, plan, tol, tag="image lies in the graph",
                               points=points)
    return MorphismVerdict(rep_b, rep_a, rep_m)


@dataclass
class PropositionVerdict:
    """A morphism verdict and the condition it is claimed to be equivalent to (or implied by)."""

    name: str
    morphism: MorphismVerdict
    condition: ResidualReport | None = None
    hypotheses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.morphism.passed

    @property
    def agree(self) -> bool | None:
        """Verdict equality with ``condition``; ``None`` if there is no paired condition."""
        if self.condition is None:
            return None
        return self.morphism.passed == self.condition.passed

    def reports(self) -> list[ResidualReport]:
        out = list(self.morphism.reports)
        if self.condition is not None:
            out.append(self.condition)
        return out + list(self.hypotheses)


def _grad_mu(A, conn, mu):
    """``-(nabla mu)^*(e_a)`` as 1-form component lists."""
    D = dual_covariant_derivative(A, _conn(A, conn), _mu(A, mu))
    n = A.chart.dim
    return [[-D[i, a] for i in range(n)] for a in range(A.rank)]


def check_am_morphism(A, conn, w: PreSymplectic, mu, plan: SamplePlan = SamplePlan(),
                      tol: float = DEFAULT_TOL) -> PropositionVerdict:
    """``rho + mu^*: A -> TM + R`` is a morphism iff S3 holds."""
    from .momentum import check_s3

    mu = _mu(A, mu)
    images = [(list(A.rho[a]), mu[a]) for a in range(A.rank)]
    verdict = lie_algebroid_morphism_check(images, A, ExtendedAlgebroidTMR(w), plan, tol)
    return PropositionVerdict("comomentum-to-almeida-molino", verdict, check_s3(A, conn, w, mu, plan, tol))


def check_graph_omega_morphism(A, conn, w: PreSymplectic, mu, plan: SamplePlan = SamplePlan(),
                               tol: float = DEFAULT_TOL) -> PropositionVerdict:
    """``rho - (nabla mu)^*: A -> L_omega`` is a morphism iff S2 holds (for closed omega)."""
    from .momentum import check_s2

    grads = _grad_mu(A, conn, mu)
    images = [GeneralizedSection(list(A.rho[a]), grads[a]) for a in range(A.rank)]
    verdict = lie_algebroid_morphism_check(images, A, GraphTarget(w), plan, tol)
    return PropositionVerdict("graph-omega-morphism", verdict, check_s2(A, conn, w, mu, plan, tol),
                              [check_closed(w, plan, tol)])


def check_tstar_r_morphism(A, conn, P: PoissonBivector, mu, plan: SamplePlan = SamplePlan(),
                           tol: float = DEFAULT_TOL) -> PropositionVerdict:
    """``-(nabla mu)^* + mu^*: A -> T*M + R``; implied by P2, P3 and ``<S, mu> = 0``."""
    from .momentum import check_basic_curvature_pairing, check_p2, check_p3

    mu = _mu(A, mu)
    grads = _grad_mu(A, conn, mu)
    images = [(grads[a], mu[a]) for a in range(A.rank)]
    verdict = lie_algebroid_morphism_check(images, A, ExtendedAlgebroidTstarR(P), plan, tol)
    hyp = [check_p2(A, conn, P, mu, plan, tol), check_p3(A, conn, P, mu, plan, tol),
           check_basic_curvature_pairing(A, conn, mu, plan, tol)]
    return PropositionVerdict("comomentum-to-tstar-r", verdict, None, hyp)


def check_graph_pi_morphism(A, conn, P: PoissonBivector, mu, plan: SamplePlan = SamplePlan(),
                            tol: float = DEFAULT_TOL) -> PropositionVerdict:
    """``rho - (nabla mu)^*: A -> L_pi``; membership is exactly P2."""
    from .momentum import check_basic_curvature_pairing, check_p2

    grads = _grad_mu(A, conn, mu)
    images = [GeneralizedSection(list(A.rho[a]), grads[a]) for a in range(A.rank)]
    verdict = lie_algebroid_morphism_check(images, A, GraphTarget(P), plan, tol)
    hyp = [check_poisson(P, plan, tol), check_basic_curvature_pairing(A, conn, mu, plan, tol)]
    return PropositionVerdict("graph-pi-morphism", verdict, check_p2(A, conn, P, mu, plan, tol), hyp)


def check_cotangent_morphism(A, conn, P: PoissonBivector, mu, plan: SamplePlan = SamplePlan(),
                             tol: float = DEFAULT_TOL) -> PropositionVerdict:
    """``-(nabla mu)^*: A -> T*M`` (Koszul algebroid); implied by P2 and ``<S, mu> = 0``."""
    from .momentum import check_basic_curvature_pairing, check_p2

    grads = _grad_mu(A, conn, mu)
    T = cotangent_algebroid(P.chart, P, validate=False)
    verdict = lie_algebroid_morphism_check(grads, A, AlgebroidTarget(T), plan, tol)
    hyp = [check_p2(A, conn, P, mu, plan, tol), check_basic_curvature_pairing(A, conn, mu, plan, tol)]
    return PropositionVerdict("cotangent-morphism", verdict, None, hyp)


# dual bundles and Poisson maps ----------------------------------------------------

@dataclass
class FiberwiseLinearPoisson(PoissonBivector):
    """A bivector on ``(x, p)`` linear in the fiber coordinates ``p``."""

    base_dim: int = 0

    @property
    def fiber_names(self) -> tuple[str, ...]:
        return self.chart.names[self.base_dim:]


def _fresh_names(prefix: str, count: int, taken: Sequence[str]) -> list[str]:
    while True:
        names = [f"{prefix}{a + 1}" for a in range(count)]
        if not set(names) & set(taken):
            return names
        prefix += "_"


def dual_poisson(A: LieAlgebroid, pbox: float = 1.0, prefix: str = "p") -> FiberwiseLinearPoisson:
    """Fiberwise-linear bivector on ``A*``: ``{p_a, x^i} = rho^i_a`` and ``{p_a, p_b} = C^c_ab p_c``."""
    n, r = A.chart.dim, A.rank
    pn = _fresh_names(prefix, r, A.chart.names)
    chart = A.chart.extend(pn, [-pbox] * r, [pbox] * r)
    p = [var(x) for x in pn]
    pi = obj_array((n + r, n + r))
    for a in range(r):
        for i in range(n):
            pi[n + a, i] = A.rho[a, i]
            pi[i, n + a] = -A.rho[a, i]
        for b in range(r):
            pi[n + a, n + b] = esum(A.C[a, b, c] * p[c] for c in range(r))
    return FiberwiseLinearPoisson(chart, pi, n)


def tangent_lift_poisson(P: PoissonBivector, vbox: float = 1.0) -> FiberwiseLinearPoisson:
    """Tangent lift of ``pi`` as the dual of its Koszul algebroid, fiber coordinates ``v^i``."""
    return dual_poisson(cotangent_algebroid(P.chart, P, validate=False), vbox, prefix="v")


@dataclass
class SmoothMap:
    """``phi: source -> target`` given by one expression per target coordinate."""

    source: Chart
    target: Chart
    components: list

    def __post_init__(self):
        self.components = [as_expr(c) for c in self.components]
        if len(self.components) != self.target.dim:
            raise ValueError("need one component per target coordinate")
        extra = set().union(*(c.free for c in self.components)) - set(self.source.names)
        if extra:
            raise ValueError(f"components use unknown coordinates {sorted(extra)}")

    def jacobian(self) -> np.ndarray:
        J = obj_array((self.target.dim, self.source.dim))
        for k, c in enumerate(self.components):
            for i, x in enumerate(self.source.names):
                J[k, i] = differentiate(c, x)
        return J

    def check_range(self, points: np.ndarray) -> None:
        img = evaluate_fields(self.components, self.source, points).T
        inside = self.target.contains(img)
        if not inside.all():
            raise MapOutsideChart(points[int(np.argmin(inside))])

    def pullback(self, e: Expr) -> Expr:
        return substitute(as_expr(e), dict(zip(self.target.names, self.components)))


def poisson_map_check(phi: SmoothMap, P1: PoissonBivector, P2: PoissonBivector, plan: SamplePlan = SamplePlan(),
                      tol: float = DEFAULT_TOL) -> ResidualReport:
    """Residuals ``pi_2^{kl}(phi(m)) - d_i phi^k pi_1^{ij} d_j phi^l`` for ``k < l``."""
    src = phi.source
    points = sample_points(src, plan)
    phi.check_range(points)
    J = phi.jacobian()
    n, m = src.dim, phi.target.dim
    fields = []
    for k, l in itertools.combinations(range(m), 2):
        push = esum(J[k, i] * P1.pi[i, j] * J[l, j] for i in range(n) for j in range(n)
                    if not (is_zero(P1.pi[i, j]) or is_zero(J[k, i]) or is_zero(J[l, j])))
        fields.append(phi.pullback(P2.pi[k, l]) - push)
    return residual_check("poisson-map", fields, src, plan, tol, tag="phi_* pi_1 = pi_2", points=points)


def momentum_poisson_map(A: LieAlgebroid, conn, P: PoissonBivector, mu, vbox: float = 1.0, pbox: float | None = None):
    """The map ``(x, v) -> (x, p_a = -nabla_i mu_a v^i)`` from ``TM`` to ``A*``.

    Returns ``(phi, tangent lift, dual Poisson)``.  If ``pbox`` is omitted
    the target fiber box is sized to contain the image of the source box.
    """
    n = A.chart.dim
    lift = tangent_lift_poisson(P, vbox)
    v = [var(x) for x in lift.fiber_names]
    D = dual_covariant_derivative(A, _conn(A, conn), _mu(A, mu))
    comps = [var(x) for x in A.chart.names] + [-esum(D[i, a] * v[i] for i in range(n)) for a in range(A.rank)]
    if pbox is None:
        pbox = _fiber_bound(comps[n:], lift.chart)
    dual = dual_poisson(A, pbox)
    return SmoothMap(lift.chart, dual.chart, comps), lift, dual


def _fiber_bound(exprs, chart: Chart, count: int = 512) -> float:
    """A box half-width that contains the values of ``exprs`` over ``chart``."""
    if not exprs:
        return 1.0
    pts = sample_points(chart, SamplePlan(seed=0, count=count, margin=0.0))
    vals = np.abs(evaluate_fields(exprs, chart, pts))
    return float(2.0 * vals.max() + 1.0)


def dual_bundle_map(Phi, A1: LieAlgebroid, A2: LieAlgebroid, pbox: float = 1.0):
    """Dual of the bundle map ``phi(e_a) = Phi[a, b] e'_b``: ``(x, p') -> (x, p_a = Phi[a, b] p'_b)``.

    Returns ``(dual map A2* -> A1*, dualPoisson(A2), dualPoisson(A1))``.
    """
    n = A1.chart.dim
    Phi = to_expr_array(Phi, (A1.rank, A2.rank), A1.chart.names)
    D2 = dual_poisson(A2, pbox)
    q = [var(x) for x in D2.fiber_names]
    comps = [var(x) for x in A1.chart.names] + [esum(Phi[a, b] * q[b] for b in range(A2.rank)) for a in range(A1.rank)]
    D1 = dual_poisson(A1, _fiber_bound(comps[n:], D2.chart))
    return SmoothMap(D2.chart, D1.chart, comps), D2, D1


def bundle_map_dual_cross_check(Phi, A1: LieAlgebroid, A2: LieAlgebroid, plan: SamplePlan = SamplePlan(),
                                tol: float = DEFAULT_TOL) -> tuple[MorphismVerdict, ResidualReport]:
    """A bundle map is a Lie algebroid morphism iff its dual is a Poisson map.

    Returns both verdicts; they are expected to agree.
    """
    Phi = to_expr_array(Phi, (A1.rank, A2.rank), A1.chart.names)
    images = [list(Phi[a]) for a in range(A1.rank)]
    morph = lie_algebroid_morphism_check(images, A1, AlgebroidTarget(A2), plan, tol)
    phi, D2, D1 = dual_bundle_map(Phi, A1, A2)
    return morph, poisson_map_check(phi, D2, D1, plan, tol)


def poisson_dirac_cross_check(phi: SmoothMap, P1: PoissonBivector, P2: PoissonBivector,
                              plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL,
                              dirac_tol: float = 1e-8) -> tuple[ResidualReport, DiracMorphismReport]:
    """A map is Poisson iff it is a forward Dirac map between the graphs of the bivectors."""
    rep = poisson_map_check(phi, P1, P2, plan, tol)
    dm = dirac_morphism_check(phi.components, graph_pi(P1), graph_pi(P2), plan, dirac_tol)
    return rep, dm
