"""Suite orchestration: which checks run for a problem, and their descriptions.

A suite returns a flat list of reports.  Each item has ``name``, ``passed``
and ``to_dict()``; prerequisite checks (axioms, closedness, the Poisson
condition) are listed alongside the checks they guard.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .algebroid import check_axioms
from .connection import (
    anchor_covariant_residuals,
    basic_curvature,
    basic_curvature_from_torsion,
    jacobi_covariant_residuals,
)
from .courant import (
    StandardCourant,
    check_courant_axioms,
    check_dirac,
    graph_closure_residuals,
    graph_omega,
    graph_pi,
    random_polynomial,
)
from .geometry import check_closed, check_poisson
from .graded import (
    check_graded_poisson_map,
    check_q_squared,
    check_reproduction_m,
    check_reproduction_n,
    homological_vector_field_a1,
    homological_vector_field_tstar,
    master_equation_check,
    theta_m,
    theta_n,
)
from .manifold import ResidualReport, SamplePlan, residual_check, sample_points
from .momentum import IDENTITY_NAMES, hamiltonian_poisson, hamiltonian_symplectic, identity_suite
from .morphism import (
    MapOutsideChart,
    check_am_morphism,
    check_cotangent_morphism,
    check_graph_omega_morphism,
    check_graph_pi_morphism,
    check_tstar_r_morphism,
    bundle_map_dual_cross_check,
    merge_morphism,
    momentum_poisson_map,
    poisson_dirac_cross_check,
)
from .problem import Problem

__all__ = ["SUITES", "CHECKS", "MissingInputs", "SuiteResult", "run_suite", "requirements"]

SUITES = (
    "axioms",
    "geometry",
    "hamiltonian-symplectic",
    "hamiltonian-poisson",
    "identities",
    "courant",
    "dirac",
    "morphisms",
    "graded",
    "all",
)

# check name -> (residual formula, tag)
CHECKS: dict[str, tuple[str, str]] = {
    "axioms": ("ρ_a(ρ^i_b) − ρ_b(ρ^i_a) − C^c_{ab}ρ^i_c  and  C^e_{ad}C^d_{bc} + ρ_a(C^e_{bc}) + cyclic(abc)",
               "Lie algebroid identities"),
    "closed": ("∂_iω_{jk} + ∂_jω_{ki} + ∂_kω_{ij}", "closedness of the 2-form"),
    "poisson": ("π^{il}∂_lπ^{jk} + cyclic(ijk)", "Poisson condition"),
    "S1": ("(∇^bas_{e_a} ω)(∂_i, ∂_j)", "ω is invariant under the basic connection"),
    "S2": ("∇_iμ_a + ρ^j_a ω_{ji}", "covariant derivative of μ is minus ι_ρ ω"),
    "S3": ("ρ_a(μ_b) − ρ_b(μ_a) − C^c_{ab}μ_c − ω(ρ_a, ρ_b)", "A-differential of μ equals the pullback of ω"),
    "P1": ("(∇^bas_{e_a} π)^{ij}", "π is invariant under the basic connection"),
    "P2": ("ρ^i_a − π^{ij}∇_j μ_a", "anchor is the Hamiltonian vector field of ∇μ"),
    "P3": ("ρ_a(μ_b) − ρ_b(μ_a) − C^c_{ab}μ_c + π^{ij}∇_iμ_a∇_jμ_b", "A-differential of μ equals −π(∇μ, ∇μ)"),
    "sharp-basic-curvature": ("π^{ij}S^c_{jab}μ_c", "π♯ of the basic curvature paired with μ"),
    "basic-curvature-pairing": ("S^c_{iab}μ_c", "basic curvature paired with μ"),
    "basic-curvature-forms": ("expanded local S  −  (∇T + ρ·R)", "two local forms of the basic curvature"),
    "covariant-anchor-identity": ("(∇_{ρ(e_a)}ρ)(e_b) − (∇_{ρ(e_b)}ρ)(e_a) + ρ(T(e_a, e_b))",
                                  "anchor identity through torsion"),
    "covariant-jacobi-identity": ("(∇_{ρ(e_a)}T)(e_b, e_c) − T(e_a, T(e_b, e_c)) − R(ρ(e_a), ρ(e_b))e_c + cyclic",
                                  "Jacobi identity through torsion and curvature"),
    "courant-1": ("[[e1, [[e2, e3]]]] − [[[[e1, e2]], e3]] − [[e2, [[e1, e3]]]]", "Courant axiom 1 (Jacobi in Leibniz form)"),
    "courant-2": ("ρ([[e1, e2]]) − [ρ(e1), ρ(e2)]", "Courant axiom 2 (anchor is a bracket morphism)"),
    "courant-3": ("[[e1, f e2]] − f[[e1, e2]] − ρ(e1)(f) e2", "Courant axiom 3 (Leibniz rule)"),
    "courant-4": ("[[e1, e1]] − ½ D⟨e1, e1⟩", "Courant axiom 4 (symmetric part)"),
    "courant-5": ("ρ(e1)⟨e2, e3⟩ − ⟨[[e1, e2]], e3⟩ − ⟨e2, [[e1, e3]]⟩", "Courant axiom 5 (invariance of the pairing)"),
    "graph-closure": ("[[u + ω♭u, v + ω♭v]] − ([u,v] + ω♭[u,v])  or  [[Xα + α, Xβ + β]] − (X[α,β]_π + [α,β]_π)",
                      "closed-form brackets inside graph Dirac structures"),
    "isotropy": ("⟨s_i, s_j⟩ over a frame of L", "L is isotropic"),
    "involutivity": ("least-squares distance of [[s_i, s_j]] from span L", "L is closed under the Dorfman bracket"),
    "comomentum-to-almeida-molino": ("ρ + μ*: A → TM ⊕ ℝ bracket and anchor residuals",
                                     "morphism to TM ⊕ ℝ twisted by ω; equivalent to S3"),
    "graph-omega-morphism": ("ρ − (∇μ)*: A → L_ω bracket, anchor and membership residuals",
                             "morphism to the graph of ω; equivalent to S2"),
    "comomentum-to-tstar-r": ("−(∇μ)* + μ*: A → T*M ⊕ ℝ bracket and anchor residuals",
                              "morphism to T*M ⊕ ℝ; implied by P2, P3 and ⟨S, μ⟩ = 0"),
    "graph-pi-morphism": ("ρ − (∇μ)*: A → L_π bracket, anchor and membership residuals",
                          "morphism to the graph of π; membership is P2"),
    "cotangent-morphism": ("−(∇μ)*: A → T*M bracket and anchor residuals",
                           "morphism to the Koszul algebroid; implied by P2 and ⟨S, μ⟩ = 0"),
    "momentum-poisson-map": ("φ_*π_{TM} − π_{A*} for φ(x, v) = (x, −∇μ·v)",
                             "tangent lift to dual bundle is a Poisson map"),
    "momentum-dirac-morphism": ("least-squares existence and σ_min uniqueness for graph(π_{TM}) → graph(π_{A*})",
                                "same map as a forward Dirac morphism"),
    "anchor-morphism": ("ρ: A → TM bracket and anchor residuals", "anchor as a Lie algebroid morphism"),
    "anchor-dual-poisson-map": ("φ_*π_{T*M} − π_{A*} for φ(x, q) = (x, ρ^i_a q_i)",
                                "dual of the anchor is a Poisson map"),
    "master-equation-N": ("{Θ_N, Θ_N}", "homological function of the dual bundle"),
    "master-equation-M": ("{Θ_M, Θ_M}", "homological function of T*M ⊕ ℝ"),
    "q-squared-A1": ("Q² on every coordinate of A[1]", "homological vector field of A"),
    "q-squared-tstar": ("Q² on every coordinate of T*[1]M ⊕ ℝ[1]", "homological vector field of π"),
    "reproduction-dual": ("−{{F, Θ_N}, G} − (section bracket, ρ(a)g − ρ(b)f)", "derived bracket reproduces A ⊕ ℝ"),
    "reproduction-tstar-r": ("{{U, Θ_M}, V} − (T*M ⊕ ℝ bracket)", "derived bracket reproduces T*M ⊕ ℝ"),
    "graded-poisson-map": ("Φ({F, G}_N) − {ΦF, ΦG}_M, Φ substitutes p_a → −∇μ_a·ξ + μ_a",
                           "momentum substitution is a graded Poisson map"),
}
CHECKS.update({name: (desc, "momentum identity chain") for name, desc in IDENTITY_NAMES.items()})


class MissingInputs(Exception):
    """The problem lacks a key the suite needs."""

    def __init__(self, suite: str, missing: list[str]):
        super().__init__(f"suite {suite!r} needs {', '.join(missing)}")
        self.suite = suite
        self.missing = missing


@dataclass
class FlagReport:
    """A boolean outcome (verdict agreement) carried next to residual reports."""

    name: str
    passed: bool
    tag: str = ""
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "tag": self.tag, "passed": bool(self.passed), "note": self.note}


@dataclass
class SuiteResult:
    suite: str
    reports: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def failures(self) -> list[str]:
        return [r.name for r in self.reports if not r.passed]


def _needs(prob: Problem) -> dict[str, list[str]]:
    mom = ["momentum"]
    return {
        "axioms": [],
        "geometry": ["presymplectic|poisson"],
        "hamiltonian-symplectic": ["presymplectic"] + mom,
        "hamiltonian-poisson": ["poisson"] + mom,
        "identities": ["poisson"] + mom,
        "courant": [],
        "dirac": ["dirac"] + (["presymplectic"] if prob.dirac == "graph-omega" else
                              ["poisson"] if prob.dirac == "graph-pi" else []),
        "morphisms": ["presymplectic|poisson"] + mom,
        "graded": [],
    }


def requirements(prob: Problem, suite: str) -> list[str]:
    """Inputs the suite needs that the problem does not have."""
    have = {k for k in ("presymplectic", "poisson", "momentum", "dirac") if getattr(prob, k) is not None}
    missing = []
    for key in _needs(prob)[suite]:
        if not any(k in have for k in key.split("|")):
            missing.append(key.replace("|", " or "))
    return missing


def _renamed(rep, name: str, tag: str | None = None):
    rep = dataclasses.replace(rep, name=name)
    if tag is not None:
        rep.tag = tag
    return rep


def _tagged(rep: ResidualReport) -> ResidualReport:
    if rep.name in CHECKS:
        rep.tag = CHECKS[rep.name][1]
    return rep


def _prop(verdict, with_condition: bool) -> list:
    out = [merge_morphism(verdict.name, verdict.morphism)]
    if with_condition and verdict.condition is not None:
        out.append(FlagReport(f"{verdict.name}-matches-{verdict.condition.name}", bool(verdict.agree),
                              tag="morphism verdict equals the condition verdict",
                              note=f"morphism {verdict.passed}, {verdict.condition.name} {verdict.condition.passed}"))
    return out


def _random_pairs(names, rank_or_dim: int, seed: int, count: int = 2):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 23])))
    rp = lambda: random_polynomial(names, rng, 2)  # noqa: E731
    return [(([rp() for _ in range(rank_or_dim)], rp()), ([rp() for _ in range(rank_or_dim)], rp()))
            for _ in range(count)]


# suites ------------------------------------------------------------------------------

def _axioms(prob, plan, tol):
    return [check_axioms(prob.algebroid, plan, tol)]


def _geometry(prob, plan, tol):
    out = []
    if prob.presymplectic is not None:
        out.append(_renamed(check_closed(prob.presymplectic, plan, tol), "closed", CHECKS["closed"][1]))
    if prob.poisson is not None:
        out.append(_renamed(check_poisson(prob.poisson, plan, tol), "poisson", CHECKS["poisson"][1]))
    return out


def _ham_symplectic(prob, plan, tol):
    A, conn = prob.algebroid, prob.connection
    v = hamiltonian_symplectic(A, conn, prob.presymplectic, prob.momentum, plan, tol)
    pre = [check_axioms(A, plan, tol), _renamed(check_closed(prob.presymplectic, plan, tol), "closed")]
    return pre + [_renamed(r, k) for k, r in v.reports.items()]


def _ham_poisson(prob, plan, tol):
    A, conn = prob.algebroid, prob.connection
    v = hamiltonian_poisson(A, conn, prob.poisson, prob.momentum, plan, tol)
    pre = [check_axioms(A, plan, tol), _renamed(check_poisson(prob.poisson, plan, tol), "poisson")]
    return pre + [_renamed(r, k) for k, r in v.reports.items()] + [
        _renamed(v.extra["sharp-basic-curvature"], "sharp-basic-curvature")]


def _identities(prob, plan, tol):
    A, conn = prob.algebroid, prob.connection
    out = identity_suite(A, conn, prob.poisson, prob.momentum, plan, tol)
    points = sample_points(A.chart, plan)
    S1 = basic_curvature(A, conn)
    S2 = basic_curvature_from_torsion(A, conn)
    out.append(residual_check("basic-curvature-forms", list((S1 - S2).ravel()), A.chart, plan, tol, points=points))
    out.append(residual_check("covariant-anchor-identity", anchor_covariant_residuals(A, conn), A.chart, plan, tol,
                              points=points))
    out.append(residual_check("covariant-jacobi-identity", jacobi_covariant_residuals(A, conn), A.chart, plan, tol,
                              points=points))
    return out


def _courant(prob, plan, tol):
    E = StandardCourant(prob.chart, prob.hflux)
    out = check_courant_axioms(E, plan, tol)
    out = [_renamed(r, f"courant-{k + 1}") for k, r in enumerate(out)]
    structures = [s for s in (prob.presymplectic, prob.poisson) if s is not None]
    if structures:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([plan.seed, 29])))
        n = prob.chart.dim
        fields = []
        plain = StandardCourant(prob.chart)
        for s in structures:
            for _ in range(2):
                u = [random_polynomial(prob.chart.names, rng, 2) for _ in range(n)]
                v = [random_polynomial(prob.chart.names, rng, 2) for _ in range(n)]
                fields.extend(graph_closure_residuals(plain, s, u, v))
        out.append(residual_check("graph-closure", fields, prob.chart, plan, tol))
    return out


def _dirac(prob, plan, tol):
    E = StandardCourant(prob.chart)
    if prob.dirac == "graph-omega":
        pre = [_renamed(check_closed(prob.presymplectic, plan, tol), "closed")]
        L = graph_omega(prob.presymplectic)
    else:
        pre = [_renamed(check_poisson(prob.poisson, plan, tol), "poisson")]
        L = graph_pi(prob.poisson)
    return pre + list(check_dirac(E, L, plan, tol))


def _morphisms(prob, plan, tol):
    A, conn, mu = prob.algebroid, prob.connection, prob.momentum
    out = [check_axioms(A, plan, tol)]
    if prob.presymplectic is not None:
        w = prob.presymplectic
        out.append(_renamed(check_closed(w, plan, tol), "closed"))
        out += _prop(check_am_morphism(A, conn, w, mu, plan, tol), True)
        out += _prop(check_graph_omega_morphism(A, conn, w, mu, plan, tol), True)
    if prob.poisson is not None:
        P = prob.poisson
        out.append(_renamed(check_poisson(P, plan, tol), "poisson"))
        out += _prop(check_cotangent_morphism(A, conn, P, mu, plan, tol), False)
        out += _prop(check_tstar_r_morphism(A, conn, P, mu, plan, tol), False)
        out += _prop(check_graph_pi_morphism(A, conn, P, mu, plan, tol), True)
        phi, lift, dual = momentum_poisson_map(A, conn, P, mu)
        try:
            rep, dm = poisson_dirac_cross_check(phi, lift, dual, plan, tol)
        except MapOutsideChart as err:
            out.append(FlagReport("momentum-dirac-morphism", False, note=str(err)))
        else:
            out.append(_renamed(rep, "momentum-poisson-map"))
            out.append(_named_dirac(dm, "momentum-dirac-morphism"))
            out.append(FlagReport("momentum-poisson-matches-dirac", rep.passed == dm.passed,
                                  tag="Poisson map verdict equals Dirac morphism verdict"))
    rho = [[A.rho[a, i] for i in range(A.chart.dim)] for a in range(A.rank)]
    from .algebroid import tangent_algebroid

    morph, dual = bundle_map_dual_cross_check(rho, A, tangent_algebroid(A.chart), plan, tol)
    out.append(merge_morphism("anchor-morphism", morph))
    out.append(_renamed(dual, "anchor-dual-poisson-map"))
    out.append(FlagReport("anchor-morphism-matches-dual", morph.passed == dual.passed,
                          tag="morphism verdict equals dual Poisson map verdict"))
    return out


class _NamedDirac:
    def __init__(self, dm, name):
        self.dm = dm
        self.name = name

    @property
    def passed(self):
        return self.dm.passed

    def to_dict(self):
        d = self.dm.to_dict()
        d["name"] = self.name
        d["tag"] = CHECKS[self.name][1]
        return d


def _named_dirac(dm, name):
    return _NamedDirac(dm, name)


def _graded(prob, plan, tol):
    A = prob.algebroid
    n, r = A.chart.dim, A.rank
    out = [
        _renamed(master_equation_check(theta_n(A), plan, tol), "master-equation-N"),
        _renamed(check_q_squared(homological_vector_field_a1(A), plan, tol), "q-squared-A1"),
        check_reproduction_n(A, _random_pairs(A.chart.names, r, plan.seed), plan, tol),
    ]
    if prob.poisson is not None:
        P = prob.poisson
        out += [
            _renamed(master_equation_check(theta_m(P), plan, tol), "master-equation-M"),
            _renamed(check_q_squared(homological_vector_field_tstar(P), plan, tol), "q-squared-tstar"),
            check_reproduction_m(P, _random_pairs(A.chart.names, n, plan.seed), plan, tol),
        ]
        if prob.momentum is not None:
            out.append(check_graded_poisson_map(A, prob.connection, P, prob.momentum, plan, tol))
    return out


_RUNNERS = {
    "axioms": _axioms,
    "geometry": _geometry,
    "hamiltonian-symplectic": _ham_symplectic,
    "hamiltonian-poisson": _ham_poisson,
    "identities": _identities,
    "courant": _courant,
    "dirac": _dirac,
    "morphisms": _morphisms,
    "graded": _graded,
}


def run_suite(prob: Problem, suite: str, plan: SamplePlan, tol: float) -> SuiteResult:
    """Run ``suite``; ``all`` runs every suite whose inputs are present and lists the rest as skipped."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    if suite == "all":
        res = SuiteResult("all")
        seen = {}
        for name in _RUNNERS:
            missing = requirements(prob, name)
            if missing:
                res.skipped[name] = missing
                continue
            for rep in _RUNNERS[name](prob, plan, tol):
                seen.setdefault(rep.name, rep)
        res.reports = [_tag(r) for _, r in sorted(seen.items())]
        return res
    missing = requirements(prob, suite)
    if missing:
        raise MissingInputs(suite, missing)
    reports = _RUNNERS[suite](prob, plan, tol)
    return SuiteResult(suite, sorted((_tag(r) for r in reports), key=lambda r: r.name))


def _tag(rep):
    if isinstance(rep, ResidualReport):
        return _tagged(rep)
    if isinstance(rep, FlagReport) and not rep.tag and rep.name in CHECKS:
        rep.tag = CHECKS[rep.name][1]
    return rep
