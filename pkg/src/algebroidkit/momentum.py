"""Momentum sections: the pre-symplectic conditions S1-S3, the Poisson
conditions P1-P3, the basic curvature lemma and the chain of local
identities that leads from P1-P3 to it.

All checks run on arbitrary data and return a :class:`ResidualReport`; a
failing check never prevents the others from running.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebroid import AForm, LieAlgebroid, a_differential, obj_array, vector_apply
from .connection import (
    Connection,
    basic_curvature,
    basic_on_bivector,
    basic_on_covariant,
    dual_covariant_derivative,
    torsion,
    trivial_connection,
)
from .expr import Expr, as_expr, differentiate, esum, is_zero, parse
from .geometry import PoissonBivector, PreSymplectic, check_closed
from .manifold import DEFAULT_TOL, ResidualReport, SamplePlan, residual_check, sample_points

__all__ = [
    "MomentumSection",
    "HamiltonianVerdict",
    "check_s1",
    "check_s2",
    "check_s3",
    "check_p1",
    "check_p2",
    "check_p3",
    "basic_curvature_pairing",
    "check_basic_curvature_pairing",
    "check_sharp_basic_curvature",
    "second_covariant_derivative",
    "identity_suite",
    "IDENTITY_NAMES",
    "hamiltonian_symplectic",
    "hamiltonian_poisson",
    "trivial_bundle_reduction",
]


@dataclass
class MomentumSection:
    mu: list

    def __post_init__(self):
        self.mu = [as_expr(m) for m in self.mu]

    def __len__(self):
        return len(self.mu)

    def __getitem__(self, a):
        return self.mu[a]

    @classmethod
    def parse(cls, sources: Sequence[str], names: Sequence[str]) -> "MomentumSection":
        return cls([parse(s, names) for s in sources])

    def scaled(self, lam: float) -> "MomentumSection":
        return MomentumSection([as_expr(lam) * m for m in self.mu])


@dataclass
class HamiltonianVerdict:
    reports: dict
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values())

    def __bool__(self):
        return self.passed


def _mu(A: LieAlgebroid, mu) -> list[Expr]:
    mu = list(mu.mu if isinstance(mu, MomentumSection) else mu)
    if len(mu) != A.rank:
        raise ValueError(f"momentum section has {len(mu)} components, algebroid rank is {A.rank}")
    return [as_expr(m) for m in mu]


def _conn(A, conn):
    return trivial_connection(A) if conn is None else conn


def _pairs(n):
    return itertools.combinations(range(n), 2)


# pre-symplectic conditions ---------------------------------------------------

def check_s1(A: LieAlgebroid, conn: Connection | None, w: PreSymplectic,
             plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    """Basic A-connection of the 2-form vanishes on every frame element."""
    conn = _conn(A, conn)
    fields = []
    for a in range(A.rank):
        D = basic_on_covariant(A, conn, A.frame(a), w.omega)
        fields.extend(D[i, j] for i, j in _pairs(A.chart.dim))
    return residual_check("S1", fields, A.chart, plan, tol, tag="basic connection kills omega")


def s2_residuals(A, conn, w: PreSymplectic, mu) -> list[Expr]:
    """``nabla_i mu_a + rho^j_a omega_ji``."""
    mu = _mu(A, mu)
    Dmu = dual_covariant_derivative(A, _conn(A, conn), mu)
    n = A.chart.dim
    return [
        Dmu[i, a] + esum(A.rho[a, j] * w.omega[j, i] for j in range(n))
        for a in range(A.rank)
        for i in range(n)
    ]


def check_s2(A, conn, w, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    return residual_check("S2", s2_residuals(A, conn, w, mu), A.chart, plan, tol,
                          tag="nabla mu = -iota_rho omega")


def two_form_on(w: PreSymplectic, u, v) -> Expr:
    n = w.chart.dim
    return esum(u[i] * v[j] * w.omega[i, j] for i in range(n) for j in range(n) if not is_zero(w.omega[i, j]))


def s3_residuals(A, w: PreSymplectic, mu) -> list[Expr]:
    """``(A-d mu)(e_a, e_b) - omega(rho_a, rho_b)`` for ``a < b``."""
    mu = _mu(A, mu)
    dmu = a_differential(A, AForm.from_components(A.rank, 1, mu))
    return [dmu[(a, b)] - two_form_on(w, A.rho[a], A.rho[b]) for a, b in _pairs(A.rank)]


def check_s3(A, conn, w, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    return residual_check("S3", s3_residuals(A, w, mu), A.chart, plan, tol,
                          tag="A-d mu = rho* omega")


# Poisson conditions ------------------------------------------------------------

def check_p1(A, conn, P: PoissonBivector, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    """Basic A-connection of the bivector vanishes on every frame element."""
    conn = _conn(A, conn)
    fields = []
    for a in range(A.rank):
        D = basic_on_bivector(A, conn, A.frame(a), P.pi)
        fields.extend(D[i, j] for i, j in _pairs(A.chart.dim))
    return residual_check("P1", fields, A.chart, plan, tol, tag="basic connection kills pi")


def p2_residuals(A, conn, P: PoissonBivector, mu) -> list[Expr]:
    """``rho^i_a - pi^{ij} nabla_j mu_a``."""
    mu = _mu(A, mu)
    Dmu = dual_covariant_derivative(A, _conn(A, conn), mu)
    n = A.chart.dim
    return [
        A.rho[a, i] - esum(P.pi[i, j] * Dmu[j, a] for j in range(n) if not is_zero(P.pi[i, j]))
        for a in range(A.rank)
        for i in range(n)
    ]


def check_p2(A, conn, P, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    return residual_check("P2", p2_residuals(A, conn, P, mu), A.chart, plan, tol,
                          tag="rho = pi# nabla mu")


def _pi_pair(P, Dmu, a, b) -> Expr:
    """``pi^{ij} nabla_i mu_a nabla_j mu_b``."""
    n = P.chart.dim
    return esum(P.pi[i, j] * Dmu[i, a] * Dmu[j, b] for i in range(n) for j in range(n) if not is_zero(P.pi[i, j]))


def p3_residuals(A, conn, P: PoissonBivector, mu) -> list[Expr]:
    """``rho_a(mu_b) - rho_b(mu_a) - C^c_ab mu_c + pi^{ij} nabla_i mu_a nabla_j mu_b`` for ``a < b``."""
    mu = _mu(A, mu)
    Dmu = dual_covariant_derivative(A, _conn(A, conn), mu)
    out = []
    for a, b in _pairs(A.rank):
        out.append(
            vector_apply(A.rho[a], mu[b], A.names)
            - vector_apply(A.rho[b], mu[a], A.names)
            - esum(A.C[a, b, c] * mu[c] for c in range(A.rank))
            + _pi_pair(P, Dmu, a, b)
        )
    return out


def check_p3(A, conn, P, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    return residual_check("P3", p3_residuals(A, conn, P, mu), A.chart, plan, tol,
                          tag="bracket compatibility of mu")


# basic curvature and the identity chain ------------------------------------------

def basic_curvature_pairing(A, conn, mu) -> np.ndarray:
    """``<S, mu>`` as an array ``[j, a, b] = S^c_jab mu_c``."""
    mu = _mu(A, mu)
    S = basic_curvature(A, _conn(A, conn))
    n, r = A.chart.dim, A.rank
    out = obj_array((n, r, r))
    for j in range(n):
        for a, b in itertools.product(range(r), repeat=2):
            out[j, a, b] = esum(S[j, a, b, c] * mu[c] for c in range(r))
    return out


def check_basic_curvature_pairing(A, conn, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    """The unsharped condition ``S^c_jab mu_c = 0``."""
    Smu = basic_curvature_pairing(A, conn, mu)
    fields = [Smu[j, a, b] for j in range(A.chart.dim) for a, b in _pairs(A.rank)]
    return residual_check("basic-curvature-pairing", fields, A.chart, plan, tol, tag="<S, mu> = 0")


def check_sharp_basic_curvature(A, conn, P: PoissonBivector, mu, plan: SamplePlan = SamplePlan(),
                                tol: float = DEFAULT_TOL) -> ResidualReport:
    """``pi^{ij} S^c_jab mu_c``, which vanishes for every Hamiltonian algebroid."""
    Smu = basic_curvature_pairing(A, conn, mu)
    n = A.chart.dim
    fields = [
        esum(P.pi[i, j] * Smu[j, a, b] for j in range(n) if not is_zero(P.pi[i, j]))
        for i in range(n)
        for a, b in _pairs(A.rank)
    ]
    return residual_check("sharp-basic-curvature", fields, A.chart, plan, tol, tag="pi# <S, mu> = 0")


def second_covariant_derivative(A, conn, Dmu: np.ndarray) -> np.ndarray:
    """``[k, j, a] = nabla_k nabla_j mu_a = d_k(nabla_j mu_a) - omega^b_ak nabla_j mu_b``.

    Only the ``A*`` index is differentiated covariantly; no connection on ``TM``.
    """
    conn = _conn(A, conn)
    n, r = A.chart.dim, A.rank
    out = obj_array((n, n, r))
    for k in range(n):
        for j in range(n):
            for a in range(r):
                out[k, j, a] = differentiate(Dmu[j, a], A.names[k]) - esum(
                    conn.omega[a, b, k] * Dmu[j, b] for b in range(r)
                )
    return out


IDENTITY_NAMES = {
    "lie-identity-substituted": "anchor identity with rho replaced by pi# nabla mu",
    "lie-identity-covariant": "covariant form of the substituted anchor identity",
    "bracket-compat-covariant": "pi(nabla mu_a, nabla mu_b) - <mu, T(e_a, e_b)>",
    "bracket-compat-derivative": "covariant derivative of the previous identity, with the basic curvature term",
    "bracket-compat-derivative-sharp": "pi# applied to the previous identity",
    "derivative-without-basic-curvature": "previous identity with <S, mu> dropped; needs <S, mu> = 0",
    "koszul-morphism": "-[nabla mu_a, nabla mu_b]_pi - nabla mu([e_a, e_b]); needs <S, mu> = 0",
}


def _chain_fields(A, conn, P: PoissonBivector, mu) -> dict:
    from .geometry import koszul_bracket

    conn = _conn(A, conn)
    mu = _mu(A, mu)
    n, r = A.chart.dim, A.rank
    names = A.names
    pi = P.pi
    Dmu = dual_covariant_derivative(A, conn, mu)
    DDmu = second_covariant_derivative(A, conn, Dmu)
    T = torsion(A, conn)
    Smu = basic_curvature_pairing(A, conn, mu)
    nz = [(k, l) for k in range(n) for l in range(n) if not is_zero(pi[k, l])]
    dpi = {(j, k, l): differentiate(pi[k, l], names[j]) for j in range(n) for k in range(n) for l in range(n)}

    def quad(j, a, b, second):
        """``pi^{kl} D_k D_j mu_a D_l mu_b + pi^{kl} D_k mu_a D_l D_j mu_b + d_j pi^{kl} D_k mu_a D_l mu_b``."""
        terms = []
        for k, l in nz:
            terms.append(pi[k, l] * second(k, j, a) * Dmu[l, b])
            terms.append(pi[k, l] * Dmu[k, a] * second(l, j, b))
        for k in range(n):
            for l in range(n):
                if not is_zero(dpi[j, k, l]):
                    terms.append(dpi[j, k, l] * Dmu[k, a] * Dmu[l, b])
        return esum(terms)

    partial = lambda k, j, a: differentiate(Dmu[j, a], names[k])  # noqa: E731
    covariant = lambda k, j, a: DDmu[k, j, a]  # noqa: E731

    def sharp_i(vec_j, i):
        return esum(pi[i, j] * vec_j[j] for j in range(n) if not is_zero(pi[i, j]))

    out = {k: [] for k in IDENTITY_NAMES}
    for a, b in _pairs(r):
        substituted = [-quad(j, a, b, partial) - esum(A.C[a, b, c] * Dmu[j, c] for c in range(r)) for j in range(n)]
        cov = [quad(j, a, b, covariant) - esum(T[a, b, c] * Dmu[j, c] for c in range(r)) for j in range(n)]
        deriv = [cov[j] - Smu[j, a, b] for j in range(n)]
        for i in range(n):
            out["lie-identity-substituted"].append(sharp_i(substituted, i))
            out["lie-identity-covariant"].append(sharp_i(cov, i))
            out["bracket-compat-derivative-sharp"].append(sharp_i(deriv, i))
        out["bracket-compat-covariant"].append(_pi_pair(P, Dmu, a, b) - esum(T[a, b, c] * mu[c] for c in range(r)))
        out["bracket-compat-derivative"].extend(deriv)
        out["derivative-without-basic-curvature"].extend(cov)
        kb = koszul_bracket(P, [Dmu[j, a] for j in range(n)], [Dmu[j, b] for j in range(n)])
        out["koszul-morphism"].extend(
            -kb[j] - esum(A.C[a, b, c] * Dmu[j, c] for c in range(r)) for j in range(n)
        )
    return out


def identity_suite(A, conn, P: PoissonBivector, mu, plan: SamplePlan = SamplePlan(),
                   tol: float = DEFAULT_TOL) -> list[ResidualReport]:
    """One report per identity of the chain, in the order of ``IDENTITY_NAMES``."""
    fields = _chain_fields(A, conn, P, mu)
    points = sample_points(A.chart, plan)
    return [
        residual_check(name, fields[name], A.chart, plan, tol, tag=IDENTITY_NAMES[name], points=points)
        for name in IDENTITY_NAMES
    ]


# verdicts ------------------------------------------------------------------------

def hamiltonian_symplectic(A, conn, w, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> HamiltonianVerdict:
    return HamiltonianVerdict({
        "S1": check_s1(A, conn, w, plan, tol),
        "S2": check_s2(A, conn, w, mu, plan, tol),
        "S3": check_s3(A, conn, w, mu, plan, tol),
    })


def hamiltonian_poisson(A, conn, P, mu, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> HamiltonianVerdict:
    """P1-P3 decide the verdict; the basic curvature reports ride along in ``extra``."""
    return HamiltonianVerdict(
        {
            "P1": check_p1(A, conn, P, plan, tol),
            "P2": check_p2(A, conn, P, mu, plan, tol),
            "P3": check_p3(A, conn, P, mu, plan, tol),
        },
        {
            "sharp-basic-curvature": check_sharp_basic_curvature(A, conn, P, mu, plan, tol),
            "basic-curvature-pairing": check_basic_curvature_pairing(A, conn, mu, plan, tol),
        },
    )


def trivial_bundle_reduction(A, w: PreSymplectic, mu, plan: SamplePlan = SamplePlan(),
                             tol: float = DEFAULT_TOL) -> dict:
    """Momentum map conditions on a trivial bundle with the trivial connection.

    Returns the ``d mu = -iota_rho omega`` report, the infinitesimal
    equivariance report ``rho_a(mu_b) - C^c_ab mu_c`` and, for comparison,
    the closedness and S1 reports; when the first three pass S1 follows.
    """
    mu = _mu(A, mu)
    conn = trivial_connection(A)
    r = A.rank
    equiv = [
        vector_apply(A.rho[a], mu[b], A.names) - esum(A.C[a, b, c] * mu[c] for c in range(r))
        for a in range(r)
        for b in range(r)
    ]
    rep_d = residual_check("d-mu", s2_residuals(A, conn, w, mu), A.chart, plan, tol, tag="d mu = -iota_rho omega")
    rep_e = residual_check("equivariance", equiv, A.chart, plan, tol, tag="rho(e_a) mu_b = mu([e_a, e_b])")
    return {
        "d-mu": rep_d,
        "equivariance": rep_e,
        "closed": check_closed(w, plan, tol),
        "S1": check_s1(A, conn, w, plan, tol),
    }
