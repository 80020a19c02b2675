"""Pre-symplectic forms, Poisson bivectors and the Koszul bracket.

Sign conventions used everywhere in the package:

* ``sharp``: ``(pi# alpha)^i = pi^{ij} alpha_j``
* ``flat``: ``(omega_flat v)_j = v^i omega_{ij}``
* ``{f, g} = pi^{ij} d_i f d_j g``
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebroid import exterior_derivative, lie_derivative_form, obj_array, to_expr_array, vector_apply
from .expr import Expr, differentiate, esum, is_zero
from .manifold import DEFAULT_TOL, Chart, ResidualReport, SamplePlan, evaluate_fields, residual_check, sample_points

__all__ = [
    "PreSymplectic",
    "PoissonBivector",
    "antisymmetrize_upper",
    "check_closed",
    "check_poisson",
    "poisson_residuals",
    "sharp",
    "flat",
    "pairing_bivector",
    "poisson_bracket",
    "koszul_bracket",
    "koszul_bracket_intrinsic",
    "cotangent_anchor",
    "kernel_diagnostic",
]


def antisymmetrize_upper(data, n: int, names: Sequence[str] | None = None) -> np.ndarray:
    """Antisymmetric ``n x n`` array built from the strict upper triangle of ``data``."""
    arr = to_expr_array(data, names=names)
    if arr.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} array, got {arr.shape}")
    out = obj_array((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = arr[i, j]
            out[j, i] = -arr[i, j]
    return out


@dataclass
class PreSymplectic:
    """A 2-form ``omega[i, j]``; only the ``i < j`` entries of the input are read."""

    chart: Chart
    omega: np.ndarray

    def __post_init__(self):
        self.omega = antisymmetrize_upper(self.omega, self.chart.dim, self.chart.names)


@dataclass
class PoissonBivector:
    """A bivector ``pi[i, j]``; only the ``i < j`` entries of the input are read."""

    chart: Chart
    pi: np.ndarray

    def __post_init__(self):
        self.pi = antisymmetrize_upper(self.pi, self.chart.dim, self.chart.names)


def check_closed(w: PreSymplectic, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    """Residuals ``d_i w_jk + d_j w_ki + d_k w_ij`` for ``i < j < k``."""
    dw = exterior_derivative(w.omega, w.chart.names)
    fields = [dw[idx] for idx in itertools.combinations(range(w.chart.dim), 3)]
    return residual_check("closed", fields, w.chart, plan, tol, tag="d omega = 0")


def poisson_residuals(P: PoissonBivector) -> list[Expr]:
    """``pi^{il} d_l pi^{jk} + cyclic(ijk)`` for ``i < j < k``."""
    n = P.chart.dim
    names = P.chart.names
    pi = P.pi
    out = []
    for i, j, k in itertools.combinations(range(n), 3):
        terms = []
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            terms.extend(pi[a, l] * differentiate(pi[b, c], names[l]) for l in range(n) if not is_zero(pi[a, l]))
        out.append(esum(terms))
    return out


def check_poisson(P: PoissonBivector, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    return residual_check("poisson", poisson_residuals(P), P.chart, plan, tol, tag="[pi, pi] = 0")


def sharp(P: PoissonBivector, alpha: Sequence[Expr]) -> list[Expr]:
    n = P.chart.dim
    return [esum(P.pi[i, j] * alpha[j] for j in range(n) if not is_zero(P.pi[i, j])) for i in range(n)]


def flat(w: PreSymplectic, v: Sequence[Expr]) -> list[Expr]:
    n = w.chart.dim
    return [esum(v[i] * w.omega[i, j] for i in range(n) if not is_zero(w.omega[i, j])) for j in range(n)]


def pairing_bivector(P: PoissonBivector, alpha, beta) -> Expr:
    """``pi(alpha, beta) = pi^{ij} alpha_i beta_j``."""
    n = P.chart.dim
    return esum(P.pi[i, j] * alpha[i] * beta[j] for i in range(n) for j in range(n) if not is_zero(P.pi[i, j]))


def poisson_bracket(P: PoissonBivector, f: Expr, g: Expr) -> Expr:
    names = P.chart.names
    return pairing_bivector(P, [differentiate(f, x) for x in names], [differentiate(g, x) for x in names])


def koszul_bracket(P: PoissonBivector, alpha, beta) -> list[Expr]:
    """``([alpha, beta]_pi)_j = pi^{kl} d_k alpha_j beta_l + pi^{kl} alpha_k d_l beta_j + d_j pi^{kl} alpha_k beta_l``.

    This equals ``L_{X(alpha)} beta - L_{X(beta)} alpha - d(pi(alpha, beta))``
    where ``X = -pi#`` is the cotangent anchor (see :func:`koszul_bracket_intrinsic`).
    """
    n = P.chart.dim
    names = P.chart.names
    pi = P.pi
    out = []
    for j in range(n):
        terms = []
        for k in range(n):
            for l in range(n):
                if is_zero(pi[k, l]):
                    continue
                terms.append(pi[k, l] * differentiate(alpha[j], names[k]) * beta[l])
                terms.append(pi[k, l] * alpha[k] * differentiate(beta[j], names[l]))
                terms.append(differentiate(pi[k, l], names[j]) * alpha[k] * beta[l])
        out.append(esum(terms))
    return out


def cotangent_anchor(P: PoissonBivector, alpha) -> list[Expr]:
    """``X(alpha)^i = pi^{ji} alpha_j = -(pi# alpha)^i``, the anchor of the Koszul algebroid.

    It is the vector field for which ``X(alpha)(f) = pi(alpha, df)``.
    """
    return [-s for s in sharp(P, alpha)]


def koszul_bracket_intrinsic(P: PoissonBivector, alpha, beta) -> list[Expr]:
    """``L_{X(alpha)} beta - L_{X(beta)} alpha - d(pi(alpha, beta))`` with ``X`` as in :func:`cotangent_anchor`."""
    names = P.chart.names
    la = lie_derivative_form(cotangent_anchor(P, alpha), beta, names)
    lb = lie_derivative_form(cotangent_anchor(P, beta), alpha, names)
    p = pairing_bivector(P, alpha, beta)
    return [la[j] - lb[j] - differentiate(p, names[j]) for j in range(P.chart.dim)]


@dataclass
class RankReport:
    min_rank: int
    max_rank: int
    ranks: np.ndarray
    tol: float

    def to_dict(self) -> dict:
        return {"min_rank": self.min_rank, "max_rank": self.max_rank, "tol": self.tol}


def kernel_diagnostic(P: PoissonBivector, plan: SamplePlan = SamplePlan(), tol: float = 1e-10) -> RankReport:
    """Numerical rank of ``pi^{ij}`` at every sample point."""
    n = P.chart.dim
    pts = sample_points(P.chart, plan)
    vals = evaluate_fields(list(P.pi.ravel()), P.chart, pts).T.reshape(len(pts), n, n)
    ranks = np.array([np.linalg.matrix_rank(m, tol=tol) for m in vals])
    return RankReport(int(ranks.min()), int(ranks.max()), ranks, tol)
