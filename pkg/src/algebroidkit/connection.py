"""Vector bundle connections on an algebroid and the tensors they induce.

Coefficients are stored as ``omega[a, b, i]`` with ``nabla_i e_a = omega[a, b, i] e_b``.
The basic A-connections act on the tangent side; no connection on ``TM``
itself is ever introduced, so derivatives of base tensors are plain partials.

Index layout of the returned arrays:

* ``dual_covariant_derivative``: ``[j, a]`` = ``nabla_j mu_a``
* ``torsion``: ``[a, b, c]`` = ``T^c_ab``
* ``curvature``: ``[a, b, i, j]``, input frame index ``a``, output ``b``
* ``basic_curvature``: ``[i, a, b, c]`` = ``S^c_iab``
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebroid import (
    AForm,
    LieAlgebroid,
    anchor,
    bracket_sections,
    lie_bracket,
    lie_derivative_form,
    obj_array,
    to_expr_array,
    vector_apply,
)
from .expr import ZERO, Expr, differentiate, esum, is_zero

__all__ = [
    "Connection",
    "trivial_connection",
    "dual_covariant_derivative",
    "connection_derivative_section",
    "basic_on_vector_fields",
    "basic_on_one_forms",
    "basic_on_covariant",
    "basic_on_bivector",
    "a_exterior_covariant_derivative",
    "torsion",
    "curvature",
    "basic_curvature",
    "basic_curvature_from_torsion",
    "covariant_torsion_derivative",
    "anchor_covariant_residuals",
    "jacobi_covariant_residuals",
    "change_frame",
]


@dataclass
class Connection:
    omega: np.ndarray

    def __post_init__(self):
        self.omega = to_expr_array(self.omega)
        if self.omega.ndim != 3 or self.omega.shape[0] != self.omega.shape[1]:
            raise ValueError(f"connection coefficients must be r x r x n, got {self.omega.shape}")

    def check_shape(self, A: LieAlgebroid) -> None:
        if self.omega.shape != (A.rank, A.rank, A.chart.dim):
            raise ValueError(
                f"connection shape {self.omega.shape} does not match rank {A.rank}, dim {A.chart.dim}"
            )


def trivial_connection(A: LieAlgebroid) -> Connection:
    return Connection(obj_array((A.rank, A.rank, A.chart.dim)))


def _conn(A: LieAlgebroid, conn: Connection | None) -> Connection:
    conn = trivial_connection(A) if conn is None else conn
    conn.check_shape(A)
    return conn


def dual_covariant_derivative(A: LieAlgebroid, conn: Connection | None, mu: Sequence[Expr]) -> np.ndarray:
    """``nabla_j mu_a = d_j mu_a - omega^b_aj mu_b`` as an ``n x r`` array."""
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    if len(mu) != r:
        raise ValueError("mu needs one component per frame element")
    out = obj_array((n, r))
    for j, x in enumerate(A.names):
        for a in range(r):
            out[j, a] = differentiate(mu[a], x) - esum(conn.omega[a, b, j] * mu[b] for b in range(r))
    return out


def connection_derivative_section(A: LieAlgebroid, conn: Connection | None, e: Sequence[Expr]) -> np.ndarray:
    """``(nabla_j e)^b = d_j e^b + e^a omega^b_aj`` as an ``n x r`` array."""
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    out = obj_array((n, r))
    for j, x in enumerate(A.names):
        for b in range(r):
            out[j, b] = differentiate(e[b], x) + esum(e[a] * conn.omega[a, b, j] for a in range(r))
    return out


def _kernel(A: LieAlgebroid, conn: Connection | None, e: Sequence[Expr]) -> np.ndarray:
    """``K[m, j] = rho^m_b (nabla_j e)^b``, the endomorphism ``v -> rho(nabla_v e)``."""
    De = connection_derivative_section(A, conn, e)
    n, r = A.chart.dim, A.rank
    K = obj_array((n, n))
    for m in range(n):
        for j in range(n):
            K[m, j] = esum(A.rho[b, m] * De[j, b] for b in range(r))
    return K


def basic_on_vector_fields(A, conn, e, v) -> list[Expr]:
    """``[rho(e), v] + rho(nabla_v e)``."""
    K = _kernel(A, conn, e)
    n = A.chart.dim
    lb = lie_bracket(anchor(A, e), v, A.names)
    return [lb[i] + esum(K[i, j] * v[j] for j in range(n)) for i in range(n)]


def basic_on_one_forms(A, conn, e, alpha) -> list[Expr]:
    """Dual of :func:`basic_on_vector_fields`: ``L_rho(e) alpha - <rho(nabla_. e), alpha>``.

    The sign of the correction term is the one for which
    ``rho(e)<v, alpha> = <nabla v, alpha> + <v, nabla alpha>``.
    """
    K = _kernel(A, conn, e)
    n = A.chart.dim
    lie = lie_derivative_form(anchor(A, e), alpha, A.names)
    return [lie[j] - esum(K[m, j] * alpha[m] for m in range(n)) for j in range(n)]


def basic_on_covariant(A, conn, e, tensor: np.ndarray) -> np.ndarray:
    """Basic A-connection on a covariant tensor, extended as a derivation."""
    tensor = np.asarray(tensor, dtype=object)
    n = A.chart.dim
    k = tensor.ndim
    u = anchor(A, e)
    K = _kernel(A, conn, e)
    # the Lie derivative already contains +T(.., d_j u^m, ..); K adds the connection part
    out = obj_array(tensor.shape)
    for idx in itertools.product(range(n), repeat=k):
        terms = [vector_apply(u, tensor[idx], A.names)]
        for s in range(k):
            for m in range(n):
                t = tensor[idx[:s] + (m,) + idx[s + 1:]]
                if is_zero(t):
                    continue
                coef = differentiate(u[m], A.names[idx[s]]) - K[m, idx[s]]
                terms.append(coef * t)
        out[idx] = esum(terms)
    return out


def basic_on_bivector(A, conn, e, pi: np.ndarray) -> np.ndarray:
    """Basic A-connection on a contravariant 2-tensor, extended as a derivation.

    For a frame element this is the five-term expression
    ``rho^k d_k pi^ij - d_k rho^i pi^kj + rho^i_b omega^b_ak pi^kj - d_k rho^j pi^ik + rho^j_b omega^b_ak pi^ik``.
    """
    n = A.chart.dim
    u = anchor(A, e)
    K = _kernel(A, conn, e)
    out = obj_array((n, n))
    for i in range(n):
        for j in range(n):
            terms = [vector_apply(u, pi[i, j], A.names)]
            for k in range(n):
                ci = K[i, k] - differentiate(u[i], A.names[k])
                cj = K[j, k] - differentiate(u[j], A.names[k])
                if not is_zero(pi[k, j]):
                    terms.append(ci * pi[k, j])
                if not is_zero(pi[i, k]):
                    terms.append(cj * pi[i, k])
            out[i, j] = esum(terms)
    return out


def a_exterior_covariant_derivative(A, conn, phi: dict, degree: int, variance: str = "down") -> dict:
    """A-exterior covariant derivative of an ``A*``-form valued in base tensors.

    ``phi`` maps increasing A-index tuples of length ``degree`` to base tensor
    arrays; the basic A-connection acts on those tensors (``variance`` is
    ``"down"`` for forms, ``"up"`` for bivectors).  Returns the same layout
    with tuples of length ``degree + 1``.
    """
    r = A.rank
    act = basic_on_covariant if variance == "down" else basic_on_bivector
    if not phi:
        raise ValueError("empty form")
    shape = np.asarray(next(iter(phi.values())), dtype=object).shape

    def get(idx):
        s = 1
        idx = list(idx)
        if len(set(idx)) < len(idx):
            return None
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                if idx[i] > idx[j]:
                    s = -s
        val = phi.get(tuple(sorted(idx)))
        if val is None:
            return None
        return np.asarray(val, dtype=object) * s

    out = {}
    if degree + 1 > r:
        return out
    for idx in itertools.combinations(range(r), degree + 1):
        total = obj_array(shape)
        for i in range(degree + 1):
            rest = idx[:i] + idx[i + 1:]
            val = get(rest)
            if val is None:
                continue
            term = act(A, conn, A.frame(idx[i]), val)
            total = total + term if i % 2 == 0 else total - term
        for i in range(degree + 1):
            for j in range(i + 1, degree + 1):
                rest = idx[:i] + idx[i + 1:j] + idx[j + 1:]
                for c in range(r):
                    cc = A.C[idx[i], idx[j], c]
                    val = get((c,) + rest)
                    if is_zero(cc) or val is None:
                        continue
                    term = val * cc
                    total = total + term if (i + j) % 2 == 0 else total - term
        out[idx] = total
    return out


def torsion(A: LieAlgebroid, conn: Connection | None) -> np.ndarray:
    """``T^c_ab = -C^c_ab + rho^i_a omega^c_bi - rho^i_b omega^c_ai``."""
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    om = conn.omega
    T = obj_array((r, r, r))
    for a in range(r):
        for b in range(r):
            for c in range(r):
                T[a, b, c] = esum(
                    [-A.C[a, b, c]]
                    + [A.rho[a, i] * om[b, c, i] for i in range(n)]
                    + [-(A.rho[b, i] * om[a, c, i]) for i in range(n)]
                )
    return T


def curvature(A: LieAlgebroid, conn: Connection | None) -> np.ndarray:
    """``R(d_i, d_j) e_a = R[a, b, i, j] e_b``.

    ``R[a, b, i, j] = d_i omega^b_aj - d_j omega^b_ai + omega^c_aj omega^b_ci - omega^c_ai omega^b_cj``.
    """
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    om = conn.omega
    names = A.names
    R = obj_array((r, r, n, n))
    for a in range(r):
        for b in range(r):
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    R[a, b, i, j] = esum(
                        [differentiate(om[a, b, j], names[i]), -differentiate(om[a, b, i], names[j])]
                        + [om[a, c, j] * om[c, b, i] for c in range(r)]
                        + [-(om[a, c, i] * om[c, b, j]) for c in range(r)]
                    )
    return R


def basic_curvature(A: LieAlgebroid, conn: Connection | None) -> np.ndarray:
    """Basic curvature ``S[i, a, b, c]`` from its fully expanded local formula."""
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    om = conn.omega
    C, rho = A.C, A.rho
    names = A.names
    S = obj_array((n, r, r, r))
    for i in range(n):
        xi = names[i]
        for a in range(r):
            for b in range(r):
                if a == b:
                    continue
                for c in range(r):
                    terms = [-differentiate(C[a, b, c], xi)]
                    for d in range(r):
                        terms += [
                            -(om[d, c, i] * C[a, b, d]),
                            om[a, d, i] * C[d, b, c],
                            om[b, d, i] * C[a, d, c],
                        ]
                    for j in range(n):
                        terms += [
                            rho[a, j] * differentiate(om[b, c, i], names[j]),
                            -(rho[b, j] * differentiate(om[a, c, i], names[j])),
                            differentiate(rho[a, j], xi) * om[b, c, j],
                            -(differentiate(rho[b, j], xi) * om[a, c, j]),
                        ]
                        for d in range(r):
                            terms += [
                                -(om[a, d, i] * rho[d, j] * om[b, c, j]),
                                om[b, d, i] * rho[d, j] * om[a, c, j],
                            ]
                    S[i, a, b, c] = esum(terms)
    return S


def covariant_torsion_derivative(A: LieAlgebroid, conn: Connection | None) -> np.ndarray:
    """``[i, a, b, c]``: ``d_i T^c_ab + omega^c_di T^d_ab - omega^d_ai T^c_db - omega^d_bi T^c_ad``."""
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    om = conn.omega
    T = torsion(A, conn)
    out = obj_array((n, r, r, r))
    for i in range(n):
        for a, b, c in itertools.product(range(r), repeat=3):
            terms = [differentiate(T[a, b, c], A.names[i])]
            for d in range(r):
                terms += [
                    om[d, c, i] * T[a, b, d],
                    -(om[a, d, i] * T[d, b, c]),
                    -(om[b, d, i] * T[a, d, c]),
                ]
            out[i, a, b, c] = esum(terms)
    return out


def basic_curvature_from_torsion(A: LieAlgebroid, conn: Connection | None) -> np.ndarray:
    """``S^c_iab = nabla_i T^c_ab + rho^j_b R_ij(e_a)^c - rho^j_a R_ij(e_b)^c``.

    Independent route to :func:`basic_curvature`, kept as a cross-check.
    """
    r, n = A.rank, A.chart.dim
    DT = covariant_torsion_derivative(A, conn)
    R = curvature(A, conn)
    out = obj_array((n, r, r, r))
    for i in range(n):
        for a, b, c in itertools.product(range(r), repeat=3):
            terms = [DT[i, a, b, c]]
            for j in range(n):
                terms += [A.rho[b, j] * R[a, c, i, j], -(A.rho[a, j] * R[b, c, i, j])]
            out[i, a, b, c] = esum(terms)
    return out


def anchor_covariant_residuals(A: LieAlgebroid, conn: Connection | None) -> list[Expr]:
    """``(nabla_rho(e_a) rho)(e_b) - (nabla_rho(e_b) rho)(e_a) + rho(T(e_a, e_b))``.

    Here ``(nabla_v rho)(e) = v(rho(e)) - rho(nabla_v e)`` componentwise in the
    coordinate frame; vanishes whenever the anchor identity holds.
    """
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    om = conn.omega
    T = torsion(A, conn)

    def nabla_rho(v, b, i):
        # v^j d_j rho^i_b - rho^i_c omega^c_bj v^j
        return esum(
            [vector_apply(v, A.rho[b, i], A.names)]
            + [-(A.rho[c, i] * om[b, c, j] * v[j]) for c in range(r) for j in range(n)]
        )

    out = []
    for a, b in itertools.combinations(range(r), 2):
        for i in range(n):
            out.append(
                nabla_rho(A.rho[a], b, i)
                - nabla_rho(A.rho[b], a, i)
                + esum(A.rho[c, i] * T[a, b, c] for c in range(r))
            )
    return out


def jacobi_covariant_residuals(A: LieAlgebroid, conn: Connection | None) -> list[Expr]:
    """Cyclic sum of ``(nabla_rho(e_a) T)(e_b, e_c) - T(e_a, T(e_b, e_c)) - R(rho(e_a), rho(e_b)) e_c``.

    ``(nabla_v T)`` is the covariant derivative of the torsion tensor along ``v``.
    This is the form the algebroid Jacobi identity takes after rewriting ``C``
    through torsion; it vanishes when the axioms hold.
    """
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    DT = covariant_torsion_derivative(A, conn)
    T = torsion(A, conn)
    R = curvature(A, conn)
    out = []
    for a, b, c in itertools.combinations(range(r), 3):
        for e in range(r):
            terms = []
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                terms += [A.rho[x, i] * DT[i, y, z, e] for i in range(n)]
                terms += [-(T[y, z, d] * T[x, d, e]) for d in range(r)]
                terms += [-(A.rho[x, i] * A.rho[y, j] * R[z, e, i, j]) for i in range(n) for j in range(n)]
            out.append(esum(terms))
    return out


def change_frame(A: LieAlgebroid, conn: Connection | None, g, h, mu=None):
    """Rewrite algebroid, connection and an optional ``A*`` section in the frame ``e'_a = g[a, b] e_b``.

    ``h`` must be the matrix inverse of ``g`` (checked numerically by the
    caller if needed).  Every condition in the package is frame independent,
    so this produces nontrivial connection coefficients and structure
    functions from simple data.
    """
    conn = _conn(A, conn)
    r, n = A.rank, A.chart.dim
    names = A.names
    g = to_expr_array(g, (r, r), names)
    h = to_expr_array(h, (r, r), names)
    rho = obj_array((r, n))
    for a in range(r):
        for i in range(n):
            rho[a, i] = esum(g[a, b] * A.rho[b, i] for b in range(r))
    C = obj_array((r, r, r))
    for a in range(r):
        for b in range(a + 1, r):
            old = bracket_sections(A, list(g[a]), list(g[b]))
            for f in range(r):
                C[a, b, f] = esum(old[e] * h[e, f] for e in range(r))
    om = obj_array((r, r, n))
    for a in range(r):
        for i in range(n):
            vec = [differentiate(g[a, e], names[i]) + esum(g[a, b] * conn.omega[b, e, i] for b in range(r))
                   for e in range(r)]
            for f in range(r):
                om[a, f, i] = esum(vec[e] * h[e, f] for e in range(r))
    B = LieAlgebroid(A.chart, rho, C)
    new_mu = None if mu is None else [esum(g[a, b] * mu[b] for b in range(r)) for a in range(r)]
    return B, Connection(om), new_mu
