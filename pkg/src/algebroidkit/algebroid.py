"""Lie algebroids in a trivialising frame.

A rank ``r`` algebroid over a chart with coordinates ``x^1..x^n`` is stored
as its anchor matrix ``rho[a, i]`` (``rho(e_a) = rho[a, i] d/dx^i``) and its
structure functions ``C[a, b, c]`` (``[e_a, e_b] = C[a, b, c] e_c``), both
numpy object arrays of :class:`~algebroidkit.expr.Expr`.

The module also carries the small amount of ordinary calculus on vector
fields and forms that the rest of the package builds on.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import ZERO, Expr, as_expr, differentiate, esum, is_zero, parse
from .manifold import DEFAULT_TOL, Chart, ResidualReport, SamplePlan, merge_reports, residual_check, sample_points

__all__ = [
    "LieAlgebroid",
    "AForm",
    "obj_array",
    "perm_sign",
    "vector_apply",
    "lie_bracket",
    "lie_derivative_form",
    "exterior_derivative",
    "wedge_index_sign",
    "anchor",
    "bracket_sections",
    "a_differential",
    "anchor_residuals",
    "jacobi_residuals",
    "check_axioms",
    "tangent_algebroid",
    "action_algebroid",
    "cotangent_algebroid",
]


def obj_array(shape, fill: Expr = ZERO) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(fill)
    return out


def to_expr_array(data, shape=None, names: Sequence[str] | None = None) -> np.ndarray:
    """Nested lists of Expr / numbers / strings to an object array."""
    def conv(x):
        if isinstance(x, str):
            if names is None:
                raise TypeError("string entries need coordinate names")
            return parse(x, names)
        return as_expr(x)

    arr = np.array(data, dtype=object)
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {arr.shape}")
    flat = [conv(x) for x in arr.ravel()]
    out = np.empty(arr.shape, dtype=object)
    for k, x in enumerate(flat):
        out.flat[k] = x
    return out


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


wedge_index_sign = perm_sign


# vector fields and forms --------------------------------------------------

def vector_apply(v: Sequence[Expr], f: Expr, names: Sequence[str]) -> Expr:
    """``v(f) = v^i d_i f``."""
    return esum(vi * differentiate(f, x) for vi, x in zip(v, names) if not is_zero(vi))


def lie_bracket(u: Sequence[Expr], v: Sequence[Expr], names: Sequence[str]) -> list[Expr]:
    return [vector_apply(u, v[i], names) - vector_apply(v, u[i], names) for i in range(len(names))]


def lie_derivative_form(u: Sequence[Expr], alpha: Sequence[Expr], names: Sequence[str]) -> list[Expr]:
    """``(L_u alpha)_j = u^k d_k alpha_j + alpha_k d_j u^k``."""
    n = len(names)
    return [
        vector_apply(u, alpha[j], names)
        + esum(alpha[k] * differentiate(u[k], names[j]) for k in range(n))
        for j in range(n)
    ]


def exterior_derivative(form: np.ndarray, names: Sequence[str]) -> np.ndarray:
    """Exterior derivative of a k-form given as a full antisymmetric array.

    ``(d w)_{i0..ik} = sum_s (-1)^s d_{i_s} w_{i0..^i_s..ik}``.
    """
    form = np.asarray(form, dtype=object)
    k = form.ndim
    n = len(names)
    out = obj_array((n,) * (k + 1))
    for idx in itertools.product(range(n), repeat=k + 1):
        if len(set(idx)) < k + 1:
            continue
        terms = []
        for s in range(k + 1):
            rest = idx[:s] + idx[s + 1:]
            t = differentiate(form[rest] if k else form[()], names[idx[s]])
            terms.append(t if s % 2 == 0 else -t)
        out[idx] = esum(terms)
    return out


# algebroids ----------------------------------------------------------------

@dataclass
class LieAlgebroid:
    """Anchor and structure functions of a rank-``r`` bundle over ``chart``.

    ``C`` is antisymmetrised from its ``a < b`` entries on construction.
    Axioms are never assumed; see :func:`check_axioms`.
    """

    chart: Chart
    rho: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        names = self.chart.names
        self.rho = to_expr_array(self.rho, names=names)
        if self.rho.ndim != 2 or self.rho.shape[1] != self.chart.dim:
            raise ValueError(f"anchor must be r x {self.chart.dim}, got {self.rho.shape}")
        r = self.rho.shape[0]
        C = to_expr_array(self.C, names=names)
        if C.shape != (r, r, r):
            raise ValueError(f"structure functions must be {r}x{r}x{r}, got {C.shape}")
        canon = obj_array((r, r, r))
        for a in range(r):
            for b in range(a + 1, r):
                for c in range(r):
                    canon[a, b, c] = C[a, b, c]
                    canon[b, a, c] = -C[a, b, c]
        self.C = canon

    @property
    def rank(self) -> int:
        return self.rho.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return self.chart.names

    def frame(self, a: int) -> list[Expr]:
        e = [ZERO] * self.rank
        e[a] = as_expr(1.0)
        return e


@dataclass
class AForm:
    """An A-differential form of degree ``degree``.

    Components are stored on strictly increasing index tuples; any other
    ordering is read through ``form[indices]`` with the permutation sign.
    """

    rank: int
    degree: int
    comp: dict = field(default_factory=dict)

    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, int):
            idx = (idx,)
        idx = tuple(idx)
        s = perm_sign(idx)
        if s == 0:
            return ZERO
        val = self.comp.get(tuple(sorted(idx)), ZERO)
        return val if s > 0 else -val

    def keys(self):
        return itertools.combinations(range(self.rank), self.degree)

    @classmethod
    def function(cls, rank: int, f: Expr) -> "AForm":
        return cls(rank, 0, {(): as_expr(f)})

    @classmethod
    def from_components(cls, rank: int, degree: int, values) -> "AForm":
        """``values`` maps increasing index tuples (or is a list in that order)."""
        if not isinstance(values, dict):
            values = dict(zip(itertools.combinations(range(rank), degree), values))
        return cls(rank, degree, {tuple(k): as_expr(v) for k, v in values.items()})


def anchor(A: LieAlgebroid, e: Sequence[Expr]) -> list[Expr]:
    return [esum(e[a] * A.rho[a, i] for a in range(A.rank)) for i in range(A.chart.dim)]


def bracket_sections(A: LieAlgebroid, e1: Sequence[Expr], e2: Sequence[Expr]) -> list[Expr]:
    """Bracket of two sections in the frame.

    ``[e1, e2]^c = C^c_ab e1^a e2^b + rho(e1)(e2^c) - rho(e2)(e1^c)``, which is
    what bilinearity and the Leibniz rule force on frame expansions.
    """
    r = A.rank
    names = A.names
    if len(e1) != r or len(e2) != r:
        raise ValueError("sections must have one component per frame element")
    v1 = anchor(A, e1)
    v2 = anchor(A, e2)
    out = []
    for c in range(r):
        alg = esum(A.C[a, b, c] * e1[a] * e2[b] for a in range(r) for b in range(r) if a != b)
        out.append(alg + vector_apply(v1, e2[c], names) - vector_apply(v2, e1[c], names))
    return out


def a_differential(A: LieAlgebroid, eta: AForm) -> AForm:
    """Lie algebroid differential of an A-form, evaluated on frame elements.

    Degree overflow (``m + 1 > r``) returns the zero form of degree ``m + 1``.
    """
    r = A.rank
    m = eta.degree
    out = AForm(r, m + 1)
    if m + 1 > r:
        return out
    for idx in itertools.combinations(range(r), m + 1):
        terms = []
        for i in range(m + 1):
            rest = idx[:i] + idx[i + 1:]
            t = vector_apply(A.rho[idx[i]], eta[rest], A.names)
            terms.append(t if i % 2 == 0 else -t)
        for i in range(m + 1):
            for j in range(i + 1, m + 1):
                rest = idx[:i] + idx[i + 1:j] + idx[j + 1:]
                sign = 1 if (i + j) % 2 == 0 else -1
                for c in range(r):
                    cc = A.C[idx[i], idx[j], c]
                    if is_zero(cc):
                        continue
                    t = cc * eta[(c,) + rest]
                    terms.append(t if sign > 0 else -t)
        out.comp[idx] = esum(terms)
    return out


def anchor_residuals(A: LieAlgebroid) -> list[Expr]:
    """``rho_a(rho_b^i) - rho_b(rho_a^i) - C^c_ab rho_c^i`` for a < b."""
    r, n = A.rank, A.chart.dim
    out = []
    for a, b in itertools.combinations(range(r), 2):
        for i in range(n):
            out.append(
                vector_apply(A.rho[a], A.rho[b, i], A.names)
                - vector_apply(A.rho[b], A.rho[a, i], A.names)
                - esum(A.C[a, b, c] * A.rho[c, i] for c in range(r))
            )
    return out


def jacobi_residuals(A: LieAlgebroid) -> list[Expr]:
    """Cyclic sum of ``C^e_ad C^d_bc + rho_a(C^e_bc)`` for a < b < c."""
    r = A.rank
    out = []
    for a, b, c in itertools.combinations(range(r), 3):
        for e in range(r):
            terms = []
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                terms.extend(A.C[x, d, e] * A.C[y, z, d] for d in range(r))
                terms.append(vector_apply(A.rho[x], A.C[y, z, e], A.names))
            out.append(esum(terms))
    return out


def check_axioms(A: LieAlgebroid, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    points = sample_points(A.chart, plan)
    rep_anchor = residual_check("anchor-homomorphism", anchor_residuals(A), A.chart, plan, tol, points=points)
    rep_jacobi = residual_check("jacobi", jacobi_residuals(A), A.chart, plan, tol, points=points)
    rep = merge_reports("axioms", [rep_anchor, rep_jacobi], tag="Lie algebroid identities")
    rep.note = f"anchor {rep_anchor.max_residual:.3e}, jacobi {rep_jacobi.max_residual:.3e}"
    return rep


# constructors ----------------------------------------------------------------

def tangent_algebroid(chart: Chart) -> LieAlgebroid:
    n = chart.dim
    rho = obj_array((n, n))
    for i in range(n):
        rho[i, i] = as_expr(1.0)
    return LieAlgebroid(chart, rho, obj_array((n, n, n)))


def action_algebroid(chart: Chart, rho, C, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> LieAlgebroid:
    """Trivial bundle ``M x g`` with anchor given by an infinitesimal action.

    ``C`` must be constant and satisfy the Lie algebra Jacobi identity, and
    the anchor must be a Lie algebra morphism; otherwise ``ValueError``.
    """
    A = LieAlgebroid(chart, rho, C)
    if any(c.free for c in A.C.ravel()):
        raise ValueError("action algebroids need constant structure constants")
    rep = check_axioms(A, plan, tol)
    if not rep.passed:
        raise ValueError(f"action data violate the algebroid identities ({rep.note})")
    return A


def cotangent_algebroid(chart: Chart, pi, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL,
                        validate: bool = True) -> LieAlgebroid:
    """Koszul algebroid ``T*M`` of a Poisson bivector, framed by ``dx^a``.

    With ``{f, g} = pi^{ij} d_i f d_j g`` the Koszul bracket of coordinate
    differentials is ``[dx^a, dx^b] = d(pi^{ab})`` so ``C[a, b, c] = d_c pi^{ab}``,
    and the anchor sends ``dx^a`` to ``pi^{ai} d_i`` (minus the sharp map
    ``(pi# alpha)^i = pi^{ij} alpha_j``).
    """
    from .geometry import PoissonBivector, check_poisson

    P = pi if isinstance(pi, PoissonBivector) else PoissonBivector(chart, pi)
    if validate:
        rep = check_poisson(P, plan, tol)
        if not rep.passed:
            raise ValueError(f"bivector is not Poisson (residual {rep.max_residual:.3e})")
    n = chart.dim
    rho = obj_array((n, n))
    C = obj_array((n, n, n))
    for a in range(n):
        for i in range(n):
            rho[a, i] = P.pi[a, i]
        for b in range(n):
            for c in range(n):
                C[a, b, c] = differentiate(P.pi[a, b], chart.names[c])
    return LieAlgebroid(chart, rho, C)
