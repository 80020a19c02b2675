"""Graded (super)polynomials, canonical degree -2 Poisson brackets, the
homological functions of ``T*M + R`` and of a Lie algebroid, derived
brackets and the graded Poisson-map test for momentum sections.

A graded polynomial is a finite sum of terms ``c(x) * xi^e * theta_I`` where
``c`` is an :class:`~algebroidkit.expr.Expr` in the base coordinates, ``xi``
are even graded coordinates (degree 2) and ``theta_I`` is an increasing
product of distinct odd coordinates (degree 1).

Sign table of the canonical bracket (all coordinates listed in
:class:`GradedPhaseSpace`)::

    {F, G} = sum_i  F d<_{x^i} d>_{xi_i} G - F d<_{xi_i} d>_{x^i} G
           + sum_odd pairs (theta, bar)  F d<_theta d>_bar G + F d<_bar d>_theta G

with right derivatives ``d<`` and left derivatives ``d>``.  Hence
``{x, xi} = 1``, ``{xi, x} = -1`` and ``{theta, bar} = {bar, theta} = 1``.
The bracket is graded antisymmetric, ``{F, G} = -(-1)^{|F||G|} {G, F}``,
and satisfies ``{F, {G, H}} = {{F, G}, H} + (-1)^{|F||G|} {G, {F, H}}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebroid import LieAlgebroid
from .connection import dual_covariant_derivative, trivial_connection
from .expr import ZERO, Expr, as_expr, const, differentiate, is_zero, var
from .geometry import PoissonBivector
from .manifold import DEFAULT_TOL, Chart, ResidualReport, SamplePlan, evaluate_fields, residual_check, sample_points

__all__ = [
    "GradedSpace",
    "GradedPhaseSpace",
    "GradedPolynomial",
    "g_multiply",
    "canonical_bracket",
    "derivative",
    "coefficient_residual_check",
    "m_space",
    "n_space",
    "theta_m",
    "theta_n",
    "master_equation_check",
    "VectorField",
    "homological_vector_field_a1",
    "homological_vector_field_tstar",
    "q_squared_residuals",
    "check_q_squared",
    "derived_bracket_m",
    "derived_bracket_n",
    "degree_one_m",
    "degree_one_n",
    "momentum_images",
    "momentum_substitution",
    "theorem_test_family",
    "check_graded_poisson_map",
    "check_reproduction_m",
    "check_reproduction_n",
]


# spaces ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedSpace:
    """Base chart (degree 0) plus graded coordinates of degree 1 or 2."""

    chart: Chart
    names: tuple[str, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(self.names) != len(self.degrees):
            raise ValueError("one degree per graded coordinate")
        if len(set(self.names)) != len(self.names):
            raise ValueError("graded coordinate names must be distinct")
        if any(d not in (1, 2) for d in self.degrees):
            raise ValueError("graded coordinates have degree 1 or 2")

    @property
    def even(self) -> tuple[str, ...]:
        return tuple(n for n, d in zip(self.names, self.degrees) if d % 2 == 0)

    @property
    def odd(self) -> tuple[str, ...]:
        return tuple(n for n, d in zip(self.names, self.degrees) if d % 2 == 1)

    def index(self, name: str) -> tuple[str, int]:
        """``("even" | "odd", position)`` of a graded coordinate."""
        if name in self.even:
            return "even", self.even.index(name)
        if name in self.odd:
            return "odd", self.odd.index(name)
        raise KeyError(f"unknown graded coordinate {name!r}")

    def zero(self) -> "GradedPolynomial":
        return GradedPolynomial(self, {})

    def const(self, c) -> "GradedPolynomial":
        return self.function(as_expr(c))

    def function(self, f) -> "GradedPolynomial":
        """A degree 0 element ``f(x)``."""
        f = as_expr(f)
        key = ((0,) * len(self.even), ())
        return GradedPolynomial(self, {} if is_zero(f) else {key: f})

    def coordinate(self, name: str) -> "GradedPolynomial":
        kind, k = self.index(name)
        ev = [0] * len(self.even)
        if kind == "even":
            ev[k] = 1
            key = (tuple(ev), ())
        else:
            key = (tuple(ev), (k,))
        return GradedPolynomial(self, {key: const(1.0)})

    def __getitem__(self, name: str) -> "GradedPolynomial":
        return self.coordinate(name)


@dataclass(frozen=True)
class GradedPhaseSpace(GradedSpace):
    """Graded cotangent bundle with conjugate pairs.

    ``base_pairs[i]`` is the even momentum conjugate to the chart coordinate
    ``i``; ``odd_pairs`` lists ``(theta, bar)`` pairs of odd coordinates.
    """

    base_pairs: tuple[str, ...] = ()
    odd_pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if len(self.base_pairs) != self.chart.dim:
            raise ValueError("one even momentum per base coordinate")
        for a, b in self.odd_pairs:
            if self.index(a)[0] != "odd" or self.index(b)[0] != "odd":
                raise ValueError("odd pairs must consist of odd coordinates")
        if any(self.index(n)[0] != "even" for n in self.base_pairs):
            raise ValueError("base momenta must be even")


def m_space(chart: Chart) -> GradedPhaseSpace:
    """``T*[2](T[1]M + R[1])`` with ``(x, eta, s)`` of degree ``(0, 1, 1)`` and ``(xi, y, t)`` of degree ``(2, 1, 1)``."""
    n = chart.dim
    xi = [f"xi_{k + 1}" for k in range(n)]
    eta = [f"eta_{k + 1}" for k in range(n)]
    y = [f"y_{k + 1}" for k in range(n)]
    names = xi + eta + y + ["s", "t"]
    degrees = [2] * n + [1] * (2 * n + 2)
    pairs = tuple(zip(eta, y)) + (("s", "t"),)
    return GradedPhaseSpace(chart, tuple(names), tuple(degrees), tuple(xi), pairs)


def n_space(chart: Chart, rank: int) -> GradedPhaseSpace:
    """``T*[1](A*[1] + R[1])`` with ``(x, p, s)`` of degree ``(0, 1, 1)`` and ``(xi, q, t)`` of degree ``(2, 1, 1)``."""
    n = chart.dim
    xi = [f"xi_{k + 1}" for k in range(n)]
    p = [f"p_{a + 1}" for a in range(rank)]
    q = [f"q_{a + 1}" for a in range(rank)]
    names = xi + p + q + ["s", "t"]
    degrees = [2] * n + [1] * (2 * rank + 2)
    pairs = tuple(zip(p, q)) + (("s", "t"),)
    return GradedPhaseSpace(chart, tuple(names), tuple(degrees), tuple(xi), pairs)


# polynomials ----------------------------------------------------------------------

def _sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    if len(set(seq)) != len(seq):
        return 0, ()
    arr = list(seq)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


@dataclass(frozen=True)
class GradedPolynomial:
    """Immutable map ``(even exponents, increasing odd indices) -> coefficient``."""

    space: GradedSpace
    terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", {k: v for k, v in self.terms.items() if not is_zero(v)})

    # arithmetic
    def _check(self, other):
        if other.space != self.space:
            raise ValueError("graded polynomials live on different spaces")

    def __add__(self, other):
        other = _lift(self.space, other)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return GradedPolynomial(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial(self.space, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(self.space, other))

    def __rsub__(self, other):
        return _lift(self.space, other) - self

    def __mul__(self, other):
        return g_multiply(self, _lift(self.space, other))

    def __rmul__(self, other):
        return g_multiply(_lift(self.space, other), self)

    # structure
    def degree_of(self, key) -> int:
        ev, od = key
        deg_even = [d for d in self.space.degrees if d % 2 == 0]
        return sum(e * d for e, d in zip(ev, deg_even)) + len(od)

    def degrees(self) -> set[int]:
        return {self.degree_of(k) for k in self.terms}

    @property
    def degree(self) -> int:
        """Degree of a homogeneous polynomial (0 for the zero polynomial)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError(f"not homogeneous: degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def monomial_label(self, key) -> str:
        ev, od = key
        parts = []
        for name, e in zip(self.space.even, ev):
            parts += [name] * e
        parts += [self.space.odd[k] for k in od]
        return "*".join(parts) or "1"

    def coefficient(self, *names: str) -> Expr:
        """Coefficient of the monomial written as the given coordinate product (with sign)."""
        ev = [0] * len(self.space.even)
        od = []
        for n in names:
            kind, k = self.space.index(n)
            if kind == "even":
                ev[k] += 1
            else:
                od.append(k)
        sign, od_sorted = _sort_sign(od)
        if sign == 0:
            return ZERO
        c = self.terms.get((tuple(ev), od_sorted), ZERO)
        return c if sign > 0 else -c

    def coefficients(self) -> dict[str, Expr]:
        return {self.monomial_label(k): v for k, v in sorted(self.terms.items())}

    def map_coefficients(self, fn) -> "GradedPolynomial":
        return GradedPolynomial(self.space, {k: fn(v) for k, v in self.terms.items()})

    def uses(self, names: Sequence[str]) -> bool:
        """True if some term contains one of the given graded coordinates."""
        idx = [self.space.index(n) for n in names]
        for ev, od in self.terms:
            for kind, k in idx:
                if (kind == "even" and ev[k]) or (kind == "odd" and k in od):
                    return True
        return False

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({v})*{self.monomial_label(k)}" for k, v in sorted(self.terms.items()))


def _lift(space: GradedSpace, value) -> GradedPolynomial:
    if isinstance(value, GradedPolynomial):
        return value
    return space.function(as_expr(value))


def g_multiply(F: GradedPolynomial, G: GradedPolynomial) -> GradedPolynomial:
    """Supercommutative product; odd coordinates anticommute and square to zero."""
    F._check(G)
    out: dict = {}
    for (e1, o1), c1 in F.terms.items():
        for (e2, o2), c2 in G.terms.items():
            sign, od = _sort_sign(o1 + o2)
            if sign == 0:
                continue
            key = (tuple(a + b for a, b in zip(e1, e2)), od)
            c = c1 * c2 if sign > 0 else -(c1 * c2)
            out[key] = out[key] + c if key in out else c
    return GradedPolynomial(F.space, out)


# derivatives ----------------------------------------------------------------------

def _d_base(F: GradedPolynomial, x: str) -> GradedPolynomial:
    return GradedPolynomial(F.space, {k: differentiate(v, x) for k, v in F.terms.items()})


def _d_even(F: GradedPolynomial, k: int) -> GradedPolynomial:
    out = {}
    for (ev, od), c in F.terms.items():
        if ev[k]:
            e2 = list(ev)
            e2[k] -= 1
            out[(tuple(e2), od)] = c * float(ev[k]) if ev[k] != 1 else c
    return GradedPolynomial(F.space, out)


def _d_odd(F: GradedPolynomial, k: int, side: str) -> GradedPolynomial:
    """Left (``side="left"``) or right derivative by the odd coordinate ``k``."""
    out = {}
    for (ev, od), c in F.terms.items():
        if k not in od:
            continue
        r = od.index(k)
        moves = r if side == "left" else len(od) - 1 - r
        key = (ev, od[:r] + od[r + 1:])
        val = c if moves % 2 == 0 else -c
        out[key] = out[key] + val if key in out else val
    return GradedPolynomial(F.space, out)


def derivative(F: GradedPolynomial, name: str, side: str = "left") -> GradedPolynomial:
    """Partial derivative by a base or graded coordinate."""
    if name in F.space.chart.names:
        return _d_base(F, name)
    kind, k = F.space.index(name)
    return _d_even(F, k) if kind == "even" else _d_odd(F, k, side)


def canonical_bracket(F: GradedPolynomial, G: GradedPolynomial) -> GradedPolynomial:
    """The degree -2 bracket of the canonical graded symplectic form (see module docstring)."""
    F._check(G)
    sp = F.space
    if not isinstance(sp, GradedPhaseSpace):
        raise TypeError("canonical_bracket needs a GradedPhaseSpace")
    out = sp.zero()
    for x, xi in zip(sp.chart.names, sp.base_pairs):
        a = derivative(F, x)
        b = derivative(G, xi, "left")
        if a.terms and b.terms:
            out = out + g_multiply(a, b)
        a = derivative(F, xi, "right")
        b = derivative(G, x)
        if a.terms and b.terms:
            out = out - g_multiply(a, b)
    for th, bar in sp.odd_pairs:
        for u, v in ((th, bar), (bar, th)):
            a = derivative(F, u, "right")
            b = derivative(G, v, "left")
            if a.terms and b.terms:
                out = out + g_multiply(a, b)
    return out


def coefficient_residual_check(name: str, P: GradedPolynomial, plan: SamplePlan = SamplePlan(),
                               tol: float = DEFAULT_TOL, tag: str = "") -> ResidualReport:
    """All coefficient functions of ``P`` must vanish at the sample points."""
    return residual_check(name, list(P.terms.values()), P.space.chart, plan, tol, tag=tag)


# homological functions ------------------------------------------------------------

def theta_m(P: PoissonBivector, space: GradedPhaseSpace | None = None, s_sign: float = -1.0) -> GradedPolynomial:
    """``pi^{ij} xi_i y_j - 1/2 d_i pi^{jk} y_j y_k eta^i + s_sign/2 pi^{jk} y_j y_k s``.

    Both signs of the ``s`` term solve the master equation.  With the
    default ``s_sign = -1`` the derived bracket of degree one functions
    reproduces :func:`algebroidkit.morphism.tstar_r_bracket`, whose pairing
    term ``+pi^{ij} alpha_i beta_j`` is the one compatible with the
    momentum conditions; ``s_sign = +1`` produces the opposite pairing term.
    """
    sp = space or m_space(P.chart)
    n = P.chart.dim
    names = P.chart.names
    out = sp.zero()
    for i in range(n):
        for j in range(n):
            if is_zero(P.pi[i, j]):
                continue
            out = out + sp.function(P.pi[i, j]) * sp[f"xi_{i + 1}"] * sp[f"y_{j + 1}"]
            out = out + sp.function(0.5 * s_sign * P.pi[i, j]) * sp[f"y_{i + 1}"] * sp[f"y_{j + 1}"] * sp["s"]
            for k in range(n):
                d = differentiate(P.pi[i, j], names[k])
                if not is_zero(d):
                    out = out - sp.function(0.5 * d) * sp[f"y_{i + 1}"] * sp[f"y_{j + 1}"] * sp[f"eta_{k + 1}"]
    return out


def theta_n(A: LieAlgebroid, space: GradedPhaseSpace | None = None) -> GradedPolynomial:
    """``rho^i_a xi_i q^a + 1/2 C^c_ab q^a q^b p_c``."""
    sp = space or n_space(A.chart, A.rank)
    n, r = A.chart.dim, A.rank
    out = sp.zero()
    for a in range(r):
        for i in range(n):
            if not is_zero(A.rho[a, i]):
                out = out + sp.function(A.rho[a, i]) * sp[f"xi_{i + 1}"] * sp[f"q_{a + 1}"]
    for a, b, c in itertools.product(range(r), repeat=3):
        if not is_zero(A.C[a, b, c]):
            out = out + sp.function(0.5 * A.C[a, b, c]) * sp[f"q_{a + 1}"] * sp[f"q_{b + 1}"] * sp[f"p_{c + 1}"]
    return out


def master_equation_check(theta: GradedPolynomial, plan: SamplePlan = SamplePlan(),
                          tol: float = DEFAULT_TOL) -> ResidualReport:
    """Every coefficient of ``{Theta, Theta}`` vanishes at the sample points."""
    return coefficient_residual_check("master-equation", canonical_bracket(theta, theta), plan, tol,
                                      tag="{Theta, Theta} = 0")


# homological vector fields --------------------------------------------------------

@dataclass
class VectorField:
    """Odd vector field ``sum_c Q^c d/dc`` acting as a left derivation."""

    space: GradedSpace
    components: dict  # coordinate name -> GradedPolynomial

    def __call__(self, F: GradedPolynomial) -> GradedPolynomial:
        out = self.space.zero()
        for c, Qc in self.components.items():
            d = derivative(F, c, "left")
            if d.terms:
                out = out + g_multiply(Qc, d)
        return out


def homological_vector_field_a1(A: LieAlgebroid) -> VectorField:
    """``Q = rho^i_a q^a d/dx^i - 1/2 C^c_ab q^a q^b d/dq^c`` on ``A[1]``."""
    n, r = A.chart.dim, A.rank
    sp = GradedSpace(A.chart, tuple(f"q_{a + 1}" for a in range(r)), (1,) * r)
    comps = {}
    for i, x in enumerate(A.chart.names):
        comps[x] = sum((sp.function(A.rho[a, i]) * sp[f"q_{a + 1}"] for a in range(r)), sp.zero())
    for c in range(r):
        comps[f"q_{c + 1}"] = sum((sp.function(-0.5 * A.C[a, b, c]) * sp[f"q_{a + 1}"] * sp[f"q_{b + 1}"]
                                   for a in range(r) for b in range(r) if not is_zero(A.C[a, b, c])), sp.zero())
    return VectorField(sp, comps)


def homological_vector_field_tstar(P: PoissonBivector) -> VectorField:
    """``Q = pi^{ij} y_j d/dx^i + 1/2 d_k pi^{ij} y_i y_j d/dy_k + 1/2 pi^{ij} y_i y_j d/dt``."""
    n = P.chart.dim
    names = P.chart.names
    sp = GradedSpace(P.chart, tuple(f"y_{k + 1}" for k in range(n)) + ("t",), (1,) * (n + 1))
    y = [sp[f"y_{k + 1}"] for k in range(n)]
    comps = {}
    for i, x in enumerate(names):
        comps[x] = sum((sp.function(P.pi[i, j]) * y[j] for j in range(n) if not is_zero(P.pi[i, j])), sp.zero())
    for k in range(n):
        comps[f"y_{k + 1}"] = sum((sp.function(0.5 * differentiate(P.pi[i, j], names[k])) * y[i] * y[j]
                                   for i in range(n) for j in range(n)), sp.zero())
    comps["t"] = sum((sp.function(0.5 * P.pi[i, j]) * y[i] * y[j] for i in range(n) for j in range(n)), sp.zero())
    return VectorField(sp, comps)


def q_squared_residuals(Q: VectorField) -> dict[str, GradedPolynomial]:
    """``Q(Q(c))`` for every coordinate ``c``; all vanish iff ``Q^2 = 0``."""
    out = {}
    for x in Q.space.chart.names:
        out[x] = Q(Q(Q.space.function(var(x))))
    for c in Q.space.names:
        out[c] = Q(Q(Q.space[c]))
    return out


def check_q_squared(Q: VectorField, plan: SamplePlan = SamplePlan(), tol: float = DEFAULT_TOL) -> ResidualReport:
    fields = [v for P in q_squared_residuals(Q).values() for v in P.terms.values()]
    return residual_check("Q-squared", fields, Q.space.chart, plan, tol, tag="Q^2 = 0")


# derived brackets -----------------------------------------------------------------

def derived_bracket_m(theta: GradedPolynomial, U: GradedPolynomial, V: GradedPolynomial) -> GradedPolynomial:
    """``{{U, Theta_M}, V}``."""
    return canonical_bracket(canonical_bracket(U, theta), V)


def derived_bracket_n(theta: GradedPolynomial, F: GradedPolynomial, G: GradedPolynomial) -> GradedPolynomial:
    """``-{{F, Theta_N}, G}``."""
    return -canonical_bracket(canonical_bracket(F, theta), G)


def degree_one_m(space: GradedPhaseSpace, alpha, f) -> GradedPolynomial:
    """``alpha_i eta^i + f s`` for a 1-form ``alpha`` and a function ``f``."""
    out = space.function(f) * space["s"]
    for i, a in enumerate(alpha):
        out = out + space.function(a) * space[f"eta_{i + 1}"]
    return out


def degree_one_n(space: GradedPhaseSpace, a, f) -> GradedPolynomial:
    """``a^a p_a + f s`` for a section ``a`` of ``A`` and a function ``f``."""
    out = space.function(f) * space["s"]
    for k, c in enumerate(a):
        out = out + space.function(c) * space[f"p_{k + 1}"]
    return out


# momentum map --------------------------------------------------------------------

def momentum_images(A: LieAlgebroid, conn, mu, space: GradedPhaseSpace) -> list[GradedPolynomial]:
    """``p_a -> -nabla_i mu_a eta^i + mu_a s``."""
    conn = trivial_connection(A) if conn is None else conn
    mu = [as_expr(m) for m in getattr(mu, "mu", mu)]
    D = dual_covariant_derivative(A, conn, mu)
    return [degree_one_m(space, [-D[i, a] for i in range(A.chart.dim)], mu[a]) for a in range(A.rank)]


def momentum_substitution(A: LieAlgebroid, conn, mu, F: GradedPolynomial,
                          target: GradedPhaseSpace | None = None) -> GradedPolynomial:
    """Substitute ``p_a -> -nabla_i mu_a eta^i + mu_a s`` in a polynomial ``F(x, p)``."""
    target = target or m_space(A.chart)
    src = F.space
    p_idx = [src.odd.index(f"p_{a + 1}") for a in range(A.rank)]
    if F.uses([n for n in src.names if not n.startswith("p_")]):
        raise ValueError("momentum substitution expects a polynomial in x and p only")
    images = momentum_images(A, conn, mu, target)
    out = target.zero()
    for (ev, od), c in F.terms.items():
        term = target.function(c)
        for k in od:
            term = term * images[p_idx.index(k)]
        out = out + term
    return out


def theorem_test_family(space: GradedPhaseSpace, rank: int, x_degree: int = 2, p_degree: int = 2) -> list[GradedPolynomial]:
    """Monomials ``x^m p_I`` with ``|m| <= x_degree`` and ``|I| <= p_degree``."""
    from .expr import eprod

    xs = [var(x) for x in space.chart.names]
    xmons = [eprod([const(1.0)] + [xs[i] for i in combo])
             for d in range(x_degree + 1)
             for combo in itertools.combinations_with_replacement(range(len(xs)), d)]
    pmons = []
    for d in range(min(p_degree, rank) + 1):
        for combo in itertools.combinations(range(rank), d):
            m = space.const(1.0)
            for a in combo:
                m = m * space[f"p_{a + 1}"]
            pmons.append(m)
    return [space.function(xm) * pm for pm in pmons for xm in xmons]


def check_graded_poisson_map(A: LieAlgebroid, conn, P: PoissonBivector, mu, plan: SamplePlan = SamplePlan(),
                             tol: float = DEFAULT_TOL, family: Sequence[GradedPolynomial] | None = None,
                             s_sign: float = -1.0) -> ResidualReport:
    """``Phi({F, G}_N) = {Phi F, Phi G}_M`` on a test family, ``Phi`` the momentum substitution."""
    sn = n_space(A.chart, A.rank)
    sm = m_space(A.chart)
    tn = theta_n(A, sn)
    tm = theta_m(P, sm, s_sign)
    fam = list(family) if family is not None else theorem_test_family(sn, A.rank)
    images = [momentum_substitution(A, conn, mu, F, sm) for F in fam]
    fields = []
    for i, j in itertools.combinations_with_replacement(range(len(fam)), 2):
        lhs = momentum_substitution(A, conn, mu, derived_bracket_n(tn, fam[i], fam[j]), sm)
        rhs = derived_bracket_m(tm, images[i], images[j])
        fields.extend((lhs - rhs).terms.values())
    return residual_check("graded-poisson-map", fields, A.chart, plan, tol,
                          tag="-nabla mu + mu is a graded Poisson map")


# reproduction checks --------------------------------------------------------------

def check_reproduction_m(P: PoissonBivector, pairs, plan: SamplePlan = SamplePlan(),
                         tol: float = DEFAULT_TOL, s_sign: float = -1.0) -> ResidualReport:
    """Derived bracket on degree one functions equals the ``T*M + R`` bracket.

    ``pairs`` is a list of ``((alpha, f), (beta, g))``.
    """
    from .morphism import tstar_r_bracket

    sp = m_space(P.chart)
    th = theta_m(P, sp, s_sign)
    fields = []
    for s1, s2 in pairs:
        got = derived_bracket_m(th, degree_one_m(sp, *s1), degree_one_m(sp, *s2))
        gamma, h = tstar_r_bracket(P, s1, s2)
        fields.extend((got - degree_one_m(sp, gamma, h)).terms.values())
    return residual_check("reproduction-tstar-r", fields, P.chart, plan, tol,
                          tag="derived bracket = T*M + R bracket")


def check_reproduction_n(A: LieAlgebroid, pairs, plan: SamplePlan = SamplePlan(),
                         tol: float = DEFAULT_TOL) -> ResidualReport:
    """Derived bracket on degree one functions equals ``([a, b], rho(a) g - rho(b) f)``.

    ``pairs`` is a list of ``((a, f), (b, g))`` with sections in frame components.
    """
    from .algebroid import anchor, bracket_sections, vector_apply

    sp = n_space(A.chart, A.rank)
    th = theta_n(A, sp)
    names = A.chart.names
    fields = []
    for (a, f), (b, g) in pairs:
        got = derived_bracket_n(th, degree_one_n(sp, a, f), degree_one_n(sp, b, g))
        sec = bracket_sections(A, [as_expr(c) for c in a], [as_expr(c) for c in b])
        h = vector_apply(anchor(A, a), as_expr(g), names) - vector_apply(anchor(A, b), as_expr(f), names)
        fields.extend((got - degree_one_n(sp, sec, h)).terms.values())
    return residual_check("reproduction-dual", fields, A.chart, plan, tol,
                          tag="derived bracket = dual bracket")
