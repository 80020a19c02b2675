"""
Derived brackets on graded phase spaces
=======================================

The Lie algebroid structure of the affine algebra is encoded in one cubic
function Theta on a degree 2 phase space.  Its self bracket vanishes exactly
when the algebroid axioms hold, and the derived bracket recovers the bracket
of sections.
"""
# %%
import numpy as np

from algebroidkit import (
    SamplePlan,
    check_axioms,
    check_reproduction_n,
    fixture,
    load_problem,
    master_equation_check,
    random_polynomial,
    theta_n,
)

plan = SamplePlan(seed=0, count=32)
for name in ("e3", "e3-broken-c"):
    A = load_problem(fixture(name)).algebroid
    th = theta_n(A)
    print(name, "degree", th.degree, "axioms", check_axioms(A, plan).passed,
          "{Theta, Theta} = 0:", master_equation_check(th, plan).passed)

# %%
# Random sections a + f, b + g reproduced by the derived bracket.
A = load_problem(fixture("e3")).algebroid
rng = np.random.default_rng(0)
rp = lambda: random_polynomial(A.chart.names, rng, 2)  # noqa: E731
pairs = [(([rp(), rp()], rp()), ([rp(), rp()], rp()))]
print(check_reproduction_n(A, pairs, plan))
