"""
Momentum sections as Lie algebroid and Poisson morphisms
========================================================

On the affine algebra fixture every Hamiltonian condition holds, so the
induced maps into the cotangent algebroid, into T*M x R and onto the graph
of pi are Lie algebroid morphisms, and the map from TM to the dual bundle is
a Poisson map.  Shifting mu by a constant keeps the gradient, breaks the
bracket compatibility, and only the morphism that sees mu itself notices.
"""
# %%
from algebroidkit import (
    SamplePlan,
    check_cotangent_morphism,
    check_graph_pi_morphism,
    check_tstar_r_morphism,
    fixture,
    hamiltonian_poisson,
    load_problem,
    momentum_poisson_map,
    poisson_dirac_cross_check,
)

plan = SamplePlan(seed=0, count=64)
checks = (check_cotangent_morphism, check_tstar_r_morphism, check_graph_pi_morphism)

for name in ("e6", "e6-broken-mu"):
    p = load_problem(fixture(name))
    v = hamiltonian_poisson(p.algebroid, p.connection, p.poisson, p.momentum, plan)
    print(name, {k: r.passed for k, r in v.reports.items()})
    for check in checks:
        m = check(p.algebroid, p.connection, p.poisson, p.momentum, plan)
        print(f"  {check.__name__:<28} passed={m.passed}")

# %%
# The momentum map to the dual bundle, checked both as a Poisson map and as
# a forward Dirac map between graphs.
p = load_problem(fixture("e2"))
phi, lift, dual = momentum_poisson_map(p.algebroid, p.connection, p.poisson, p.momentum)
rep, dm = poisson_dirac_cross_check(phi, lift, dual, plan)
print(f"Poisson map residual {rep.max_residual:.1e}; Dirac morphism {dm.status}, sigma_min {dm.min_singular_value:.2f}")
