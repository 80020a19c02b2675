"""
Rotation of the plane as a Hamiltonian algebroid
================================================

The rotation action of the circle on the plane, seen as an action algebroid
with the standard symplectic form.  We check the three symplectic conditions,
then scale the momentum section and watch only the derivative condition fail.
"""
# %%
# Build the problem from the built-in fixture.
from algebroidkit import SamplePlan, fixture, hamiltonian_symplectic, load_problem

plan = SamplePlan(seed=0, count=64)
p = load_problem(fixture("e1"))
v = hamiltonian_symplectic(p.algebroid, p.connection, p.presymplectic, p.momentum, plan)
for name, rep in v.reports.items():
    print(f"{name}: max residual {rep.max_residual:.2e}  passed={rep.passed}")

# %%
# Doubling mu breaks only the derivative condition.
mu2 = [2 * p.momentum[0]]
v2 = hamiltonian_symplectic(p.algebroid, p.connection, p.presymplectic, mu2, plan)
print({k: r.passed for k, r in v2.reports.items()})

# %%
# The same momentum with the opposite anchor also fails: the sign of the
# anchor is tied to the sign convention of the flat map.
d = fixture("e1")
d["algebroid"]["rho"] = [["y", "-x"]]
q = load_problem(d)
print(hamiltonian_symplectic(q.algebroid, q.connection, q.presymplectic, q.momentum, plan).passed)
