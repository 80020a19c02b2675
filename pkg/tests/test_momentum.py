import numpy as np
import pytest

from algebroidkit import (
    DESIGNATED,
    IDENTITY_NAMES,
    SamplePlan,
    basic_curvature,
    check_p3,
    check_s2,
    check_sharp_basic_curvature,
    cotangent_algebroid,
    fixture,
    hamiltonian_poisson,
    hamiltonian_symplectic,
    identity_suite,
    load_problem,
    sample_points,
    trivial_bundle_reduction,
    Chart,
    PoissonBivector,
    evaluate_fields,
    parse,
    Connection,
    LieAlgebroid,
)

PLAN = SamplePlan(seed=0, count=64)


def _load(name):
    return load_problem(fixture(name))


def _coord_max(prob):
    pts = sample_points(prob.chart, PLAN)
    return np.abs(pts).max(axis=1)


@pytest.mark.parametrize("name", ["e1", "e5"])
def test_symplectic_fixtures_are_hamiltonian(name):
    p = _load(name)
    v = hamiltonian_symplectic(p.algebroid, p.connection, p.presymplectic, p.momentum, PLAN)
    assert v.passed, {k: r.max_residual for k, r in v.reports.items()}


@pytest.mark.parametrize("name", ["e2", "e4", "e6"])
def test_poisson_fixtures_are_hamiltonian(name):
    p = _load(name)
    v = hamiltonian_poisson(p.algebroid, p.connection, p.poisson, p.momentum, PLAN)
    assert v.passed and v.extra["sharp-basic-curvature"].passed


def test_scaled_rotation_momentum_fails_s2_by_the_hand_residual():
    # mu = x^2 + y^2 for rho = -y d_x + x d_y: d mu + iota_rho omega = (x, y)
    p = _load("e1-broken-mu")
    rep = check_s2(p.algebroid, None, p.presymplectic, p.momentum, PLAN)
    assert rep.max_residual == pytest.approx(_coord_max(p).max(), rel=1e-12)


def test_broken_p2_residual_by_hand():
    # rho^i - pi^{ij} d_j mu = (y - 2y, -x + 2x) = (-y, x)
    p = _load("e2-broken-mu")
    v = hamiltonian_poisson(p.algebroid, None, p.poisson, p.momentum, PLAN)
    assert [k for k, r in v.reports.items() if not r.passed] == ["P2"]
    assert v.reports["P2"].max_residual == pytest.approx(_coord_max(p).max(), rel=1e-12)


def test_shifted_affine_momentum_breaks_p3_by_exactly_one():
    # y + y - (y + 1) - y = -1 for mu_1 = y + 1
    p = _load("e6-broken-mu")
    rep = check_p3(p.algebroid, None, p.poisson, p.momentum, PLAN)
    assert rep.max_residual == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("name, designated", [(k, v) for k, v in DESIGNATED.items() if v[0].startswith("hamiltonian")])
def test_mutations_fail_exactly_their_designated_check(name, designated):
    suite, expected = designated
    p = _load(name)
    if suite == "hamiltonian-symplectic":
        v = hamiltonian_symplectic(p.algebroid, p.connection, p.presymplectic, p.momentum, PLAN)
    else:
        v = hamiltonian_poisson(p.algebroid, p.connection, p.poisson, p.momentum, PLAN)
    failed = [k for k, r in v.reports.items() if not r.passed]
    assert failed == ([] if expected is None else [expected])


@pytest.mark.parametrize("name", ["e2", "e4", "e6"])
def test_identity_chain_on_hamiltonian_fixtures(name):
    p = _load(name)
    reps = identity_suite(p.algebroid, p.connection, p.poisson, p.momentum, PLAN)
    assert [r.name for r in reps] == list(IDENTITY_NAMES)
    assert all(r.passed for r in reps), {r.name: r.max_residual for r in reps if not r.passed}


def test_corrupted_momentum_breaks_the_bracket_compatibility_identity():
    p = _load("e6-broken-mu")
    reps = {r.name: r for r in identity_suite(p.algebroid, None, p.poisson, p.momentum, PLAN)}
    assert not reps["bracket-compat-covariant"].passed


def casimir_lift():
    """The affine fixture on R^3 with z a Casimir and nabla_z e_1 = e_2.

    P1-P3 do not see the z-direction, but nabla_z T gives S^2_{z12} = -1,
    so <S, mu> = -x y dz is nonzero while pi# kills it.
    """
    chart = Chart.box(["x", "y", "z"])
    C = np.zeros((2, 2, 2), dtype=object)
    C[...] = "0"
    C[0, 1, 0] = "1"
    A = LieAlgebroid(chart, [["1", "0", "0"], ["x", "-y", "0"]], C)
    P = PoissonBivector(chart, [["0", "1", "0"], ["0", "0", "0"], ["0", "0", "0"]])
    om = np.zeros((2, 2, 3), dtype=object)
    om[...] = 0.0
    om[0, 1, 2] = 1.0
    mu = [parse("y", chart.names), parse("x*y", chart.names)]
    return A, Connection(om), P, mu


def test_nonvanishing_basic_curvature_paired_with_mu_is_killed_by_sharp():
    A, conn, P, mu = casimir_lift()
    S = basic_curvature(A, conn)
    pts = sample_points(A.chart, PLAN)
    assert evaluate_fields([S[2, 0, 1, 1] + 1.0], A.chart, pts).max() == 0.0
    v = hamiltonian_poisson(A, conn, P, mu, PLAN)
    assert v.passed and v.extra["sharp-basic-curvature"].passed
    pairing = v.extra["basic-curvature-pairing"]
    assert pairing.max_residual == pytest.approx(np.abs(pts[:, 0] * pts[:, 1]).max())
    reps = {r.name: r.passed for r in identity_suite(A, conn, P, mu, PLAN)}
    needs_pairing = {"derivative-without-basic-curvature", "koszul-morphism"}
    assert {k for k, ok in reps.items() if not ok} == needs_pairing


def test_trivial_bundle_reduction_on_the_rotation():
    p = _load("e1")
    reps = trivial_bundle_reduction(p.algebroid, p.presymplectic, p.momentum, PLAN)
    assert all(r.passed for r in reps.values())
    bad = trivial_bundle_reduction(p.algebroid, p.presymplectic, [2 * p.momentum[0]], PLAN)
    assert not bad["d-mu"].passed and bad["S1"].passed


def test_sharp_basic_curvature_vanishes_on_poisson_fixtures():
    for name in ("e2", "e4", "e6"):
        p = _load(name)
        assert check_sharp_basic_curvature(p.algebroid, None, p.poisson, p.momentum, PLAN).passed
