import numpy as np
import pytest
from hypothesis import given, settings

from algebroidkit import (
    Chart,
    ExtendedAlgebroidTMR,
    ExtendedAlgebroidTstarR,
    GraphTarget,
    PoissonBivector,
    PreSymplectic,
    SamplePlan,
    SmoothMap,
    am_bracket,
    bundle_map_dual_cross_check,
    check_am_morphism,
    check_axioms,
    check_cotangent_morphism,
    check_graph_omega_morphism,
    check_graph_pi_morphism,
    check_jacobiator,
    check_poisson,
    check_tstar_r_morphism,
    differentiate,
    dual_poisson,
    evaluate_fields,
    fixture,
    load_problem,
    momentum_poisson_map,
    parse,
    poisson_bracket,
    poisson_dirac_cross_check,
    poisson_map_check,
    random_polynomial,
    sample_points,
    tangent_algebroid,
    tstar_r_bracket,
)
from strategies import seeds

R2 = Chart.box(["x", "y"])
R3 = Chart.box(["x", "y", "z"])
PLAN = SamplePlan(seed=0, count=32)


def _max_abs(fields, chart):
    return float(np.max(np.abs(evaluate_fields(list(fields), chart, sample_points(chart, PLAN)))))


def _load(name):
    return load_problem(fixture(name))


def test_almeida_molino_bracket_by_hand():
    w = PreSymplectic(R2, [["0", "1"], ["0", "0"]])
    vec, f = am_bracket(w, ([1, 0], 0), ([0, 1], 0))
    assert _max_abs(vec + [f + 1], R2) == 0.0


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_tstar_r_bracket_on_exact_forms(seed):
    # (dh, f), (dk, g) -> (d{h, k}, {h, g} - {k, f} + {h, k})
    rng = np.random.default_rng(seed)
    P = PoissonBivector(R3, [["0", "1", "0"], ["0", "0", "x"], ["0", "0", "0"]])
    h, k, f, g = (random_polynomial(R3.names, rng, 2) for _ in range(4))
    d = lambda e: [differentiate(e, x) for x in R3.names]  # noqa: E731
    form, scalar = tstar_r_bracket(P, (d(h), f), (d(k), g))
    hk = poisson_bracket(P, h, k)
    expected = poisson_bracket(P, h, g) - poisson_bracket(P, k, f) + hk
    assert _max_abs([a - b for a, b in zip(form, d(hk))] + [scalar - expected], R3) <= 1e-9


@pytest.mark.parametrize(
    "omega, closed",
    [([["0", "0", "y"], ["0", "0", "x"], ["0", "0", "0"]], True),
     ([["0", "z", "0"], ["0", "0", "x"], ["0", "0", "0"]], False)],
)
def test_almeida_molino_jacobiator_vanishes_iff_closed(omega, closed):
    rep = check_jacobiator(ExtendedAlgebroidTMR(PreSymplectic(R3, omega)), PLAN)
    assert rep.passed is closed


@pytest.mark.parametrize(
    "pi, poisson",
    [([["0", "1", "0"], ["0", "0", "x"], ["0", "0", "0"]], True),
     ([["0", "y", "0"], ["0", "0", "1"], ["0", "0", "0"]], False)],
)
def test_tstar_r_jacobiator_vanishes_iff_poisson(pi, poisson):
    rep = check_jacobiator(ExtendedAlgebroidTstarR(PoissonBivector(R3, pi)), PLAN)
    assert rep.passed is poisson


def test_graph_targets_are_algebroids_for_good_structures():
    w = PreSymplectic(R3, [["0", "1 + x^2", "y"], ["0", "0", "x"], ["0", "0", "0"]])
    from algebroidkit import GeneralizedSection, flat, cotangent_anchor

    rng = np.random.default_rng(4)
    rp = lambda: [random_polynomial(R3.names, rng, 1) for _ in range(3)]  # noqa: E731
    T = GraphTarget(w)
    u, v = rp(), rp()
    s = [GeneralizedSection(x, flat(w, x)) for x in (u, v)]
    assert _max_abs(T.membership(T.bracket(*s)), R3) <= 1e-9
    P = PoissonBivector(R3, [["0", "1", "0"], ["0", "0", "x"], ["0", "0", "0"]])
    T = GraphTarget(P)
    s = [GeneralizedSection(cotangent_anchor(P, a), a) for a in (rp(), rp())]
    assert _max_abs(T.membership(T.bracket(*s)), R3) <= 1e-9


def _s3_breaking_e5():
    d = fixture("e5")
    d["momentum"]["mu"] = ["-y1", "x1 - y2"]
    return load_problem(d)


@pytest.mark.parametrize("make", [lambda: _load("e1"), lambda: _load("e5"), lambda: _load("e1-broken-mu"),
                                  lambda: _load("e5-broken-mu"), _s3_breaking_e5])
def test_symplectic_morphism_verdicts_match_their_conditions(make):
    p = make()
    for check in (check_am_morphism, check_graph_omega_morphism):
        v = check(p.algebroid, p.connection, p.presymplectic, p.momentum, PLAN)
        assert v.agree, (v.name, v.passed, v.condition.passed)


def test_s3_breaking_corruption_fails_both_s3_and_the_almeida_molino_morphism():
    p = _s3_breaking_e5()
    v = check_am_morphism(p.algebroid, None, p.presymplectic, p.momentum, PLAN)
    assert not v.passed and not v.condition.passed


@pytest.mark.parametrize("name", ["e2", "e4", "e6"])
def test_poisson_morphisms_hold_on_hamiltonian_fixtures(name):
    p = _load(name)
    for check in (check_cotangent_morphism, check_tstar_r_morphism, check_graph_pi_morphism):
        v = check(p.algebroid, p.connection, p.poisson, p.momentum, PLAN)
        assert v.passed and all(h.passed for h in v.hypotheses), v.name


def test_poisson_morphisms_fail_when_p2_fails():
    p = _load("e2-broken-mu")
    for check in (check_cotangent_morphism, check_tstar_r_morphism, check_graph_pi_morphism):
        assert not check(p.algebroid, None, p.poisson, p.momentum, PLAN).passed


def test_tstar_r_morphism_fails_when_p3_fails():
    p = _load("e6-broken-mu")
    assert not check_tstar_r_morphism(p.algebroid, None, p.poisson, p.momentum, PLAN).passed
    # the cotangent and graph morphisms only see nabla mu, which the shift leaves unchanged
    assert check_cotangent_morphism(p.algebroid, None, p.poisson, p.momentum, PLAN).passed


@pytest.mark.parametrize("name, ok", [("e3", True), ("e4", True), ("e6", True), ("e3-broken-c", False),
                                      ("e4-broken-c", False)])
def test_dual_bivector_is_poisson_iff_axioms_hold(name, ok):
    A = _load(name).algebroid
    assert check_axioms(A, PLAN).passed is ok
    assert check_poisson(dual_poisson(A), PLAN).passed is ok


def test_dual_bivector_by_hand():
    # affine algebra on R: {p_1, x} = 1, {p_2, x} = x, {p_1, p_2} = p_1
    D = dual_poisson(_load("e3").algebroid)
    assert D.fiber_names == ("p1", "p2")
    names = D.chart.names
    exp = {(1, 0): "1", (2, 0): "x", (1, 2): "p1"}
    assert _max_abs([D.pi[k] - parse(v, names) for k, v in exp.items()], D.chart) == 0.0


@pytest.mark.parametrize("name", ["e2", "e3", "e6", "e2-broken-mu", "e3-broken-c"])
def test_anchor_cross_check_verdicts_agree(name):
    A = _load(name).algebroid
    rho = [[A.rho[a, i] for i in range(A.chart.dim)] for a in range(A.rank)]
    morph, dual = bundle_map_dual_cross_check(rho, A, tangent_algebroid(A.chart), PLAN)
    assert morph.passed == dual.passed
    assert morph.passed is check_axioms(A, PLAN).passed


def test_doubled_anchor_is_not_a_morphism_and_its_dual_not_poisson():
    A = _load("e3").algebroid
    rho = [[2 * A.rho[a, i] for i in range(A.chart.dim)] for a in range(A.rank)]
    morph, dual = bundle_map_dual_cross_check(rho, A, tangent_algebroid(A.chart), PLAN)
    assert not morph.passed and not dual.passed


def test_smooth_map_pullback_and_jacobian():
    tgt = Chart.box(["u", "v"], 3.0)
    phi = SmoothMap(R2, tgt, [parse("x*y", R2.names), parse("x + y", R2.names)])
    assert _max_abs([phi.pullback(parse("u - v^2", tgt.names)) - parse("x*y - (x + y)^2", R2.names)], R2) <= 1e-14
    J = phi.jacobian()
    assert _max_abs([J[0, 0] - parse("y", R2.names), J[1, 1] - 1], R2) == 0.0
    with pytest.raises(ValueError):
        SmoothMap(R2, tgt, [parse("x", R2.names)])


@pytest.mark.parametrize("name, ok", [("e2", True), ("e6", True), ("e2-broken-mu", False)])
def test_momentum_map_to_the_dual_is_poisson_and_dirac(name, ok):
    p = _load(name)
    phi, lift, dual = momentum_poisson_map(p.algebroid, p.connection, p.poisson, p.momentum)
    rep, dm = poisson_dirac_cross_check(phi, lift, dual, PLAN)
    assert rep.passed is ok and dm.passed is ok
    if ok:
        assert dm.status == "unique" and dm.min_singular_value >= 1e-6
