import math

import numpy as np
import pytest
from hypothesis import given, settings

from algebroidkit import DomainError, ParseError, differentiate, evaluate, evaluate_many, parse, substitute, var
from algebroidkit.expr import to_source
from strategies import central_difference, random_source, seeds

XY = ["x", "y"]


def ev(src, x, y):
    return evaluate(parse(src, XY), (x, y), XY)


@pytest.mark.parametrize(
    "src, expected",
    [
        ("-x^2", -4.0),
        ("2*x^3 - y", 13.0),
        ("x/y/2", 1 / 3),
        ("x - y - 1", -2.0),
        ("(x + y)^2", 25.0),
        ("sin(0*x) + cos(0) + exp(0) + ln(1) + sqrt(4)", 4.0),
        ("1e-3*x", 2e-3),
    ],
)
def test_parse_precedence_by_hand(src, expected):
    assert ev(src, 2.0, 3.0) == pytest.approx(expected)


@pytest.mark.parametrize(
    "src, offset",
    [
        ("x + * y", 4),
        ("x + ", 4),
        ("z + 1", 0),
        ("x^2^3", 3),
        ("x^-1", 2),
        ("(x", 2),
        ("x y", 2),
        ("sin(x", 5),
        ("@", 0),
    ],
)
def test_parse_error_offsets(src, offset):
    with pytest.raises(ParseError) as err:
        parse(src, XY)
    assert err.value.offset == offset


def test_parse_rejects_bad_coordinate_lists():
    with pytest.raises(ValueError):
        parse("x", [])
    with pytest.raises(ValueError):
        parse("x", ["x", "x"])
    with pytest.raises(ValueError):
        parse("x", ["sin"])


@pytest.mark.parametrize(
    "src, wrt, expected",
    [
        ("x^2*y", "x", lambda x, y: 2 * x * y),
        ("sin(x*y)", "x", lambda x, y: y * math.cos(x * y)),
        ("ln(x)", "x", lambda x, y: 1 / x),
        ("sqrt(x)", "x", lambda x, y: 0.5 / math.sqrt(x)),
        ("x/y", "y", lambda x, y: -x / y**2),
        ("exp(x*y)", "y", lambda x, y: x * math.exp(x * y)),
        ("y^3", "x", lambda x, y: 0.0),
    ],
)
def test_derivatives_by_hand(src, wrt, expected):
    d = differentiate(parse(src, XY), wrt)
    for x, y in [(0.7, 1.3), (1.9, 0.4)]:
        assert evaluate(d, (x, y), XY) == pytest.approx(expected(x, y), rel=1e-12, abs=1e-14)


def test_derivative_of_constant_is_folded_to_zero():
    d = differentiate(parse("3*y + 2", XY), "x")
    assert d.free == frozenset()
    assert evaluate(d, (0.1, 0.2), XY) == 0.0


def _fd_check(src, names, rng, tol=1e-6):
    e = parse(src, names)
    pt = rng.uniform(-0.9, 0.9, len(names))
    f = lambda p: evaluate(e, p, names)  # noqa: E731
    scale = 1.0 + abs(f(pt))
    worst = 0.0
    for k, name in enumerate(names):
        sym = evaluate(differentiate(e, name), pt, names)
        num = central_difference(f, pt, k)
        worst = max(worst, abs(sym - num) / (scale + abs(sym)))
    return worst


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_symbolic_derivative_matches_finite_difference(seed):
    rng = np.random.default_rng(seed)
    names = ["x", "y", "z"]
    assert _fd_check(random_source(rng, names), names, rng) <= 1e-6


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_printed_source_reparses_to_same_values(seed):
    rng = np.random.default_rng(seed)
    e = parse(random_source(rng, XY), XY)
    again = parse(to_source(e), XY)
    pts = {"x": rng.uniform(-1, 1, 8), "y": rng.uniform(-1, 1, 8)}
    np.testing.assert_allclose(evaluate_many(e, pts), evaluate_many(again, pts), rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_substitution_commutes_with_evaluation(seed):
    rng = np.random.default_rng(seed)
    e = parse(random_source(rng, XY), XY)
    g = parse(random_source(rng, XY, 2), XY)
    s = substitute(e, {"x": g})
    x, y = rng.uniform(-0.9, 0.9, 2)
    gx = evaluate(g, (x, y), XY)
    assert evaluate(s, (x, y), XY) == pytest.approx(evaluate(e, (gx, y), XY), rel=1e-10, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_chain_rule_through_substitution(seed):
    # d/dy e(g(x, y), y) = e_x(g, y) g_y + e_y(g, y)
    rng = np.random.default_rng(seed)
    e = parse(random_source(rng, XY, 2), XY)
    g = parse(random_source(rng, XY, 2), XY)
    lhs = differentiate(substitute(e, {"x": g}), "y")
    rhs = substitute(differentiate(e, "x"), {"x": g}) * differentiate(g, "y") + substitute(differentiate(e, "y"), {"x": g})
    pt = rng.uniform(-0.9, 0.9, 2)
    assert evaluate(lhs, pt, XY) == pytest.approx(evaluate(rhs, pt, XY), rel=1e-9, abs=1e-9)


def test_domain_errors_name_the_first_bad_point():
    e = parse("ln(x)", XY)
    with pytest.raises(DomainError) as err:
        evaluate_many(e, {"x": np.array([1.0, 2.0, -1.0, -2.0]), "y": np.zeros(4)})
    assert err.value.index == 2
    with pytest.raises(DomainError):
        evaluate(parse("1/(x - y)", XY), (1.0, 1.0), XY)
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(x)", XY), (-1.0, 0.0), XY)


def test_arithmetic_sugar_builds_the_same_function():
    x, y = var("x"), var("y")
    built = (x + 2) * y - x / (y + 3) + (-x) ** 2
    parsed = parse("(x + 2)*y - x/(y + 3) + (-x)^2", XY)
    for pt in [(0.3, 0.5), (-0.8, 0.1)]:
        assert evaluate(built, pt, XY) == pytest.approx(evaluate(parsed, pt, XY), rel=1e-15)
