import numpy as np
import pytest

from algebroidkit import Chart, SamplePlan, merge_reports, parse, residual_check, sample_points


def test_chart_validation():
    with pytest.raises(ValueError):
        Chart(("x", "x"), (0, 0), (1, 1))
    with pytest.raises(ValueError):
        Chart(("x",), (1,), (1,))
    with pytest.raises(ValueError):
        Chart((), (), ())
    c = Chart.box(["x", "y"], 2.0)
    assert c.lower == (-2.0, -2.0) and c.dim == 2


def test_sampling_is_reproducible_and_inside_the_shrunk_box():
    c = Chart(("x", "y"), (0.0, -3.0), (1.0, 3.0))
    p = SamplePlan(seed=5, count=200, margin=0.1)
    a, b = sample_points(c, p), sample_points(c, p)
    assert np.array_equal(a, b)
    assert a.shape == (200, 2)
    assert np.all(a[:, 0] >= 0.1) and np.all(a[:, 0] <= 0.9)
    assert np.all(a[:, 1] >= -2.4) and np.all(a[:, 1] <= 2.4)
    assert not np.array_equal(a, sample_points(c, SamplePlan(seed=6, count=200, margin=0.1)))


def test_plan_split_partitions_the_count():
    parts = SamplePlan(seed=3, count=65).split(4)
    assert sum(p.count for p in parts) == 65
    assert len({p.seed for p in parts}) == 4
    with pytest.raises(ValueError):
        SamplePlan(count=0)
    with pytest.raises(ValueError):
        SamplePlan(margin=0.5)


def test_residual_check_reports_the_worst_point():
    c = Chart.box(["x", "y"])
    p = SamplePlan(seed=1, count=50)
    pts = sample_points(c, p)
    rep = residual_check("probe", [parse("x", c.names), parse("y/2", c.names)], c, p, tol=10.0)
    expected = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1]) / 2)
    assert rep.max_residual == pytest.approx(expected.max())
    k = int(np.argmax(expected))
    assert rep.worst_point == pytest.approx(tuple(pts[k]))
    assert rep.passed and rep.count == 50
    d = rep.to_dict()
    assert d["prng"] == "Philox4x64-10" and d["points"] == 50


def test_empty_residual_list_passes_and_merge_takes_pointwise_max():
    c = Chart.box(["x"])
    p = SamplePlan(count=10)
    empty = residual_check("none", [], c, p)
    assert empty.passed and empty.max_residual == 0.0
    big = residual_check("big", [parse("1 + x^2", ["x"])], c, p)
    merged = merge_reports("both", [empty, big])
    assert not merged.passed
    np.testing.assert_array_equal(merged.per_point, big.per_point)
