import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from frontierest.errors import DegenerateEstimateError, EmptyCellError, UndefinedIntervalError
from frontierest.estimator import (
    CellSummary,
    EstimateResult,
    EstimateSettings,
    c_hat_global,
    cell_maxima,
    ci_half_width,
    confidence_interval,
    estimate_pipeline,
    f_hat,
    f_hat_polar,
    g_hat,
    z_gamma,
)
from frontierest.frontiers import constant_frontier, lobed_frontier
from frontierest.kernel import KernelSpec, build_partition, weight_table
from frontierest.model import ProcessModel
from frontierest.simulate import PointSample, sample_star_support

FIXTURES = Path(__file__).parent / "fixtures"
POLAR = ProcessModel.polar(2)
UNIFORM = ProcessModel.uniform(2)


def _summary(y_star, counts, d=2, model=POLAR):
    y_star = np.asarray(y_star, dtype=float)
    k = len(y_star)
    x_star = np.zeros((k, d - 1))
    return CellSummary(np.asarray(counts), x_star, y_star, model.forward(x_star, y_star))


def test_one_point_per_cell():
    p = build_partition(4)
    x = np.array([0.1, 2.0, 3.5, 5.0])
    s = PointSample(x, [1.0, 2.0, 3.0, 4.0], n=4, c=1.0, kind="E")
    summary = cell_maxima(s, p, POLAR)
    np.testing.assert_array_equal(summary.counts, 1)
    np.testing.assert_array_equal(summary.x_star[:, 0], x)
    np.testing.assert_array_equal(summary.y_star, [1, 2, 3, 4])


def test_empty_sample_convention():
    s = PointSample(np.empty(0), np.empty(0), n=10, c=1.0, kind="P")
    summary = cell_maxima(s, build_partition(5), POLAR)
    assert summary.n_empty == 5
    assert np.all(summary.v_star == 0) and np.all(summary.y_star == 0) and np.all(summary.x_star == 0)


def test_cell_maxima_matches_brute_force():
    s = sample_star_support(constant_frontier(1.0), 10_000, 1 / np.pi, kind="E", seed=1)
    p = build_partition(10)
    summary = cell_maxima(s, p, POLAR)
    edges = p.azimuth_cuts
    for r in range(10):
        members = [i for i in range(len(s)) if edges[r] <= s.x[i, 0] < edges[r + 1]]
        best = max(members, key=lambda i: s.y[i])
        assert summary.counts[r] == len(members)
        assert summary.y_star[r] == s.y[best]
        assert summary.x_star[r, 0] == s.x[best, 0]
    assert summary.counts.sum() == len(s)
    assert np.mean(1 - summary.y_star) <= 10 / 10_000 * 10


def test_cell_maxima_uses_transformed_height():
    # with an x-dependent intensity the extreme maximizes Phi_X(Y), not Y
    model = ProcessModel.custom(lambda x, y: 1.0 + 10.0 * np.cos(x[-1]) ** 2)
    s = PointSample([0.0, 1.5], [1.0, 1.5], n=2, c=1.0, kind="E")
    summary = cell_maxima(s, build_partition(1), model)
    assert summary.y_star[0] == 1.0


def test_c_hat_plug_in():
    g = np.pi
    n, c = 1000, 0.3
    summary = _summary([1.0], [n * c * g])
    assert c_hat_global(summary, n) == pytest.approx(c, rel=1e-14)


def test_c_hat_polar_form():
    rng = np.random.default_rng(3)
    y, counts, n = rng.uniform(0.5, 2, 12), rng.integers(1, 30, 12), 200
    polar_form = (2 / (2 * np.pi)) * (12**2 / n) / np.sum(y**2 / counts)
    assert c_hat_global(_summary(y, counts), n) == pytest.approx(polar_form, rel=1e-13)


def test_c_hat_errors():
    with pytest.raises(EmptyCellError) as info:
        c_hat_global(_summary([1.0, 0.0], [3, 0]), 10)
    assert info.value.n_empty == 1
    with pytest.raises(DegenerateEstimateError):
        c_hat_global(_summary([0.0, 0.0], [3, 2]), 10)


@pytest.mark.parametrize("lam", [0.1, 3.0])
def test_c_hat_scales(lam):
    summary = _summary([1.0, 1.3, 0.7], [4, 5, 6])
    assert c_hat_global(summary.scaled(lam, 2), 50) == pytest.approx(c_hat_global(summary, 50) * lam**-2, rel=1e-13)


def test_g_hat_single_cell_uniform():
    table = weight_table(KernelSpec(0), build_partition(1), np.array([0.4]))
    summary = _summary([0.8], [7], model=UNIFORM)
    assert g_hat(summary, table, 2.0, 10, [1.0])[0] == pytest.approx(0.8 + 1 / 20)


def test_g_hat_all_equal():
    p = build_partition(8)
    table = weight_table(KernelSpec(0), p, np.linspace(0, 6, 5))
    summary = _summary(np.full(8, 0.6), np.full(8, 3), model=UNIFORM)
    # each cell contributes nu_r kappa_r / (n c nu_r) = 1 / (n c); k_n cells in total
    np.testing.assert_allclose(g_hat(summary, table, 0.5, 40, p.measures), 0.6 + 8 / 20, rtol=1e-14)


def test_f_hat_root_three():
    p = build_partition(2)
    table = weight_table(KernelSpec(0), p, np.array([1.0]))
    summary = _summary([1.0, 2.0], [5, 5])
    np.testing.assert_allclose(table.mass, [[0.5, 0.5]])
    assert f_hat_polar(summary, table, 2)[0] == pytest.approx(np.sqrt(3), rel=1e-15)
    c = c_hat_global(summary, 10)
    assert f_hat(summary, table, c, 10, POLAR, p.measures)[0] == pytest.approx(np.sqrt(3), rel=1e-14)


def test_f_hat_partition_of_unity():
    p = build_partition(16)
    table = weight_table(KernelSpec(5), p, np.linspace(0, 6, 9))
    summary = _summary(np.full(16, 1.7), np.full(16, 10**12))
    np.testing.assert_allclose(f_hat_polar(summary, table, 2), 1.7, rtol=1e-9)


def test_negative_g_hat_is_clamped_and_flagged():
    p = build_partition(20)
    table = weight_table(KernelSpec(7), p, np.linspace(0, 2 * np.pi, 64, endpoint=False))
    y = np.full(20, 0.01)
    y[0] = 10.0
    summary = _summary(y, np.full(20, 10**6))
    est, flags = f_hat(summary, table, 1e9, 10**6, POLAR, p.measures, return_flags=True)
    assert flags.any() and np.all(est[flags] == 0.0) and np.all(np.isfinite(est))
    with pytest.warns(UserWarning):
        f_hat(summary, table, 1e9, 10**6, POLAR, p.measures)


@pytest.mark.parametrize("d", [2, 3])
def test_dual_path(d):
    rng = np.random.default_rng(d)
    model = ProcessModel.polar(d)
    for _ in range(50):
        k = int(rng.integers(2, 40)) if d == 2 else int(rng.choice([4, 6, 8, 12, 16]))
        p = build_partition(k, d)
        summary = _summary(rng.uniform(0.2, 3, k), rng.integers(1, 50, k), d=d, model=model)
        n = int(rng.integers(10, 1000))
        x = np.column_stack([rng.uniform(0, np.pi, 5)] * (d - 2) + [rng.uniform(0, 2 * np.pi, 5)])
        table = weight_table(KernelSpec(int(rng.integers(0, 10))), p, x)
        c = c_hat_global(summary, n)
        g = g_hat(summary, table, c, n, p.measures)
        est = f_hat(summary, table, c, n, model, p.measures, return_flags=True)[0]
        ok = g >= 0
        np.testing.assert_allclose(model.forward(table.x[ok], est[ok]), g[ok], rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(est, f_hat_polar(summary, table, d), rtol=1e-10, atol=1e-12)


def test_z_gamma():
    assert z_gamma(0.95) == pytest.approx(1.959964, abs=1e-6)
    assert z_gamma(0.5) == pytest.approx(stats.norm.ppf(0.75), abs=1e-12)
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            z_gamma(bad)


def test_ci_uniform_plug_in():
    k, n, c = 25, 400, 0.8
    half = ci_half_width(1.3, 0.2, c, n, np.sqrt(k), UNIFORM, 0.95)
    assert half == pytest.approx(z_gamma(0.95) * np.sqrt(k) / (n * c), rel=1e-14)


def test_ci_lower_clamped_and_undefined():
    table = weight_table(KernelSpec(0), build_partition(4), np.array([0.0]))
    lo, hi = confidence_interval(np.array([1e-3]), table.x, 1e-3, 10, table, UNIFORM)
    assert lo[0] == 0.0 and hi[0] > 1e-3
    with pytest.raises(UndefinedIntervalError):
        ci_half_width(np.array([0.0]), table.x, 1.0, 10, table.kappa_n, POLAR, 0.95)


def test_golden_estimate():
    golden = json.loads((FIXTURES / "golden_estimate.json").read_text())
    sample = PointSample(
        np.array(golden["sample"]["x"]), np.array(golden["sample"]["y"]), n=golden["sample"]["n"], c=1.0, kind="P"
    )
    result = estimate_pipeline(sample, EstimateSettings(k_n=20, order=7, grid_size=64))
    expected = EstimateResult.from_dict(golden["result"])
    assert result.settings == expected.settings
    assert result.c_hat == pytest.approx(expected.c_hat, rel=1e-12)
    for name in ("grid", "f_hat", "ci_half_width", "g_hat", "kappa_n"):
        np.testing.assert_allclose(getattr(result, name), getattr(expected, name), rtol=1e-12, atol=1e-14)
    np.testing.assert_array_equal(result.counts, expected.counts)


def test_result_json_round_trip():
    s = sample_star_support(lobed_frontier(), 200, 1.0, seed=4)
    r = estimate_pipeline(s, k_n=10, grid_size=32)
    back = EstimateResult.from_dict(json.loads(r.to_json()))
    assert back.to_json() == r.to_json()
    assert np.all(np.diff(r.grid) > 0)
    assert np.all(r.f_hat >= 0) and np.all(r.ci_half_width >= 0)
    assert r.normalization.v_n == pytest.approx(200 / np.sqrt(14 * 10))


def test_singleton_grid():
    s = sample_star_support(lobed_frontier(), 100, 1.0, seed=5)
    r = estimate_pipeline(s, k_n=5, grid=np.array([1.0]))
    assert r.f_hat.shape == (1,) and r.grid.shape == (1,)


def test_k_larger_than_sample_raises():
    s = sample_star_support(lobed_frontier(), 20, 1.0, seed=6)
    with pytest.raises(EmptyCellError):
        estimate_pipeline(s, k_n=len(s) + 1)


def test_three_dimensional_pipeline():
    s = sample_star_support(constant_frontier(1.0), 4000, 3 / (4 * np.pi), d=3, seed=7)
    r = estimate_pipeline(s, k_n=16, order=2, grid_size=32)
    assert r.grid.shape[1] == 2
    assert np.median(np.abs(r.f_hat - 1)) < 0.1


@pytest.mark.parametrize("lam", [0.1, 3.0])
def test_scaling_equivariance(lam):
    s = sample_star_support(lobed_frontier(), 300, 1.0, seed=8)
    a = estimate_pipeline(s, k_n=20, grid_size=128)
    b = estimate_pipeline(s.scaled(lam), k_n=20, grid_size=128)
    np.testing.assert_allclose(b.f_hat, lam * a.f_hat, rtol=1e-10)


def test_rotation_equivariance():
    k = 20
    s = sample_star_support(lobed_frontier(), 300, 1.0, seed=9)
    shift = 2 * np.pi / k
    grid = np.linspace(0, 2 * np.pi - shift, 50)
    a = estimate_pipeline(s, k_n=k, grid=grid)
    b = estimate_pipeline(s.rotated(shift), k_n=k, grid=grid + shift)
    np.testing.assert_allclose(b.f_hat, a.f_hat, rtol=0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 9), st.floats(0.01, 3.0), st.floats(0, 2 * np.pi, exclude_max=True))
def test_monotone_dominance(r, bump, x):
    rng = np.random.default_rng(r)
    p = build_partition(10)
    table = weight_table(KernelSpec(0), p, np.array([x]))
    y = rng.uniform(0.5, 2, 10)
    counts = rng.integers(1, 9, 10)
    before = f_hat_polar(_summary(y, counts), table, 2)[0]
    y[r] += bump
    assert f_hat_polar(_summary(y, counts), table, 2)[0] >= before
