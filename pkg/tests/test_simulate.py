import numpy as np
import pytest
from scipy import integrate, stats

from frontierest.errors import UnsupportedDimensionError
from frontierest.frontiers import constant_frontier, fourier_frontier, lobed_frontier
from frontierest.model import ProcessModel
from frontierest.simulate import (
    homogenize,
    make_rng,
    sample_angle,
    sample_process,
    sample_star_support,
    support_mass,
    support_volume,
)

LOBED = lobed_frontier()
UNIT = constant_frontier(1.0)


def test_support_volume_by_quadrature():
    oracle, _ = integrate.quad(lambda t: 0.5 * (1 + np.exp(-np.cos(3 * t))) ** 2, 0, 2 * np.pi, epsrel=1e-13)
    assert support_volume(LOBED) == pytest.approx(oracle, rel=1e-9)
    assert support_volume(UNIT, d=3) == pytest.approx(4 * np.pi / 3, rel=1e-9)


def test_poisson_count_mean_within_three_sigma():
    n, c, reps = 100, 1.0, 2000
    mu = n * c * support_volume(LOBED)
    counts = np.array([len(sample_star_support(LOBED, n, c, seed=s)) for s in range(reps)])
    assert abs(counts.mean() - mu) <= 3 * np.sqrt(mu / reps)
    # Poisson: variance equals the mean
    assert counts.var(ddof=1) == pytest.approx(mu, rel=0.1)


def test_empirical_kind_has_exactly_n_points():
    s = sample_star_support(UNIT, 100, 1 / np.pi, kind="E", seed=3)
    assert len(s) == 100
    assert np.all(s.y <= 1.0) and np.all(s.y >= 0.0)


def test_directions_follow_f_squared_law():
    rng = make_rng(1)
    x = sample_angle(LOBED, 2, rng, size=100_000)[:, 0]
    edges = np.linspace(0, 2 * np.pi, 21)
    total, _ = integrate.quad(lambda t: LOBED(t) ** 2, 0, 2 * np.pi, limit=200)
    probs = np.array([integrate.quad(lambda t: LOBED(t) ** 2, a, b)[0] for a, b in zip(edges[:-1], edges[1:])]) / total
    observed, _ = np.histogram(x, edges)
    pvalue = stats.chisquare(observed, probs * len(x)).pvalue
    assert pvalue > 1e-3


def test_acceptance_rate_is_one_for_constant_frontier():
    _, attempts = sample_angle(UNIT, 2, make_rng(2), size=1000, return_attempts=True)
    x, attempts3 = sample_angle(UNIT, 3, make_rng(2), size=1000, return_attempts=True)
    assert attempts == 1000
    assert attempts3 == 1000
    assert len(x) == 1000


def test_acceptance_rate_bounded_below():
    f = fourier_frontier([1.0, 0.5])
    _, attempts = sample_angle(f, 2, make_rng(4), size=20_000, return_attempts=True)
    # the rate is int f^2 / (2 pi M^2) = (1 + 0.125) / 2.25 = 0.5, above (m/M)^2
    assert 20_000 / attempts == pytest.approx(0.5, rel=0.05)


def test_radial_law_after_homogenization():
    s = sample_star_support(UNIT, 5000, 1 / np.pi, seed=5)
    h = homogenize(s, ProcessModel.polar(2))
    assert len(h) == len(s)
    assert stats.kstest(h.y, stats.uniform(0, np.pi).cdf).pvalue > 1e-3


def test_quadrant_counts_uniform_on_disk():
    s = sample_star_support(UNIT, 20_000, 1 / np.pi, kind="E", seed=6)
    p = s.cartesian()
    quad = (p[:, 0] >= 0).astype(int) * 2 + (p[:, 1] >= 0)
    observed = np.bincount(quad, minlength=4)
    assert stats.chisquare(observed).pvalue > 1e-3
    r2 = (p**2).sum(axis=1)
    assert stats.kstest(r2, "uniform").pvalue > 1e-3


def test_three_dimensional_ball_is_uniform():
    s = sample_star_support(UNIT, 20_000, 3 / (4 * np.pi), d=3, kind="E", seed=7)
    p = s.cartesian()
    assert stats.kstest(np.linalg.norm(p, axis=1) ** 3, "uniform").pvalue > 1e-3
    # every coordinate of a uniform ball point has the same symmetric law
    for j in range(3):
        assert stats.ks_2samp(p[:, j], -p[:, j]).pvalue > 1e-3
    assert stats.ks_2samp(p[:, 0], p[:, 2]).pvalue > 1e-3


def test_reproducible_and_stream_separated():
    a = sample_star_support(LOBED, 100, 1.0, seed=42)
    b = sample_star_support(LOBED, 100, 1.0, seed=42)
    c = sample_star_support(LOBED, 100, 1.0, seed=43)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)
    assert len(a) != len(c) or not np.array_equal(a.y, c.y)
    r1 = make_rng(9, 0, 0).uniform(size=5)
    r2 = make_rng(9, 0, 1).uniform(size=5)
    assert not np.allclose(r1, r2)


@pytest.mark.parametrize("d", [1, 4, 5])
def test_unsupported_dimension(d):
    with pytest.raises((UnsupportedDimensionError, ValueError)):
        sample_star_support(UNIT, 10, 1.0, d=d)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        sample_star_support(UNIT, 0, 1.0)
    with pytest.raises(ValueError):
        sample_star_support(UNIT, 10, -1.0)
    with pytest.raises(ValueError):
        sample_star_support(UNIT, 10, 1.0, kind="Q")


def test_custom_model_sample_below_frontier():
    model = ProcessModel.custom(lambda x, y: 1.0 + y, d=2)
    f = fourier_frontier([1.0, 0.2])
    s = sample_process(model, f, 60, 1.0, kind="E", seed=8)
    assert len(s) == 60
    assert np.all(s.y <= f(s.x) + 1e-12)
    # Phi_x(y) = y + y^2 / 2 is uniform on [0, g(x)] given x
    g = f(s.x) + f(s.x) ** 2 / 2
    u = (s.y + s.y**2 / 2) / g
    assert stats.kstest(u, "uniform").pvalue > 1e-4


def test_support_mass_uniform_model():
    oracle, _ = integrate.quad(LOBED, 0, 2 * np.pi)
    assert support_mass(ProcessModel.uniform(2), LOBED) == pytest.approx(oracle / (2 * np.pi), rel=1e-9)
