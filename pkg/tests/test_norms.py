import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airykdv import spectral as sp
from airykdv import norms as nm

GRID = sp.make_spatial_grid(32, 2 * np.pi)
WINDOW = sp.make_time_window(16, 1.3)


def st_field(seed, grid=GRID, window=WINDOW):
    rng = np.random.default_rng(seed)
    shape = (window.n_t, grid.n)
    a = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / (1 + np.arange(grid.n) % 7)
    return sp.SpectralField(grid, a, window)


def test_l2_of_sine():
    u = sp.forward_transform(np.sin(GRID.points), GRID)
    assert nm.l2_norm(u) == pytest.approx(np.sqrt(np.pi), rel=1e-14)
    assert nm.l2_norm(u * 0) == 0.0


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_parseval(seed):
    rng = np.random.default_rng(seed)
    u = sp.forward_transform(rng.standard_normal(32) + 1j * rng.standard_normal(32), GRID)
    assert nm.quadrature_l2_norm(u) == pytest.approx(nm.l2_norm(u), rel=1e-12)
    v = st_field(seed)
    assert nm.quadrature_l2_norm(v) == pytest.approx(nm.l2_norm(v), rel=1e-12)


def test_mixed_two_two_is_l2():
    u = st_field(1)
    assert nm.mixed_norm(u, 2, 2) == pytest.approx(nm.l2_norm(u), rel=1e-12)


@pytest.mark.parametrize("p,q", [(1, 1), (4, 8), (8, 8), (np.inf, 3), (2, np.inf)])
def test_mixed_constant(p, q):
    c = 1.7 - 0.4j
    u = sp.forward_transform(np.full((WINDOW.n_t, GRID.n), c), GRID, WINDOW)
    L, T = GRID.length, WINDOW.t_span
    expected = abs(c) * L ** (0 if np.isinf(q) else 1 / q) * T ** (0 if np.isinf(p) else 1 / p)
    assert nm.mixed_norm(u, p, q) == pytest.approx(expected, rel=1e-12)


def test_sup_of_sine():
    samples = np.tile(np.sin(GRID.points), (WINDOW.n_t, 1))
    u = sp.forward_transform(samples, GRID, WINDOW)
    sup = nm.mixed_norm(u, np.inf, np.inf)
    assert 1 - 1e-2 <= sup <= 1 + 1e-14
    assert nm.mixed_norm(u, np.inf, np.inf, oversample=4) >= sup


def test_exponent_errors():
    with pytest.raises(ValueError):
        nm.mixed_norm(st_field(0), 0.5, 2)
    with pytest.raises(ValueError):
        nm.lq_norm(sp.forward_transform(np.ones(32), GRID), 0.9)


def test_sobolev():
    rng = np.random.default_rng(3)
    u = sp.forward_transform(rng.standard_normal(32), GRID)
    assert nm.sobolev_norm(u, 0, 3) == pytest.approx(nm.lq_norm(u, 3), rel=1e-14)
    mode = sp.forward_transform(np.exp(1j * GRID.points), GRID)
    assert nm.sobolev_norm(mode, 1, 2) == pytest.approx(np.sqrt(2) * nm.l2_norm(mode), rel=1e-12)
    weighted = np.sqrt(GRID.length * np.sum(sp.japanese(GRID.frequencies) ** 1.4 * np.abs(u.coefficients) ** 2))
    assert nm.sobolev_norm(u, 0.7, 2) == pytest.approx(weighted, rel=1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(0, 2))
@settings(max_examples=25, deadline=None)
def test_homogeneous_below_inhomogeneous(seed, s):
    rng = np.random.default_rng(seed)
    u = sp.forward_transform(rng.standard_normal(32), GRID)
    assert nm.sobolev_norm(u, s, 2, homogeneous=True) <= nm.sobolev_norm(u, s, 2) * (1 + 1e-14)


def test_xsb_pure_mode():
    k, m = 3, 2
    omega = WINDOW.tau_frequencies[WINDOW.n_t // 2 + m]
    x, t = np.meshgrid(GRID.points, WINDOW.times)
    u = sp.forward_transform(np.exp(1j * (k * x + omega * t)), GRID, WINDOW)
    s, b = -0.3, 0.6
    expected = sp.japanese(omega - k**3) ** b * sp.japanese(k) ** s * np.sqrt(GRID.length * WINDOW.t_span)
    assert nm.xsb_norm(u, s, b) == pytest.approx(expected, rel=1e-12)


def test_xsb_zero_exponents_is_l2():
    u = st_field(5)
    assert nm.xsb_norm(u, 0, 0) == pytest.approx(nm.l2_norm(u), rel=1e-12)


def _slow_xsb(samples, grid, window, s, b):
    """Direct double sum of the space-time Fourier integral on the lattice."""
    x, t = grid.points, window.times
    total = 0.0
    for tau in window.tau_frequencies:
        for xi in grid.frequencies:
            phase = np.exp(-1j * (xi * x[None, :] + tau * t[:, None]))
            coeff = np.sum(samples * phase) / samples.size
            total += (sp.japanese(tau - xi**3) ** (2 * b) * sp.japanese(xi) ** (2 * s)
                      * abs(coeff) ** 2)
    return np.sqrt(grid.length * window.t_span * total)


def test_free_solution_xsb_slow_sum():
    grid = sp.make_spatial_grid(16, 2 * np.pi)
    window = sp.make_time_window(16, 0.8)
    rng = np.random.default_rng(7)
    u0 = sp.SpectralField(grid, (rng.standard_normal(16) + 1j * rng.standard_normal(16)) / 4)
    v = sp.free_solution(u0, window)
    slow0 = _slow_xsb(sp.inverse_transform(v), grid, window, 0, 0)
    assert nm.xsb_norm(v, 0, 0) == pytest.approx(slow0, rel=1e-12)
    # with b = s = 0 the window leakage is invisible: Parseval in time
    assert nm.xsb_norm(v, 0, 0) == pytest.approx(np.sqrt(window.t_span) * nm.l2_norm(u0), rel=1e-12)
    slow = _slow_xsb(sp.inverse_transform(v), grid, window, -0.1, 0.55)
    assert nm.xsb_norm(v, -0.1, 0.55) == pytest.approx(slow, rel=1e-12)


def test_density_round_trip():
    u = st_field(9)
    p = nm.WeightParams(-0.1, 0.55, -0.45)
    f = nm.to_weighted_density(u, p)
    np.testing.assert_allclose(nm.from_weighted_density(f).coefficients, u.coefficients, rtol=1e-12)
    assert f.l2() == pytest.approx(nm.xsb_norm(u, p.s, p.b), rel=1e-12)


def test_density_of_pure_mode():
    a = np.zeros((WINDOW.n_t, GRID.n), complex)
    a[3, 20] = 1.0
    u = sp.SpectralField(GRID, a, WINDOW)
    f = nm.to_weighted_density(u, (0.5, 0.7))
    tau, xi = WINDOW.tau_frequencies[3], GRID.frequencies[20]
    assert np.count_nonzero(f.values) == 1
    assert f.values[3, 20] == pytest.approx(sp.japanese(tau - xi**3) ** 0.7 * sp.japanese(xi) ** 0.5)


@given(st.integers(0, 2**32 - 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 1))
@settings(max_examples=30, deadline=None)
def test_xsb_monotone(seed, s, b, step):
    u = st_field(seed)
    assert nm.xsb_norm(u, s, b) <= nm.xsb_norm(u, s, b + step) * (1 + 1e-13)
    assert nm.xsb_norm(u, s, b) <= nm.xsb_norm(u, s + step, b) * (1 + 1e-13)


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 4]), st.sampled_from([2, 4, 8, np.inf]),
       st.sampled_from([1, 2, 3, np.inf]))
@settings(max_examples=30, deadline=None)
def test_holder_in_time(seed, p, p2, q):
    if p2 < p:
        p, p2 = p2, p
    u = st_field(seed)
    T = WINDOW.t_span
    factor = T ** (1 / p - (0 if np.isinf(p2) else 1 / p2))
    assert nm.mixed_norm(u, p, q) <= nm.mixed_norm(u, p2, q) * factor * (1 + 1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=30, deadline=None)
def test_duality(seed, s, b):
    u, v = st_field(seed), st_field(seed + 1)
    lhs = abs(nm.inner_product(u, v))
    assert lhs <= nm.xsb_norm(u, s, b) * nm.xsb_norm(v, -s, -b) * (1 + 1e-10)


class TestWeightParams:
    def test_quadrilinear_range(self):
        assert nm.WeightParams(-0.1, 0.55, -0.45).in_range
        assert nm.WeightParams(0, 0.55, -0.45).in_range
        bad = nm.WeightParams(-0.2, 0.55, -0.45).range_violations()
        assert any("0 >= s > -1/6" in m for m in bad)
        assert nm.WeightParams(-0.1, 0.5, -0.45).range_violations() == ["requires b > 1/2 (got b=0.5)"]
        assert nm.WeightParams(-0.1, 0.55, -0.40).range_violations()

    def test_extension_range(self):
        assert not nm.WeightParams(0.5, 0.55, -0.4).quadrilinear_violations()
        assert nm.WeightParams(0.5, 0.55, -0.3).quadrilinear_violations()
