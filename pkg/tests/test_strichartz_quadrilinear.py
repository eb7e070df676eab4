from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airykdv import spectral as sp
from airykdv.estimates.quadrilinear import (HolderExponents, holder_exponents, quartic_product,
                                            verify_quadrilinear)
from airykdv.estimates.sampling import RandomFieldSpec, sample_spacetime_field, spacetime_window
from airykdv.estimates.strichartz import (StrichartzCase, strichartz_norm, strichartz_window,
                                          verify_strichartz)
from airykdv.norms import WeightParams, l2_norm, mixed_norm


class TestCases:
    def test_kato_family(self):
        c = StrichartzCase.kato(4)
        assert (c.s, c.q, c.is_endpoint) == (0.25, np.inf, True)
        c = StrichartzCase.kato(8)
        assert c.s == 0.125 and c.q == pytest.approx(4.0) and not c.is_endpoint
        c = StrichartzCase.kato(np.inf)
        assert (c.s, c.q) == (0.0, 2.0)

    def test_mixed_family(self):
        assert StrichartzCase.mixed(8).q == pytest.approx(8.0)
        assert StrichartzCase.mixed(12).q == pytest.approx(4.0)
        with pytest.raises(ValueError, match="1/q = 1/2 - 3/p"):
            StrichartzCase.mixed(6)

    def test_validation(self):
        with pytest.raises(ValueError, match="s = 1/p"):
            StrichartzCase("kato", 4.0, np.inf, 0.1)
        with pytest.raises(ValueError, match="s = 1/p"):
            StrichartzCase.kato(2)
        with pytest.raises(ValueError, match="1/q = 1/2 - 2/p"):
            StrichartzCase("kato", 8.0, 8.0, 0.125)
        with pytest.raises(ValueError, match="mixed"):
            StrichartzCase("mixed", 8.0, 4.0)
        with pytest.raises(ValueError):
            StrichartzCase("L4", 4.0, 8.0)
        with pytest.raises(ValueError, match="unknown"):
            StrichartzCase("bogus", 4.0, 4.0)

    def test_parse(self):
        assert StrichartzCase.parse("L8") == StrichartzCase.L8()
        assert StrichartzCase.parse("L4").min_b == pytest.approx(1 / 3)
        assert StrichartzCase.parse("kato:4").is_endpoint
        assert StrichartzCase.parse("kato:inf").s == 0.0
        assert StrichartzCase.parse("mixed:8").kind == "mixed"
        for bad in ("kato", "L6", "mixed:x"):
            with pytest.raises(ValueError):
                StrichartzCase.parse(bad)

    @given(st.floats(4.0, 1e6))
    @settings(max_examples=50, deadline=None)
    def test_kato_relation(self, p):
        c = StrichartzCase.kato(p)
        assert 1 / c.q == pytest.approx(0.5 - 2 / p, abs=1e-12)
        assert c.s == pytest.approx(1 / p)


class TestStrichartzHarness:
    grid = sp.make_spatial_grid(32, 2 * np.pi * 2)

    def test_window_rule(self):
        w = strichartz_window(self.grid, 0.5)
        assert np.max(np.abs(self.grid.frequencies)) ** 3 * w.dt <= np.pi / 4 + 1e-15

    def test_b_threshold(self):
        w = strichartz_window(self.grid, 0.1)
        with pytest.raises(ValueError, match="b > 0.5"):
            verify_strichartz(StrichartzCase.L8(), RandomFieldSpec(), 0.5, self.grid, w, 1)
        verify_strichartz(StrichartzCase.L4(), RandomFieldSpec(), 0.4, self.grid, w, 1)
        with pytest.raises(ValueError, match="mode"):
            verify_strichartz(StrichartzCase.L4(), RandomFieldSpec(), 0.6, self.grid, w, 1, mode="x")

    def test_free_ratio_matches_direct(self):
        w = strichartz_window(self.grid, 0.2)
        spec = RandomFieldSpec(0.0, seed=9)
        r = verify_strichartz(StrichartzCase.L8(), spec, 0.6, self.grid, w, 3)
        from airykdv.estimates.sampling import sample_field
        u0 = sample_field(spec, self.grid, 2)
        direct = mixed_norm(sp.free_solution(u0, w), 8, 8) / l2_norm(u0)
        assert r.ratios[2] == pytest.approx(direct, rel=1e-12)
        assert r.name == "strichartz_L8" and r.params["p"] == r.params["q"] == 8.0

    def test_endpoint_split(self):
        w = strichartz_window(self.grid, 0.2)
        r = verify_strichartz(StrichartzCase.kato(4), RandomFieldSpec(0.0, seed=1, mean_free=False),
                              0.6, self.grid, w, 4)
        split = r.extras["endpoint_split"]
        assert split["triangle_holds"]
        assert split["max_high_ratio"] > 0 and split["max_low_ratio"] > 0

    def test_xsb_mode(self):
        window = spacetime_window(self.grid, 0.5, 2)
        r = verify_strichartz(StrichartzCase.L4(), RandomFieldSpec(seed=2), 0.6, self.grid, window, 3,
                              mode="xsb", width=2)
        assert len(r.ratios) == 3 and all(np.isfinite(r.ratios))

    def test_single_mode_l8(self):
        # |S(t) e^{i xi x}| = |a| pointwise: ||.||_{L^8_{xt}} = |a| (L T)^{1/8}
        a = np.zeros(self.grid.n, complex)
        a[self.grid.zero_index + 3] = 2.0
        u0 = sp.SpectralField(self.grid, a)
        w = strichartz_window(self.grid, 0.3)
        value = strichartz_norm(StrichartzCase.L8(), sp.free_solution(u0, w))
        assert value == pytest.approx(2.0 * (self.grid.length * 0.3) ** 0.125, rel=1e-12)


def brute_conv2(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


class TestQuadrilinear:
    def test_holder_example(self):
        h = holder_exponents(WeightParams(-0.1, 0.55, -0.45))
        assert (h.q0, h.p, h.q, h.eps) == pytest.approx((20 / 19, 40 / 9, 20, 0.075), rel=1e-15)
        assert h.valid

    def test_boundary_not_valid(self):
        # at b' = s - 1/3 the embedding condition eps > 1/q turns into equality
        s = -0.05
        h = holder_exponents(WeightParams(s, 0.6, float(Fraction(-1, 20) - Fraction(1, 3))))
        assert h.eps == pytest.approx(1 / h.q, rel=1e-12)
        assert not h.valid

    def test_limit_q0(self):
        h = holder_exponents(WeightParams(0.0, 0.6, -0.5 + 1e-9))
        assert h.q0 == pytest.approx(1.0, abs=1e-8)

    @given(st.floats(-1 / 6 + 1e-6, 0.0), st.floats(0.01, 0.99))
    @settings(max_examples=60, deadline=None)
    def test_b_prime_recovery(self, s, frac):
        bp = -0.5 + frac * (s - 1 / 3 + 0.5)
        h = holder_exponents(WeightParams(s, 0.6, bp))
        for value in h.b_prime_from():
            assert value == pytest.approx(bp, abs=1e-14)
        assert h.valid

    def test_holder_range(self):
        with pytest.raises(ValueError, match="b'"):
            holder_exponents(WeightParams(0.0, 0.6, -0.6))
        assert isinstance(holder_exponents(WeightParams(0.1, 0.6, -0.4)), HolderExponents)

    def test_quartic_product_is_exact_convolution(self):
        grid = sp.make_spatial_grid(8, 2 * np.pi)
        window = sp.make_time_window(8, 1.0)
        rng = np.random.default_rng(0)
        fields = [sp.SpectralField(grid, rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)),
                                   window) for _ in range(4)]
        c = fields[0].coefficients
        for f in fields[1:]:
            c = brute_conv2(c, f.coefficients)
        got = quartic_product(fields).coefficients
        np.testing.assert_allclose(got[:c.shape[0], :c.shape[1]], c, atol=1e-11)
        assert np.max(np.abs(got[c.shape[0]:, :])) < 1e-11

    def test_rejects_out_of_range(self):
        grid = sp.make_spatial_grid(16, 2 * np.pi)
        window = spacetime_window(grid, 1.0, 1)
        with pytest.raises(ValueError, match="requires 0 >= s > -1/6"):
            verify_quadrilinear(RandomFieldSpec(), WeightParams(-0.2, 0.6, -0.45), grid, window, 1)
        with pytest.raises(ValueError, match="b > 1/2"):
            verify_quadrilinear(RandomFieldSpec(), WeightParams(0.0, 0.5, -0.45), grid, window, 1)

    def test_report(self):
        grid = sp.make_spatial_grid(8, 2 * np.pi)
        window = spacetime_window(grid, 1.0, 1)
        spec = RandomFieldSpec(0.0, seed=4)
        params = WeightParams(-0.1, 0.55, -0.45)
        r = verify_quadrilinear(spec, params, grid, window, 2, width=1)
        assert len(r.ratios) == 2
        assert r.extras["holder"]["valid"]
        us = [sample_spacetime_field(spec, grid, window, 0.55, 1, index=1, role=k) for k in range(4)]
        from airykdv.norms import xsb_norm
        num = xsb_norm(sp.spatial_derivative(quartic_product(us)), -0.1, -0.45)
        den = np.prod([xsb_norm(u, -0.1, 0.55) for u in us])
        assert r.ratios[1] == pytest.approx(num / den, rel=1e-12)

    def test_zero_fields_skipped(self):
        grid = sp.make_spatial_grid(8, 2 * np.pi)
        window = spacetime_window(grid, 1.0, 1)
        spec = RandomFieldSpec(0.0, seed=4, amplitude=0.0)
        r = verify_quadrilinear(spec, WeightParams(0.0, 0.6, -0.4), grid, window, 3, width=1)
        assert r.ratios == [] and r.skipped == 3
