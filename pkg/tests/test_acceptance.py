"""Acceptance criteria 1-12.

Each test prints one line ``CRITERION k: PASS|FAIL  <details>`` straight to
the terminal (also under ``pytest -v``) and then asserts.  Run the file as a
script to get only the twelve lines.
"""

import math
import time

import numpy as np
import pytest

from airykdv import spectral as sp
from airykdv.estimates import regions as rg
from airykdv.estimates.bilinear import verify_bilinear
from airykdv.estimates.quadrilinear import verify_quadrilinear
from airykdv.estimates.sampling import RandomFieldSpec, spacetime_window
from airykdv.estimates.strichartz import StrichartzCase, strichartz_window, verify_strichartz
from airykdv.experiments import (experiment_picard, experiment_rough_data_convergence,
                                 experiment_temporal_order, gaussian_bump, scaling_refinement)
from airykdv.norms import WeightParams, l2_norm
from airykdv.solver import (SolverConfig, critical_exponent, soliton_profile, soliton_residual,
                            solve)

pytestmark = pytest.mark.acceptance

LADDER = (128, 256, 512)
L16 = 2 * math.pi * 16


def drift(values):
    return (max(values) - min(values)) / min(values)


@pytest.fixture
def report(capsys):
    def emit(k, ok, details):
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'}  {details}")
        return ok
    return emit


def test_criterion_01_bilinear_identity(report):
    start = time.perf_counter()
    grid = sp.make_spatial_grid(256, L16)
    r = verify_bilinear(RandomFieldSpec(0.0, seed=1), grid, 100.0, 20, t_ladder=(25, 50, 100))
    res_mean, res_max = r.extras["identity_residual_mean"], r.extras["identity_residual_max"]
    elapsed = time.perf_counter() - start
    ok = res_max[-1] <= 0.05 and r.extras["residual_decreasing"] and elapsed <= 120
    assert report(1, ok, f"c = {r.extras['identity_constant']}, residual mean over T=25/50/100 "
                         f"{[f'{v:.2e}' for v in res_mean]}, max at T=100 {res_max[-1]:.2e}, "
                         f"{elapsed:.1f}s")


def test_criterion_02_cauchy_schwarz(report):
    grid = sp.make_spatial_grid(256, L16)
    r = verify_bilinear(RandomFieldSpec(0.0, seed=2), grid, 25.0, 200, t_ladder=(25,))
    prod, cross = np.array(r.extras["term_product"]), np.array(r.extras["term_cross"])
    fraction = float(np.mean(np.abs(cross) <= prod * (1 + 1e-12)))
    ok = fraction == 1.0 and len(prod) == 200
    assert report(2, ok, f"|term_cross| <= term_product for {fraction:.0%} of {len(prod)} samples, "
                         f"max |cross|/product {np.max(np.abs(cross) / prod):.3f}")


def test_criterion_03_uniform_bound(report):
    maxima = {}
    for n in LADDER:
        grid = sp.make_spatial_grid(n, L16)
        r = verify_bilinear(RandomFieldSpec(2.0, seed=3), grid, 100.0, 200, t_ladder=(100,))
        maxima[n] = r.max_ratio
    d = drift(list(maxima.values()))
    assert report(3, d < 0.10, f"sigma = 2, T = 100: max ratio {({n: round(v, 4) for n, v in maxima.items()})}, "
                               f"drift {d:.1%}")


def test_criterion_04_strichartz(report):
    spec = RandomFieldSpec(0.0, seed=4)
    series = {}
    for case in (StrichartzCase.L8(), StrichartzCase.kato(4), StrichartzCase.mixed(8)):
        vals = []
        for n in LADDER:
            grid = sp.make_spatial_grid(n, L16)
            r = verify_strichartz(case, spec, 0.55, grid, strichartz_window(grid, 0.25), 30)
            vals.append(r.max_ratio)
            if case.is_endpoint:
                assert r.extras["endpoint_split"]["triangle_holds"]
        series[f"{case.kind}({case.p:g},{case.q:g})"] = vals
    drifts = {k: drift(v) for k, v in series.items()}
    ok = all(np.all(np.isfinite(v)) for v in series.values()) and all(d < 0.15 for d in drifts.values())
    assert report(4, ok, "; ".join(f"{k}: {[round(x, 4) for x in v]} drift {drifts[k]:.1%}"
                                   for k, v in series.items()))


def test_criterion_05_region_b(report):
    start = time.perf_counter()
    scan = rg.scan_regions(20, -0.1)
    elapsed = time.perf_counter() - start
    fixture = 0.09114565534814956
    ok = (scan.counts["B"] > 0 and scan.b_failures == 0 and scan.b_min_margin > 0
          and scan.b_min_margin == pytest.approx(fixture, rel=1e-12) and elapsed <= 300)
    assert report(5, ok, f"{scan.counts['B']} B points, 0 uncertified = {scan.b_failures == 0}, "
                         f"min margin {scan.b_min_margin!r} at {scan.b_argmin}, {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_06_region_c(report):
    scan = rg.scan_regions(50, -0.1, check_b=False)
    c1, c2 = scan.c_min_ratio, scan.c_min_output_ratio
    _, anchor = rg.region_c_quantity((1e5,) * 4)
    literal = c2 >= c1  # cq >= c1 <xi>^3 at every C point
    ok = c1 > 0 and literal and abs(anchor - 15) < 1e-6
    assert report(6, ok, f"min cq/sum<xi_i>^3 = {c1:.6f} at {scan.c_argmin}; "
                         f"min cq/<xi>^3 = {c2:.6f} at {scan.c_output_argmin} "
                         f"({'>=' if literal else '<'} c1; c1/16 = {c1 / 16:.4f}); "
                         f"all-equal anchor {anchor:.6f}")


def test_criterion_07_quadrilinear(report):
    spec = RandomFieldSpec(0.0, seed=7)
    series = {}
    for params in (WeightParams(0.0, 0.55, -0.45), WeightParams(-0.1, 0.55, -0.45)):
        vals = []
        for n in (64, 128):
            grid = sp.make_spatial_grid(n, 2 * math.pi * 8)
            r = verify_quadrilinear(spec, params, grid, spacetime_window(grid, 1.0, 2), 100)
            vals.append(r.max_ratio)
        series[params.s] = vals
    with pytest.raises(ValueError) as info:
        verify_quadrilinear(spec, WeightParams(-0.2, 0.55, -0.45), sp.make_spatial_grid(8, 1.0),
                            sp.make_time_window(8, 1.0), 1)
    cites = "0 >= s > -1/6" in str(info.value)
    ok = cites and all(drift(v) < 0.20 for v in series.values())
    assert report(7, ok, "; ".join(f"s={s:g}: {[f'{x:.4g}' for x in v]} drift {drift(v):.1%}"
                                   for s, v in series.items())
                  + f"; s=-0.2 rejected: {str(info.value)!r}")


@pytest.mark.slow
def test_criterion_08_soliton(report):
    grid = sp.make_spatial_grid(512, 80.0)
    u0 = soliton_profile(1.0, 4, grid)
    trace = solve(SolverConfig(grid, 1e-4, 1.0, record_stride=1000), u0)
    exact = soliton_profile(1.0, 4, grid, x0=40.0 + 1.0)
    drift_l2 = trace.max_l2_drift()
    profile_err = l2_norm(trace.final - exact)
    residual = soliton_residual(1.0, 4, grid, "spectral")
    ok = drift_l2 <= 1e-10 and profile_err <= 1e-4 and residual <= 1e-8
    assert report(8, ok, f"L2 drift {drift_l2:.2e} (<= 1e-10), profile error {profile_err:.2e} (<= 1e-4), "
                         f"spectral residual {residual:.2e} (<= 1e-8); "
                         f"oversampled {soliton_residual(1.0, 4, grid, 'oversampled'):.1e}, "
                         f"analytic {soliton_residual(1.0, 4, grid, 'analytic'):.1e}")


def test_criterion_09_temporal_order(report):
    grid = sp.make_spatial_grid(128, 40.0)
    r = experiment_temporal_order(SolverConfig(grid, 1 / 640, 1.0), soliton_profile(1.0, 4, grid),
                                  halvings=1, reference_factor=8)
    ratio = r.results["ratios"][0]
    assert report(9, 14 <= ratio <= 18, f"soliton n=128 L=40 T=1, dt=1/640 vs 1/1280: "
                                        f"error ratio {ratio:.2f}")


def test_criterion_10_scaling(report):
    r = scaling_refinement([64, 96, 128, 192], 40.0, 1e-4, 0.05)
    d = r.results["discrepancies"]
    sc = critical_exponent(4)
    ok = d[-1] <= 1e-3 and r.checks["decreasing"] and sc == pytest.approx(-1 / 6)
    assert report(10, ok, f"lambda=2 discrepancy over n=64/96/128/192 {[f'{v:.2e}' for v in d]}; "
                          f"s_c = {sc:.6f}, amplitude exponent 2/(p-1) = {2 / 3:.6f}")


def test_criterion_11_picard(report):
    grid = sp.make_spatial_grid(128, 40.0)
    r = experiment_picard(SolverConfig(grid, 1e-3, 0.05), gaussian_bump(grid, 1e-3, 2.0))
    judged = r.results["judged_ratios"]
    ok = r.checks["contracting"] and r.results["relative_mismatch"] <= 1e-5
    assert report(11, ok, f"judged ratios {[f'{x:.1e}' for x in judged]}, "
                          f"differences {[f'{x:.1e}' for x in r.results['differences']]}, "
                          f"mismatch vs IFRK4 {r.results['relative_mismatch']:.1e}")


@pytest.mark.slow
def test_criterion_12_rough_data(report):
    grid = sp.make_spatial_grid(512, 2 * math.pi)
    spec = RandomFieldSpec(-0.1, seed=12, amplitude=0.3)
    r = experiment_rough_data_convergence(spec, grid, [32, 64, 128], 0.1, 2e-5)
    ok = r.checks["strictly_decreasing"] and r.checks["stable_under_dt_refinement"]
    assert report(12, ok, f"distances {[f'{x:.5f}' for x in r.results['distances']]}, "
                          f"dt/2 {[f'{x:.5f}' for x in r.results['distances_half_dt']]}, "
                          f"max relative change {max(r.results['relative_change']):.1e}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
