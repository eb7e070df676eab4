"""Solver experiments: conservation, temporal order, scaling, Picard, rough data.

Each experiment returns an :class:`ExperimentReport` holding scalar results,
boolean checks and a row series suitable for CSV output and plotting.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .estimates.report import _jsonable
from .estimates.sampling import RandomFieldSpec, parallel_map, sample_field
from .norms import l2_norm, sobolev_norm, xsb_norm
from .solver import (
    SolverConfig,
    critical_exponent,
    mollify,
    picard_iterate,
    scaling_transform,
    solve,
)
from .spectral import (
    SpatialGrid,
    SpectralField,
    forward_transform,
    make_spatial_grid,
    make_time_window,
)

__all__ = [
    "ExperimentReport",
    "experiment_l2_conservation",
    "experiment_picard",
    "experiment_rough_data_convergence",
    "experiment_scaling_symmetry",
    "experiment_temporal_order",
    "gaussian_bump",
    "scaling_refinement",
]


@dataclass
class ExperimentReport:
    name: str
    params: dict
    results: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    series: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return _jsonable({"schema_version": 1, "name": self.name, "params": self.params,
                          "results": self.results, "checks": self.checks, "passed": self.passed,
                          "series": self.series})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def series_csv(self) -> str:
        buf = io.StringIO()
        if self.series:
            keys = list(self.series[0])
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(keys)
            for row in self.series:
                w.writerow([repr(float(row[k])) if isinstance(row[k], (float, np.floating))
                            else row[k] for k in keys])
        return buf.getvalue()

    def write(self, directory, stem: str | None = None) -> dict:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        paths = {"json": directory / f"{stem}.json", "csv": directory / f"{stem}_series.csv"}
        paths["json"].write_text(self.to_json() + "\n")
        paths["csv"].write_text(self.series_csv())
        return paths


def gaussian_bump(grid: SpatialGrid, amplitude: float = 1.0, width: float = 2.0,
                  band: float | None = None) -> SpectralField:
    """``amplitude * exp(-(x - L/2)^2 / width^2)``, optionally truncated to ``|xi| <= band``."""
    x = grid.points - grid.length / 2
    u = forward_transform(amplitude * np.exp(-(x**2) / width**2), grid, real=True)
    return mollify(u, band) if band is not None else u


# -- conservation --------------------------------------------------------------------

def experiment_l2_conservation(config: SolverConfig, u0: SpectralField,
                               tolerance: float = 1e-10) -> ExperimentReport:
    trace = solve(config, u0)
    drift = trace.max_l2_drift()
    series = [{"t": float(t), "l2": float(v), "mass": float(m)}
              for t, v, m in zip(trace.times, trace.l2, trace.mass)]
    return ExperimentReport(
        "l2_conservation", config.describe(),
        {"max_l2_drift": drift, "max_mass_drift": trace.max_mass_drift(),
         "initial_l2": float(trace.l2[0])},
        {"l2_drift_within_tolerance": drift <= tolerance},
        series,
    )


# -- temporal order --------------------------------------------------------------------

def experiment_temporal_order(config: SolverConfig, u0: SpectralField, halvings: int = 1,
                              reference_factor: int = 8,
                              window: tuple[float, float] = (14.0, 18.0)) -> ExperimentReport:
    """Errors at ``dt, dt/2, ...`` against a run with ``dt / (2^halvings * reference_factor)``."""
    base = config.with_(record_stride=10**9)
    finest = config.dt / (2**halvings * reference_factor)
    ref = solve(base.with_(dt=finest), u0).final
    series = []
    for h in range(halvings + 1):
        dt = config.dt / 2**h
        err = l2_norm(solve(base.with_(dt=dt), u0).final - ref)
        series.append({"dt": dt, "error": err})
    ratios = [a["error"] / b["error"] for a, b in zip(series, series[1:])]
    return ExperimentReport(
        "temporal_order", {**config.describe(), "reference_dt": finest},
        {"ratios": ratios, "observed_order": [float(np.log2(r)) for r in ratios]},
        {"ratio_in_window": all(window[0] <= r <= window[1] for r in ratios)},
        series,
    )


# -- scaling ------------------------------------------------------------------------

def _scaling_discrepancy(a_big: np.ndarray, b: np.ndarray, k: int, amp: float) -> float:
    """Compare ``lam``-transformed run A (full band) with run B (same grid, sublattice ``k Z``)."""
    n = a_big.size
    idx = np.arange(-(n // 2), n // 2)
    target = amp * a_big
    embedded = np.zeros_like(b)
    # B's mode k*j carries A's mode j; modes of A whose image leaves the band are missed by B
    inside = np.abs(idx * k) < n // 2
    embedded[inside] = b[idx[inside] * k + n // 2]
    off_lattice = np.linalg.norm(np.delete(b, idx[inside] * k + n // 2))
    diff = np.sqrt(np.linalg.norm(embedded - target) ** 2 + off_lattice**2)
    return float(diff / np.linalg.norm(target)) if np.linalg.norm(target) > 0 else float(diff)


def experiment_scaling_symmetry(config: SolverConfig, u0: SpectralField, lam: float = 2.0,
                                tolerance: float = 1e-3) -> ExperimentReport:
    """Run A: ``u0`` to ``lam^3 t`` with step ``lam^3 dt``.  Run B: ``u_lam`` to ``t`` with ``dt``.

    Both runs share the grid; ``u_lam`` occupies the sublattice ``lam Z`` so
    B resolves only ``1/lam`` of A's band.  Their discrepancy is therefore a
    resolution effect and shrinks as ``n`` grows.  The scale-invariant
    ``H-dot^{s_c}`` norm is checked with the exact torus-rescaling form.
    """
    p = config.p
    k = int(round(lam))
    u_lam = scaling_transform(u0, lam, p, mode="lattice")
    run_a = config.with_(dt=config.dt * lam**3, t_end=config.t_end * lam**3, record_stride=10**9)
    run_b = config.with_(record_stride=10**9)
    a_final = solve(run_a, u0).final
    b_final = solve(run_b, u_lam).final
    amp = lam ** (2 / (p - 1))
    disc = _scaling_discrepancy(a_final.coefficients, b_final.coefficients, k, amp)

    s_c = critical_exponent(p)
    # H-dot^{s_c} with s_c < 0 needs the mean-free part
    zero_mean = u0.with_coefficients(np.where(np.arange(u0.grid.n) == u0.grid.zero_index,
                                              0, u0.coefficients))
    rescaled = scaling_transform(zero_mean, lam, p, mode="rescale")
    hs_ratio = (sobolev_norm(rescaled, s_c, homogeneous=True)
                / sobolev_norm(zero_mean, s_c, homogeneous=True))
    return ExperimentReport(
        "scaling_symmetry", {**config.describe(), "lambda": lam},
        {"discrepancy": disc, "s_c": s_c, "amplitude_exponent": 2 / (p - 1),
         "hdot_sc_ratio": hs_ratio},
        {"discrepancy_within_tolerance": disc <= tolerance,
         "hdot_sc_invariant": abs(hs_ratio - 1) <= 1e-12},
    )


def scaling_refinement(ns, length: float, dt: float, t_end: float, lam: float = 2.0, p: int = 4,
                       amplitude: float = 1.0, width: float = 2.0, linear_only: bool = False,
                       threads: int = 1) -> ExperimentReport:
    """Scaling discrepancy along a resolution ladder with band-limited Gaussian data."""

    def one(n):
        grid = make_spatial_grid(n, length)
        band = np.pi * n / length / lam * (1 - 1e-9)
        u0 = gaussian_bump(grid, amplitude, width, band)
        cfg = SolverConfig(grid, dt, t_end, p, linear_only=linear_only)
        return experiment_scaling_symmetry(cfg, u0, lam).results["discrepancy"]

    ns = list(ns)
    discs = parallel_map(one, ns, threads)
    series = [{"n": n, "discrepancy": d} for n, d in zip(ns, discs)]
    return ExperimentReport(
        "scaling_refinement",
        {"ns": ns, "length": length, "dt": dt, "t_end": t_end, "lambda": lam, "p": p,
         "amplitude": amplitude, "width": width, "linear_only": linear_only},
        {"discrepancies": discs, "s_c": critical_exponent(p)},
        {"decreasing": all(b < a for a, b in zip(discs, discs[1:]))},
        series,
    )


# -- Picard -------------------------------------------------------------------------

def experiment_picard(config: SolverConfig, u0: SpectralField, n_iter: int = 6,
                      norm: tuple[float, float] = (0.0, 0.0), contraction: float = 0.5,
                      tolerance: float = 1e-5) -> ExperimentReport:
    """Picard iterates vs the IFRK4 solution at ``t_end``."""
    result = picard_iterate(u0, config, n_iter, norm)
    reference = solve(config.with_(record_stride=10**9), u0).final
    fixed = result.at(len(result.iterates) - 1)
    scale = max(l2_norm(reference), 1e-300)
    mismatch = l2_norm(fixed - reference) / scale
    ratios = result.contraction_ratios()
    # a ratio d[i+1]/d[i] is meaningful only while d[i] sits above rounding of the iterates
    floor = 1e-13 * xsb_norm(_window_field(result, 0), *norm)
    judged = [r for i, r in enumerate(ratios) if result.differences[i] > floor]
    series = [{"iteration": i + 2, "difference": d} for i, d in enumerate(result.differences)]
    return ExperimentReport(
        "picard", {**config.describe(), "n_iter": n_iter, "norm_s": norm[0], "norm_b": norm[1]},
        {"differences": result.differences, "ratios": ratios, "judged_ratios": judged,
         "rounding_floor": floor, "relative_mismatch": mismatch, "diverged": result.diverged},
        {"contracting": bool(judged) and max(judged) < contraction and not result.diverged,
         "matches_ifrk4": mismatch <= tolerance},
        series,
    )


def _window_field(result, k: int) -> SpectralField:
    a = result.iterates[k][:-1]
    n_t = a.shape[0]
    window = make_time_window(n_t, result.times[-1])
    st = np.fft.fftshift(np.fft.fft(a, axis=0), axes=0) / n_t
    return SpectralField(result.grid, st, window)


# -- rough data ---------------------------------------------------------------------

def _ladder_distances(u0, grid, cutoffs, dt, t_end, p, s, threads):
    cfg = SolverConfig(grid, dt, t_end, p, record_stride=10**9)
    finals = parallel_map(lambda K: solve(cfg, mollify(u0, K)).final, cutoffs, threads)
    return [sobolev_norm(b - a, s) for a, b in zip(finals, finals[1:])]


def experiment_rough_data_convergence(spec: RandomFieldSpec, grid: SpatialGrid, cutoffs,
                                      t_end: float, dt: float, p: int = 4,
                                      measure_s: float | None = None, refine: bool = True,
                                      digits: float = 1e-3, threads: int = 1) -> ExperimentReport:
    """Distances ``||u_K(t) - u_K'(t)||_{H^s}`` between solutions from successively mollified data.

    Data are one real random field of regularity ``spec.sigma``; with
    ``refine`` the ladder is repeated at ``dt/2`` and the relative change of
    every distance must stay below ``digits``.
    """
    cutoffs = sorted(cutoffs)
    s = spec.sigma if measure_s is None else measure_s
    u0 = sample_field(RandomFieldSpec(spec.sigma, spec.seed, spec.delta, spec.mean_free, True,
                                      spec.amplitude), grid)
    dist = _ladder_distances(u0, grid, cutoffs, dt, t_end, p, s, threads)
    results = {"distances": dist, "data_norm": sobolev_norm(u0, s)}
    checks = {"strictly_decreasing": all(b < a for a, b in zip(dist, dist[1:]))}
    series = [{"cutoff_low": a, "cutoff_high": b, "distance": d}
              for a, b, d in zip(cutoffs, cutoffs[1:], dist)]
    if refine:
        fine = _ladder_distances(u0, grid, cutoffs, dt / 2, t_end, p, s, threads)
        change = [abs(f - d) / d for f, d in zip(fine, dist)]
        results.update(distances_half_dt=fine, relative_change=change)
        checks["stable_under_dt_refinement"] = max(change) <= digits
        for row, f in zip(series, fine):
            row["distance_half_dt"] = f
    return ExperimentReport(
        "rough_data_convergence",
        {"sigma": spec.sigma, "seed": spec.seed, "delta": spec.delta, "amplitude": spec.amplitude,
         "n": grid.n, "length": grid.length, "cutoffs": cutoffs, "t_end": t_end, "dt": dt,
         "p": p, "measure_s": s},
        results, checks, series,
    )
