"""Reproducible random fields with prescribed Sobolev regularity.

Random numbers come from numpy's Philox4x64 counter-based bit generator.
Every draw is keyed by ``(seed, sample_index, role)`` through a
``SeedSequence``, so a sample is a pure function of its key and serial,
threaded or reordered runs produce bit-identical fields.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..spectral import SpatialGrid, SpectralField, TimeWindow, japanese, make_time_window

# Envelope excess over the borderline decay; keeps H^sigma finite.
DEFAULT_DELTA = 0.25


@dataclass(frozen=True)
class RandomFieldSpec:
    """Complex Gaussian amplitudes shaped by ``<xi>^(-sigma - 1/2 - delta)``.

    On the torus the lattice spacing is ``2*pi/L``, so the H^sigma norm of a
    sample behaves like ``(L/2pi) * int <xi>^(-1 - 2 delta)`` and stays finite
    as ``n`` grows, while any H^r norm with ``r > sigma + delta`` diverges.
    """

    sigma: float = 0.0
    seed: int = 0
    delta: float = DEFAULT_DELTA
    mean_free: bool = True
    real: bool = False
    amplitude: float = 1.0

    def envelope(self, xi: np.ndarray) -> np.ndarray:
        return japanese(xi) ** (-self.sigma - 0.5 - self.delta)


def rng_for(seed: int, index: int = 0, role: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index), int(role)])
    return np.random.Generator(np.random.Philox(ss))


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex normals; real and imaginary parts drawn interleaved, so a
    longer draw extends a shorter one."""
    z = rng.standard_normal((*np.atleast_1d(shape), 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def _nested_positions(grid: SpatialGrid) -> np.ndarray:
    """Array positions of the modes in draw order ``0, 1, -1, 2, -2, ...``.

    Drawing in this order makes samples nested across resolutions: the same
    seed gives the same amplitudes on every mode two grids share, so a
    resolution sweep refines one field instead of drawing a new one.
    """
    k = grid.indices
    order = np.lexsort((k < 0, np.abs(k)))
    return order


def _symmetrize(a: np.ndarray, axes) -> np.ndarray:
    """Project onto conjugate-symmetric arrays (real physical samples); Nyquist rows dropped."""
    mirrored = a
    for axis in axes:
        m = a.shape[axis]
        mirrored = np.take(mirrored, (m - np.arange(m)) % m, axis=axis)
    out = 0.5 * (a + np.conj(mirrored))
    for axis in axes:
        idx = [slice(None)] * a.ndim
        idx[axis] = 0
        out[tuple(idx)] = 0
    return out


def sample_field(spec: RandomFieldSpec, grid: SpatialGrid, index: int = 0, role: int = 0) -> SpectralField:
    rng = rng_for(spec.seed, index, role)
    a = np.empty(grid.n, dtype=complex)
    a[_nested_positions(grid)] = _gaussian(rng, grid.n)
    a *= spec.envelope(grid.frequencies) * spec.amplitude
    if spec.mean_free:
        a[grid.zero_index] = 0
    if spec.real:
        a = _symmetrize(a, (0,))
    return SpectralField(grid, a, None, spec.real)


def spacetime_window(grid: SpatialGrid, t_span: float, width: int) -> TimeWindow:
    """Smallest time lattice holding every ``tau`` within ``width`` steps of ``xi^3``."""
    centres = np.rint(grid.frequencies**3 * t_span / (2 * np.pi)).astype(int)
    half = int(np.max(np.abs(centres))) + width + 1
    return make_time_window(2 * half, t_span)


def sample_spacetime_field(spec: RandomFieldSpec, grid: SpatialGrid, window: TimeWindow,
                           modulation_decay: float = 0.5, width: int = 4,
                           index: int = 0, role: int = 0) -> SpectralField:
    """Random space-time field concentrated near the cubic ``tau = xi^3``.

    For each spatial frequency the amplitudes occupy the ``2*width + 1`` tau
    lattice points closest to ``xi^3``, shaped additionally by
    ``<tau - xi^3>^(-modulation_decay - 1/2 - delta)``.
    """
    n_t = window.n_t
    centres = np.rint(grid.frequencies**3 * window.t_span / (2 * np.pi)).astype(int)
    if np.max(np.abs(centres)) + width >= n_t // 2:
        raise ValueError("time lattice too small for the cubic; use spacetime_window()")
    rng = rng_for(spec.seed, index, role)
    offsets = np.arange(-width, width + 1)
    g = np.empty((offsets.size, grid.n), dtype=complex)
    g[:, _nested_positions(grid)] = _gaussian(rng, (grid.n, offsets.size)).T
    rows = centres[None, :] + offsets[:, None] + n_t // 2
    tau = window.tau_frequencies[rows]
    weight = (japanese(tau - grid.frequencies[None, :] ** 3) ** (-modulation_decay - 0.5 - spec.delta)
              * spec.envelope(grid.frequencies)[None, :])
    a = np.zeros((n_t, grid.n), dtype=complex)
    cols = np.broadcast_to(np.arange(grid.n), rows.shape)
    a[rows, cols] = g * weight * spec.amplitude
    if spec.mean_free:
        a[:, grid.zero_index] = 0
    if spec.real:
        a = _symmetrize(a, (0, 1))
    return SpectralField(grid, a, window, spec.real)


def parallel_map(fn, items, threads: int = 1) -> list:
    """Order-preserving map; results never depend on ``threads``."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
