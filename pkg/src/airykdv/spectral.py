"""Periodic grids, Fourier transforms and Fourier-multiplier operators.

Conventions used throughout the package:

* The real line is modelled by a torus of circumference ``L``; the spatial
  frequency lattice is ``xi_k = 2*pi*k/L`` for ``k = -n/2, ..., n/2 - 1``.
* Coefficients are *Fourier-series amplitudes*, stored in ascending
  (centred) frequency order::

      u(x) = sum_k a_k exp(i xi_k x)

  so a single mode ``exp(i 3 x)`` on ``L = 2*pi`` has coefficient 1 at
  ``xi = 3``.  Amplitudes do not depend on ``n``, which makes zero-padding a
  pure embedding.  Parseval reads ``||u||_{L^2}^2 = L * sum |a_k|^2``.
* Space-time fields carry coefficient arrays of shape ``(n_t, n)`` with
  ``u(x, t) = sum a(tau, xi) exp(i (xi x + tau t))`` on ``[0, L) x [0, T)``,
  ``tau_m = 2*pi*m/T``.  Every operator below acts on the last (spatial)
  axis and therefore applies slice-wise to space-time fields as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

__all__ = [
    "SpatialGrid",
    "TimeWindow",
    "SpectralField",
    "make_spatial_grid",
    "make_time_window",
    "forward_transform",
    "inverse_transform",
    "bessel_potential",
    "riesz_potential",
    "airy_propagate",
    "spatial_derivative",
    "low_projection",
    "high_projection",
    "bilinear_riesz_minus",
    "resample",
    "japanese",
    "free_solution",
]


def japanese(x):
    """The bracket ``<x> = (1 + x^2)^(1/2)``."""
    return np.sqrt(1.0 + np.square(x))


@dataclass(frozen=True)
class SpatialGrid:
    n: int
    length: float

    @cached_property
    def indices(self) -> np.ndarray:
        return np.arange(-(self.n // 2), self.n // 2)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Lattice frequencies in ascending order, ``-n/2`` first."""
        return 2.0 * np.pi * self.indices / self.length

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.length

    @cached_property
    def points(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    @property
    def zero_index(self) -> int:
        return self.n // 2


@dataclass(frozen=True)
class TimeWindow:
    n_t: int
    t_span: float

    @cached_property
    def times(self) -> np.ndarray:
        return np.arange(self.n_t) * self.dt

    @property
    def dt(self) -> float:
        return self.t_span / self.n_t

    @cached_property
    def tau_frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(-(self.n_t // 2), self.n_t // 2) / self.t_span


def make_spatial_grid(n: int, length: float) -> SpatialGrid:
    if int(n) != n or n < 8 or n % 2:
        raise ValueError(f"mode count must be an even integer >= 8, got {n}")
    if not length > 0:
        raise ValueError(f"torus length must be positive, got {length}")
    return SpatialGrid(int(n), float(length))


def make_time_window(n_t: int, t_span: float) -> TimeWindow:
    if int(n_t) != n_t or n_t < 2 or n_t % 2:
        raise ValueError(f"time sample count must be an even positive integer, got {n_t}")
    if not t_span > 0:
        raise ValueError(f"window length must be positive, got {t_span}")
    return TimeWindow(int(n_t), float(t_span))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier amplitudes of a function on a spatial or space-time torus.

    ``coefficients`` has shape ``(n,)`` for a spatial field and ``(n_t, n)``
    when ``window`` is set.  ``real`` flags fields whose physical samples are
    real; it is bookkeeping only and is checked by
    :meth:`is_conjugate_symmetric`.
    """

    grid: SpatialGrid
    coefficients: np.ndarray
    window: TimeWindow | None = None
    real: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        expected = (self.grid.n,) if self.window is None else (self.window.n_t, self.grid.n)
        if self.coefficients.shape != expected:
            raise ValueError(
                f"coefficient shape {self.coefficients.shape} does not match grid {expected}"
            )

    @property
    def is_spacetime(self) -> bool:
        return self.window is not None

    @property
    def shape(self):
        return self.coefficients.shape

    @property
    def volume(self) -> float:
        """Measure of the torus the field lives on (``L`` or ``L*T``)."""
        if self.window is None:
            return self.grid.length
        return self.grid.length * self.window.t_span

    def with_coefficients(self, coefficients, real=None) -> "SpectralField":
        return replace(
            self,
            coefficients=np.asarray(coefficients, dtype=complex),
            real=self.real if real is None else real,
            meta={},
        )

    def is_conjugate_symmetric(self, rtol: float = 1e-12) -> bool:
        """Check ``a(-xi) = conj(a(xi))`` (and likewise in tau).

        The unpaired Nyquist rows/columns are compared with themselves, which
        amounts to requiring a real Nyquist coefficient.
        """
        a = self.coefficients
        mirrored = a
        for axis in range(a.ndim):
            # centred index j <-> -k maps to (n - j) mod n
            m = a.shape[axis]
            idx = (m - np.arange(m)) % m
            mirrored = np.take(mirrored, idx, axis=axis)
        scale = max(np.max(np.abs(a)), np.finfo(float).tiny)
        return bool(np.max(np.abs(a - np.conj(mirrored))) <= rtol * scale)

    def samples(self) -> np.ndarray:
        return inverse_transform(self)

    def __add__(self, other):
        _check_same(self, other)
        return self.with_coefficients(self.coefficients + other.coefficients,
                                      real=self.real and other.real)

    def __sub__(self, other):
        _check_same(self, other)
        return self.with_coefficients(self.coefficients - other.coefficients,
                                      real=self.real and other.real)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return self.with_coefficients(self.coefficients * scalar,
                                      real=self.real and scalar.imag == 0)

    __rmul__ = __mul__


def _check_same(f: SpectralField, g: SpectralField):
    if f.grid != g.grid or f.window != g.window:
        raise ValueError("fields live on different grids")


# -- transforms ---------------------------------------------------------------

def forward_transform(samples, grid: SpatialGrid, window: TimeWindow | None = None,
                      real: bool | None = None) -> SpectralField:
    """Physical samples -> amplitudes.

    Samples are taken at ``x_j = j*L/n`` (and ``t_m = m*T/n_t``), with time on
    axis 0 for space-time data.
    """
    samples = np.asarray(samples)
    expected = (grid.n,) if window is None else (window.n_t, grid.n)
    if samples.shape != expected:
        raise ValueError(f"sample shape {samples.shape} does not match grid {expected}")
    if real is None:
        real = bool(np.isrealobj(samples))
    coeffs = np.fft.fftshift(np.fft.fftn(samples)) / samples.size
    return SpectralField(grid, coeffs, window, real)


def inverse_transform(field: SpectralField) -> np.ndarray:
    a = field.coefficients
    out = np.fft.ifftn(np.fft.ifftshift(a)) * a.size
    return out.real if field.real else out


def spatial_samples(field: SpectralField) -> np.ndarray:
    """Inverse transform along x only (mixed representation for space-time fields)."""
    a = field.coefficients
    out = np.fft.ifft(np.fft.ifftshift(a, axes=-1), axis=-1) * a.shape[-1]
    return out


# -- diagonal multipliers -----------------------------------------------------

def _multiply(u: SpectralField, symbol, real=None) -> SpectralField:
    return u.with_coefficients(u.coefficients * symbol, real=real)


def bessel_potential(u: SpectralField, s: float) -> SpectralField:
    """``J^s``: multiply by ``<xi>^s``."""
    return _multiply(u, japanese(u.grid.frequencies) ** s)


def _mean_norm(u: SpectralField) -> tuple[float, float]:
    a = u.coefficients
    return float(np.linalg.norm(a[..., u.grid.zero_index])), float(np.linalg.norm(a))


def riesz_potential(u: SpectralField, s: float) -> SpectralField:
    """``I^s``: multiply by ``|xi|^s``; the ``xi = 0`` mode is sent to 0.

    Negative orders are singular at the origin and require a mean-free input.
    """
    xi = np.abs(u.grid.frequencies)
    if s < 0:
        mean, total = _mean_norm(u)
        if mean > 1e-12 * max(total, 1e-300):
            raise ValueError("riesz_potential with s < 0 needs a mean-free field")
    symbol = np.zeros_like(xi)
    nz = xi > 0
    symbol[nz] = xi[nz] ** s
    if s == 0:
        symbol[~nz] = 1.0
    return _multiply(u, symbol)


def airy_propagate(u0: SpectralField, t: float) -> SpectralField:
    """Free Airy flow ``S(t) = exp(-t d^3)``: multiply by ``exp(i xi^3 t)``."""
    if u0.is_spacetime:
        raise ValueError("airy_propagate acts on spatial fields")
    xi = u0.grid.frequencies
    return _multiply(u0, np.exp(1j * xi**3 * t))


def spatial_derivative(u: SpectralField) -> SpectralField:
    return _multiply(u, 1j * u.grid.frequencies)


def low_projection(u: SpectralField, cutoff: float = 1.0) -> SpectralField:
    """Keep ``|xi| <= cutoff``."""
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")
    return _multiply(u, (np.abs(u.grid.frequencies) <= cutoff).astype(float))


def high_projection(u: SpectralField, cutoff: float = 1.0) -> SpectralField:
    """Identity minus :func:`low_projection`."""
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")
    return _multiply(u, (np.abs(u.grid.frequencies) > cutoff).astype(float))


# -- resampling ----------------------------------------------------------------

def _resize_axis(a: np.ndarray, m: int, axis: int) -> np.ndarray:
    """Centred zero-pad / truncate of one axis to length ``m``."""
    n = a.shape[axis]
    if m == n:
        return a
    a = np.moveaxis(a, axis, -1)
    out = np.zeros(a.shape[:-1] + (m,), dtype=complex)
    if m > n:
        out[..., m // 2 - n // 2: m // 2 - n // 2 + n] = a
    else:
        out[...] = a[..., n // 2 - m // 2: n // 2 - m // 2 + m]
    return np.moveaxis(out, -1, axis)


def resample(u: SpectralField, n: int | None = None, n_t: int | None = None) -> SpectralField:
    """Embed into (or restrict to) a lattice with ``n`` spatial / ``n_t`` temporal modes.

    Truncation keeps the centred band; it is a projection, not an interpolation.
    """
    n = u.grid.n if n is None else n
    a = _resize_axis(u.coefficients, n, -1)
    grid = make_spatial_grid(n, u.grid.length) if n != u.grid.n else u.grid
    window = u.window
    if n_t is not None:
        if window is None:
            raise ValueError("n_t given for a spatial field")
        a = _resize_axis(a, n_t, 0)
        window = make_time_window(n_t, window.t_span)
    return SpectralField(grid, a, window, u.real)


# -- bilinear operator ----------------------------------------------------------

def _difference_convolution(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Lattice sum ``out[k1 + k2] += w[k1 - k2] a[k1] b[k2]`` along the last axis.

    ``a`` and ``b`` are centred length-``n`` arrays; the result is the centred
    length-``2n`` array of the exact (alias-free) sum.  ``weights`` is indexed
    by ``k1 - k2 + n - 1``.
    """
    n = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (2 * n,), dtype=complex)
    for d in range(-(n - 1), n):
        w = weights[d + n - 1]
        if w == 0:
            continue
        j0, j1 = max(0, -d), min(n, n - d)
        out[..., 2 * j0 + d: 2 * (j1 - 1) + d + 1: 2] += w * (a[..., j0 + d: j1 + d] * b[..., j0:j1])
    return out


def bilinear_riesz_minus(f: SpectralField, g: SpectralField, s: float,
                         out_n: int | None = None) -> SpectralField:
    """``I_-^s(f, g)``: the lattice convolution with weight ``|xi1 - xi2|^s``.

    The exact sum lives on the ``2n`` lattice, which is the default output
    size; a smaller ``out_n`` restricts to the centred band.  Space-time
    inputs are multiplied pointwise in time, so the time lattice is doubled
    as well to keep the product alias-free.
    """
    _check_same(f, g)
    if s < 0:
        raise ValueError("negative order is singular on the diagonal xi1 = xi2")
    n = f.grid.n
    d = np.abs(np.arange(-(n - 1), n)) * f.grid.dxi
    weights = d**s if s > 0 else np.ones_like(d)
    big = make_spatial_grid(2 * n, f.grid.length)
    if f.window is None:
        out = _difference_convolution(f.coefficients, g.coefficients, weights)
        window = None
    else:
        n_t = f.window.n_t
        window = make_time_window(2 * n_t, f.window.t_span)
        ft = _time_samples(_resize_axis(f.coefficients, 2 * n_t, 0))
        gt = _time_samples(_resize_axis(g.coefficients, 2 * n_t, 0))
        prod = _difference_convolution(ft, gt, weights)
        out = np.fft.fftshift(np.fft.fft(prod, axis=0), axes=0) / (2 * n_t)
    result = SpectralField(big, out, window, f.real and g.real)
    if out_n is not None and out_n != 2 * n:
        result = resample(result, out_n)
    return result


def _time_samples(a: np.ndarray) -> np.ndarray:
    """Inverse transform along the time axis only."""
    return np.fft.ifft(np.fft.ifftshift(a, axes=0), axis=0) * a.shape[0]


# -- free solutions -------------------------------------------------------------

def free_solution(u0: SpectralField, window: TimeWindow) -> SpectralField:
    """``S(t) u0`` sampled on the window, returned as a space-time field.

    The result is the exact space-time DFT of the samples, so it carries the
    tau-lattice leakage of the non-periodic phases ``exp(i xi^3 t)``.
    """
    phases = np.exp(1j * np.outer(window.times, u0.grid.frequencies**3))
    mixed = phases * u0.coefficients[None, :]
    coeffs = np.fft.fftshift(np.fft.fft(mixed, axis=0), axes=0) / window.n_t
    return SpectralField(u0.grid, coeffs, window, u0.real)
