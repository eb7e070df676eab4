"""Norm functionals: L^2, mixed L^p_t L^q_x, Sobolev H^{s,q} and Bourgain X_{s,b}.

All norms include the quadrature weights ``dx = L/n`` and ``dt = T/n_t``.
``L^inf`` norms are grid suprema and therefore lower bounds for the true
supremum; pass ``oversample > 1`` to evaluate on a zero-padded (finer) grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    SpectralField,
    bessel_potential,
    inverse_transform,
    japanese,
    resample,
    riesz_potential,
)

__all__ = [
    "WeightParams",
    "WeightedDensity",
    "l2_norm",
    "quadrature_l2_norm",
    "lq_norm",
    "mixed_norm",
    "sobolev_norm",
    "xsb_norm",
    "xsb_weight",
    "inner_product",
    "to_weighted_density",
    "from_weighted_density",
]

S_RANGE = "0 >= s > -1/6"
BPRIME_RANGE = "-1/2 < b' < s - 1/3"
B_RANGE = "b > 1/2"


@dataclass(frozen=True)
class WeightParams:
    """Sobolev exponent ``s``, Bourgain exponent ``b`` and dual exponent ``b_prime``."""

    s: float
    b: float
    b_prime: float

    def range_violations(self) -> list[str]:
        """Failed parameter conditions of the quadrilinear estimate, as readable strings."""
        out = []
        if not (0 >= self.s > -1 / 6):
            out.append(f"requires {S_RANGE} (got s={self.s:g})")
        if not (-0.5 < self.b_prime < self.s - 1 / 3):
            out.append(f"requires {BPRIME_RANGE} (got b'={self.b_prime:g}, s-1/3={self.s - 1/3:g})")
        if not self.b > 0.5:
            out.append(f"requires {B_RANGE} (got b={self.b:g})")
        return out

    def extension_violations(self) -> list[str]:
        """Inequalities of the ``s >= 0`` extension that fail."""
        out = []
        if not self.s >= 0:
            out.append(f"requires s >= 0 (got s={self.s:g})")
        if not (-0.5 < self.b_prime < -1 / 3):
            out.append(f"requires -1/2 < b' < -1/3 (got b'={self.b_prime:g})")
        if not self.b > 0.5:
            out.append(f"requires {B_RANGE} (got b={self.b:g})")
        return out

    @property
    def in_range(self) -> bool:
        return not self.range_violations()

    def quadrilinear_violations(self) -> list[str]:
        """Empty when either the quadrilinear range or its ``s >= 0`` extension covers the triple."""
        if self.s > 0:
            return self.extension_violations()
        return self.range_violations()


def l2_norm(u: SpectralField) -> float:
    """L^2 norm over the (space or space-time) torus, computed from amplitudes."""
    return float(np.sqrt(u.volume * np.sum(np.abs(u.coefficients) ** 2)))


def quadrature_l2_norm(u: SpectralField) -> float:
    """Same norm by physical-space quadrature; agrees with :func:`l2_norm` by Parseval."""
    vals = inverse_transform(u)
    cell = u.volume / vals.size
    return float(np.sqrt(cell * np.sum(np.abs(vals) ** 2)))


def _lq(values: np.ndarray, q: float, dx: float, axis=-1) -> np.ndarray:
    a = np.abs(values)
    if np.isinf(q):
        return np.max(a, axis=axis)
    return (dx * np.sum(a**q, axis=axis)) ** (1.0 / q)


def _check_exponent(p):
    if not (np.isinf(p) or p >= 1):
        raise ValueError(f"Lebesgue exponents must be >= 1 or inf, got {p}")


def _physical(u: SpectralField, oversample: int) -> tuple[np.ndarray, float, float | None]:
    if oversample > 1:
        n_t = None if u.window is None else oversample * u.window.n_t
        u = resample(u, oversample * u.grid.n, n_t)
    vals = inverse_transform(u)
    return vals, u.grid.spacing, (u.window.dt if u.window else None)


def lq_norm(u: SpectralField, q: float, oversample: int = 1) -> float:
    """Spatial L^q norm of a spatial field."""
    _check_exponent(q)
    if u.is_spacetime:
        raise ValueError("lq_norm expects a spatial field; use mixed_norm")
    vals, dx, _ = _physical(u, oversample)
    return float(_lq(vals, q, dx))


def mixed_norm(u: SpectralField, p_t: float, q_x: float, oversample: int = 1) -> float:
    """``|| u ||_{L^p_t L^q_x}``: spatial L^q per time sample, then L^p in time."""
    _check_exponent(p_t)
    _check_exponent(q_x)
    if not u.is_spacetime:
        raise ValueError("mixed_norm expects a space-time field")
    vals, dx, dt = _physical(u, oversample)
    inner = _lq(vals, q_x, dx, axis=-1)
    return float(_lq(inner, p_t, dt, axis=0))


def sobolev_norm(u: SpectralField, s: float, q: float = 2.0, homogeneous: bool = False,
                 p_t: float | None = None, oversample: int = 1) -> float:
    """``H^{s,q}`` (Bessel) or ``Hdot^{s,q}`` (Riesz) norm.

    For a space-time field ``p_t`` selects the outer time exponent, giving
    ``L^p_t H^{s,q}_x``.
    """
    v = riesz_potential(u, s) if homogeneous else bessel_potential(u, s)
    if u.is_spacetime:
        return mixed_norm(v, 2.0 if p_t is None else p_t, q, oversample)
    return lq_norm(v, q, oversample)


def xsb_weight(u: SpectralField, s: float, b: float) -> np.ndarray:
    """``<tau - xi^3>^b <xi>^s`` on the space-time lattice of ``u``."""
    if not u.is_spacetime:
        raise ValueError("X_{s,b} needs a space-time field")
    xi = u.grid.frequencies
    tau = u.window.tau_frequencies
    mod = japanese(tau[:, None] - xi[None, :] ** 3)
    return mod**b * japanese(xi)[None, :] ** s


def xsb_norm(u: SpectralField, s: float, b: float) -> float:
    w = xsb_weight(u, s, b)
    return float(np.sqrt(u.volume * np.sum((w * np.abs(u.coefficients)) ** 2)))


def inner_product(u: SpectralField, v: SpectralField) -> complex:
    """``<u, v> = integral of u * conj(v)`` over the torus."""
    if u.grid != v.grid or u.window != v.window:
        raise ValueError("fields live on different grids")
    return complex(u.volume * np.vdot(v.coefficients, u.coefficients))


@dataclass(frozen=True, eq=False)
class WeightedDensity:
    """``f(xi, tau) = <tau - xi^3>^b <xi>^s * Fu(xi, tau)`` together with its exponents."""

    values: np.ndarray
    s: float
    b: float
    template: SpectralField

    def l2(self) -> float:
        return float(np.sqrt(self.template.volume * np.sum(np.abs(self.values) ** 2)))


def to_weighted_density(u: SpectralField, params: WeightParams | tuple) -> WeightedDensity:
    s, b = (params.s, params.b) if isinstance(params, WeightParams) else params
    return WeightedDensity(xsb_weight(u, s, b) * u.coefficients, s, b, u)


def from_weighted_density(f: WeightedDensity) -> SpectralField:
    return f.template.with_coefficients(f.values / xsb_weight(f.template, f.s, f.b))
