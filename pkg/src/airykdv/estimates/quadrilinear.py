"""The quartic estimate ``|| d_x prod u_i ||_{X_{s,b'}} <= c prod ||u_i||_{X_{s,b}}``.

The product is formed in physical space on a lattice padded four-fold in
both ``x`` and ``t``, which holds every frequency sum of four inputs, so the
left-hand side carries no aliasing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..norms import WeightParams, xsb_norm
from ..spectral import (
    SpatialGrid,
    SpectralField,
    TimeWindow,
    forward_transform,
    inverse_transform,
    resample,
    spatial_derivative,
)
from .report import EstimateReport, collect_ratios
from .sampling import RandomFieldSpec, parallel_map, sample_spacetime_field

__all__ = ["HolderExponents", "holder_exponents", "quartic_product", "verify_quadrilinear"]


_VALID_TOL = 1e-12


@dataclass(frozen=True)
class HolderExponents:
    """``1/q0 = 1/2 - b'``, ``2/p = -b'``, ``1/q = 1/2 + b'``, ``eps = 1/p + 3s/2``."""

    q0: float
    p: float
    q: float
    eps: float

    @property
    def valid(self) -> bool:
        """``eps > 1/q``, i.e. ``H^{eps,q}`` embeds in ``L^inf``.

        The comparison is strict beyond rounding: the boundary ``b' = s - 1/3``
        (where the two sides agree exactly) is reported invalid.
        """
        return self.eps > 1 / self.q + _VALID_TOL

    def b_prime_from(self) -> tuple[float, float, float]:
        """``b'`` recovered independently from ``q0``, ``p`` and ``q``."""
        return 0.5 - 1 / self.q0, -2 / self.p, 1 / self.q - 0.5


def holder_exponents(params: WeightParams) -> HolderExponents:
    s, bp = params.s, params.b_prime
    if not -0.5 < bp < 0:
        raise ValueError(f"requires -1/2 < b' < 0 (got b'={bp:g})")
    # exact rational arithmetic where the inputs are short decimals
    fs, fb = Fraction(repr(float(s))), Fraction(repr(float(bp)))
    inv_p = -fb / 2
    eps = inv_p + Fraction(3, 2) * fs
    return HolderExponents(float(1 / (Fraction(1, 2) - fb)), float(1 / inv_p),
                           float(1 / (Fraction(1, 2) + fb)), float(eps))


def quartic_product(fields) -> SpectralField:
    """Alias-free product of four space-time fields on the ``(4 n_t, 4 n)`` lattice."""
    big = [resample(u, 4 * u.grid.n, 4 * u.window.n_t) for u in fields]
    prod = np.prod([inverse_transform(u) for u in big], axis=0)
    return forward_transform(prod, big[0].grid, big[0].window)


def verify_quadrilinear(spec: RandomFieldSpec, params: WeightParams, grid: SpatialGrid,
                        window: TimeWindow, n_samples: int, width: int = 2,
                        threads: int = 1) -> EstimateReport:
    problems = params.quadrilinear_violations()
    if problems:
        raise ValueError("; ".join(problems))
    s, b, bp = params.s, params.b, params.b_prime

    def one(k):
        us = [sample_spacetime_field(spec, grid, window, b, width, index=k, role=r) for r in range(4)]
        den = float(np.prod([xsb_norm(u, s, b) for u in us]))
        if den == 0.0:
            return 0.0, 0.0
        return xsb_norm(spatial_derivative(quartic_product(us)), s, bp), den

    nums, dens = zip(*parallel_map(one, range(n_samples), threads)) if n_samples else ((), ())
    ratios, skipped = collect_ratios(nums, dens)
    return EstimateReport(
        name="quadrilinear",
        params={"s": s, "b": b, "b_prime": bp, "sigma": spec.sigma, "delta": spec.delta,
                "width": width},
        grid={"n": grid.n, "length": grid.length, "n_t": window.n_t, "t_span": window.t_span},
        seed=spec.seed,
        ratios=ratios,
        skipped=skipped,
        resolution_series={grid.n: max(ratios) if ratios else 0.0},
        extras=_holder_extras(params),
    )


def _holder_extras(params: WeightParams) -> dict:
    if not -0.5 < params.b_prime < 0:
        return {}
    h = holder_exponents(params)
    return {"holder": {"q0": h.q0, "p": h.p, "q": h.q, "eps": h.eps, "valid": h.valid}}
