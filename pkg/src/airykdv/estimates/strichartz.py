"""Strichartz-type estimates for the Airy group in mixed-norm form.

Cases (all against ``X_{0,b}``):

* ``kato(p)``   -- ``L^p_t H^{s,q}_x`` with ``s = 1/p`` in ``[0, 1/4]``, ``1/q = 1/2 - 2/p``
* ``mixed(p)``  -- ``L^p_t L^q_x`` with ``0 < 1/q = 1/2 - 3/p <= 1/2``
* ``L8``        -- ``L^8_{xt}``, the diagonal member of ``mixed``
* ``L4``        -- ``L^4_{xt}``, valid already for ``b > 1/3``

In ``mode="free"`` the field is ``S(t)u0`` sampled on the window and the
ratio is taken against ``||u0||_{L^2}``; in ``mode="xsb"`` random space-time
fields are measured against ``X_{0,b}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..norms import l2_norm, mixed_norm, xsb_norm
from ..spectral import (
    SpatialGrid,
    SpectralField,
    TimeWindow,
    bessel_potential,
    free_solution,
    high_projection,
    low_projection,
    make_time_window,
    riesz_potential,
)
from .report import DENOMINATOR_FLOOR, EstimateReport
from .sampling import RandomFieldSpec, parallel_map, sample_field, sample_spacetime_field

__all__ = ["StrichartzCase", "strichartz_norm", "strichartz_window", "verify_strichartz"]

_TOL = 1e-12


def _inv(p: float) -> float:
    return 0.0 if np.isinf(p) else 1.0 / p


@dataclass(frozen=True)
class StrichartzCase:
    kind: str
    p: float
    q: float
    s: float = 0.0
    homogeneous: bool = False

    def __post_init__(self):
        ip, iq = _inv(self.p), _inv(self.q)
        if self.kind == "kato":
            if not (-_TOL <= ip <= 0.25 + _TOL and abs(self.s - ip) < _TOL):
                raise ValueError("kato case requires 0 <= s = 1/p <= 1/4")
            if abs(iq - (0.5 - 2 * ip)) > _TOL:
                raise ValueError("kato case requires 1/q = 1/2 - 2/p")
        elif self.kind in ("mixed", "L8"):
            if abs(iq - (0.5 - 3 * ip)) > _TOL or not (0 < iq <= 0.5 + _TOL):
                raise ValueError("mixed case requires 0 < 1/q = 1/2 - 3/p <= 1/2")
            if self.s != 0:
                raise ValueError("mixed case carries no derivative")
        elif self.kind == "L4":
            if (self.p, self.q, self.s) != (4, 4, 0):
                raise ValueError("L4 case is p = q = 4, s = 0")
        else:
            raise ValueError(f"unknown Strichartz case {self.kind!r}")

    @classmethod
    def kato(cls, p: float, homogeneous: bool = False) -> "StrichartzCase":
        ip = _inv(p)
        iq = 0.5 - 2 * ip
        q = np.inf if abs(iq) < _TOL else 1.0 / iq
        return cls("kato", float(p), float(q), ip, homogeneous)

    @classmethod
    def mixed(cls, p: float) -> "StrichartzCase":
        iq = 0.5 - 3 * _inv(p)
        if iq <= 0:
            raise ValueError("mixed case requires 0 < 1/q = 1/2 - 3/p <= 1/2")
        return cls("mixed", float(p), 1.0 / iq)

    @classmethod
    def L8(cls) -> "StrichartzCase":
        return cls("L8", 8.0, 8.0)

    @classmethod
    def L4(cls) -> "StrichartzCase":
        return cls("L4", 4.0, 4.0)

    @classmethod
    def parse(cls, text: str) -> "StrichartzCase":
        """``"L8"``, ``"L4"``, ``"kato:4"`` or ``"mixed:8"``."""
        name, _, arg = text.partition(":")
        if name in ("L8", "L4"):
            return getattr(cls, name)()
        if name in ("kato", "mixed") and arg:
            p = np.inf if arg in ("inf", "oo") else float(arg)
            return getattr(cls, name)(p)
        raise ValueError(f"cannot parse Strichartz case {text!r}")

    @property
    def min_b(self) -> float:
        return 1 / 3 if self.kind == "L4" else 0.5

    @property
    def is_endpoint(self) -> bool:
        return self.kind == "kato" and abs(self.s - 0.25) < _TOL

    def describe(self) -> dict:
        return {"kind": self.kind, "p": self.p, "q": self.q, "s": self.s,
                "homogeneous": self.homogeneous}


def strichartz_norm(case: StrichartzCase, u: SpectralField, oversample: int = 1) -> float:
    v = u
    if case.s:
        v = riesz_potential(u, case.s) if case.homogeneous else bessel_potential(u, case.s)
    return mixed_norm(v, case.p, case.q, oversample)


def strichartz_window(grid: SpatialGrid, t_span: float) -> TimeWindow:
    """Time lattice with ``max |xi|^3 dt <= pi/4``."""
    w = np.max(np.abs(grid.frequencies)) ** 3
    n_t = int(np.ceil(t_span * w / (np.pi / 4)))
    n_t += n_t % 2
    return make_time_window(max(n_t, 2), t_span)


def _endpoint_split(case: StrichartzCase, u: SpectralField, oversample: int) -> tuple[float, float]:
    """The high/low pieces ``||J^(1/4) P u||`` and ``||J^(1/4) p u||`` (cutoff 1)."""
    high = strichartz_norm(case, high_projection(u, 1.0), oversample)
    low = strichartz_norm(case, low_projection(u, 1.0), oversample)
    return high, low


def verify_strichartz(case: StrichartzCase, spec: RandomFieldSpec, b: float, grid: SpatialGrid,
                      window: TimeWindow, n_samples: int, mode: str = "free",
                      width: int = 4, oversample: int = 1, threads: int = 1) -> EstimateReport:
    if not b > case.min_b:
        raise ValueError(f"{case.kind} case requires b > {case.min_b:.4g} (got b={b:g})")
    if mode not in ("free", "xsb"):
        raise ValueError(f"unknown mode {mode!r}")

    def one(k):
        if mode == "free":
            u0 = sample_field(spec, grid, k)
            u = free_solution(u0, window)
            den = l2_norm(u0)
        else:
            u = sample_spacetime_field(spec, grid, window, b, width, index=k)
            den = xsb_norm(u, 0.0, b)
        num = strichartz_norm(case, u, oversample)
        split = _endpoint_split(case, u, oversample) if case.is_endpoint else None
        return num, den, split

    results = parallel_map(one, range(n_samples), threads)
    ratios, skipped, splits = [], 0, []
    for num, den, split in results:
        if den < DENOMINATOR_FLOOR:
            skipped += 1
            continue
        ratios.append(num / den)
        if split is not None:
            splits.append((num, split[0], split[1], den))
    extras = {"case": case.describe(), "mode": mode}
    if splits:
        arr = np.array(splits)
        extras["endpoint_split"] = {
            # triangle inequality for p + P = Id
            "triangle_holds": bool(np.all(arr[:, 0] <= (arr[:, 1] + arr[:, 2]) * (1 + 1e-12))),
            "max_high_ratio": float(np.max(arr[:, 1] / arr[:, 3])),
            "max_low_ratio": float(np.max(arr[:, 2] / arr[:, 3])),
        }
    ratios_max = max(ratios) if ratios else 0.0
    return EstimateReport(
        name=f"strichartz_{case.kind}",
        params={"b": b, "sigma": spec.sigma, "delta": spec.delta, **case.describe()},
        grid={"n": grid.n, "length": grid.length, "n_t": window.n_t, "t_span": window.t_span},
        seed=spec.seed,
        ratios=ratios,
        skipped=skipped,
        resolution_series={grid.n: ratios_max},
        extras=extras,
    )
