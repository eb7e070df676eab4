"""Pointwise frequency-region checks for the quartic estimate.

A frequency 4-vector ``(xi_1, ..., xi_4)`` with output ``xi = sum xi_i`` falls
into exactly one region:

A
    ``max |xi_i| <= cutoff``.
B
    not A, and either ``min |xi_i| <= theta * max |xi_i|`` (tag ``"spread"``)
    or exactly two ``xi_i > 0`` (tag ``"two-positive"``).
C
    everything else: the ``|xi_i|`` lie within the factor ``theta`` and the
    sign pattern is not two-and-two (tag ``"+k"`` with ``k`` positive entries).

In B the multiplier ``|xi| <xi>^s prod <xi_i>^(-s)`` is dominated by a pair
expression ``|xi_a + xi_b|^(1/2) |xi_a - xi_b|^(1/2) <xi_c>^(-3s/2) <xi_d>^(-3s/2)``
for some permutation ``(a, b, c, d)``; :func:`region_b_bound` returns the
best ratio ``RHS / LHS`` over all 24 permutations.  In C the resonance
``cq = |xi^3 - sum xi_i^3|`` is compared with ``sum <xi_i>^3``.

Exhaustive scans evaluate the same quantities on the lattice ``step * Z^4``
inside a cube, chunked over the first coordinate.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from ..spectral import japanese

__all__ = [
    "DEFAULT_CUTOFF",
    "DEFAULT_THETA",
    "MAX_SCAN_POINTS",
    "RegionLabel",
    "RegionScan",
    "dominant_modulation",
    "region_b_bound",
    "region_c_quantity",
    "region_classify",
    "scan_regions",
]

DEFAULT_CUTOFF = 1.0
DEFAULT_THETA = 0.99
# cell-count cap for exhaustive scans (radius 50 on the integer lattice is ~1.04e8)
MAX_SCAN_POINTS = 1.1e8
# per-point CSV output is limited to this many rows
MAX_CSV_ROWS = 1_000_000

_PERMUTATIONS = tuple(itertools.permutations(range(4)))
_PAIRS = tuple(itertools.combinations(range(4), 2))


@dataclass(frozen=True)
class RegionLabel:
    region: str
    tag: str = ""

    def __str__(self) -> str:
        return f"{self.region}:{self.tag}" if self.tag else self.region


def region_classify(xi, cutoff: float = DEFAULT_CUTOFF,
                    near_threshold: float = DEFAULT_THETA) -> RegionLabel:
    x = np.asarray(xi, dtype=float)
    if x.shape != (4,):
        raise ValueError("expected a 4-vector of frequencies")
    a = np.abs(x)
    if a.max() <= cutoff:
        return RegionLabel("A")
    if a.min() <= near_threshold * a.max():
        return RegionLabel("B", "spread")
    positive = int(np.count_nonzero(x > 0))
    if positive == 2:
        return RegionLabel("B", "two-positive")
    return RegionLabel("C", f"+{positive}")


def _b_lhs(x: np.ndarray, s: float) -> np.ndarray:
    xi = x.sum(axis=-1)
    return np.abs(xi) * japanese(xi) ** s * np.prod(japanese(x) ** (-s), axis=-1)


def _pair_rhs(x: np.ndarray, s: float, pair) -> np.ndarray:
    i, j = pair
    c, d = (k for k in range(4) if k not in pair)
    xa, xb = x[..., i], x[..., j]
    return (np.sqrt(np.abs(xa + xb) * np.abs(xa - xb))
            * (japanese(x[..., c]) * japanese(x[..., d])) ** (-1.5 * s))


def region_b_bound(xi, s: float) -> tuple[float, tuple[int, ...] | None]:
    """Best ratio ``RHS_pi / LHS`` over all permutations and the permutation attaining it.

    ``LHS = 0`` (output frequency zero) gives ``(inf, None)``.  A positive LHS
    with every RHS zero gives ``(0.0, None)`` -- a failed certificate, returned
    rather than skipped.
    """
    x = np.asarray(xi, dtype=float)
    lhs = float(_b_lhs(x, s))
    if lhs == 0.0:
        return float("inf"), None
    best, arg = 0.0, None
    for perm in _PERMUTATIONS:
        r = float(_pair_rhs(x, s, perm[:2])) / lhs
        if r > best:
            best, arg = r, perm
    return best, arg


def region_c_quantity(xi) -> tuple[float, float]:
    """``cq = |xi^3 - sum xi_i^3|`` and ``cq / sum <xi_i>^3``."""
    x = np.asarray(xi, dtype=float)
    cq = abs(x.sum() ** 3 - np.sum(x**3))
    return float(cq), float(cq / np.sum(japanese(x) ** 3))


def dominant_modulation(xi, tau) -> int:
    """Index of the largest modulation among ``<tau - xi^3>`` (0) and ``<tau_i - xi_i^3>`` (1..4).

    ``xi`` and ``tau`` are the four input frequencies; the output pair is
    their sum.  Ties go to the smallest index.
    """
    x, t = np.asarray(xi, dtype=float), np.asarray(tau, dtype=float)
    mods = np.concatenate([[t.sum() - x.sum() ** 3], t - x**3])
    return int(np.argmax(japanese(mods)))


# ---------------------------------------------------------------- scans


@dataclass
class RegionScan:
    radius: float
    step: float
    s: float
    cutoff: float
    theta: float
    counts: dict = field(default_factory=dict)
    total: int = 0
    b_min_margin: float = float("inf")
    b_argmin: tuple | None = None
    b_failures: int = 0
    c_min_ratio: float = float("inf")
    c_argmin: tuple | None = None
    c_min_output_ratio: float = float("inf")
    c_output_argmin: tuple | None = None
    shells: list = field(default_factory=list)
    points: list | None = None

    @property
    def partition_ok(self) -> bool:
        return sum(self.counts.values()) == self.total

    def summary(self) -> dict:
        return {
            "radius": self.radius, "step": self.step, "s": self.s, "cutoff": self.cutoff,
            "theta": self.theta, "total": self.total, "counts": dict(self.counts),
            "partition_ok": self.partition_ok,
            "b_min_margin": self.b_min_margin, "b_argmin": self.b_argmin,
            "b_failures": self.b_failures,
            "c_min_ratio": self.c_min_ratio, "c_argmin": self.c_argmin,
            "c_min_output_ratio": self.c_min_output_ratio,
            "c_output_argmin": self.c_output_argmin,
        }

    def shells_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["shell", "region", "xi1", "xi2", "xi3", "xi4", "min_value"])
        for row in self.shells:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def points_csv(self) -> str:
        if self.points is None:
            raise ValueError("scan was run without keep_points")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi1", "xi2", "xi3", "xi4", "region", "tag", "value"])
        for row in self.points:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()


def _labels(x: np.ndarray, cutoff: float, theta: float):
    a = np.abs(x)
    amax, amin = a.max(axis=1), a.min(axis=1)
    is_a = amax <= cutoff
    spread = ~is_a & (amin <= theta * amax)
    positive = np.count_nonzero(x > 0, axis=1)
    two = ~is_a & ~spread & (positive == 2)
    is_c = ~is_a & ~spread & ~two
    return is_a, spread, two, is_c, positive


def _pt(row) -> tuple:
    return tuple(float(v) for v in row)


def scan_regions(radius: float, s: float = -0.1, step: float = 1.0,
                 cutoff: float = DEFAULT_CUTOFF, theta: float = DEFAULT_THETA,
                 keep_points: bool = False, check_b: bool = True) -> RegionScan:
    """Exhaustive scan of ``{step * k : k in Z^4, |step * k_i| <= radius}``.

    ``check_b=False`` still labels every point but skips the (dominant) cost
    of the region-B permutation bound.
    """
    if radius < 0 or step <= 0:
        raise ValueError("radius must be >= 0 and step > 0")
    m = int(np.floor(radius / step + 1e-12))
    axis = step * np.arange(-m, m + 1)
    total = axis.size**4
    if total > MAX_SCAN_POINTS:
        raise ValueError(f"scan of {total:.3g} points exceeds the cap of {MAX_SCAN_POINTS:.3g}")
    if keep_points and total > MAX_CSV_ROWS:
        raise ValueError(f"per-point output of {total} rows exceeds the cap of {MAX_CSV_ROWS}")
    out = RegionScan(radius, step, s, cutoff, theta, {"A": 0, "B": 0, "C": 0}, total)
    out.points = [] if keep_points else None
    rest = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    shell_min: dict = {}

    for x1 in axis:
        x = np.column_stack([np.full(len(rest), x1), rest])
        is_a, spread, two, is_c, positive = _labels(x, cutoff, theta)
        is_b = spread | two
        out.counts["A"] += int(is_a.sum())
        out.counts["B"] += int(is_b.sum())
        out.counts["C"] += int(is_c.sum())
        shell = np.rint(np.abs(x).max(axis=1) / step).astype(int)

        margin = np.full(len(x), np.nan)
        if check_b and is_b.any():
            xb = x[is_b]
            lhs = _b_lhs(xb, s)
            rhs = np.max([_pair_rhs(xb, s, p) for p in _PAIRS], axis=0)
            with np.errstate(divide="ignore", invalid="ignore"):
                mb = np.where(lhs > 0, rhs / np.where(lhs > 0, lhs, 1), np.inf)
            margin[is_b] = mb
            out.b_failures += int(np.count_nonzero(mb == 0))
            k = int(np.argmin(mb))
            if mb[k] < out.b_min_margin:
                out.b_min_margin, out.b_argmin = float(mb[k]), _pt(xb[k])

        ratio = np.full(len(x), np.nan)
        if is_c.any():
            xc = x[is_c]
            xi = xc.sum(axis=1)
            cq = np.abs(xi**3 - np.sum(xc**3, axis=1))
            rc = cq / np.sum(japanese(xc) ** 3, axis=1)
            ro = cq / japanese(xi) ** 3
            ratio[is_c] = rc
            k = int(np.argmin(rc))
            if rc[k] < out.c_min_ratio:
                out.c_min_ratio, out.c_argmin = float(rc[k]), _pt(xc[k])
            k = int(np.argmin(ro))
            if ro[k] < out.c_min_output_ratio:
                out.c_min_output_ratio, out.c_output_argmin = float(ro[k]), _pt(xc[k])

        for region, mask, vals in (("B", is_b, margin), ("C", is_c, ratio)):
            if not mask.any() or (region == "B" and not check_b):
                continue
            idx = np.flatnonzero(mask)
            for sh in np.unique(shell[idx]):
                sel = idx[shell[idx] == sh]
                j = sel[int(np.argmin(vals[sel]))]
                key = (int(sh), region)
                if key not in shell_min or vals[j] < shell_min[key][1]:
                    shell_min[key] = (_pt(x[j]), float(vals[j]))

        if keep_points:
            for row, a_, b_, c_, sp, pos, mg, rt in zip(x, is_a, is_b, is_c, spread, positive,
                                                       margin, ratio):
                if a_:
                    out.points.append((*_pt(row), "A", "", ""))
                elif b_:
                    out.points.append((*_pt(row), "B", "spread" if sp else "two-positive", float(mg)))
                else:
                    out.points.append((*_pt(row), "C", f"+{int(pos)}", float(rt)))

    out.shells = [(sh, region, *pt, val)
                  for (sh, region), (pt, val) in sorted(shell_min.items())]
    return out
