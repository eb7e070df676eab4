"""Verification harnesses: sampled ratio reports and exhaustive lattice scans."""

from __future__ import annotations

from dataclasses import dataclass

from .bilinear import bilinear_identity_oracle, bilinear_lhs, verify_bilinear
from .quadrilinear import HolderExponents, holder_exponents, verify_quadrilinear
from .regions import (
    RegionLabel,
    dominant_modulation,
    region_b_bound,
    region_c_quantity,
    region_classify,
    scan_regions,
)
from .report import EstimateReport
from .sampling import RandomFieldSpec, sample_field, sample_spacetime_field
from .strichartz import StrichartzCase, verify_strichartz
from .transfer import verify_transfer

__all__ = [
    "EstimateReport",
    "HolderExponents",
    "RandomFieldSpec",
    "RegionLabel",
    "ResolutionSweep",
    "StrichartzCase",
    "bilinear_identity_oracle",
    "bilinear_lhs",
    "dominant_modulation",
    "holder_exponents",
    "region_b_bound",
    "region_c_quantity",
    "region_classify",
    "resolution_sweep",
    "sample_field",
    "sample_spacetime_field",
    "scan_regions",
    "verify_bilinear",
    "verify_quadrilinear",
    "verify_strichartz",
    "verify_transfer",
]


@dataclass
class ResolutionSweep:
    reports: dict

    @property
    def series(self) -> dict:
        return {n: r.max_ratio for n, r in self.reports.items()}

    @property
    def drift(self) -> float:
        """``(max - min) / min`` of the per-resolution maximal ratios."""
        values = list(self.series.values())
        return (max(values) - min(values)) / min(values)


def resolution_sweep(run, ns) -> ResolutionSweep:
    """``run(n) -> EstimateReport`` for each ``n``; the maxima form the resolution series."""
    return ResolutionSweep({n: run(n) for n in ns})
