"""Ratio statistics for one inequality harness, plus JSON/CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

# Samples whose denominator falls below this are skipped (and counted).
DENOMINATOR_FLOOR = 1e-10


def _jsonable(obj):
    if is_dataclass(obj):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return None if math.isnan(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


@dataclass
class EstimateReport:
    name: str
    params: dict
    grid: dict
    seed: int
    ratios: list[float] = field(default_factory=list)
    skipped: int = 0
    resolution_series: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ratios = [float(r) for r in self.ratios]
        if any(not math.isfinite(r) or r < 0 for r in self.ratios):
            raise ValueError("ratios must be finite and nonnegative")

    @property
    def n_samples(self) -> int:
        return len(self.ratios) + self.skipped

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else float("nan")

    def quantiles(self) -> dict:
        if not self.ratios:
            return {}
        q = np.percentile(self.ratios, [50, 90, 99])
        return {"q50": float(q[0]), "q90": float(q[1]), "q99": float(q[2])}

    def merge(self, other: "EstimateReport") -> "EstimateReport":
        """Concatenate sample sets of two runs of the same harness."""
        if (self.name, self.params) != (other.name, other.params):
            raise ValueError("cannot merge reports of different harnesses")
        series = dict(self.resolution_series)
        for k, v in other.resolution_series.items():
            series[k] = max(series.get(k, v), v)
        return EstimateReport(self.name, self.params, self.grid, self.seed,
                              self.ratios + other.ratios, self.skipped + other.skipped,
                              series, {**self.extras, **other.extras})

    def to_dict(self) -> dict:
        return _jsonable({
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "params": self.params,
            "grid": self.grid,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "skipped": self.skipped,
            "max_ratio": self.max_ratio,
            "quantiles": self.quantiles(),
            "resolution_series": self.resolution_series,
            "extras": self.extras,
            "ratios": self.ratios,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "EstimateReport":
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {doc.get('schema_version')}")
        return cls(doc["name"], doc["params"], doc["grid"], doc["seed"], doc["ratios"],
                   doc["skipped"], doc["resolution_series"], doc["extras"])

    def ratios_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample", "ratio"])
        for i, r in enumerate(self.ratios):
            w.writerow([i, repr(r)])
        return buf.getvalue()

    def write(self, directory, stem: str | None = None) -> dict:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        paths = {"json": directory / f"{stem}.json", "csv": directory / f"{stem}_ratios.csv"}
        paths["json"].write_text(self.to_json() + "\n")
        paths["csv"].write_text(self.ratios_csv())
        return paths


def collect_ratios(numerators, denominators):
    """Split into kept ratios and a skip count using :data:`DENOMINATOR_FLOOR`."""
    ratios, skipped = [], 0
    for num, den in zip(numerators, denominators):
        if den < DENOMINATOR_FLOOR:
            skipped += 1
        else:
            ratios.append(num / den)
    return ratios, skipped
