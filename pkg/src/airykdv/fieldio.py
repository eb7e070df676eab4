"""Binary and JSON serialization of :class:`SpectralField`.

Binary layout (all little-endian)::

    offset  type      content
    0       4 bytes   magic b"AKSF"
    4       uint32    format version (1)
    8       int64     n            spatial mode count
    16      float64   length       torus circumference L
    24      uint64    flags        bit 0: real-valued, bit 1: space-time
    32      int64     n_t          0 for spatial fields
    40      float64   t_span       0.0 for spatial fields
    48      float64[] coefficients as interleaved (re, im) pairs in centred
                      order; space-time data is row-major (tau, xi)
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .spectral import SpectralField, make_spatial_grid, make_time_window

MAGIC = b"AKSF"
VERSION = 1
_HEADER = struct.Struct("<4sIqdQqd")

FLAG_REAL = 1
FLAG_SPACETIME = 2


def to_bytes(field: SpectralField) -> bytes:
    flags = (FLAG_REAL if field.real else 0) | (FLAG_SPACETIME if field.is_spacetime else 0)
    n_t, t_span = (field.window.n_t, field.window.t_span) if field.window else (0, 0.0)
    header = _HEADER.pack(MAGIC, VERSION, field.grid.n, field.grid.length, flags, n_t, t_span)
    body = np.ascontiguousarray(field.coefficients, dtype="<c16").tobytes()
    return header + body


def from_bytes(data: bytes) -> SpectralField:
    if len(data) < _HEADER.size:
        raise ValueError("truncated field header")
    magic, version, n, length, flags, n_t, t_span = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported field format version {version}")
    grid = make_spatial_grid(n, length)
    window = make_time_window(n_t, t_span) if flags & FLAG_SPACETIME else None
    shape = (n,) if window is None else (n_t, n)
    count = int(np.prod(shape))
    body = data[_HEADER.size:]
    if len(body) != 16 * count:
        raise ValueError(f"expected {16 * count} payload bytes, got {len(body)}")
    coeffs = np.frombuffer(body, dtype="<c16").astype(complex).reshape(shape)
    return SpectralField(grid, coeffs, window, bool(flags & FLAG_REAL))


def save_field(field: SpectralField, path) -> Path:
    path = Path(path)
    path.write_bytes(to_bytes(field))
    return path


def load_field(path) -> SpectralField:
    return from_bytes(Path(path).read_bytes())


def to_json(field: SpectralField) -> str:
    """JSON for small fields; coefficients as ``[re, im]`` pairs."""
    doc = {
        "n": field.grid.n,
        "length": field.grid.length,
        "real": field.real,
        "n_t": field.window.n_t if field.window else None,
        "t_span": field.window.t_span if field.window else None,
        "coefficients": np.stack([field.coefficients.real, field.coefficients.imag], -1).tolist(),
    }
    return json.dumps(doc)


def from_json(text: str) -> SpectralField:
    doc = json.loads(text)
    grid = make_spatial_grid(doc["n"], doc["length"])
    window = make_time_window(doc["n_t"], doc["t_span"]) if doc.get("n_t") else None
    pairs = np.asarray(doc["coefficients"], dtype=float)
    coeffs = pairs[..., 0] + 1j * pairs[..., 1]
    return SpectralField(grid, coeffs, window, bool(doc["real"]))
