"""Binary dataset container for 2D complex matrices with axis metadata.

Layout (little-endian throughout):

    magic     7 bytes   b"MDCS2D\\0"
    version   u16
    n_meta    u32, then n_meta pairs of (u32 len + utf-8) key, value
    n_axes    u8, per axis: name (u32+utf8), unit (u32+utf8),
              length (u64), float64 values
    rows u64, cols u64, row-major complex64 payload
    crc32     u32 over every preceding byte

Write-then-read round-trips bit-identically; a corrupted payload byte fails
with ChecksumMismatch.
"""
from __future__ import annotations

import io
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ChecksumMismatch, IoFailure, VersionUnsupported

MAGIC = b"MDCS2D\x00"
FORMAT_VERSION = 1


@dataclass
class DatasetFile:
    matrix: np.ndarray                       # complex64, 2-d
    axes: tuple[tuple[str, str, np.ndarray], ...]   # (name, unit, values)
    metadata: dict[str, str] = field(default_factory=dict)
    version: int = FORMAT_VERSION


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise IoFailure(f"truncated dataset: wanted {n} bytes, got {len(data)}")
    return data


def _unpack_str(fh) -> str:
    (n,) = struct.unpack("<I", _read_exact(fh, 4))
    return _read_exact(fh, n).decode("utf-8")


def write_dataset(path, data: DatasetFile) -> None:
    matrix = np.ascontiguousarray(data.matrix, dtype=np.complex64)
    if matrix.ndim != 2:
        raise IoFailure(f"dataset matrix must be 2-d, got shape {matrix.shape}")
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<H", data.version))
    buf.write(struct.pack("<I", len(data.metadata)))
    for key in data.metadata:
        buf.write(_pack_str(str(key)))
        buf.write(_pack_str(str(data.metadata[key])))
    buf.write(struct.pack("<B", len(data.axes)))
    for name, unit, values in data.axes:
        buf.write(_pack_str(name))
        buf.write(_pack_str(unit))
        vals = np.ascontiguousarray(values, dtype="<f8")
        buf.write(struct.pack("<Q", vals.size))
        buf.write(vals.tobytes())
    buf.write(struct.pack("<QQ", matrix.shape[0], matrix.shape[1]))
    buf.write(matrix.astype("<c8").tobytes())
    payload = buf.getvalue()
    checksum = zlib.crc32(payload) & 0xFFFFFFFF
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
            fh.write(struct.pack("<I", checksum))
    except OSError as exc:
        raise IoFailure(f"cannot write dataset {path}: {exc}") from exc


def read_dataset(path) -> DatasetFile:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read dataset {path}: {exc}") from exc
    if len(blob) < len(MAGIC) + 6:
        raise IoFailure(f"{path} is too short to be a dataset file")
    payload, tail = blob[:-4], blob[-4:]
    (stored,) = struct.unpack("<I", tail)
    if zlib.crc32(payload) & 0xFFFFFFFF != stored:
        raise ChecksumMismatch(f"{path}: checksum does not match payload")

    fh = io.BytesIO(payload)
    if _read_exact(fh, len(MAGIC)) != MAGIC:
        raise IoFailure(f"{path}: bad magic string")
    (version,) = struct.unpack("<H", _read_exact(fh, 2))
    if version > FORMAT_VERSION:
        raise VersionUnsupported(
            f"{path}: format version {version} is newer than supported {FORMAT_VERSION}")
    (n_meta,) = struct.unpack("<I", _read_exact(fh, 4))
    metadata = {}
    for _ in range(n_meta):
        key = _unpack_str(fh)
        metadata[key] = _unpack_str(fh)
    (n_axes,) = struct.unpack("<B", _read_exact(fh, 1))
    axes = []
    for _ in range(n_axes):
        name = _unpack_str(fh)
        unit = _unpack_str(fh)
        (length,) = struct.unpack("<Q", _read_exact(fh, 8))
        values = np.frombuffer(_read_exact(fh, 8 * length), dtype="<f8").copy()
        axes.append((name, unit, values))
    rows, cols = struct.unpack("<QQ", _read_exact(fh, 16))
    matrix = np.frombuffer(_read_exact(fh, 8 * rows * cols), dtype="<c8").copy()
    matrix = matrix.reshape(rows, cols)
    if fh.read(1):
        raise IoFailure(f"{path}: trailing bytes after matrix payload")
    return DatasetFile(matrix, tuple(axes), metadata, version)
