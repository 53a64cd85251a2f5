"""Binary vector file format.

Layout: magic ``PSV1`` | uint32 LE dimension | uint64 LE row count |
key table (uint16 LE byte length + UTF-8 bytes per key) | row-major
little-endian float32 matrix. Used both for word vectors (keys are tokens)
and for precomputed tweet embeddings (keys are tweet ids).
"""

import struct
from pathlib import Path

import numpy as np

from .errors import InputError

MAGIC = b"PSV1"


def write_vectors(path: str | Path, keys: list[str], matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix, dtype="<f4")
    if matrix.ndim != 2 or matrix.shape[0] != len(keys):
        raise ValueError("matrix must be 2-D with one row per key")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", matrix.shape[1]))
        fh.write(struct.pack("<Q", len(keys)))
        for key in keys:
            raw = key.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValueError(f"key too long: {key[:32]!r}...")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        fh.write(matrix.tobytes(order="C"))


def read_vectors(path: str | Path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"vector file not found: {path}")
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise InputError(f"{path}: not a polarscore vector file (bad magic)")
        (dim,) = struct.unpack("<I", fh.read(4))
        (count,) = struct.unpack("<Q", fh.read(8))
        keys = []
        for _ in range(count):
            (length,) = struct.unpack("<H", fh.read(2))
            keys.append(fh.read(length).decode("utf-8"))
        data = fh.read(count * dim * 4)
        if len(data) != count * dim * 4:
            raise InputError(f"{path}: truncated vector data")
    matrix = np.frombuffer(data, dtype="<f4").reshape(count, dim).astype(np.float64)
    return keys, matrix
