"""Versioned binary snapshot format for matrix product states.

Layout (all integers little-endian uint32, floats little-endian float64):

    bytes 0..7   magic b"QRESMPS1"
    uint32       L  (number of sites)
    uint32       d  (physical dimension)
    uint32 x L+1 bond dimensions, boundaries included
    float64 pairs (re, im) for each site tensor in row-major order,
                 site by site

Used to cache ground states between runs.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .mps import MatrixProductState

MAGIC = b"QRESMPS1"


def save_mps(psi: MatrixProductState, path: str | Path) -> None:
    path = Path(path)
    bonds = psi.bond_dims
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", psi.length, psi.phys_dim))
        fh.write(struct.pack(f"<{len(bonds)}I", *bonds))
        for t in psi.sites:
            flat = np.ascontiguousarray(t, dtype=complex).reshape(-1)
            pairs = np.empty(2 * flat.size, dtype="<f8")
            pairs[0::2] = flat.real
            pairs[1::2] = flat.imag
            fh.write(pairs.tobytes())


def load_mps(path: str | Path) -> MatrixProductState:
    path = Path(path)
    raw = path.read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise InvalidInputError(f"{path} is not an MPS snapshot (bad magic)")
    off = len(MAGIC)
    length, d = struct.unpack_from("<II", raw, off)
    off += 8
    bonds = struct.unpack_from(f"<{length + 1}I", raw, off)
    off += 4 * (length + 1)
    tensors = []
    for l in range(length):
        n = bonds[l] * d * bonds[l + 1]
        pairs = np.frombuffer(raw, dtype="<f8", count=2 * n, offset=off)
        off += 16 * n
        t = (pairs[0::2] + 1j * pairs[1::2]).reshape(bonds[l], d, bonds[l + 1])
        tensors.append(t)
    if off != len(raw):
        raise InvalidInputError(f"{path}: trailing bytes after tensor data")
    return MatrixProductState(tensors)
