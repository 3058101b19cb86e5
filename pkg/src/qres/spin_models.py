"""Transverse-field Ising models on chains and square grids.

Hamiltonian: H = -sum_{<i,j>} Z_i Z_j - h sum_i X_i with ferromagnetic
coupling fixed to 1. Periodic boundaries close the chain into a ring and
the grid into a torus; wrap bonds that duplicate an existing nearest-neighbor
pair (L = 2 rings, width/height 2 tori) are counted once.

2D grids are flattened to a 1D site order along a snake (row by row,
alternating direction) so grid states can be handled as MPS.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ResourceLimitError, ShapeError

DENSE_SITE_CAP = 24


@dataclass(frozen=True)
class SpinModel:
    """Lattice geometry plus field strength; bonds are 1D site-index pairs."""

    geometry: str  # "chain" or "grid"
    shape: tuple[int, ...]  # (L,) or (W, H)
    h: float
    periodic: bool = True
    bonds: tuple[tuple[int, int], ...] = field(default=())

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.shape))

    def label(self) -> str:
        if self.geometry == "chain":
            return f"chain L={self.shape[0]}"
        return f"grid {self.shape[0]}x{self.shape[1]}"

    def size_token(self) -> str:
        """Compact size string used in file names and CSV rows."""
        if self.geometry == "chain":
            return str(self.shape[0])
        return f"{self.shape[0]}x{self.shape[1]}"


def build_tfim_1d(L: int, h: float, periodic: bool = True) -> SpinModel:
    """Ring (or open chain) of L spins."""
    if L < 2:
        raise InvalidInputError(f"chain needs L >= 2, got {L}")
    if h < 0:
        raise InvalidInputError(f"field must be nonnegative, got {h}")
    bonds = [(j, j + 1) for j in range(L - 1)]
    if periodic:
        bonds.append((L - 1, 0))
    return SpinModel("chain", (L,), float(h), periodic, _dedup_bonds(bonds))


def build_tfim_2d(W: int, H: int, h: float, periodic: bool = True) -> SpinModel:
    """W x H square lattice, snake-ordered into a 1D chain of W*H sites."""
    if W < 2 or H < 2:
        raise InvalidInputError(f"grid needs W, H >= 2, got {W}x{H}")
    if h < 0:
        raise InvalidInputError(f"field must be nonnegative, got {h}")
    bonds = []
    for r in range(H):
        for c in range(W):
            s = snake_index(r, c, W)
            right = (r, c + 1) if c + 1 < W else ((r, 0) if periodic else None)
            down = (r + 1, c) if r + 1 < H else ((0, c) if periodic else None)
            for nb in (right, down):
                if nb is not None:
                    bonds.append((s, snake_index(nb[0], nb[1], W)))
    return SpinModel("grid", (W, H), float(h), periodic, _dedup_bonds(bonds))


def snake_index(row: int, col: int, width: int) -> int:
    """Grid coordinate -> 1D site index along the snake."""
    return row * width + (col if row % 2 == 0 else width - 1 - col)


def snake_coords(site: int, width: int) -> tuple[int, int]:
    """1D site index -> grid coordinate; inverse of snake_index."""
    row, offset = divmod(site, width)
    return row, offset if row % 2 == 0 else width - 1 - offset


def _dedup_bonds(bonds) -> tuple[tuple[int, int], ...]:
    seen = set()
    out = []
    for i, j in bonds:
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return tuple(out)


def apply_hamiltonian(model: SpinModel, vec: np.ndarray) -> np.ndarray:
    """Matrix-free action H|v> using bit operations; no matrix is stored.

    Site i maps to bit position N-1-i so the flat index matches the
    row-major dense layout of the MPS module.
    """
    n = model.n_sites
    if n > DENSE_SITE_CAP:
        raise ResourceLimitError(f"{n} sites exceeds dense cap {DENSE_SITE_CAP}")
    vec = np.asarray(vec)
    dim = 1 << n
    if vec.shape != (dim,):
        raise ShapeError(f"expected vector of length 2^{n} = {dim}, got {vec.shape}")
    out = _zz_diagonal(model) * vec
    if model.h != 0.0:
        shaped = vec.reshape((2,) * n)
        acc = np.zeros_like(shaped)
        for axis in range(n):
            acc += np.flip(shaped, axis=axis)
        out = out - model.h * acc.reshape(-1)
    return out


def _zz_diagonal(model: SpinModel) -> np.ndarray:
    n = model.n_sites
    idx = np.arange(1 << n, dtype=np.int64)
    diag = np.zeros(1 << n)
    for i, j in model.bonds:
        bi = (idx >> (n - 1 - i)) & 1
        bj = (idx >> (n - 1 - j)) & 1
        # z_i z_j = +1 when bits agree, -1 otherwise
        diag -= 1.0 - 2.0 * (bi ^ bj)
    return diag


