"""Matrix product operators for the spin models.

The MPO is the standard finite-state automaton: one channel per coupling
that is "in flight" across a bond. Nearest-neighbor bonds in snake order
need a single shared channel; wrap-around and 2D snake-induced long-range
bonds each open their own channel between injection and emission site, so
the bond dimension at a cut is 2 + (number of couplings crossing the cut).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ShapeError
from .pauli import PAULI_MATRICES
from .spin_models import SpinModel


class MatrixProductOperator:
    """Chain of degree-4 tensors with index order (left, phys-out, phys-in, right)."""

    __slots__ = ("sites",)

    def __init__(self, sites: Sequence[np.ndarray]):
        tensors = [np.asarray(t, dtype=complex) for t in sites]
        for l, t in enumerate(tensors):
            if t.ndim != 4:
                raise ShapeError(f"MPO site {l} has ndim {t.ndim}, expected 4")
        for l in range(len(tensors) - 1):
            if tensors[l].shape[3] != tensors[l + 1].shape[0]:
                raise ShapeError(f"MPO bond mismatch at {l}")
        self.sites = tuple(tensors)

    @property
    def length(self) -> int:
        return len(self.sites)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        return (1,) + tuple(t.shape[3] for t in self.sites)

    def to_dense(self) -> np.ndarray:
        """Contract to the full d^L x d^L matrix; small systems only."""
        n = self.length
        d = self.sites[0].shape[1]
        if d**n > 4096:
            raise ShapeError(f"dense MPO at L={n} is too large")
        block = self.sites[0][0]  # (out, in, br)
        dim = d
        for w in self.sites[1:]:
            block = np.einsum("abk,kcdl->acbdl", block, w)
            dim *= d
            block = block.reshape(dim, dim, w.shape[3])
        return block[:, :, 0]

    def apply_dense(self, vec: np.ndarray) -> np.ndarray:
        """Act on a dense vector; verification helper for small systems."""
        return self.to_dense() @ np.asarray(vec, dtype=complex).reshape(-1)


def mpo_from_model(model: SpinModel) -> MatrixProductOperator:
    """FSA encoding of -sum_bonds Z_i Z_j - h sum_i X_i in 1D site order."""
    n = model.n_sites
    I = PAULI_MATRICES["I"]
    X = PAULI_MATRICES["X"]
    Z = PAULI_MATRICES["Z"]

    ordered = [(min(i, j), max(i, j)) for i, j in model.bonds]
    # channels crossing each cut c (between site c and c+1), in a fixed order
    crossing: list[list[tuple[int, int]]] = [[] for _ in range(n - 1)]
    for bond in sorted(ordered):
        i, j = bond
        for c in range(i, j):
            crossing[c].append(bond)

    tensors = []
    for l in range(n):
        left = _cut_states(crossing, l - 1, n)
        right = _cut_states(crossing, l, n)
        w = np.zeros((len(left), 2, 2, len(right)), dtype=complex)
        li = {s: k for k, s in enumerate(left)}
        ri = {s: k for k, s in enumerate(right)}
        if "start" in li and "start" in ri:
            w[li["start"], :, :, ri["start"]] = I
        if "done" in li and "done" in ri:
            w[li["done"], :, :, ri["done"]] = I
        # on-site field
        w[li["start"], :, :, ri["done"]] = -model.h * X
        for bond in _bonds_at(crossing, l, n):
            i, j = bond
            if l == i:
                w[li["start"], :, :, ri[bond]] += -Z  # inject with coupling sign
            elif l == j:
                w[li[bond], :, :, ri["done"]] += Z
            else:
                w[li[bond], :, :, ri[bond]] += I
        tensors.append(w)
    return MatrixProductOperator(tensors)


def _cut_states(crossing, cut: int, n: int) -> list:
    """Automaton states on a cut: start, open channels, done."""
    if cut < 0:
        return ["start"]
    if cut >= n - 1:
        return ["done"]
    return ["start"] + list(crossing[cut]) + ["done"]


def _bonds_at(crossing, l: int, n: int):
    """Bonds active at site l (crossing either adjacent cut)."""
    active = []
    seen = set()
    for c in (l - 1, l):
        if 0 <= c < n - 1:
            for bond in crossing[c]:
                if bond not in seen and bond[0] <= l <= bond[1]:
                    seen.add(bond)
                    active.append(bond)
    return active
