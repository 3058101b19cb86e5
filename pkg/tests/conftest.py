"""Shared fixtures and independent oracles.

The oracles here are deliberately naive: dense operators are assembled by
Kronecker products and states are enumerated exhaustively, so they share no
code path with the MPS/TCI implementations they validate.
"""

from __future__ import annotations

import numpy as np
import pytest

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_chain(mats) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def kron_pauli(labels: str) -> np.ndarray:
    """Dense Pauli-string operator, site 0 leftmost (most significant)."""
    return kron_chain(PAULI[c] for c in labels)


def dense_tfim_matrix(model) -> np.ndarray:
    """Kron-built Hamiltonian matrix for any SpinModel; independent of
    apply_hamiltonian."""
    n = model.n_sites
    dim = 2**n
    ham = np.zeros((dim, dim), dtype=complex)
    for i, j in model.bonds:
        labels = ["I"] * n
        labels[i] = labels[j] = "Z"
        ham -= kron_pauli("".join(labels))
    for i in range(n):
        labels = ["I"] * n
        labels[i] = "X"
        ham -= model.h * kron_pauli("".join(labels))
    return ham


def random_state(length: int, seed: int, complex_valued: bool = True) -> np.ndarray:
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(2**length)
    if complex_valued:
        vec = vec + 1j * rng.standard_normal(2**length)
    return vec / np.linalg.norm(vec)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
