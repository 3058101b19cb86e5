"""Pauli strings and dense Pauli arithmetic.

Label convention: characters ``I, X, Y, Z`` map to integer codes 0..3.
Spin convention: basis index 0 is the +1 eigenstate of Z (spin up),
index 1 is the -1 eigenstate (spin down). Dense state vectors are indexed
row-major with site 0 as the most significant bit.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError

PAULI_LABELS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_CODE_TO_LABEL = dict(enumerate(PAULI_LABELS))
_LABEL_TO_CODE = {c: i for i, c in _CODE_TO_LABEL.items()}


class PauliString:
    """An L-site tensor product of single-qubit Pauli operators.

    Accepts a label string like ``"IXZZ"`` or any iterable of labels /
    integer codes. Immutable and hashable.
    """

    __slots__ = ("codes",)

    def __init__(self, labels: str | Iterable[str | int]):
        codes = []
        for item in labels:
            if isinstance(item, str):
                if item not in _LABEL_TO_CODE:
                    raise ShapeError(f"unknown Pauli label {item!r}")
                codes.append(_LABEL_TO_CODE[item])
            else:
                code = int(item)
                if not 0 <= code <= 3:
                    raise ShapeError(f"Pauli code {code} outside 0..3")
                codes.append(code)
        if not codes:
            raise ShapeError("empty Pauli string")
        self.codes = tuple(codes)

    @classmethod
    def identity(cls, length: int) -> "PauliString":
        return cls([0] * length)

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliString) and self.codes == other.codes

    def __hash__(self) -> int:
        return hash(self.codes)

    def __str__(self) -> str:
        return "".join(_CODE_TO_LABEL[c] for c in self.codes)

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    @property
    def labels(self) -> str:
        return str(self)

    def matrices(self) -> list[np.ndarray]:
        return [PAULI_MATRICES[_CODE_TO_LABEL[c]] for c in self.codes]


def as_pauli(p: PauliString | str | Sequence[int]) -> PauliString:
    return p if isinstance(p, PauliString) else PauliString(p)


def pauli_dense_matrix(p: PauliString | str | Sequence[int]) -> np.ndarray:
    """Build the full 2^L x 2^L matrix by Kronecker products.

    Only intended for small L (test oracles); memory grows as 4^L.
    """
    p = as_pauli(p)
    mat = np.array([[1.0 + 0.0j]])
    for m in p.matrices():
        mat = np.kron(mat, m)
    return mat


def apply_pauli_dense(p: PauliString | str | Sequence[int], vec: np.ndarray) -> np.ndarray:
    """Apply a Pauli string to a dense state vector without forming the matrix.

    Each basis state maps to exactly one basis state: X and Y flip the bit,
    Z and Y contribute a sign depending on the input bit, and each Y carries
    a factor i. Fully vectorized over the 2^L amplitudes.
    """
    p = as_pauli(p)
    length = len(p)
    dim = 1 << length
    vec = np.asarray(vec).reshape(-1)
    if vec.shape[0] != dim:
        raise ShapeError(f"vector length {vec.shape[0]} != 2^{length}")

    flip_mask = 0
    phase_mask = 0  # bits where the input-bit sign (-1)^bit applies: Z and Y
    n_y = 0
    for site, code in enumerate(p.codes):
        bit = 1 << (length - 1 - site)
        if code == 1:  # X
            flip_mask |= bit
        elif code == 2:  # Y
            flip_mask |= bit
            phase_mask |= bit
            n_y += 1
        elif code == 3:  # Z
            phase_mask |= bit

    idx = np.arange(dim, dtype=np.int64)
    src = idx ^ flip_mask
    # out[m] = <m|P|n> vec[n] with n = m ^ flip; Z/Y signs act on the input bits
    signs = 1.0 - 2.0 * (_popcount(src & phase_mask) & 1)
    return vec[src] * signs * (1.0j) ** n_y


def pauli_expectation_dense(p: PauliString | str | Sequence[int], vec: np.ndarray) -> float:
    """<psi|P|psi> for a dense normalized state; returns the real part."""
    out = apply_pauli_dense(p, vec)
    val = np.vdot(np.asarray(vec).reshape(-1), out)
    return float(val.real)


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr).astype(np.int64)
    # fallback for numpy < 2.0
    out = np.zeros_like(arr)
    work = arr.copy()
    while np.any(work):
        out += work & 1
        work >>= 1
    return out
