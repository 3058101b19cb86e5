"""Matrix-product-state arithmetic.

Site tensors carry indices (left bond, physical, right bond) with boundary
bonds of size 1. Dense vectors are row-major with site 0 as the most
significant digit, so ``vec.reshape((d,) * L)`` puts site l on axis l.

States are immutable after construction; every operation returns a new
object. The physical dimension is uniform across sites (2 for spin states,
4 for tensors indexed by Pauli labels).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidInputError, ShapeError
from .pauli import PAULI_MATRICES, PauliString, as_pauli

ISOMETRY_TOL = 1e-10
_NORM_TOL = 1e-10


class MatrixProductState:
    """Chain of degree-3 tensors representing a degree-L tensor.

    Parameters
    ----------
    sites:
        Sequence of complex arrays, site l of shape (D_{l-1}, d, D_l) with
        D_0 = D_L = 1 and matching interior bonds.
    canonical_center:
        If set, sites left of the center are left isometries and sites right
        of it are right isometries. ``None`` means no canonical structure is
        claimed.
    """

    __slots__ = ("sites", "canonical_center", "_norm_cache")

    def __init__(self, sites: Sequence[np.ndarray], canonical_center: int | None = None):
        if len(sites) == 0:
            raise ShapeError("MPS needs at least one site")
        tensors = []
        for l, t in enumerate(sites):
            t = np.asarray(t, dtype=complex)
            if t.ndim != 3:
                raise ShapeError(f"site {l} has ndim {t.ndim}, expected 3")
            tensors.append(t)
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise ShapeError("boundary bond dimensions must be 1")
        d = tensors[0].shape[1]
        for l in range(len(tensors) - 1):
            if tensors[l].shape[2] != tensors[l + 1].shape[0]:
                raise ShapeError(
                    f"bond mismatch between sites {l} and {l + 1}: "
                    f"{tensors[l].shape[2]} != {tensors[l + 1].shape[0]}"
                )
        for l, t in enumerate(tensors):
            if t.shape[1] != d:
                raise ShapeError(f"site {l} physical dim {t.shape[1]} != {d}")
            t.flags.writeable = False
        if canonical_center is not None and not 0 <= canonical_center < len(tensors):
            raise ShapeError(f"canonical center {canonical_center} out of range")
        self.sites = tuple(tensors)
        self.canonical_center = canonical_center
        self._norm_cache: float | None = None

    # -- basic structure ---------------------------------------------------

    @property
    def length(self) -> int:
        return len(self.sites)

    @property
    def phys_dim(self) -> int:
        return self.sites[0].shape[1]

    @property
    def bond_dims(self) -> tuple[int, ...]:
        """All L+1 bond dimensions, boundaries included."""
        return (1,) + tuple(t.shape[2] for t in self.sites)

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    def __len__(self) -> int:
        return len(self.sites)

    def __repr__(self) -> str:
        return (
            f"MatrixProductState(L={self.length}, d={self.phys_dim}, "
            f"max_bond={self.max_bond}, center={self.canonical_center})"
        )

    # -- contractions --------------------------------------------------------

    def amplitude(self, config: Sequence[int]) -> complex:
        """Retrieve one tensor component <config|psi>, cost O(L d chi^2)."""
        if len(config) != self.length:
            raise ShapeError(f"config length {len(config)} != {self.length}")
        d = self.phys_dim
        vec = np.ones(1, dtype=complex)
        for l, s in enumerate(config):
            s = int(s)
            if not 0 <= s < d:
                raise ShapeError(f"index {s} at site {l} outside 0..{d - 1}")
            vec = vec @ self.sites[l][:, s, :]
        return complex(vec[0])

    def pauli_expectation(self, p: PauliString | str | Sequence[int]) -> float:
        """<psi|P|psi> via a single transfer-matrix sweep, cost O(L chi^3).

        Requires a normalized spin state. The contraction of a Hermitian
        string is real; a residual imaginary part above 1e-10 signals a bug
        and raises.
        """
        p = as_pauli(p)
        if self.phys_dim != 2:
            raise InvalidInputError("Pauli expectation needs physical dimension 2")
        if len(p) != self.length:
            raise ShapeError(f"Pauli string length {len(p)} != {self.length}")
        if abs(self.norm() - 1.0) > _NORM_TOL:
            raise InvalidInputError(f"state not normalized: |psi| = {self.norm():.3e}")
        env = np.ones((1, 1), dtype=complex)
        for site, code in zip(self.sites, p.codes):
            mat = PAULI_MATRICES["IXYZ"[code]]
            ket = np.tensordot(mat, site, axes=([1], [1]))  # (s_out, Dl, Dr)
            tmp = np.tensordot(env, ket, axes=([1], [1]))  # (Dl_bra, s, Dr)
            env = np.tensordot(site.conj(), tmp, axes=([0, 1], [0, 1]))  # (Dr_bra, Dr)
        val = complex(env[0, 0])
        if abs(val.imag) > 1e-10:
            raise InvalidInputError(
                f"Pauli expectation has imaginary part {val.imag:.3e}; "
                "contraction is inconsistent"
            )
        return float(val.real)

    def sum_all(self) -> complex:
        """Sum over all index configurations, cost O(L d chi^2).

        Computed as the product of the per-site matrices obtained by summing
        the physical leg.
        """
        vec = np.ones(1, dtype=complex)
        for t in self.sites:
            vec = vec @ t.sum(axis=1)
        return complex(vec[0])

    def inner(self, other: "MatrixProductState") -> complex:
        """<self|other> (self enters conjugated)."""
        if other.length != self.length or other.phys_dim != self.phys_dim:
            raise ShapeError("inner product needs matching length and physical dim")
        env = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.sites, other.sites):
            tmp = np.tensordot(env, b, axes=([1], [0]))  # (Dl_bra, s, Dr_ket)
            env = np.tensordot(a.conj(), tmp, axes=([0, 1], [0, 1]))
        return complex(env[0, 0])

    def norm(self) -> float:
        if self._norm_cache is None:
            val = self.inner(self)
            self._norm_cache = float(np.sqrt(max(val.real, 0.0)))
        return self._norm_cache

    def normalized(self) -> "MatrixProductState":
        """Rescale to unit norm (e.g. after truncation)."""
        nrm = self.norm()
        if nrm == 0.0:
            raise InvalidInputError("cannot normalize a zero state")
        tensors = list(self.sites)
        tensors[0] = tensors[0] / nrm
        return MatrixProductState(tensors, canonical_center=self.canonical_center)

    def to_dense(self) -> np.ndarray:
        """Contract to the full degree-L tensor of shape (d, ..., d)."""
        block = self.sites[0]  # (1, d, D)
        for t in self.sites[1:]:
            block = np.tensordot(block, t, axes=([block.ndim - 1], [0]))
        return np.ascontiguousarray(block.reshape(block.shape[1:-1]))

    # -- canonical form ------------------------------------------------------

    def canonicalize(self, center: int) -> "MatrixProductState":
        """Return an equivalent state with the stated orthogonality center.

        QR sweeps push non-isometric content into the center site; the norm
        is preserved.
        """
        if not 0 <= center < self.length:
            raise ShapeError(f"center {center} out of range")
        tensors = [t.copy() for t in self.sites]
        for l in range(center):
            dl, d, dr = tensors[l].shape
            q, r = np.linalg.qr(tensors[l].reshape(dl * d, dr))
            tensors[l] = q.reshape(dl, d, q.shape[1])
            tensors[l + 1] = np.tensordot(r, tensors[l + 1], axes=([1], [0]))
        for l in range(self.length - 1, center, -1):
            dl, d, dr = tensors[l].shape
            # QR of the transposed matrix yields a right isometry
            q, r = np.linalg.qr(tensors[l].reshape(dl, d * dr).conj().T)
            tensors[l] = q.conj().T.reshape(q.shape[1], d, dr)
            tensors[l - 1] = np.tensordot(tensors[l - 1], r.conj().T, axes=([2], [0]))
        return MatrixProductState(tensors, canonical_center=center)

    def compress(self, max_bond: int | None = None, tol: float = 0.0) -> "MatrixProductState":
        """Truncate bond dimensions by SVD sweeps.

        Singular values with s_k / s_1 < tol are discarded, then the bond is
        capped at max_bond. The 2-norm error is bounded by the root of the
        summed squares of all discarded singular values.
        """
        psi = self.canonicalize(self.length - 1)
        tensors = [t.copy() for t in psi.sites]
        for l in range(self.length - 1, 0, -1):
            dl, d, dr = tensors[l].shape
            u, s, vh = np.linalg.svd(tensors[l].reshape(dl, d * dr), full_matrices=False)
            keep = _svd_keep(s, max_bond, tol)
            u, s, vh = u[:, :keep], s[:keep], vh[:keep, :]
            tensors[l] = vh.reshape(keep, d, dr)
            carry = u * s  # (dl, keep)
            tensors[l - 1] = np.tensordot(tensors[l - 1], carry, axes=([2], [0]))
        return MatrixProductState(tensors, canonical_center=0)

    def check_isometries(self) -> float:
        """Maximum deviation from the canonical isometry conditions."""
        if self.canonical_center is None:
            raise InvalidInputError("state has no canonical center")
        dev = 0.0
        for l, t in enumerate(self.sites):
            dl, d, dr = t.shape
            if l < self.canonical_center:
                m = t.reshape(dl * d, dr)
                dev = max(dev, float(np.max(np.abs(m.conj().T @ m - np.eye(dr)))))
            elif l > self.canonical_center:
                m = t.reshape(dl, d * dr)
                dev = max(dev, float(np.max(np.abs(m @ m.conj().T - np.eye(dl)))))
        return dev


def _svd_keep(s: np.ndarray, max_bond: int | None, tol: float) -> int:
    """Number of singular values kept under a relative cutoff and a cap.

    Exact zeros are always dropped; they carry no weight and would only pad
    the bond dimension.
    """
    if s.size == 0 or s[0] == 0.0:
        return 1
    keep = int(np.sum(s / s[0] >= tol)) if tol > 0 else int(np.sum(s > 0.0))
    keep = max(keep, 1)
    if max_bond is not None:
        keep = min(keep, int(max_bond))
    return keep


def mps_from_dense(
    vec: np.ndarray,
    max_bond: int | None = None,
    svd_tol: float = 0.0,
    phys_dim: int = 2,
) -> MatrixProductState:
    """Factorize a dense degree-L tensor into an MPS by sequential SVDs.

    ``vec`` may be flat (length d^L) or already shaped (d, ..., d). With
    truncation disabled the round trip back to a dense vector is exact to
    1e-12. The result is canonical with the center on the last site.
    """
    arr = np.asarray(vec, dtype=complex)
    if arr.ndim == 1:
        length = int(round(np.log(arr.size) / np.log(phys_dim)))
        if phys_dim**length != arr.size:
            raise ShapeError(f"vector length {arr.size} is not a power of {phys_dim}")
        d = phys_dim
    else:
        d = arr.shape[0]
        if any(dim != d for dim in arr.shape):
            raise ShapeError(f"all physical legs must have equal dimension, got {arr.shape}")
        length = arr.ndim
        arr = arr.reshape(-1)
    if length < 1:
        raise ShapeError("need at least one physical leg")
    if not np.isfinite(arr).all():
        raise InvalidInputError("input has non-finite entries")
    if np.linalg.norm(arr) == 0.0:
        raise InvalidInputError("zero-norm input cannot be factorized")

    tensors = []
    block = arr.reshape(1, -1)
    for _ in range(length - 1):
        dl = block.shape[0]
        block = block.reshape(dl * d, -1)
        u, s, vh = np.linalg.svd(block, full_matrices=False)
        keep = _svd_keep(s, max_bond, svd_tol)
        tensors.append(u[:, :keep].reshape(dl, d, keep))
        block = (s[:keep, None] * vh[:keep, :])
    tensors.append(block.reshape(block.shape[0], d, 1))
    return MatrixProductState(tensors, canonical_center=length - 1)


def product_mps(site_vectors: Sequence[np.ndarray]) -> MatrixProductState:
    """Bond-1 MPS for a product state given one local vector per site."""
    tensors = []
    for v in site_vectors:
        v = np.asarray(v, dtype=complex).reshape(-1)
        tensors.append(v.reshape(1, v.size, 1))
    return MatrixProductState(tensors, canonical_center=None)
