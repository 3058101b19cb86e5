"""Two-site DMRG ground-state search over the model MPO."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import InvalidInputError
from .mpo import MatrixProductOperator, mpo_from_model
from .mps import MatrixProductState, _svd_keep
from .spin_models import SpinModel

_DENSE_SOLVE_DIM = 512
_SVD_FLOOR = 1e-13


@dataclass
class DmrgResult:
    energy: float
    psi: MatrixProductState
    converged: bool
    sweeps: int
    energy_history: list[float]


def dmrg_ground_state(
    model: SpinModel,
    max_bond: int = 32,
    n_sweeps: int = 12,
    energy_tol: float = 1e-10,
    seed: int = 11,
) -> DmrgResult:
    """Variational ground state with bond dimension capped at max_bond.

    Sweeps stop once the energy change per full sweep drops below
    energy_tol; if the budget runs out first, a warning is raised and the
    partial result is returned flagged.
    """
    mpo = mpo_from_model(model)
    n = model.n_sites
    if n < 2:
        raise InvalidInputError("DMRG needs at least two sites")

    tensors = _random_start(n, min(4, max_bond), seed)
    tensors = _right_orthogonalize(tensors)

    lenvs: list[np.ndarray] = [np.ones((1, 1, 1), dtype=complex)] * (n + 1)
    renvs: list[np.ndarray] = [np.ones((1, 1, 1), dtype=complex)] * (n + 1)
    for l in range(n - 1, 0, -1):
        renvs[l] = _extend_right(renvs[l + 1], tensors[l], mpo.sites[l])

    energy = np.inf
    history: list[float] = []
    converged = False
    sweeps_run = 0
    for sweep in range(1, n_sweeps + 1):
        for l in range(n - 1):  # left to right
            energy, theta = _solve_site_pair(lenvs[l], mpo.sites[l], mpo.sites[l + 1], renvs[l + 2], tensors[l], tensors[l + 1])
            tensors[l], tensors[l + 1] = _split_theta(theta, max_bond, to_right=True)
            lenvs[l + 1] = _extend_left(lenvs[l], tensors[l], mpo.sites[l])
        for l in range(n - 2, -1, -1):  # right to left
            energy, theta = _solve_site_pair(lenvs[l], mpo.sites[l], mpo.sites[l + 1], renvs[l + 2], tensors[l], tensors[l + 1])
            tensors[l], tensors[l + 1] = _split_theta(theta, max_bond, to_right=False)
            renvs[l + 1] = _extend_right(renvs[l + 2], tensors[l + 1], mpo.sites[l + 1])
        history.append(energy)
        sweeps_run = sweep
        if len(history) >= 2 and abs(history[-2] - history[-1]) < energy_tol:
            converged = True
            break

    # center sits at site 0 after the backward half-sweep; normalize it
    center = tensors[0] / np.linalg.norm(tensors[0])
    tensors[0] = center
    psi = MatrixProductState(tensors, canonical_center=0)
    if not converged:
        warnings.warn(
            f"DMRG stopped after {sweeps_run} sweeps without reaching "
            f"energy tolerance {energy_tol:g}",
            stacklevel=2,
        )
    return DmrgResult(float(energy), psi, converged, sweeps_run, history)


def _random_start(n: int, bond: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    dims = [1]
    for l in range(1, n):
        dims.append(min(bond, 2 ** l, 2 ** (n - l)))
    dims.append(1)
    return [rng.standard_normal((dims[l], 2, dims[l + 1])) + 0j for l in range(n)]


def _right_orthogonalize(tensors: list[np.ndarray]) -> list[np.ndarray]:
    for l in range(len(tensors) - 1, 0, -1):
        dl, d, dr = tensors[l].shape
        q, r = np.linalg.qr(tensors[l].reshape(dl, d * dr).conj().T)
        tensors[l] = q.conj().T.reshape(q.shape[1], d, dr)
        tensors[l - 1] = np.tensordot(tensors[l - 1], r.conj().T, axes=([2], [0]))
    tensors[0] /= np.linalg.norm(tensors[0])
    return tensors


def _extend_left(env: np.ndarray, site: np.ndarray, w: np.ndarray) -> np.ndarray:
    # env (a_bra, m, b_ket); site (b, s, b'); w (m, s_out, s_in, m')
    tmp = np.tensordot(env, site, axes=([2], [0]))  # (a, m, s, b')
    tmp = np.tensordot(tmp, w, axes=([1, 2], [0, 2]))  # (a, b', s_out, m')
    out = np.tensordot(site.conj(), tmp, axes=([0, 1], [0, 2]))  # (a'_bra, b', m')
    return out.transpose(0, 2, 1)  # (a', m', b')


def _extend_right(env: np.ndarray, site: np.ndarray, w: np.ndarray) -> np.ndarray:
    # env (a_bra, m, b_ket); site (b', s, b); w (m', s_out, s_in, m)
    tmp = np.tensordot(site, env, axes=([2], [2]))  # (b', s, a, m)
    tmp = np.tensordot(w, tmp, axes=([3, 2], [3, 1]))  # (m', s_out, b', a)
    out = np.tensordot(site.conj(), tmp, axes=([1, 2], [1, 3]))  # (a'_bra, m', b')
    return out


def _solve_site_pair(lenv, w1, w2, renv, t1, t2) -> tuple[float, np.ndarray]:
    theta0 = np.tensordot(t1, t2, axes=([2], [0]))  # (Dl, s1, s2, Dr)
    shape = theta0.shape
    dim = theta0.size

    def matvec(x: np.ndarray) -> np.ndarray:
        th = x.reshape(shape)
        tmp = np.tensordot(lenv, th, axes=([2], [0]))  # (a, m, s1, s2, c)
        tmp = np.tensordot(tmp, w1, axes=([1, 2], [0, 2]))  # (a, s2, c, o1, m')
        tmp = np.tensordot(tmp, w2, axes=([4, 1], [0, 2]))  # (a, c, o1, o2, m'')
        tmp = np.tensordot(tmp, renv, axes=([4, 1], [1, 2]))  # (a, o1, o2, a')
        return tmp.reshape(-1)

    if dim <= _DENSE_SOLVE_DIM:
        mat = np.empty((dim, dim), dtype=complex)
        eye = np.eye(dim)
        for k in range(dim):
            mat[:, k] = matvec(eye[:, k])
        evals, evecs = np.linalg.eigh(mat)
        return float(evals[0]), evecs[:, 0].reshape(shape)

    op = LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    v0 = theta0.reshape(-1)
    evals, evecs = eigsh(op, k=1, which="SA", v0=v0, tol=1e-11)
    return float(evals[0]), evecs[:, 0].reshape(shape)


def _split_theta(theta: np.ndarray, max_bond: int, to_right: bool) -> tuple[np.ndarray, np.ndarray]:
    dl, d, d2, dr = theta.shape
    u, s, vh = np.linalg.svd(theta.reshape(dl * d, d2 * dr), full_matrices=False)
    keep = _svd_keep(s, max_bond, _SVD_FLOOR)
    u, s, vh = u[:, :keep], s[:keep], vh[:keep, :]
    s = s / np.linalg.norm(s)
    if to_right:
        left = u.reshape(dl, d, keep)
        right = (s[:, None] * vh).reshape(keep, d2, dr)
    else:
        left = (u * s).reshape(dl, d, keep)
        right = vh.reshape(keep, d2, dr)
    return left, right
