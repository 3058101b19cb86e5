"""Tensor cross interpolation of black-box tensors.

Builds a tensor-train approximation of a degree-L discrete function from a
structured subset of its entries. Working state is a pair of nested
multi-index families: row prefixes I_0..I_L and column suffixes J_0..J_L
(J_l covers sites l..L-1), with |I_{b+1}| = |J_{b+1}| the rank of bond b.

Each sweep visits every bond, materializes the two-site slice Pi on
(I_b x sigma_b) x (sigma_{b+1} x J_{b+2}), subtracts the current cross
approximation, and greedily accepts full-pivot residual maxima while they
exceed the relative tolerance and the rank cap allows. Pivots are only
ever added, so ranks grow monotonically and repeated sweeps on a converged
state cost no new function calls (all entries are memoized).

The tensor train is assembled as T_l inv(P_l) with a bare T on the last
site, which reproduces the function exactly on every multi-index composed
from pivot rows and columns.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInputError, PivotError
from .mps import MatrixProductState

MultiIndex = tuple[int, ...]

PIVOT_COND_LIMIT = 1e14  # hard failure at conversion; addition rejects at 1e-12 relative
_DEFAULT_TOL = 1e-8


class BlackBoxTensor:
    """A degree-L discrete function sigma -> real scalar with call accounting.

    The callable must be pure: repeated calls with equal arguments return
    equal values, and concurrent invocation is safe. The call counter is
    updated under a lock and increments exactly once per evaluation.
    """

    def __init__(self, length: int, local_dim: int, fn: Callable[[MultiIndex], float]):
        if length < 1 or local_dim < 2:
            raise InvalidInputError(f"bad black-box shape L={length}, d={local_dim}")
        self.length = length
        self.local_dim = local_dim
        self._fn = fn
        self._calls = 0
        self._lock = threading.Lock()
        self.evaluator = None  # builders may attach the backing contraction engine

    @property
    def local_dims(self) -> tuple[int, ...]:
        return (self.local_dim,) * self.length

    @property
    def call_count(self) -> int:
        return self._calls

    def __call__(self, idx: MultiIndex) -> float:
        with self._lock:
            self._calls += 1
        return float(self._fn(idx))


class _Memo:
    """Deduplicating front end for a black box; owns no approximation."""

    __slots__ = ("box", "values")

    def __init__(self, box: BlackBoxTensor):
        self.box = box
        self.values: dict[MultiIndex, float] = {}

    def __call__(self, idx: MultiIndex) -> float:
        val = self.values.get(idx)
        if val is None:
            val = self.box(idx)
            self.values[idx] = val
        return val

    def matrix(self, rows: Sequence[MultiIndex], cols: Sequence[MultiIndex]) -> np.ndarray:
        out = np.empty((len(rows), len(cols)))
        for a, r in enumerate(rows):
            for b, c in enumerate(cols):
                out[a, b] = self(r + c)
        return out


@dataclass
class TciDiagnostics:
    n_calls: int
    achieved_error: float  # relative to the largest pivot magnitude seen
    final_ranks: tuple[int, ...]
    sweeps_run: int
    converged: bool
    max_pivot_abs: float = 0.0


@dataclass
class PivotState:
    """Nested cross-interpolation state over a black box."""

    length: int
    local_dim: int
    row_sets: list[list[MultiIndex]]  # I_0..I_L, prefixes
    col_sets: list[list[MultiIndex]]  # J_0..J_L, suffixes from site l
    memo: _Memo
    max_pivot_abs: float
    error_history: list[float] = field(default_factory=list)

    @property
    def ranks(self) -> tuple[int, ...]:
        """Current rank at each of the L-1 bonds."""
        return tuple(len(self.row_sets[b + 1]) for b in range(self.length - 1))

    def pivot_matrix(self, bond: int) -> np.ndarray:
        return self.memo.matrix(self.row_sets[bond + 1], self.col_sets[bond + 1])

    def slice_tensor(self, site: int) -> np.ndarray:
        rows = self.row_sets[site]
        cols = self.col_sets[site + 1] if site + 1 <= self.length else [()]
        d = self.local_dim
        out = np.empty((len(rows), d, len(cols)))
        for a, r in enumerate(rows):
            for s in range(d):
                for b, c in enumerate(cols):
                    out[a, s, b] = self.memo(r + (s,) + c)
        return out

    def to_tensor_train(self) -> MatrixProductState:
        """Convert to T_l inv(P_l) form; the inverse is applied via solve."""
        sites = []
        for l in range(self.length):
            t = self.slice_tensor(l)
            if l < self.length - 1:
                p = self.pivot_matrix(l)
                _check_pivot_condition(p, l)
                rl, d, rr = t.shape
                mat = t.reshape(rl * d, rr)
                t = np.linalg.solve(p.T, mat.T).T.reshape(rl, d, rr)
            sites.append(t.astype(complex))
        return MatrixProductState(sites)


def _check_pivot_condition(p: np.ndarray, bond: int) -> None:
    if p.size == 0:
        raise PivotError(f"empty pivot matrix at bond {bond}")
    cond = np.linalg.cond(p)
    if not np.isfinite(cond) or cond > PIVOT_COND_LIMIT:
        raise PivotError(f"pivot matrix at bond {bond} is ill-conditioned (cond={cond:.2e})")


def tci_initialize(
    f: BlackBoxTensor,
    start_pivot: MultiIndex | Sequence[MultiIndex],
) -> PivotState:
    """Initial cross state from one or several full multi-index pivots.

    Extra pivots beyond the first are optional ergodicity seeds; they are
    kept only if they differ from every accepted pivot at both the first
    and last site (so all prefix/suffix families stay distinct) and leave
    every pivot matrix well conditioned. f must be nonzero on the first
    pivot.
    """
    pivots = _normalize_pivots(f, start_pivot)
    memo = _Memo(f)
    first = pivots[0]
    val = memo(first)
    if val == 0.0:
        raise InvalidInputError(f"start pivot {first} has zero value")

    state = PivotState(
        length=f.length,
        local_dim=f.local_dim,
        row_sets=[[first[:l]] for l in range(f.length + 1)],
        col_sets=[[first[l:]] for l in range(f.length + 1)],
        memo=memo,
        max_pivot_abs=abs(val),
    )
    for cand in pivots[1:]:
        _try_add_global_pivot(state, cand)
    return state


def _normalize_pivots(f: BlackBoxTensor, start_pivot) -> list[MultiIndex]:
    if len(start_pivot) > 0 and isinstance(start_pivot[0], (tuple, list)):
        pivots = [tuple(int(x) for x in p) for p in start_pivot]
    else:
        pivots = [tuple(int(x) for x in start_pivot)]
    for p in pivots:
        if len(p) != f.length:
            raise InvalidInputError(f"pivot length {len(p)} != {f.length}")
        if any(not 0 <= x < f.local_dim for x in p):
            raise InvalidInputError(f"pivot {p} outside local dimension {f.local_dim}")
    return pivots


def _try_add_global_pivot(state: PivotState, pivot: MultiIndex) -> bool:
    """Insert a full pivot at every cut if separation and conditioning allow."""
    if state.length == 1:
        return False
    for existing in state.row_sets[state.length]:
        if pivot[0] == existing[0] or pivot[-1] == existing[-1]:
            return False
    val = state.memo(pivot)
    if val == 0.0 or abs(val) < 1e-12 * state.max_pivot_abs:
        return False
    rows = [rs.copy() for rs in state.row_sets]
    cols = [cs.copy() for cs in state.col_sets]
    for l in range(state.length + 1):
        if 0 < l:
            rows[l].append(pivot[:l])
        if l < state.length:
            cols[l].append(pivot[l:])
    for b in range(state.length - 1):
        p = state.memo.matrix(rows[b + 1], cols[b + 1])
        cond = np.linalg.cond(p)
        if not np.isfinite(cond) or cond > PIVOT_COND_LIMIT:
            return False
    state.row_sets = rows
    state.col_sets = cols
    state.max_pivot_abs = max(state.max_pivot_abs, abs(val))
    return True


def tci_sweep(
    state: PivotState,
    f: BlackBoxTensor,
    tol: float = _DEFAULT_TOL,
    max_bond: int = 80,
) -> tuple[PivotState, float]:
    """One left-to-right plus right-to-left pass of two-site pivot updates.

    Returns the state (updated in place) and the largest rejected-pivot
    error over the bonds of the final half-sweep (absolute scale).
    """
    if f is not state.memo.box:
        raise InvalidInputError("sweep must use the black box the state was built on")
    n = state.length
    if n == 1:
        state.error_history.append(0.0)
        return state, 0.0
    for b in range(n - 1):
        _update_bond(state, b, tol, max_bond)
    back_errors = [_update_bond(state, b, tol, max_bond) for b in range(n - 2, -1, -1)]
    err = max(back_errors)
    state.error_history.append(err)
    return state, err


def _update_bond(state: PivotState, bond: int, tol: float, max_bond: int) -> float:
    """Full-pivot rank-revealing update of one bond; returns the error left behind."""
    d = state.local_dim
    left = state.row_sets[bond]
    right = state.col_sets[bond + 2] if bond + 2 <= state.length else [()]
    rows = [i + (s,) for i in left for s in range(d)]
    cols = [(s,) + j for s in range(d) for j in right]
    pi = state.memo.matrix(rows, cols)

    row_pos = {r: k for k, r in enumerate(rows)}
    col_pos = {c: k for k, c in enumerate(cols)}
    piv_rows = [row_pos[r] for r in state.row_sets[bond + 1]]
    piv_cols = [col_pos[c] for c in state.col_sets[bond + 1]]

    # Eliminate the existing pivots by rank-revealing LU, largest current
    # residual first. The ordered Schur updates keep element growth bounded,
    # which the equivalent solve against the full pivot matrix does not once
    # the pivot values span many orders of magnitude.
    resid = pi.copy()
    bond_scale = 0.0
    pending = list(zip(piv_rows, piv_cols))
    while pending:
        k_best = max(range(len(pending)), key=lambda k: abs(resid[pending[k]]))
        r, c = pending.pop(k_best)
        val = resid[r, c]
        bond_scale = max(bond_scale, abs(val))
        if abs(val) < 1e-15 * max(bond_scale, 1e-300):
            # pivot below the noise floor: nothing left to eliminate
            for rr, cc in pending + [(r, c)]:
                resid[rr, :] = 0.0
                resid[:, cc] = 0.0
            break
        resid -= np.outer(resid[:, c] / val, resid[r, :])
        resid[r, :] = 0.0
        resid[:, c] = 0.0

    rank = len(piv_rows)
    while rank < min(max_bond, len(rows), len(cols)):
        r, c = np.unravel_index(int(np.argmax(np.abs(resid))), resid.shape)
        err = abs(resid[r, c])
        if err <= tol * state.max_pivot_abs:
            break
        if err <= 1e-12 * max(bond_scale, err):
            break  # adding this pivot would make the pivot matrix singular
        state.row_sets[bond + 1].append(rows[r])
        state.col_sets[bond + 1].append(cols[c])
        state.max_pivot_abs = max(state.max_pivot_abs, err)
        bond_scale = max(bond_scale, err)
        resid -= np.outer(resid[:, c] / resid[r, c], resid[r, :])
        resid[r, :] = 0.0
        resid[:, c] = 0.0
        rank += 1
    return float(np.max(np.abs(resid))) if resid.size else 0.0


def tci_run(
    f: BlackBoxTensor,
    tol: float = _DEFAULT_TOL,
    max_bond: int = 80,
    max_sweeps: int = 20,
    start_pivot: MultiIndex | Sequence[MultiIndex] = (),
) -> tuple[MatrixProductState, TciDiagnostics]:
    """Cross-interpolate f into a tensor train.

    Deterministic: identical inputs produce identical pivot sequences and
    call counts. If the pivot error has not dropped below tol (relative to
    the largest pivot magnitude) within max_sweeps, the result is returned
    with the convergence flag down.
    """
    calls_before = f.call_count
    if not start_pivot:
        raise InvalidInputError("tci_run needs a start pivot")
    state = tci_initialize(f, start_pivot)
    converged = False
    sweeps = 0
    err = np.inf
    ranks = state.ranks
    for _ in range(max_sweeps):
        state, err = tci_sweep(state, f, tol=tol, max_bond=max_bond)
        sweeps += 1
        grew = state.ranks != ranks
        ranks = state.ranks
        # While ranks grow, neighboring index sets lag behind and the slice
        # errors underestimate the true residual, so only a stagnant sweep
        # counts. A stagnant sweep is also a fixed point of the accretive
        # update, so stop either way.
        if not grew:
            converged = err <= tol * state.max_pivot_abs
            break
    tt = state.to_tensor_train()
    diag = TciDiagnostics(
        n_calls=f.call_count - calls_before,
        achieved_error=float(err / state.max_pivot_abs) if state.max_pivot_abs else 0.0,
        final_ranks=state.ranks,
        sweeps_run=sweeps,
        converged=converged,
        max_pivot_abs=state.max_pivot_abs,
    )
    return tt, diag


def interpolation_error_estimate(
    state: PivotState,
    f: BlackBoxTensor,
    n_samples: int = 64,
    rng_seed: int = 0,
) -> float:
    """Out-of-sample max |f - tt| over seeded pseudo-random multi-indices.

    Evaluates f directly (bypassing the state's memo) so the state is left
    untouched.
    """
    if n_samples < 1:
        raise InvalidInputError("need at least one sample")
    tt = state.to_tensor_train()
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(n_samples):
        idx = tuple(int(x) for x in rng.integers(0, state.local_dim, size=state.length))
        worst = max(worst, abs(f(idx) - complex(tt.amplitude(idx)).real))
    return worst
