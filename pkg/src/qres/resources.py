"""Quantum-resource quantifiers and their sampled tensor representations.

Two measures are provided, both written as a full sum over a degree-L
tensor that is sampled by cross interpolation and then contracted:

* Stabilizer Renyi-2 entropy: -log2(2^-L sum_P <P>^4) over the 4^L Pauli
  strings. Zero exactly on stabilizer states.
* Relative entropy of coherence: for a pure state, the Shannon entropy of
  squared amplitudes in the computational basis, -sum |c|^2 log2 |c|^2.
  As a plain sum the integrand is nonpositive, so the contracted value is
  negated to give the (nonnegative) coherence.

Brute-force enumerations of the same sums serve as oracles at small sizes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .cache import AmplitudeEvaluator, PauliEnvEvaluator
from .errors import InvalidInputError, ResourceLimitError
from .mps import MatrixProductState, product_mps
from .pauli import pauli_expectation_dense
from .tci import BlackBoxTensor, TciDiagnostics, tci_run

_NORM_TOL = 1e-10
_VALUE_FLOOR = 1e-154  # below this, powers and logs are defined as exactly 0
_CLAMP = 1e-9

SRE_BRUTEFORCE_MAX_SITES = 8
REC_BRUTEFORCE_MAX_SITES = 20

T_LOCAL_STATE = np.array([1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(2.0)


@dataclass
class TciParams:
    """Knobs passed through to the cross-interpolation run."""

    tol: float = 1e-8
    max_bond: int = 80
    max_sweeps: int = 24
    use_cache: bool = True
    cache_capacity: int = 65536


@dataclass
class ResourceReport:
    measure_name: str  # "SRE2" or "REC"
    value: float
    input_chi: int
    tci_xi: int
    n_calls: int
    achieved_error: float
    wall_time: float
    raw_value: float = 0.0
    converged: bool = True
    tci_ranks: tuple[int, ...] = ()
    sweeps: int = 0
    cache_stats: dict = field(default_factory=dict)


def _require_normalized(psi: MatrixProductState) -> None:
    if abs(psi.norm() - 1.0) > _NORM_TOL:
        raise InvalidInputError(f"state not normalized: |psi| = {psi.norm():.3e}")


# -- sampled tensors -------------------------------------------------------


def sre2_blackbox(
    psi: MatrixProductState, use_cache: bool = True, cache_capacity: int = 65536
) -> BlackBoxTensor:
    """Degree-L, d=4 tensor: Pauli-label tuple -> <psi|P|psi>^4."""
    _require_normalized(psi)
    if psi.phys_dim != 2:
        raise InvalidInputError("SRE needs a spin-1/2 state")
    evaluator = PauliEnvEvaluator(psi, use_cache=use_cache, capacity=cache_capacity)

    def fn(codes):
        x = evaluator(codes)
        if abs(x) < _VALUE_FLOOR:
            return 0.0
        return x**4

    box = BlackBoxTensor(psi.length, 4, fn)
    box.evaluator = evaluator  # exposes cache statistics
    return box


def rec_blackbox(
    psi: MatrixProductState, use_cache: bool = True, cache_capacity: int = 65536
) -> BlackBoxTensor:
    """Degree-L, d=2 tensor: basis configuration S -> |<S|psi>|^2 log2 |<S|psi>|^2."""
    _require_normalized(psi)
    evaluator = AmplitudeEvaluator(psi, use_cache=use_cache, capacity=cache_capacity)

    def fn(config):
        amp = evaluator(config)
        p = abs(amp) ** 2
        if p < _VALUE_FLOOR:
            return 0.0
        return p * np.log2(p)

    box = BlackBoxTensor(psi.length, 2, fn)
    box.evaluator = evaluator
    return box


# -- start pivots ----------------------------------------------------------


def sre2_start_pivots(length: int):
    """All-identity first (value exactly 1), then the uniform X/Y/Z strings.

    The uniform strings reseed sectors of the Pauli tensor that two-site
    pivot moves cannot reach from the identity on states with exact
    stabilizer structure; the engine drops any that are zero-valued or
    would spoil pivot conditioning.
    """
    return [(code,) * length for code in range(4)]


def rec_start_pivots(psi: MatrixProductState, seed: int = 0):
    """Dominant configuration by a greedy marginal sweep, plus its global
    spin flip (covers symmetry-broken doublets such as GHZ branches)."""
    config = dominant_configuration(psi, seed=seed)
    flipped = tuple(psi.phys_dim - 1 - s for s in config)
    return [config, flipped] if flipped != config else [config]


def dominant_configuration(psi: MatrixProductState, seed: int = 0) -> tuple[int, ...]:
    """Greedy argmax of marginal probability, site by site.

    Works on the right-canonical form, where the running prefix norm is the
    marginal probability of that prefix. Falls back to a seeded random
    search in the (unreachable for normalized states) case of underflow.
    """
    canon = psi.canonicalize(0)
    vec = np.ones(1, dtype=complex)
    config: list[int] = []
    for t in canon.sites:
        branches = [vec @ t[:, s, :] for s in range(psi.phys_dim)]
        weights = [np.linalg.norm(b) for b in branches]
        s_best = int(np.argmax(weights))
        config.append(s_best)
        vec = branches[s_best]
    if abs(vec[0]) >= _VALUE_FLOOR:
        return tuple(config)
    rng = np.random.default_rng(seed)
    best, best_amp = None, 0.0
    for _ in range(256):
        cand = tuple(int(x) for x in rng.integers(0, psi.phys_dim, size=psi.length))
        amp = abs(psi.amplitude(cand))
        if amp > best_amp:
            best, best_amp = cand, amp
    if best is None or best_amp < _VALUE_FLOOR:
        raise InvalidInputError("could not find a configuration with nonzero amplitude")
    return best


# -- measures over the TCI pipeline ------------------------------------------


def sre2(psi: MatrixProductState, tci_params: TciParams | None = None) -> ResourceReport:
    """Stabilizer Renyi-2 entropy through the sampling pipeline."""
    params = tci_params or TciParams(max_bond=80)
    t0 = time.perf_counter()
    box = sre2_blackbox(psi, use_cache=params.use_cache, cache_capacity=params.cache_capacity)
    tt, diag = tci_run(
        box,
        tol=params.tol,
        max_bond=params.max_bond,
        max_sweeps=params.max_sweeps,
        start_pivot=sre2_start_pivots(psi.length),
    )
    total = tt.sum_all().real / 2.0**psi.length
    raw = -np.log2(total) if total > 0 else np.inf
    value = _clamp_small_negative(raw)
    return _report("SRE2", value, raw, psi, box, diag, time.perf_counter() - t0)


def rec(
    psi: MatrixProductState,
    tci_params: TciParams | None = None,
    start_pivot=None,
    seed: int = 0,
) -> ResourceReport:
    """Relative entropy of coherence through the sampling pipeline."""
    params = tci_params or TciParams(max_bond=40)
    t0 = time.perf_counter()
    box = rec_blackbox(psi, use_cache=params.use_cache, cache_capacity=params.cache_capacity)
    pivots = start_pivot if start_pivot is not None else rec_start_pivots(psi, seed=seed)
    tt, diag = tci_run(
        box,
        tol=params.tol,
        max_bond=params.max_bond,
        max_sweeps=params.max_sweeps,
        start_pivot=pivots,
    )
    raw = -tt.sum_all().real
    value = _clamp_small_negative(raw)
    return _report("REC", value, raw, psi, box, diag, time.perf_counter() - t0)


def _clamp_small_negative(raw: float) -> float:
    if -_CLAMP <= raw < 0.0:
        return 0.0
    return raw


def _report(
    name: str,
    value: float,
    raw: float,
    psi: MatrixProductState,
    box: BlackBoxTensor,
    diag: TciDiagnostics,
    wall: float,
) -> ResourceReport:
    return ResourceReport(
        measure_name=name,
        value=float(value),
        input_chi=psi.max_bond,
        tci_xi=max(diag.final_ranks) if diag.final_ranks else 1,
        n_calls=diag.n_calls,
        achieved_error=diag.achieved_error,
        wall_time=wall,
        raw_value=float(raw),
        converged=diag.converged,
        tci_ranks=diag.final_ranks,
        sweeps=diag.sweeps_run,
        cache_stats=box.evaluator.cache_stats(),
    )


# -- brute-force oracles -----------------------------------------------------


def sre2_bruteforce(psi_dense: np.ndarray) -> float:
    """Exhaustive 4^L enumeration of the Pauli sum; oracle and verify path."""
    vec = np.asarray(psi_dense, dtype=complex).reshape(-1)
    length = int(round(np.log2(vec.size)))
    if 2**length != vec.size:
        raise InvalidInputError(f"vector length {vec.size} is not a power of 2")
    if length > SRE_BRUTEFORCE_MAX_SITES:
        raise ResourceLimitError(
            f"SRE brute force capped at {SRE_BRUTEFORCE_MAX_SITES} sites, got {length}"
        )
    if abs(np.linalg.norm(vec) - 1.0) > _NORM_TOL:
        raise InvalidInputError("state not normalized")
    total = 0.0
    for codes in iter_product(range(4), repeat=length):
        total += pauli_expectation_dense(codes, vec) ** 4
    return float(-np.log2(total / 2.0**length))


def rec_bruteforce(psi_dense: np.ndarray) -> float:
    """Exhaustive 2^L enumeration of the coherence sum."""
    vec = np.asarray(psi_dense, dtype=complex).reshape(-1)
    length = int(round(np.log2(vec.size)))
    if 2**length != vec.size:
        raise InvalidInputError(f"vector length {vec.size} is not a power of 2")
    if length > REC_BRUTEFORCE_MAX_SITES:
        raise ResourceLimitError(
            f"REC brute force capped at {REC_BRUTEFORCE_MAX_SITES} sites, got {length}"
        )
    if abs(np.linalg.norm(vec) - 1.0) > _NORM_TOL:
        raise InvalidInputError("state not normalized")
    probs = np.abs(vec) ** 2
    probs = probs[probs > _VALUE_FLOOR]
    return float(-np.sum(probs * np.log2(probs)))


# -- reference states ---------------------------------------------------------


def make_ghz_mps(L: int) -> MatrixProductState:
    """Equal-weight two-branch superposition as a bond-2 MPS.

    The per-site weight 2^(-1/2L) spreads the overall 1/sqrt(2) evenly so
    boundary tensors stay well scaled at any L.
    """
    if L < 2:
        raise InvalidInputError(f"GHZ needs L >= 2, got {L}")
    a = 2.0 ** (-1.0 / (2.0 * L))
    first = np.zeros((1, 2, 2), dtype=complex)
    first[0, 0, 0] = a
    first[0, 1, 1] = a
    middle = np.zeros((2, 2, 2), dtype=complex)
    middle[0, 0, 0] = a
    middle[1, 1, 1] = a
    last = np.zeros((2, 2, 1), dtype=complex)
    last[0, 0, 0] = a
    last[1, 1, 0] = a
    return MatrixProductState([first] + [middle] * (L - 2) + [last])


def make_t_state_mps(L: int) -> MatrixProductState:
    """Product of single-qubit magic states, one minimal non-stabilizer state
    per site (Pauli spectrum 1, 1/sqrt2, 1/sqrt2, 0)."""
    return product_mps([T_LOCAL_STATE] * L)
