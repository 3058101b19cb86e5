"""Sweep orchestration shared by the HTTP service and the CLI.

Each (size, h) point is an independent job: build or load the ground
state, run the requested quantifier, and emit one row. Jobs may run in a
thread pool; rows are collected and returned in sorted point order so the
output is deterministic regardless of completion order.

Ground states are cached as MPS snapshots keyed by (model, size, h,
chi_max, solver) in the cache directory (QRES_CACHE_DIR wins over the
request's cache_dir), with a JSON sidecar holding the energy and solver
metadata.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dmrg import dmrg_ground_state
from .errors import InvalidInputError, QresError, ResourceLimitError
from .lanczos import ed_ground_state
from .mps import MatrixProductState, mps_from_dense
from .pauli import PauliString
from .resources import (
    REC_BRUTEFORCE_MAX_SITES,
    SRE_BRUTEFORCE_MAX_SITES,
    TciParams,
    make_ghz_mps,
    rec,
    rec_blackbox,
    rec_bruteforce,
    sre2,
    sre2_blackbox,
    sre2_bruteforce,
)
from .service.schemas import (
    BenchRequest,
    BenchResponse,
    BenchRow,
    GroundStateRequest,
    GroundStateResponse,
    GroundStateRow,
    LatencyStats,
    MeasureRequest,
    MeasureResponse,
    MeasureRow,
    VerifyRequest,
    VerifyResponse,
    VerifyRow,
)
from .snapshot import load_mps, save_mps
from .spin_models import SpinModel, build_tfim_1d, build_tfim_2d
from .tci import BlackBoxTensor

CACHE_ENV_VAR = "QRES_CACHE_DIR"
DEFAULT_XI = {"sre2": 80, "rec": 40}
VERIFY_SITE_CAPS = {"sre2": SRE_BRUTEFORCE_MAX_SITES, "rec": 14}
_ED_SITE_CAP = 16  # beyond this the dense solver is impractical; use dmrg
_SNAPSHOT_SVD_TOL = 1e-13


def resolve_cache_dir(requested: str | None) -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    path = Path(env) if env else Path(requested) if requested else Path(".qres-cache")
    path.mkdir(parents=True, exist_ok=True)
    return path


def parse_size(token: str) -> tuple[int, ...]:
    parts = token.lower().split("x")
    dims = tuple(int(p) for p in parts)
    if any(d < 2 for d in dims) or len(dims) > 2:
        raise InvalidInputError(f"bad size token {token!r}")
    return dims


def build_model(model_kind: str, size_token: str, h: float) -> SpinModel:
    dims = parse_size(size_token)
    if model_kind == "ising1d":
        if len(dims) != 1:
            raise InvalidInputError(f"1D model takes a single length, got {size_token!r}")
        return build_tfim_1d(dims[0], h)
    if model_kind == "ising2d":
        if len(dims) != 2:
            raise InvalidInputError(f"2D model takes WxH, got {size_token!r}")
        return build_tfim_2d(dims[0], dims[1], h)
    raise InvalidInputError(f"unknown model {model_kind!r}")


def mps_model_energy(psi: MatrixProductState, model: SpinModel) -> float:
    """<psi|H|psi> as a sum of Pauli-string expectations."""
    n = model.n_sites
    energy = 0.0
    for i, j in model.bonds:
        labels = ["I"] * n
        labels[i] = labels[j] = "Z"
        energy -= psi.pauli_expectation(PauliString(labels))
    if model.h != 0.0:
        for i in range(n):
            labels = ["I"] * n
            labels[i] = "X"
            energy -= model.h * psi.pauli_expectation(PauliString(labels))
    return energy


@dataclass
class PreparedState:
    psi: MatrixProductState
    energy: float
    solver: str
    snapshot: Path | None
    from_cache: bool
    runtime_s: float


def _snapshot_paths(cache_dir: Path, model_kind: str, size: str, h: float, chi: int, solver: str):
    stem = f"{model_kind}_{size}_h{h:.10g}_chi{chi}_{solver}"
    return cache_dir / f"{stem}.mps", cache_dir / f"{stem}.json"


def prepare_state(
    model_kind: str,
    size_token: str,
    h: float,
    solver: str,
    chi_max: int,
    cache_dir: Path,
    no_build: bool = False,
    use_cache_files: bool = True,
) -> PreparedState:
    """Load a cached ground state or build one with the requested solver."""
    model = build_model(model_kind, size_token, h)
    snap, meta = _snapshot_paths(cache_dir, model_kind, size_token, h, chi_max, solver)
    if use_cache_files and snap.exists() and meta.exists():
        psi = load_mps(snap)
        info = json.loads(meta.read_text())
        return PreparedState(psi, float(info["energy"]), solver, snap, True, 0.0)
    if no_build:
        raise InvalidInputError(
            f"no cached state for {model_kind} {size_token} h={h:g} (--no-build set)"
        )

    t0 = time.perf_counter()
    if solver == "ghz-analytic":
        psi = make_ghz_mps(model.n_sites)
        energy = mps_model_energy(psi, model)
    elif solver == "ed":
        if model.n_sites > _ED_SITE_CAP:
            raise ResourceLimitError(
                f"ED capped at {_ED_SITE_CAP} sites; use dmrg for {model.label()}"
            )
        result = ed_ground_state(model)
        psi = mps_from_dense(result.state, max_bond=chi_max, svd_tol=_SNAPSHOT_SVD_TOL)
        psi = psi.normalized()
        energy = result.energy
    elif solver == "dmrg":
        result = dmrg_ground_state(model, max_bond=chi_max)
        psi, energy = result.psi, result.energy
    else:
        raise InvalidInputError(f"unknown solver {solver!r}")
    runtime = time.perf_counter() - t0

    if use_cache_files:
        save_mps(psi, snap)
        meta.write_text(
            json.dumps(
                {
                    "model": model_kind,
                    "size": size_token,
                    "h": h,
                    "chi_max": chi_max,
                    "solver": solver,
                    "energy": energy,
                    "max_bond": psi.max_bond,
                }
            )
        )
    return PreparedState(psi, energy, solver, snap if use_cache_files else None, False, runtime)


def _points(req) -> list[tuple[str, float]]:
    return sorted(
        ((size, h) for size in req.sizes for h in req.h_values),
        key=lambda p: (parse_size(p[0]), p[1]),
    )


def _run_jobs(points, worker, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, points))
    return [worker(p) for p in points]


# -- subcommand implementations ----------------------------------------------


def run_ground_state(req: GroundStateRequest) -> GroundStateResponse:
    cache_dir = resolve_cache_dir(req.cache_dir)

    def worker(point):
        size, h = point
        try:
            prep = prepare_state(
                req.model, size, h, req.solver, req.chi_max, cache_dir, req.no_build
            )
            return GroundStateRow(
                size=size,
                h=h,
                energy=prep.energy,
                chi_used=prep.psi.max_bond,
                solver=prep.solver,
                runtime_s=prep.runtime_s,
                snapshot=str(prep.snapshot) if prep.snapshot else None,
                from_cache=prep.from_cache,
            )
        except QresError as exc:
            return GroundStateRow(
                size=size, h=h, energy=float("nan"), chi_used=0,
                solver=req.solver, runtime_s=0.0, status=f"error: {exc}",
            )

    rows = _run_jobs(_points(req), worker, req.threads)
    return GroundStateResponse(rows=rows, cache_dir=str(cache_dir))


def _measure_point(req: MeasureRequest, size: str, h: float, cache_dir: Path) -> MeasureRow:
    prep = prepare_state(req.model, size, h, req.solver, req.chi_max, cache_dir, req.no_build)
    xi = req.xi_max or DEFAULT_XI[req.measure]
    params = TciParams(tol=req.tci_tol, max_bond=xi)
    t0 = time.perf_counter()
    if req.measure == "sre2":
        report = sre2(prep.psi, params)
    else:
        report = rec(prep.psi, params, seed=req.seed)
    runtime = time.perf_counter() - t0
    n_sites = int(np.prod(parse_size(size)))
    return MeasureRow(
        measure=req.measure,
        size=size,
        h=h,
        value=report.value,
        chi=report.input_chi,
        xi=report.tci_xi,
        n_calls=report.n_calls,
        achieved_error=report.achieved_error,
        runtime_s=runtime,
        converged=report.converged,
        raw_value=report.raw_value,
        n_sites=n_sites,
    )


def run_measure(req: MeasureRequest) -> MeasureResponse:
    cache_dir = resolve_cache_dir(req.cache_dir)
    rows = _run_jobs(_points(req), lambda p: _measure_point(req, p[0], p[1], cache_dir), req.threads)
    return MeasureResponse(rows=rows, all_converged=all(r.converged for r in rows))


def run_verify(req: VerifyRequest) -> VerifyResponse:
    cache_dir = resolve_cache_dir(req.cache_dir)
    cap = VERIFY_SITE_CAPS[req.measure]
    for size in req.sizes:
        if int(np.prod(parse_size(size))) > cap:
            raise InvalidInputError(
                f"size {size} exceeds the {req.measure} oracle cap of {cap} sites"
            )

    def worker(point):
        size, h = point
        row = _measure_point(req, size, h, cache_dir)
        prep = prepare_state(req.model, size, h, req.solver, req.chi_max, cache_dir)
        dense = prep.psi.to_dense().reshape(-1)
        oracle = sre2_bruteforce(dense) if req.measure == "sre2" else rec_bruteforce(dense)
        diff = abs(row.value - oracle)
        return VerifyRow(
            measure=req.measure,
            size=size,
            h=h,
            value_tci=row.value,
            value_oracle=oracle,
            abs_diff=diff,
            within_tol=diff <= req.tolerance,
        )

    rows = _run_jobs(_points(req), worker, req.threads)
    max_dev = max((r.abs_diff for r in rows), default=0.0)
    return VerifyResponse(
        rows=rows,
        max_deviation=max_dev,
        tolerance=req.tolerance,
        passed=all(r.within_tol for r in rows),
    )


def run_bench(req: BenchRequest) -> BenchResponse:
    cache_dir = resolve_cache_dir(req.cache_dir)
    xi = req.xi_max or DEFAULT_XI[req.measure]
    rows: list[BenchRow] = []

    # calls vs system size at fixed rank cap
    for size in req.sizes:
        for h in req.h_values[:1]:
            row = _measure_point(req, size, h, cache_dir)
            rows.append(_bench_row("vary-L", req.measure, size, row, xi))

    # calls vs rank cap at the largest size
    big = req.sizes[-1]
    for cap in req.xi_schedule:
        sub = req.model_copy(update={"xi_max": cap})
        row = _measure_point(sub, big, req.h_values[0], cache_dir)
        rows.append(_bench_row("vary-xi", req.measure, big, row, cap))

    latency = _latency_stats(req, cache_dir)
    return BenchResponse(
        rows=rows,
        latency=latency,
        all_within_budget=all(r.within_budget for r in rows),
    )


def _bench_row(mode: str, measure: str, size: str, row: MeasureRow, xi_cap: int) -> BenchRow:
    n_sites = int(np.prod(parse_size(size)))
    d = 4 if measure == "sre2" else 2
    budget = 10 * n_sites * d * max(row.xi, 1) ** 2
    return BenchRow(
        mode=mode,
        measure=measure,
        size=size,
        n_sites=n_sites,
        xi_cap=xi_cap,
        xi_achieved=row.xi,
        n_calls=row.n_calls,
        call_budget=budget,
        within_budget=row.n_calls <= budget,
    )


def _latency_stats(req: BenchRequest, cache_dir: Path) -> LatencyStats:
    """Per-call latency with and without the prefix cache on one point."""
    size, h = req.sizes[-1], req.h_values[0]
    prep = prepare_state(req.model, size, h, req.solver, req.chi_max, cache_dir)
    rng = np.random.default_rng(req.seed)
    n_sites = prep.psi.length
    d = 4 if req.measure == "sre2" else 2
    # prefix-sharing workload: random blocks with a common leading segment
    indices = []
    while len(indices) < req.latency_samples:
        head = tuple(int(x) for x in rng.integers(0, d, size=max(1, n_sites // 2)))
        for _ in range(min(16, req.latency_samples - len(indices))):
            tail = tuple(int(x) for x in rng.integers(0, d, size=n_sites - len(head)))
            indices.append(head + tail)

    def timed(use_cache: bool):
        box = _make_box(req.measure, prep.psi, use_cache)
        times = np.empty(len(indices))
        values = np.empty(len(indices))
        for k, idx in enumerate(indices):
            t0 = time.perf_counter_ns()
            values[k] = box(idx)
            times[k] = (time.perf_counter_ns() - t0) / 1000.0
        return times, values

    cached_t, cached_v = timed(True)
    plain_t, plain_v = timed(False)
    return LatencyStats(
        samples=len(indices),
        cached_mean_us=float(cached_t.mean()),
        cached_p50_us=float(np.percentile(cached_t, 50)),
        cached_p90_us=float(np.percentile(cached_t, 90)),
        uncached_mean_us=float(plain_t.mean()),
        uncached_p50_us=float(np.percentile(plain_t, 50)),
        uncached_p90_us=float(np.percentile(plain_t, 90)),
        values_identical_to=float(np.max(np.abs(cached_v - plain_v))),
    )


def _make_box(measure: str, psi: MatrixProductState, use_cache: bool) -> BlackBoxTensor:
    if measure == "sre2":
        return sre2_blackbox(psi, use_cache=use_cache)
    return rec_blackbox(psi, use_cache=use_cache)
