"""Request and response models shared by the HTTP service and the CLI client."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

ModelKind = Literal["ising1d", "ising2d"]
SolverKind = Literal["ed", "dmrg", "ghz-analytic"]
MeasureKind = Literal["sre2", "rec"]


class RunRequest(BaseModel):
    """Common knobs for a parameter sweep over (size, h) points."""

    model: ModelKind = "ising1d"
    sizes: list[str] = Field(default_factory=lambda: ["8"], min_length=1)
    h_values: list[float] = Field(default_factory=lambda: [0.5], min_length=1)
    solver: SolverKind = "ed"
    chi_max: int = Field(default=64, ge=1)
    xi_max: Optional[int] = Field(default=None, ge=1)  # per-measure default if unset
    tci_tol: float = Field(default=1e-8, gt=0)
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    no_build: bool = False
    cache_dir: Optional[str] = None  # overridden by QRES_CACHE_DIR if set

    @field_validator("h_values")
    @classmethod
    def _nonnegative_fields(cls, values: list[float]) -> list[float]:
        if any(h < 0 for h in values):
            raise ValueError("field values must be nonnegative")
        return values

    @field_validator("sizes")
    @classmethod
    def _valid_sizes(cls, sizes: list[str]) -> list[str]:
        for s in sizes:
            parts = s.lower().split("x")
            if not all(p.isdigit() and int(p) >= 2 for p in parts) or len(parts) > 2:
                raise ValueError(f"bad size token {s!r}: expected e.g. '8' or '3x4'")
        return sizes


class GroundStateRequest(RunRequest):
    pass


class GroundStateRow(BaseModel):
    size: str
    h: float
    energy: float
    chi_used: int
    solver: str
    runtime_s: float
    status: str = "ok"
    snapshot: Optional[str] = None
    from_cache: bool = False


class GroundStateResponse(BaseModel):
    rows: list[GroundStateRow]
    cache_dir: str


class MeasureRequest(RunRequest):
    measure: MeasureKind = "sre2"


class MeasureRow(BaseModel):
    measure: str
    size: str
    h: float
    value: float
    chi: int
    xi: int
    n_calls: int
    achieved_error: float
    runtime_s: float
    converged: bool = True
    raw_value: float = 0.0
    n_sites: int = 0


class MeasureResponse(BaseModel):
    rows: list[MeasureRow]
    all_converged: bool


class VerifyRequest(MeasureRequest):
    tolerance: float = Field(default=1e-6, gt=0)


class VerifyRow(BaseModel):
    measure: str
    size: str
    h: float
    value_tci: float
    value_oracle: float
    abs_diff: float
    within_tol: bool


class VerifyResponse(BaseModel):
    rows: list[VerifyRow]
    max_deviation: float
    tolerance: float
    passed: bool


class BenchRequest(MeasureRequest):
    xi_schedule: list[int] = Field(default_factory=lambda: [2, 4, 8, 16, 32])
    latency_samples: int = Field(default=512, ge=1)


class BenchRow(BaseModel):
    mode: Literal["vary-L", "vary-xi"]
    measure: str
    size: str
    n_sites: int
    xi_cap: int
    xi_achieved: int
    n_calls: int
    call_budget: int
    within_budget: bool


class LatencyStats(BaseModel):
    samples: int
    cached_mean_us: float
    cached_p50_us: float
    cached_p90_us: float
    uncached_mean_us: float
    uncached_p50_us: float
    uncached_p90_us: float
    values_identical_to: float


class BenchResponse(BaseModel):
    rows: list[BenchRow]
    latency: LatencyStats
    all_within_budget: bool


class HealthResponse(BaseModel):
    status: str
    version: str
