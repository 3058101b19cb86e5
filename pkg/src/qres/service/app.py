"""HTTP endpoints wrapping the sweep runner.

Domain errors (bad sizes, oracle caps, missing cached states under
no_build) map to 400; request-shape errors are FastAPI's usual 422.
Non-convergence is not an HTTP error: responses carry flags and the
client decides what to do with them.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import QresError
from ..runner import run_bench, run_ground_state, run_measure, run_verify
from .schemas import (
    BenchRequest,
    BenchResponse,
    GroundStateRequest,
    GroundStateResponse,
    HealthResponse,
    MeasureRequest,
    MeasureResponse,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="qres",
        version=__version__,
        description="Quantum-resource quantifiers via tensor cross interpolation",
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/ground-state", response_model=GroundStateResponse)
    def ground_state(req: GroundStateRequest) -> GroundStateResponse:
        return _guard(run_ground_state, req)

    @app.post("/v1/measure", response_model=MeasureResponse)
    def measure(req: MeasureRequest) -> MeasureResponse:
        return _guard(run_measure, req)

    @app.post("/v1/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        return _guard(run_verify, req)

    @app.post("/v1/bench", response_model=BenchResponse)
    def bench(req: BenchRequest) -> BenchResponse:
        return _guard(run_bench, req)

    return app


def _guard(fn, req):
    try:
        return fn(req)
    except QresError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


app = create_app()
