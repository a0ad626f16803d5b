"""HTTP service wrapping the simulation core.

Endpoints map one-to-one onto the batch operations: /simulate runs a
scenario and returns the report plus the sampled series, /compare forces all
backends and reports whether they agree within tolerance, /sweep scans one
parameter on the closed-form fast path, /calibrate recovers the dephasing
constant matching a target fidelity.  File emission is a client concern; the
service never writes to disk.
"""

from __future__ import annotations

import dataclasses
import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..dynamics import TimeSeries
from ..errors import QstsimError
from ..hamiltonians import EFFECTIVE_INDEX
from ..model import reference_params
from ..scenario import (
    _P_COLUMNS,
    ScenarioConfig,
    calibrate_dephasing,
    config_from_dict,
    run_scenario_with_series,
    sweep,
)
from .schemas import (
    CalibrateRequest,
    CalibrateResponse,
    CompareRequest,
    CompareResponse,
    HealthResponse,
    RunReportModel,
    ScenarioModel,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
    TimeSeriesModel,
)

app = FastAPI(
    title="qstsim",
    description="Cavity-to-nuclear-spin state transfer simulation service",
    version=__version__,
)


@app.exception_handler(QstsimError)
async def _domain_error(request: Request, exc: QstsimError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


def _to_config(model: ScenarioModel) -> ScenarioConfig:
    return config_from_dict(model.model_dump())


def _series_model(theta: float, series: TimeSeries) -> TimeSeriesModel:
    columns = {
        name: [float(v) for v in series.populations[:, EFFECTIVE_INDEX[key]]]
        for name, key in _P_COLUMNS
    }
    return TimeSeriesModel(
        backend=series.backend,
        theta=theta,
        times=[float(t) for t in series.times],
        populations=columns,
        fidelity=None if series.fidelity is None else [float(v) for v in series.fidelity],
        fidelity_renormalized=(
            None
            if series.fidelity_renormalized is None
            else [float(v) for v in series.fidelity_renormalized]
        ),
    )


def _run(config: ScenarioConfig, include_series: bool):
    report, all_series = run_scenario_with_series(config)
    series = []
    if include_series:
        for (i, _backend), s in all_series.items():
            series.append(_series_model(config.theta_list[i], s))
    return report, series


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/configs/reference", response_model=ScenarioModel)
def reference_config() -> ScenarioModel:
    params = dataclasses.asdict(reference_params())
    return ScenarioModel(
        params=params,
        backend="all",
        theta_list=[math.pi / 6, math.pi / 4, math.pi / 3, 75 * math.pi / 180],
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest) -> SimulateResponse:
    config = _to_config(request.config)
    report, series = _run(config, request.include_series)
    return SimulateResponse(report=RunReportModel(**report.to_dict()), series=series)


@app.post("/compare", response_model=CompareResponse)
def compare(request: CompareRequest) -> CompareResponse:
    config = dataclasses.replace(_to_config(request.config), backend="all")
    report, series = _run(config, request.include_series)
    max_delta = report.max_delta()
    return CompareResponse(
        report=RunReportModel(**report.to_dict()),
        series=series,
        tolerance=request.tolerance,
        within_tolerance=max_delta <= request.tolerance,
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep_endpoint(request: SweepRequest) -> SweepResponse:
    config = _to_config(request.config)
    rows = sweep(config, request.axis, request.start, request.stop, request.steps)
    return SweepResponse(
        axis=request.axis, rows=[SweepRowModel(**row.to_dict()) for row in rows]
    )


@app.post("/calibrate", response_model=CalibrateResponse)
def calibrate(request: CalibrateRequest) -> CalibrateResponse:
    config = _to_config(request.config)
    result = calibrate_dephasing(
        config,
        target_fidelity=request.target_fidelity,
        target_theta=request.target_theta,
    )
    payload = result.to_dict()
    payload["fidelities"] = {f"{k:.10g}": v for k, v in result.fidelities.items()}
    return CalibrateResponse(**payload)
