"""Pydantic request/response models for the simulation service."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class ParamsModel(BaseModel):
    """Wire form of the physical parameter record."""

    model_config = ConfigDict(extra="forbid")

    kappa: float = 0.0
    h_flip: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    theta: float | str = math.pi / 6
    k1: float = 0.0
    k2: float = 0.0
    omega_nv: float | None = None
    omega_c: float | None = None
    omega_0: float | None = None
    g_coupling: float | None = None
    lambda_drive: float | None = None
    omega_dressed: float | None = None
    eta: float | None = None
    omega_c13: float | None = None
    c_par: float | None = None
    c_perp: float | None = None
    theta_axis: float | None = None
    b_field: float | None = None


class ScenarioModel(BaseModel):
    """Wire form of a scenario configuration."""

    model_config = ConfigDict(extra="forbid")

    params: ParamsModel
    backend: Literal["analytic", "schrodinger", "lindblad", "nonhermitian", "all"] = "analytic"
    theta_list: list[float | str] = Field(default_factory=lambda: [math.pi / 6])
    t_final: float | None = None
    sample_count: int = 201
    format: Literal["csv", "json"] = "csv"
    channel_type: Literal["lowering", "dephasing"] = "lowering"
    fixed_step: int | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12


class TimeSeriesModel(BaseModel):
    """One sampled evolution; populations are named columns."""

    backend: str
    theta: float
    times: list[float]
    populations: dict[str, list[float]]
    fidelity: list[float] | None = None
    fidelity_renormalized: list[float] | None = None


class BackendResultModel(BaseModel):
    backend: str
    transfer_time: float
    population_min: float
    population_max: float
    fidelity_at_transfer: float | None = None
    fidelity_renormalized_at_transfer: float | None = None


class ThetaReportModel(BaseModel):
    theta: float
    results: list[BackendResultModel]
    deltas: dict[str, float]


class RunReportModel(BaseModel):
    t_star_formula: float
    t_final: float
    per_theta: list[ThetaReportModel]
    max_delta: float
    calibration: dict | None = None


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioModel
    include_series: bool = True


class SimulateResponse(BaseModel):
    report: RunReportModel
    series: list[TimeSeriesModel]


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioModel
    tolerance: float = 1e-6
    include_series: bool = False


class CompareResponse(BaseModel):
    report: RunReportModel
    series: list[TimeSeriesModel]
    tolerance: float
    within_tolerance: bool


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioModel
    axis: str
    start: float
    stop: float
    steps: int


class SweepRowModel(BaseModel):
    value: float
    transfer_time: float
    fidelity_at_transfer: float
    resonant: bool


class SweepResponse(BaseModel):
    axis: str
    rows: list[SweepRowModel]


class CalibrateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioModel
    target_fidelity: float = 0.990
    target_theta: float | str = "pi/4"


class CalibrateResponse(BaseModel):
    k1: float
    k2: float
    target_theta: float
    target_fidelity: float
    achieved_fidelity: float
    transfer_time: float
    fidelities: dict[str, float]
    clamped: bool
    bracket: tuple[float, float]


class HealthResponse(BaseModel):
    status: str
    version: str
