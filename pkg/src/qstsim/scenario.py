"""Scenario configuration, batch execution and file emission.

A scenario is one parameter set run over a list of initial-state angles with
one or more backends.  Angles may be given as radians or as strings like
"pi/6" or "75deg".  Emitted CSV files follow the fixed column convention
t, P0, P1, P2, P3 [, F] where P0 is the vacuum population, P1 the one-photon
population, P2 the transferred (nuclear-flip) population and P3 the
double-excitation population; JSON files embed the full parameter echo.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import analytic
from .dynamics import (
    EvolutionSpec,
    TimeSeries,
    lindblad_evolve,
    nonhermitian_evolve,
    schrodinger_evolve,
    transfer_initial_state,
)
from .errors import CalibrationError, ConfigError, SolverError
from .hamiltonians import (
    EFFECTIVE_DIMS,
    EFFECTIVE_INDEX,
    build_effective,
    build_effective_dephasing,
)
from .linalg import Operator, destroy, number_op
from .model import ModelParams, effective_params

__all__ = [
    "ScenarioConfig",
    "RunReport",
    "ThetaReport",
    "BackendResult",
    "CalibrationResult",
    "SweepRow",
    "run_scenario",
    "run_scenario_with_series",
    "calibrate_dephasing",
    "sweep",
    "emit",
    "load_config",
    "load_timeseries",
    "parse_angle",
]

BACKENDS = ("analytic", "schrodinger", "lindblad", "nonhermitian")
CHANNEL_TYPES = ("lowering", "dephasing")
FORMATS = ("csv", "json")

# CSV column order, mapped onto flat basis indices of the effective space
_P_COLUMNS = (("P0", "00"), ("P1", "10"), ("P2", "01"), ("P3", "11"))


def parse_angle(value) -> float:
    """Angle in radians from a number or a string like 'pi/6', '3pi/4', '75deg'."""
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"cannot parse angle from {value!r}")
    text = value.strip().lower().replace(" ", "")
    m = re.fullmatch(r"(-?\d+(?:\.\d+)?)deg", text)
    if m:
        return math.radians(float(m.group(1)))
    m = re.fullmatch(r"(-?\d+(?:\.\d+)?)?\*?pi(?:/(\d+(?:\.\d+)?))?", text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {value!r}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """One batch run: parameters, backends, angles, horizon and output."""

    params: ModelParams
    backend: str = "analytic"
    theta_list: tuple[float, ...] = (math.pi / 6,)
    t_final: float | None = None  # None: twice the predicted transfer time
    sample_count: int = 201
    output: str | None = None
    format: str = "csv"
    channel_type: str = "lowering"
    fixed_step: int | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self):
        if self.backend not in BACKENDS + ("all",):
            raise ConfigError(f"backend must be one of {BACKENDS + ('all',)}, got {self.backend!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.channel_type not in CHANNEL_TYPES:
            raise ConfigError(f"channel_type must be one of {CHANNEL_TYPES}")
        thetas = tuple(parse_angle(t) for t in self.theta_list)
        if not thetas:
            raise ConfigError("theta_list must not be empty")
        object.__setattr__(self, "theta_list", thetas)
        if self.t_final is not None and not self.t_final > 0:
            raise ConfigError("t_final must be positive")
        if self.sample_count < 2:
            raise ConfigError("sample_count must be at least 2")

    def backends(self) -> tuple[str, ...]:
        return BACKENDS if self.backend == "all" else (self.backend,)

    def resolve_t_final(self) -> float:
        if self.t_final is not None:
            return self.t_final
        t_star = effective_params(self.params).t_star
        if not math.isfinite(t_star):
            raise ConfigError("splitting is zero; set t_final explicitly")
        return 2.0 * t_star

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["params"] = dataclasses.asdict(self.params)
        out["theta_list"] = list(self.theta_list)
        return out


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse a flat JSON scenario file; unknown keys are rejected."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must hold a JSON object")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ScenarioConfig:
    raw = dict(raw)
    params_raw = raw.pop("params", None)
    if params_raw is None:
        raise ConfigError("missing 'params' section")
    param_fields = {f.name for f in dataclasses.fields(ModelParams)}
    unknown = set(params_raw) - param_fields
    if unknown:
        raise ConfigError(f"unknown params keys: {sorted(unknown)}")
    if "theta" in params_raw:
        params_raw["theta"] = parse_angle(params_raw["theta"])
    try:
        params = ModelParams(**params_raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    scenario_fields = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"params"}
    unknown = set(raw) - scenario_fields
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    if "theta_list" in raw:
        raw["theta_list"] = tuple(raw["theta_list"])
    return ScenarioConfig(params=params, **raw)


# report records ----------------------------------------------------------------

@dataclass(frozen=True)
class BackendResult:
    backend: str
    transfer_time: float
    population_min: float
    population_max: float
    fidelity_at_transfer: float | None = None
    fidelity_renormalized_at_transfer: float | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ThetaReport:
    theta: float
    results: tuple[BackendResult, ...]
    deltas: dict = field(default_factory=dict)

    def result(self, backend: str) -> BackendResult:
        for r in self.results:
            if r.backend == backend:
                return r
        raise KeyError(backend)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "results": [r.to_dict() for r in self.results],
            "deltas": dict(self.deltas),
        }


@dataclass(frozen=True)
class RunReport:
    """Aggregate of one scenario run.

    ``t_star_formula`` is the closed-form transfer-time prediction;
    the per-backend measured times are the argmin of the one-photon
    population on the sample grid.
    """

    t_star_formula: float
    t_final: float
    per_theta: tuple[ThetaReport, ...]
    emitted_files: tuple[str, ...] = ()
    calibration: dict | None = None

    def max_delta(self) -> float:
        worst = 0.0
        for rec in self.per_theta:
            for v in rec.deltas.values():
                if v is not None:
                    worst = max(worst, v)
        return worst

    def to_dict(self) -> dict:
        return {
            "t_star_formula": self.t_star_formula,
            "t_final": self.t_final,
            "per_theta": [r.to_dict() for r in self.per_theta],
            "emitted_files": list(self.emitted_files),
            "calibration": self.calibration,
            "max_delta": self.max_delta(),
        }


# series construction -------------------------------------------------------------

def _analytic_series(p: ModelParams, times: np.ndarray) -> TimeSeries:
    damped = p.k1 > 0 or p.k2 > 0
    amps = analytic.dephased_amplitudes(p, times) if damped else analytic.amplitudes(p, times)
    data = np.zeros((len(times), 4), dtype=complex)
    data[:, EFFECTIVE_INDEX["00"]] = amps.m0
    data[:, EFFECTIVE_INDEX["10"]] = amps.m1
    data[:, EFFECTIVE_INDEX["01"]] = amps.m2
    pops = np.abs(data) ** 2
    fid = np.array(
        [
            analytic.fidelity_from_amplitudes(
                analytic.AmplitudeTriple(amps.m0[i], amps.m1[i], amps.m2[i]), p.theta
            )
            for i in range(len(times))
        ]
    )
    trace = pops.sum(axis=1)
    renorm = np.where(trace > 0, fid / trace, 0.0)
    return TimeSeries(
        times,
        pops,
        backend="analytic",
        amplitudes=data,
        fidelity=fid,
        fidelity_renormalized=renorm,
        basis_labels=("00", "01", "10", "11"),
    )


def _collapse_ops(p: ModelParams, channel_type: str) -> tuple:
    eye2 = np.eye(2, dtype=complex)
    if channel_type == "lowering":
        cav = np.kron(destroy(2).matrix, eye2)
        car = np.kron(eye2, np.array([[0, 1], [0, 0]], dtype=complex))
    else:  # number-operator (pure dephasing) channels
        cav = np.kron(number_op(2).matrix, eye2)
        car = np.kron(eye2, np.diag([0.0, 1.0]).astype(complex))
    ops = []
    if p.k1 > 0:
        ops.append((Operator(EFFECTIVE_DIMS, cav), p.k1))
    if p.k2 > 0:
        ops.append((Operator(EFFECTIVE_DIMS, car), p.k2))
    return tuple(ops)


def _numeric_series(p: ModelParams, backend: str, config: ScenarioConfig, t_final: float) -> TimeSeries:
    target = analytic.carbon_target(p.theta)
    initial = transfer_initial_state(p.theta)
    common = dict(
        t_final=t_final,
        sample_count=config.sample_count,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
        fixed_step=config.fixed_step,
    )
    if backend == "schrodinger":
        spec = EvolutionSpec(build_effective(p), initial, **common)
        return schrodinger_evolve(spec, fidelity_target=target)
    if backend == "nonhermitian":
        spec = EvolutionSpec(build_effective_dephasing(p), initial, **common)
        return nonhermitian_evolve(spec, fidelity_target=target)
    if backend == "lindblad":
        spec = EvolutionSpec(
            build_effective(p), initial, collapse_ops=_collapse_ops(p, config.channel_type), **common
        )
        return lindblad_evolve(spec, fidelity_target=target)
    raise ConfigError(f"unknown backend {backend!r}")


def _backend_result(series: TimeSeries, t_final: float) -> BackendResult:
    p1 = series.populations[:, EFFECTIVE_INDEX["10"]]
    idx = int(np.argmin(p1[1:]) + 1)  # transfer time is strictly positive
    fid = float(series.fidelity[idx]) if series.fidelity is not None else None
    renorm = (
        float(series.fidelity_renormalized[idx])
        if series.fidelity_renormalized is not None
        else None
    )
    return BackendResult(
        backend=series.backend,
        transfer_time=float(series.times[idx]),
        population_min=float(series.populations.min()),
        population_max=float(series.populations.max()),
        fidelity_at_transfer=fid,
        fidelity_renormalized_at_transfer=renorm,
    )


def _population_delta(a: TimeSeries, b: TimeSeries) -> float:
    return float(np.max(np.abs(a.populations - b.populations)))


def run_scenario(config: ScenarioConfig) -> RunReport:
    """Run every (theta, backend) pair, emit files if requested, aggregate."""
    report, _ = run_scenario_with_series(config)
    return report


def run_scenario_with_series(
    config: ScenarioConfig,
) -> tuple[RunReport, dict[tuple[int, str], TimeSeries]]:
    """As :func:`run_scenario`, also returning every computed series keyed by
    (theta index, backend)."""
    t_final = config.resolve_t_final()
    times = np.linspace(0.0, t_final, config.sample_count)
    eff = effective_params(config.params)
    emitted: list[str] = []
    per_theta = []
    all_series: dict[tuple[int, str], TimeSeries] = {}
    for i, theta in enumerate(config.theta_list):
        p = config.params.replace(theta=theta)
        series_by_backend: dict[str, TimeSeries] = {}
        for backend in config.backends():
            try:
                if backend == "analytic":
                    series_by_backend[backend] = _analytic_series(p, times)
                else:
                    series_by_backend[backend] = _numeric_series(p, backend, config, t_final)
            except SolverError as exc:
                raise SolverError(
                    f"backend {backend!r} failed at theta = {theta:.6g}: {exc}"
                ) from exc
        deltas = {}
        undamped = p.k1 == 0 and p.k2 == 0
        if "schrodinger" in series_by_backend:
            reference = (
                series_by_backend.get("analytic")
                if undamped
                else _analytic_series(p.replace(k1=0.0, k2=0.0), times)
            )
            if reference is not None:
                deltas["schrodinger_vs_analytic"] = _population_delta(
                    series_by_backend["schrodinger"], reference
                )
        if "nonhermitian" in series_by_backend and "analytic" in series_by_backend:
            deltas["nonhermitian_vs_analytic"] = _population_delta(
                series_by_backend["nonhermitian"], series_by_backend["analytic"]
            )
        if "lindblad" in series_by_backend and "schrodinger" in series_by_backend and undamped:
            deltas["lindblad_vs_schrodinger"] = _population_delta(
                series_by_backend["lindblad"], series_by_backend["schrodinger"]
            )
        results = []
        for backend, series in series_by_backend.items():
            results.append(_backend_result(series, t_final))
            all_series[(i, backend)] = series
            if config.output:
                path = f"{config.output}.{backend}.theta{i}.{config.format}"
                emit(series, config.format, path, config=config, theta=theta)
                emitted.append(path)
        per_theta.append(ThetaReport(theta=theta, results=tuple(results), deltas=deltas))
    if config.output:
        manifest = {
            "config": config.to_dict(),
            "t_final": t_final,
            "t_star_formula": eff.t_star,
            "files": emitted,
            "theta_values": list(config.theta_list),
        }
        manifest_path = f"{config.output}.manifest.json"
        Path(manifest_path).write_text(json.dumps(manifest, indent=2))
        emitted.append(manifest_path)
    report = RunReport(
        t_star_formula=eff.t_star,
        t_final=t_final,
        per_theta=tuple(per_theta),
        emitted_files=tuple(emitted),
    )
    return report, all_series


# calibration ---------------------------------------------------------------------

REFERENCE_THETAS = (math.pi / 6, math.pi / 4, math.pi / 3, 75 * math.pi / 180)


@dataclass(frozen=True)
class CalibrationResult:
    k1: float
    k2: float
    target_theta: float
    target_fidelity: float
    achieved_fidelity: float
    transfer_time: float
    fidelities: dict
    clamped: bool
    bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _fidelity_at(p: ModelParams, t_star: float, rel_tol: float, abs_tol: float) -> float:
    """Conditional fidelity at the transfer time from no-jump integration."""
    target = analytic.carbon_target(p.theta)
    spec = EvolutionSpec(
        build_effective_dephasing(p),
        transfer_initial_state(p.theta),
        t_final=t_star,
        sample_count=2,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
    )
    series = nonhermitian_evolve(spec, fidelity_target=target)
    return float(series.fidelity[-1])


def calibrate_dephasing(
    config: ScenarioConfig,
    target_fidelity: float = 0.990,
    target_theta: float = math.pi / 4,
    fidelity_tol: float = 1e-4,
) -> CalibrationResult:
    """Find k1 = k2 such that the conditional fidelity at the transfer time
    equals ``target_fidelity`` for ``target_theta``.

    The search bracket is [0, 1/t*]: beyond the upper end the no-jump weight
    at the transfer time drops below 1/e and the conditional reading stops
    being meaningful.  Targets above the zero-decay fidelity clamp to k = 0;
    targets below the bracket floor raise, reporting the reachable range.
    """
    target_theta = parse_angle(target_theta)
    p = config.params.replace(theta=target_theta, k1=0.0, k2=0.0)
    t_star = effective_params(p).t_star
    if not math.isfinite(t_star):
        raise CalibrationError("splitting is zero; no transfer time to calibrate at")

    def fidelity_of(k: float) -> float:
        return _fidelity_at(p.replace(k1=k, k2=k), t_star, config.rel_tol, config.abs_tol)

    k_max = 1.0 / t_star
    f_zero = fidelity_of(0.0)
    clamped = False
    if target_fidelity >= f_zero - fidelity_tol:
        k_solved, clamped = 0.0, True
    else:
        f_floor = fidelity_of(k_max)
        if target_fidelity < f_floor:
            raise CalibrationError(
                f"target fidelity {target_fidelity} unreachable in bracket "
                f"[0, {k_max:.6g}]: achievable range is [{f_floor:.6f}, {f_zero:.6f}]"
            )
        k_solved = float(
            brentq(lambda k: fidelity_of(k) - target_fidelity, 0.0, k_max, xtol=1e-9 * k_max)
        )
    achieved = fidelity_of(k_solved)
    if not clamped and abs(achieved - target_fidelity) > fidelity_tol:
        raise CalibrationError(
            f"root finding landed at fidelity {achieved:.6f}, "
            f"outside {fidelity_tol} of target {target_fidelity}"
        )
    fidelities = {}
    for theta in REFERENCE_THETAS:
        pk = config.params.replace(theta=theta, k1=k_solved, k2=k_solved)
        fidelities[theta] = _fidelity_at(pk, t_star, config.rel_tol, config.abs_tol)
    return CalibrationResult(
        k1=k_solved,
        k2=k_solved,
        target_theta=target_theta,
        target_fidelity=target_fidelity,
        achieved_fidelity=achieved,
        transfer_time=t_star,
        fidelities=fidelities,
        clamped=clamped,
        bracket=(0.0, k_max),
    )


# sweep ----------------------------------------------------------------------------

RESONANT_FLAG_TOL = 0.01


@dataclass(frozen=True)
class SweepRow:
    value: float
    transfer_time: float
    fidelity_at_transfer: float
    resonant: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def sweep(config: ScenarioConfig, axis: str, start: float, stop: float, steps: int) -> list[SweepRow]:
    """Grid scan of one parameter using the closed-form fast path.

    Rows satisfying |delta_h| <= 1% of the cavity Stark shift are flagged as
    resonant.  A zero-width range yields a single row.
    """
    numeric_fields = {
        f.name for f in dataclasses.fields(ModelParams) if f.type in ("float", "float | None")
    }
    if axis not in numeric_fields:
        raise ConfigError(f"axis must be a model parameter, got {axis!r}")
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    if start == stop:
        values = [start]
    else:
        values = list(np.linspace(start, stop, steps))
    rows = []
    for v in values:
        p = config.params.replace(**{axis: float(v)})
        eff = effective_params(p)
        stark = abs(p.kappa**2 / (4.0 * p.omega1))
        resonant = stark > 0 and abs(eff.delta_h) <= RESONANT_FLAG_TOL * stark
        fid = analytic.conditional_fidelity(p, eff.t_star)
        rows.append(
            SweepRow(
                value=float(v),
                transfer_time=eff.t_star,
                fidelity_at_transfer=fid,
                resonant=bool(resonant),
            )
        )
    return rows


# emission --------------------------------------------------------------------------

def _format_value(x: float) -> str:
    return f"{x:.12g}"


def emit(
    series: TimeSeries,
    format: str,
    path: str | Path,
    config: ScenarioConfig | None = None,
    theta: float | None = None,
) -> Path:
    """Write one time series to disk as CSV or JSON.

    CSV: header t,P0,P1,P2,P3[,F], 12 significant digits, one row per
    sample.  JSON: full object with times, named population columns,
    fidelity and the complete parameter echo for bit-identical re-runs.
    """
    path = Path(path)
    if format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    if series.basis_labels != ("00", "01", "10", "11"):
        raise ConfigError("emission expects a series on the effective cavity (x) carbon space")
    columns = {name: series.populations[:, EFFECTIVE_INDEX[key]] for name, key in _P_COLUMNS}
    if format == "csv":
        header = ["t", *columns.keys()]
        if series.fidelity is not None:
            header.append("F")
        lines = [",".join(header)]
        for i, t in enumerate(series.times):
            row = [_format_value(t)] + [_format_value(col[i]) for col in columns.values()]
            if series.fidelity is not None:
                row.append(_format_value(float(series.fidelity[i])))
            lines.append(",".join(row))
        path.write_text("\n".join(lines) + "\n")
        return path
    payload = {
        "backend": series.backend,
        "theta": theta,
        "times": [float(t) for t in series.times],
        "populations": {name: [float(v) for v in col] for name, col in columns.items()},
        "fidelity": None if series.fidelity is None else [float(v) for v in series.fidelity],
        "fidelity_renormalized": (
            None
            if series.fidelity_renormalized is None
            else [float(v) for v in series.fidelity_renormalized]
        ),
        "params": config.to_dict() if config is not None else None,
    }
    path.write_text(json.dumps(payload, indent=2))
    return path


def load_timeseries(path: str | Path) -> TimeSeries:
    """Rebuild a TimeSeries from an emitted JSON file (exact float round trip)."""
    raw = json.loads(Path(path).read_text())
    times = np.array(raw["times"], dtype=float)
    pops = np.zeros((len(times), 4))
    for name, key in _P_COLUMNS:
        pops[:, EFFECTIVE_INDEX[key]] = raw["populations"][name]
    fid = None if raw.get("fidelity") is None else np.array(raw["fidelity"], dtype=float)
    renorm = (
        None
        if raw.get("fidelity_renormalized") is None
        else np.array(raw["fidelity_renormalized"], dtype=float)
    )
    return TimeSeries(
        times,
        pops,
        backend=raw["backend"],
        fidelity=fid,
        fidelity_renormalized=renorm,
        basis_labels=("00", "01", "10", "11"),
    )
