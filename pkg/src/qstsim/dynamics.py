"""Numerical time evolution: Schrodinger, Lindblad and conditional backends.

All backends integrate with an embedded adaptive Runge-Kutta pair
(scipy's Dormand-Prince 4(5)) and sample on a uniform grid via dense
interpolation of the accepted steps.  A fixed-step classic RK4 mode is
available for byte-reproducible outputs.  Conditional (no-jump) evolution
never renormalizes the state, matching the conditional-fidelity definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ParameterError, SolverError
from .hamiltonians import (
    EFFECTIVE_DIMS,
    TimeDependentHamiltonian,
    build_effective,
    build_rwa_interaction,
)
from .linalg import DensityMatrix, HilbertDims, StateVector, partial_trace
from .model import ModelParams, dispersive_params, effective_params

__all__ = [
    "EvolutionSpec",
    "TimeSeries",
    "schrodinger_evolve",
    "lindblad_evolve",
    "nonhermitian_evolve",
    "validate_effective_theory",
    "EffectiveTheoryReport",
    "transfer_initial_state",
    "transfer_initial_state_full",
    "carbon_reduced",
    "state_fidelity",
]

DISPERSIVE_RATIO_LIMIT = 0.1


@dataclass(frozen=True)
class EvolutionSpec:
    """One evolution problem: Hamiltonian, initial state, horizon, tolerances.

    ``collapse_ops`` is a tuple of (operator, rate >= 0) pairs; leave empty
    for closed evolution.  ``fixed_step`` switches to classic RK4 with that
    many substeps per sample interval.
    """

    hamiltonian: TimeDependentHamiltonian
    initial: StateVector | DensityMatrix
    t_final: float
    sample_count: int = 201
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    collapse_ops: tuple = ()
    fixed_step: int | None = None

    def __post_init__(self):
        if not self.t_final > 0:
            raise ParameterError("t_final must be positive")
        if self.sample_count < 2:
            raise ParameterError("sample_count must be at least 2")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ParameterError("tolerances must be positive")
        for _, rate in self.collapse_ops:
            if rate < 0:
                raise ParameterError("collapse rates must be >= 0")
        if self.fixed_step is not None and self.fixed_step < 1:
            raise ParameterError("fixed_step must be a positive substep count")

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.sample_count)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled evolution output.

    ``populations`` has one column per basis state in flat index order
    (``basis_labels`` documents the order).  ``amplitudes`` is present for
    pure-state backends only.  ``fidelity`` is the conditional transfer
    fidelity when a target was supplied; ``fidelity_renormalized`` is its
    trace-normalized companion for decaying backends.
    """

    times: np.ndarray
    populations: np.ndarray
    backend: str
    amplitudes: np.ndarray | None = None
    density_matrices: np.ndarray | None = None
    fidelity: np.ndarray | None = None
    fidelity_renormalized: np.ndarray | None = None
    basis_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        pops = np.asarray(self.populations, dtype=float)
        if np.any(np.diff(times) <= 0):
            raise SolverError("sample times must be strictly increasing")
        if pops.min() < -1e-9 or pops.max() > 1 + 1e-9:
            raise SolverError(
                f"populations outside [0, 1] beyond tolerance: "
                f"[{pops.min():.3e}, {pops.max():.3e}]"
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "populations", pops)

    def population(self, label: str) -> np.ndarray:
        if self.basis_labels is None:
            raise KeyError("series carries no basis labels")
        return self.populations[:, self.basis_labels.index(label)]


def _basis_labels(dims: HilbertDims) -> tuple[str, ...]:
    grids = np.indices(dims.dims).reshape(len(dims.dims), -1)
    return tuple("".join(str(d) for d in col) for col in grids.T)


# integration cores ----------------------------------------------------------

def _integrate(terms, y0: np.ndarray, times: np.ndarray, rel_tol, abs_tol, fixed_step):
    """Integrate y' = rhs(t, y) where rhs sums envelope-weighted matrix actions."""
    mats = [op.matrix for op, _ in terms]
    envs = [env for _, env in terms]

    def rhs(t, y):
        out = np.zeros_like(y)
        for m, env in zip(mats, envs):
            out += complex(env(t)) * (m @ y)
        return out

    if fixed_step is not None:
        return _rk4_fixed(rhs, y0, times, fixed_step)
    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        y0,
        method="RK45",
        t_eval=times,
        rtol=rel_tol,
        atol=abs_tol,
        dense_output=False,
    )
    if not sol.success:
        raise SolverError(f"integration failed: {sol.message}")
    return sol.y.T.copy()


def _rk4_fixed(rhs, y0: np.ndarray, times: np.ndarray, substeps: int) -> np.ndarray:
    out = np.empty((len(times), len(y0)), dtype=complex)
    y = y0.astype(complex).copy()
    out[0] = y
    for i in range(len(times) - 1):
        t0, t1 = times[i], times[i + 1]
        h = (t1 - t0) / substeps
        t = t0
        for _ in range(substeps):
            k1 = rhs(t, y)
            k2 = rhs(t + h / 2, y + h / 2 * k1)
            k3 = rhs(t + h / 2, y + h / 2 * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        out[i + 1] = y
    return out


def _schrodinger_terms(h: TimeDependentHamiltonian):
    """(-i H) as (operator, envelope) pairs for the state-vector RHS."""
    return tuple((op * (-1j), env) for op, env in h.terms)


def _fidelity_pair(states, dims: HilbertDims, target: np.ndarray):
    """Conditional and renormalized carbon fidelities for state-vector samples."""
    cond = np.empty(len(states))
    renorm = np.empty(len(states))
    keep = _carbon_index(dims)
    for i, y in enumerate(states):
        rho = DensityMatrix(dims, np.outer(y, y.conj()), hermitian_tol=1e-9)
        red = partial_trace(rho, keep)
        val = float(np.real(np.vdot(target, red.matrix @ target)))
        cond[i] = val
        tr = red.trace
        renorm[i] = val / tr if tr > 0 else 0.0
    return cond, renorm


def _carbon_index(dims: HilbertDims) -> int:
    if dims.labels and "carbon" in dims.labels:
        return dims.labels.index("carbon")
    return len(dims.dims) - 1


def carbon_reduced(state: StateVector | DensityMatrix) -> DensityMatrix:
    """Reduced nuclear-spin state (not renormalized for decayed inputs)."""
    rho = state.to_density_matrix() if isinstance(state, StateVector) else state
    return partial_trace(rho, _carbon_index(rho.dims))


def state_fidelity(state: StateVector | DensityMatrix, target: np.ndarray) -> float:
    """<target| Tr_rest(state) |target> via the partial-trace pipeline."""
    red = carbon_reduced(state)
    return float(np.real(np.vdot(target, red.matrix @ target)))


# backends --------------------------------------------------------------------

def schrodinger_evolve(spec: EvolutionSpec, fidelity_target: np.ndarray | None = None) -> TimeSeries:
    """Closed-system integration of a Hermitian time-dependent Hamiltonian."""
    if not isinstance(spec.initial, StateVector):
        raise ParameterError("schrodinger_evolve needs a pure initial state")
    if spec.collapse_ops:
        raise ParameterError("schrodinger_evolve does not accept collapse operators")
    if not spec.hamiltonian.hermitian_contract:
        raise ParameterError("Hamiltonian must declare the Hermitian contract")
    times = spec.times()
    y0 = spec.initial.amplitudes.astype(complex)
    states = _integrate(
        _schrodinger_terms(spec.hamiltonian), y0, times, spec.rel_tol, spec.abs_tol, spec.fixed_step
    )
    norms = np.linalg.norm(states, axis=1)
    drift = float(np.max(np.abs(norms - norms[0])))
    if spec.fixed_step is None and drift > 10.0 * spec.rel_tol:
        raise SolverError(f"norm drift {drift:.3e} exceeds 10x rel_tol; tighten tolerances")
    pops = np.abs(states) ** 2
    dims = spec.hamiltonian.dims
    fid = renorm = None
    if fidelity_target is not None:
        fid, renorm = _fidelity_pair(states, dims, fidelity_target)
    return TimeSeries(
        times,
        pops,
        backend="schrodinger",
        amplitudes=states,
        fidelity=fid,
        fidelity_renormalized=renorm,
        basis_labels=_basis_labels(dims),
    )


def nonhermitian_evolve(spec: EvolutionSpec, fidelity_target: np.ndarray | None = None) -> TimeSeries:
    """Conditional (no-jump) integration; the norm is allowed to decay."""
    if not isinstance(spec.initial, StateVector):
        raise ParameterError("nonhermitian_evolve needs a pure initial state")
    if spec.collapse_ops:
        raise ParameterError("decay belongs in the Hamiltonian here, not collapse_ops")
    times = spec.times()
    y0 = spec.initial.amplitudes.astype(complex)
    states = _integrate(
        _schrodinger_terms(spec.hamiltonian), y0, times, spec.rel_tol, spec.abs_tol, spec.fixed_step
    )
    pops = np.abs(states) ** 2
    dims = spec.hamiltonian.dims
    fid = renorm = None
    if fidelity_target is not None:
        fid, renorm = _fidelity_pair(states, dims, fidelity_target)
    return TimeSeries(
        times,
        pops,
        backend="nonhermitian",
        amplitudes=states,
        fidelity=fid,
        fidelity_renormalized=renorm,
        basis_labels=_basis_labels(dims),
    )


def lindblad_evolve(spec: EvolutionSpec, fidelity_target: np.ndarray | None = None) -> TimeSeries:
    """Master-equation integration on the vectorized state matrix."""
    if not spec.hamiltonian.hermitian_contract:
        raise ParameterError("the master equation needs a Hermitian Hamiltonian")
    dims = spec.hamiltonian.dims
    n = dims.total
    rho0 = (
        spec.initial.to_density_matrix() if isinstance(spec.initial, StateVector) else spec.initial
    )
    if rho0.dims.dims != dims.dims:
        raise ParameterError("initial state lives on a different space")
    jump_ops = []
    for op, rate in spec.collapse_ops:
        if op.dims.dims != dims.dims:
            raise ParameterError("collapse operator lives on a different space")
        jump_ops.append(math.sqrt(rate) * op.matrix)
    jump_dags = [L.conj().T for L in jump_ops]
    jump_sqs = [Ld @ L for L, Ld in zip(jump_ops, jump_dags)]

    h_mats = [op.matrix for op, _ in spec.hamiltonian.terms]
    h_envs = [env for _, env in spec.hamiltonian.terms]

    def rhs(t, y):
        rho = y.reshape(n, n)
        h = np.zeros((n, n), dtype=complex)
        for m, env in zip(h_mats, h_envs):
            h += complex(env(t)) * m
        drho = -1j * (h @ rho - rho @ h)
        for L, Ld, LdL in zip(jump_ops, jump_dags, jump_sqs):
            drho += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
        return drho.reshape(-1)

    times = spec.times()
    if spec.fixed_step is not None:
        flat = _rk4_fixed(rhs, rho0.matrix.reshape(-1).astype(complex), times, spec.fixed_step)
    else:
        sol = solve_ivp(
            rhs,
            (times[0], times[-1]),
            rho0.matrix.reshape(-1).astype(complex),
            method="RK45",
            t_eval=times,
            rtol=spec.rel_tol,
            atol=spec.abs_tol,
        )
        if not sol.success:
            raise SolverError(f"master-equation integration failed: {sol.message}")
        flat = sol.y.T.copy()
    rhos = flat.reshape(len(times), n, n)

    traces = np.real(np.einsum("tii->t", rhos))
    if spec.fixed_step is None and float(np.max(np.abs(traces - traces[0]))) > 1e-8:
        raise SolverError("trace drift exceeds 1e-8; tighten tolerances")
    herm_dev = float(np.max(np.abs(rhos - rhos.conj().transpose(0, 2, 1))))
    if herm_dev > 1e-9:
        raise SolverError(f"state matrix lost Hermiticity: deviation {herm_dev:.3e}")

    pops = np.real(np.einsum("tii->ti", rhos))
    fid = renorm = None
    if fidelity_target is not None:
        keep = _carbon_index(dims)
        fid = np.empty(len(times))
        renorm = np.empty(len(times))
        for i, mat in enumerate(rhos):
            red = partial_trace(DensityMatrix(dims, mat, hermitian_tol=1e-9), keep)
            val = float(np.real(np.vdot(fidelity_target, red.matrix @ fidelity_target)))
            fid[i] = val
            tr = red.trace
            renorm[i] = val / tr if tr > 0 else 0.0
    return TimeSeries(
        times,
        pops,
        backend="lindblad",
        density_matrices=rhos,
        fidelity=fid,
        fidelity_renormalized=renorm,
        basis_labels=_basis_labels(dims),
    )


# initial states ---------------------------------------------------------------

def transfer_initial_state(theta: float, fock_levels: int = 2) -> StateVector:
    """cos(theta)|00> + sin(theta)|10> on the effective cavity (x) carbon space."""
    dims = (
        EFFECTIVE_DIMS
        if fock_levels == 2
        else HilbertDims((fock_levels, 2), ("cavity", "carbon"))
    )
    amps = np.zeros(dims.total, dtype=complex)
    amps[0] = math.cos(theta)
    amps[2] = math.sin(theta)  # |1, down>
    return StateVector(dims, amps)


def transfer_initial_state_full(theta: float, fock_levels: int = 2) -> StateVector:
    """Same physical state with the electron in its ground dressed state."""
    dims = HilbertDims((2, fock_levels, 2), ("nv", "cavity", "carbon"))
    amps = np.zeros(dims.total, dtype=complex)
    amps[0] = math.cos(theta)  # |g, 0, down>
    amps[2] = math.sin(theta)  # |g, 1, down>
    return StateVector(dims, amps)


# effective-theory validation ---------------------------------------------------

@dataclass(frozen=True)
class EffectiveTheoryReport:
    """Outcome of comparing the full interaction model with the reduced one."""

    kappa_ratio: float
    h_ratio: float
    regime_ok: bool
    max_population_discrepancy: float
    per_state_discrepancy: dict = field(default_factory=dict)
    warning: str | None = None


def validate_effective_theory(
    params: ModelParams | None = None,
    regime_scale: float | None = None,
    t_final: float | None = None,
    sample_count: int = 201,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-11,
) -> EffectiveTheoryReport:
    """Evolve the full interaction model and the reduced model side by side.

    Either pass a configuration directly or give ``regime_scale`` to build
    the canonical dispersive configuration with
    kappa/omega1 = |h_flip|/omega2 = regime_scale on resonance.  Populations
    of matching cavity (x) carbon states are compared (the full model's are
    summed over the electron), and the worst discrepancy over the horizon is
    reported.  Outside the dispersive regime the comparison still runs but
    the report carries a warning.
    """
    if regime_scale is not None:
        theta = params.theta if params is not None else math.pi / 6
        params = dispersive_params(regime_scale, theta=theta)
    if params is None:
        raise ParameterError("provide params or regime_scale")
    kappa_ratio = abs(params.kappa / params.omega1) if params.omega1 else math.inf
    h_ratio = abs(params.h_flip / params.omega2) if params.omega2 else math.inf
    regime_ok = kappa_ratio <= DISPERSIVE_RATIO_LIMIT and h_ratio <= DISPERSIVE_RATIO_LIMIT
    warning = None
    if not regime_ok:
        warning = (
            f"dispersive regime violated: kappa/omega1 = {kappa_ratio:.3g}, "
            f"|h_flip|/omega2 = {h_ratio:.3g} (limit {DISPERSIVE_RATIO_LIMIT}); "
            "the reduced model is not expected to be accurate"
        )
    if t_final is None:
        eff = effective_params(params)
        if not math.isfinite(eff.t_star):
            raise ParameterError("splitting is zero; pass t_final explicitly")
        t_final = 2.0 * eff.t_star

    full = build_rwa_interaction(params, fock_levels=2)
    reduced = build_effective(params)
    spec_full = EvolutionSpec(
        full, transfer_initial_state_full(params.theta), t_final, sample_count, rel_tol, abs_tol
    )
    spec_red = EvolutionSpec(
        reduced, transfer_initial_state(params.theta), t_final, sample_count, rel_tol, abs_tol
    )
    ts_full = schrodinger_evolve(spec_full)
    ts_red = schrodinger_evolve(spec_red)

    # sum the full model's populations over the electron index
    pops_full = ts_full.populations.reshape(len(ts_full.times), 2, 2, 2).sum(axis=1)
    pops_full = pops_full.reshape(len(ts_full.times), 4)
    diff = np.abs(pops_full - ts_red.populations)
    labels = ("00", "01", "10", "11")
    per_state = {lab: float(diff[:, i].max()) for i, lab in enumerate(labels)}
    return EffectiveTheoryReport(
        kappa_ratio=kappa_ratio,
        h_ratio=h_ratio,
        regime_ok=regime_ok,
        max_population_discrepancy=float(diff.max()),
        per_state_discrepancy=per_state,
        warning=warning,
    )
