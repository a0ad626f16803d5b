"""Physical parameters and derived quantities of the transfer model.

All frequency-like inputs are plain numbers in one consistent angular
frequency unit; times are in the reciprocal unit.  The reference
configuration stores the published numerals verbatim (kappa = 1000,
h_flip = -32.02, omega1 = 2, omega2 = 0.008) and the emitted time axis is
labeled "seconds", since that is the only reading under which the predicted
transfer time lands near 1.6e-6.

Two distinct angles are kept apart on purpose: ``theta`` is the
initial-state mixing angle, ``theta_axis`` is the geometric angle entering
the hyperfine coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NonOscillatoryRegimeError, ParameterError, ResonanceSolveError

__all__ = [
    "ModelParams",
    "HyperfineCoefficients",
    "EffectiveParams",
    "hyperfine_coefficients",
    "coupling_h",
    "effective_params",
    "solve_resonance",
    "reference_params",
    "resonant_params",
    "dispersive_params",
]


@dataclass(frozen=True)
class ModelParams:
    """Every physical symbol of the model in one validated record.

    The first block drives the effective two-body model; the optional block
    holds the upstream symbols needed only by the full-system Hamiltonian
    builders.  ``h_flip`` is the effective electron-nuclear flip coupling
    (may be negative), ``kappa`` the dressed cavity coupling, ``omega1`` and
    ``omega2`` the two detunings, ``k1``/``k2`` the cavity and nuclear
    dephasing constants.
    """

    kappa: float = 0.0
    h_flip: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    theta: float = math.pi / 6
    k1: float = 0.0
    k2: float = 0.0
    # upstream symbols, used by the full-system builders only
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

    def __post_init__(self):
        if self.k1 < 0 or self.k2 < 0:
            raise ParameterError("dephasing constants k1, k2 must be >= 0")
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-12:
            raise ParameterError(f"theta = {self.theta} outside [0, pi/2]")

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ParameterError(f"missing required symbols: {', '.join(missing)}")


@dataclass(frozen=True)
class HyperfineCoefficients:
    """Angle-dependent parallel and perpendicular hyperfine couplings."""

    c_par_theta: float
    c_perp_theta: float


@dataclass(frozen=True)
class EffectiveParams:
    """Derived quantities of the effective two-body model.

    ``delta_h`` is the resonance mismatch h_flip^2/omega2 - kappa^2/(4 omega1)
    (zero exactly on resonance), ``big_d`` the two-level splitting, ``phase_c``
    the common phase constant, ``t_star`` the predicted transfer time.
    """

    omega12: float
    delta12: float
    delta_h: float
    big_d: float
    phase_c: float
    t_star: float


def hyperfine_coefficients(c_par: float, c_perp: float, theta_axis: float) -> HyperfineCoefficients:
    """Rotate the raw hyperfine constants by the axis angle.

    c_par(theta)  = c_par cos^2(theta) + c_perp sin^2(theta)
    c_perp(theta) = (c_perp (1 + cos^2 theta) + c_par sin^2 theta) / 2
    """
    c, s = math.cos(theta_axis), math.sin(theta_axis)
    c_par_t = c_par * c * c + c_perp * s * s
    c_perp_t = 0.5 * (c_perp * (1.0 + c * c) + c_par * s * s)
    return HyperfineCoefficients(c_par_t, c_perp_t)


def coupling_h(c_perp_theta: float, eta: float) -> float:
    """Effective flip coupling -c_perp(theta)/2 * sin^2(eta/2)."""
    s = math.sin(eta / 2.0)
    return -(c_perp_theta / 2.0) * s * s


def _stark_shifts(p: ModelParams) -> tuple[float, float]:
    """(cavity shift kappa^2/4omega1, carbon shift h^2/omega2)."""
    if p.omega1 == 0.0:
        raise ParameterError("omega1 must be nonzero for the effective model")
    if p.omega2 == 0.0:
        raise ParameterError("omega2 must be nonzero for the effective model")
    return p.kappa**2 / (4.0 * p.omega1), p.h_flip**2 / p.omega2


def flip_rate(p: ModelParams) -> float:
    """Off-diagonal coupling kappa*h_flip/(2*omega12) of the effective model."""
    omega12 = harmonic_detuning(p)
    return p.kappa * p.h_flip / (2.0 * omega12)


def harmonic_detuning(p: ModelParams) -> float:
    if p.omega1 == 0.0 or p.omega2 == 0.0:
        raise ParameterError("omega1 and omega2 must be nonzero")
    if p.omega1 + p.omega2 == 0.0:
        raise ParameterError("omega1 + omega2 must be nonzero (harmonic mean undefined)")
    return 2.0 * p.omega1 * p.omega2 / (p.omega1 + p.omega2)


def effective_params(p: ModelParams) -> EffectiveParams:
    """All derived quantities of the effective model.

    The splitting is evaluated in the cancellation-free form
    sqrt((delta_h/2)^2 + flip^2), which is algebraically identical to the
    quartic radicand written out term by term (see tests) but keeps full
    precision when the two Stark shifts nearly cancel.
    """
    a1, a2 = _stark_shifts(p)
    omega12 = harmonic_detuning(p)
    delta12 = p.omega1 - p.omega2
    delta_h = a2 - a1
    flip = p.kappa * p.h_flip / (2.0 * omega12)
    radicand = (delta_h / 2.0) ** 2 + flip**2
    if not np.isfinite(radicand) or radicand < 0.0:
        raise NonOscillatoryRegimeError(
            f"oscillation radicand {radicand} is not a nonnegative number"
        )
    big_d = math.sqrt(radicand)
    phase_c = -p.kappa**2 / (8.0 * p.omega1) - p.h_flip**2 / (2.0 * p.omega2)
    t_star = math.inf if big_d == 0.0 else (math.pi / 2.0) / big_d
    return EffectiveParams(omega12, delta12, delta_h, big_d, phase_c, t_star)


_FREE_SYMBOLS = ("kappa", "h_flip", "omega1", "omega2")


def solve_resonance(p: ModelParams, free: str) -> ModelParams:
    """Adjust one symbol so that h_flip^2/omega2 = kappa^2/(4*omega1).

    Signs are preserved: h_flip keeps its sign, kappa keeps its sign (or
    becomes positive if it was zero).  Raises when the required square would
    be negative under the fixed symbols' signs.
    """
    if free not in _FREE_SYMBOLS:
        raise ParameterError(f"free symbol must be one of {_FREE_SYMBOLS}, got {free!r}")
    if free == "omega2":
        if p.kappa == 0.0:
            raise ResonanceSolveError("cannot solve omega2 with kappa = 0")
        value = 4.0 * p.omega1 * p.h_flip**2 / p.kappa**2
        if value == 0.0:
            raise ResonanceSolveError("h_flip = 0 gives omega2 = 0, which is not allowed")
        return p.replace(omega2=value)
    if free == "omega1":
        if p.h_flip == 0.0:
            raise ResonanceSolveError("cannot solve omega1 with h_flip = 0")
        if p.omega2 == 0.0:
            raise ResonanceSolveError("omega2 must be nonzero")
        value = p.kappa**2 * p.omega2 / (4.0 * p.h_flip**2)
        if value == 0.0:
            raise ResonanceSolveError("kappa = 0 gives omega1 = 0, which is not allowed")
        return p.replace(omega1=value)
    if free == "kappa":
        if p.omega2 == 0.0:
            raise ResonanceSolveError("omega2 must be nonzero")
        square = 4.0 * p.omega1 * p.h_flip**2 / p.omega2
        if square < 0.0:
            raise ResonanceSolveError(
                "kappa^2 would be negative: omega1 and h_flip^2/omega2 have opposite signs"
            )
        mag = math.sqrt(square)
        sign = -1.0 if p.kappa < 0 else 1.0
        return p.replace(kappa=sign * mag)
    # free == "h_flip"
    if p.omega1 == 0.0:
        raise ResonanceSolveError("omega1 must be nonzero")
    square = p.kappa**2 * p.omega2 / (4.0 * p.omega1)
    if square < 0.0:
        raise ResonanceSolveError(
            "h_flip^2 would be negative: omega1 and omega2 have opposite signs"
        )
    mag = math.sqrt(square)
    sign = -1.0 if p.h_flip < 0 else 1.0
    return p.replace(h_flip=sign * mag)


def reference_params(theta: float = math.pi / 6) -> ModelParams:
    """Verbatim reference configuration.

    The upstream symbols are a self-consistent illustrative set: they satisfy
    omega1 = omega_c - omega_0 - omega_dressed and
    omega2 = omega_0 + 2*(omega_c13 + c_par(theta_axis)/2) - omega_dressed,
    and coupling_h(c_perp, eta) reproduces h_flip.
    """
    c_par, c_perp, theta_axis = 130.0, 64.04, 0.0
    eta = math.pi
    omega_c13 = 300.0
    omega_0 = 50000.0
    # detuning bookkeeping: omega_prime = 2*(omega_c13 + c_par(theta)/2)
    omega_prime = 2.0 * (omega_c13 + c_par / 2.0)
    omega2 = 0.008
    omega_dressed = omega_0 + omega_prime - omega2
    omega1 = 2.0
    omega_c = omega1 + omega_0 + omega_dressed
    return ModelParams(
        kappa=1000.0,
        h_flip=-32.02,
        omega1=omega1,
        omega2=omega2,
        theta=theta,
        omega_nv=57000.0,
        omega_c=omega_c,
        omega_0=omega_0,
        g_coupling=500.0,
        lambda_drive=250.0,
        omega_dressed=omega_dressed,
        eta=eta,
        omega_c13=omega_c13,
        c_par=c_par,
        c_perp=c_perp,
        theta_axis=theta_axis,
        b_field=0.02,
    )


def resonant_params(theta: float = math.pi / 6) -> ModelParams:
    """Reference configuration with omega2 solved onto exact resonance."""
    return solve_resonance(reference_params(theta), free="omega2")


def dispersive_params(scale: float, theta: float = math.pi / 6) -> ModelParams:
    """Resonant configuration with kappa/omega1 = |h_flip|/omega2 = scale.

    Used to probe the dispersive elimination: eta = pi/2 makes the
    S_z I_z coefficient of the interaction builder vanish, so the comparison
    isolates the second-order reduction itself.
    """
    if scale <= 0:
        raise ParameterError("regime scale must be positive")
    omega1 = 2.0
    kappa = scale * omega1
    h = -scale * omega1 / 4.0
    omega2 = abs(h) / scale
    eta = math.pi / 2
    # coupling_h(c_perp_theta, pi/2) = -c_perp_theta/4 must equal h
    c_perp_theta = -4.0 * h
    return ModelParams(
        kappa=kappa,
        h_flip=h,
        omega1=omega1,
        omega2=omega2,
        theta=theta,
        eta=eta,
        c_par=0.0,
        c_perp=c_perp_theta,
        theta_axis=0.0,
        omega_c13=0.0,
    )
