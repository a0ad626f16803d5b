"""Closed-form solutions of the effective transfer model.

These are the exact solutions of the two coupled amplitude equations in the
frame where the slow exchange envelope is absorbed into the one-photon
amplitude, with and without conditional decay.  They serve as the oracle for
the numerical integrators and as the fast path for parameter sweeps.

The vacuum-vacuum amplitude is a constant of motion; with the transfer state
initially cos(theta)|00> + sin(theta)|10>, the one-photon and one-flip
amplitudes oscillate at the splitting D and share the phase constant
phase_c.  The damped variant is valid on resonance (where the Stark shifts
cancel); off resonance it still evaluates but emits an AccuracyWarning and
callers should prefer the non-Hermitian integrator.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, DegenerateSpectrumError, OverdampedRegimeError
from .model import EffectiveParams, ModelParams, effective_params, flip_rate, harmonic_detuning

__all__ = [
    "AmplitudeTriple",
    "DephasedConstants",
    "EigenSolution",
    "amplitudes",
    "dephased_amplitudes",
    "dephased_constants",
    "conditional_fidelity",
    "fidelity_from_amplitudes",
    "carbon_density_from_amplitudes",
    "carbon_target",
    "eigen_solution",
    "RESONANCE_REL_TOL",
]

# |delta_h| above this fraction of the cavity Stark shift counts as
# off-resonance for the damped closed forms
RESONANCE_REL_TOL = 1e-6


@dataclass(frozen=True)
class AmplitudeTriple:
    """Amplitudes of |00>, |10> and |01> (vacuum, one photon, one flip).

    Entries are complex scalars or arrays broadcast over time.
    """

    m0: complex | np.ndarray
    m1: complex | np.ndarray
    m2: complex | np.ndarray

    def populations(self):
        return np.abs(self.m0) ** 2, np.abs(self.m1) ** 2, np.abs(self.m2) ** 2

    def norm_sq(self):
        p0, p1, p2 = self.populations()
        return p0 + p1 + p2


@dataclass(frozen=True)
class DephasedConstants:
    """Constants of the damped closed forms.

    ``a_const`` is the shared complex envelope constant: its imaginary part
    is the phase constant, its real part -(k1 + k2)/4 is the amplitude decay
    rate of the single-excitation manifold.  ``b_prime`` is the damped
    oscillation frequency, ``c_deph`` the decay-imbalance constant
    (k2 - k1)/2.
    """

    a_const: complex
    b_prime: float
    c_deph: float


@dataclass(frozen=True)
class EigenSolution:
    """Eigenvalues of the amplitude flow: lambda_{1,2} = i(phase_c -+ big_d)."""

    lambda1: complex
    lambda2: complex
    big_d: float
    phase_c: float


def _effective(p: ModelParams) -> tuple[EffectiveParams, float]:
    eff = effective_params(p)
    return eff, flip_rate(p)


def amplitudes(p: ModelParams, t) -> AmplitudeTriple:
    """Undamped closed-form amplitudes at time(s) t.

    m0 = cos(theta) for all t; m1 carries the envelope
    exp(i (phase_c + delta12) t), m2 the envelope exp(i phase_c t).
    """
    eff, flip = _effective(p)
    if eff.big_d == 0.0:
        raise DegenerateSpectrumError("splitting D = 0: amplitudes are degenerate")
    t = np.asarray(t, dtype=float)
    d, c = eff.big_d, eff.phase_c
    sin_t, cos_t = np.sin(d * t), np.cos(d * t)
    s_th, c_th = math.sin(p.theta), math.cos(p.theta)
    m1 = (cos_t + 1j * (eff.delta_h / (2.0 * d)) * sin_t) * np.exp(1j * (c + eff.delta12) * t) * s_th
    m2 = -1j * (flip / d) * sin_t * np.exp(1j * c * t) * s_th
    if t.ndim == 0:
        return AmplitudeTriple(complex(c_th), complex(m1), complex(m2))
    return AmplitudeTriple(np.full(t.shape, c_th, dtype=complex), m1, m2)


def dephased_constants(p: ModelParams, use_legacy_b_prime: bool = False) -> DephasedConstants:
    """Constants of the damped closed forms.

    The oscillation radicand uses the squared ratio (kappa h / omega12)^2;
    ``use_legacy_b_prime`` switches to a historical unsquared-denominator
    variant kept only for cross-checking old hand calculations.
    """
    eff = effective_params(p)
    omega12 = harmonic_detuning(p)
    ratio_sq = (p.kappa * p.h_flip / omega12) ** 2
    if use_legacy_b_prime:
        ratio_sq = p.kappa**2 * p.h_flip**2 / omega12
    radicand = ratio_sq - (p.k1 - p.k2) ** 2 / 4.0
    if radicand < 0.0:
        raise OverdampedRegimeError(
            f"dephasing imbalance exceeds the exchange coupling (radicand {radicand:.3e}); "
            "the damped oscillation frequency would be imaginary"
        )
    b_prime = math.sqrt(radicand)
    a_const = 1j * eff.phase_c - (p.k1 + p.k2) / 4.0
    c_deph = (p.k2 - p.k1) / 2.0
    return DephasedConstants(a_const, b_prime, c_deph)


def _warn_if_off_resonance(p: ModelParams, eff: EffectiveParams):
    scale = abs(p.kappa**2 / (4.0 * p.omega1))
    if scale > 0 and abs(eff.delta_h) > RESONANCE_REL_TOL * scale:
        warnings.warn(
            "damped closed forms assume the Stark shifts cancel; "
            f"|delta_h| = {abs(eff.delta_h):.3e} is significant here, "
            "prefer nonhermitian_evolve for this configuration",
            AccuracyWarning,
            stacklevel=3,
        )


def dephased_amplitudes(
    p: ModelParams, t, use_legacy_b_prime: bool = False
) -> AmplitudeTriple:
    """Damped closed-form amplitudes at time(s) t (resonant configurations).

    m0 = cos(theta) is untouched (no decay channel acts on the vacuum);
    m1 and m2 decay at rate (k1 + k2)/4 and oscillate at b_prime/2.
    """
    eff, flip = _effective(p)
    _warn_if_off_resonance(p, eff)
    consts = dephased_constants(p, use_legacy_b_prime)
    if consts.b_prime == 0.0:
        raise DegenerateSpectrumError("damped splitting b_prime = 0")
    omega12 = harmonic_detuning(p)
    t = np.asarray(t, dtype=float)
    half = consts.b_prime * t / 2.0
    envelope = np.exp(consts.a_const * t)
    s_th, c_th = math.sin(p.theta), math.cos(p.theta)
    m1 = (
        envelope
        * np.exp(1j * eff.delta12 * t)
        * (np.cos(half) + (consts.c_deph / consts.b_prime) * np.sin(half))
        * s_th
    )
    m2 = (
        -1j
        * (p.kappa * p.h_flip / (consts.b_prime * omega12))
        * envelope
        * np.sin(half)
        * s_th
    )
    if t.ndim == 0:
        return AmplitudeTriple(complex(c_th), complex(m1), complex(m2))
    return AmplitudeTriple(np.full(t.shape, c_th, dtype=complex), m1, m2)


def carbon_density_from_amplitudes(amps: AmplitudeTriple) -> np.ndarray:
    """Reduced 2x2 carbon state from the amplitude triple (not renormalized)."""
    m0, m1, m2 = amps.m0, amps.m1, amps.m2
    return np.array(
        [
            [abs(m0) ** 2 + abs(m1) ** 2, m0 * np.conj(m2)],
            [m2 * np.conj(m0), abs(m2) ** 2],
        ],
        dtype=complex,
    )


def carbon_target(theta: float, phase: float = 0.0) -> np.ndarray:
    """Transfer target cos(theta)|0> + i e^{i phase} sin(theta)|1> on the nucleus."""
    return np.array(
        [math.cos(theta), 1j * cmath.exp(1j * phase) * math.sin(theta)], dtype=complex
    )


def fidelity_from_amplitudes(
    amps: AmplitudeTriple, theta: float, target_phase: float = 0.0
) -> float:
    """Sandwich <target| rho_carbon |target> for scalar amplitudes."""
    rho = carbon_density_from_amplitudes(amps)
    psi = carbon_target(theta, target_phase)
    return float(np.real(np.vdot(psi, rho @ psi)))


def conditional_fidelity(p: ModelParams, t: float, gauge_corrected: bool = False) -> float:
    """Conditional transfer fidelity at time t from the closed forms.

    Uses the damped forms when either dephasing constant is positive.  The
    default target is the fixed state cos(theta)|0> + i sin(theta)|1>, which
    is what the reported per-angle fidelities correspond to; with
    ``gauge_corrected`` the target absorbs the residual phase
    exp(i phase_c t), the part removable by a local unitary, and the
    zero-decay resonant fidelity at the transfer time becomes exactly 1.
    """
    if p.k1 > 0.0 or p.k2 > 0.0:
        amps = dephased_amplitudes(p, t)
    else:
        amps = amplitudes(p, t)
    phase = effective_params(p).phase_c * t if gauge_corrected else 0.0
    return fidelity_from_amplitudes(amps, p.theta, phase)


def eigen_solution(p: ModelParams) -> EigenSolution:
    """Eigenvalues of the amplitude flow matrix.

    Purely imaginary by construction: lambda1 + lambda2 = 2i phase_c and
    lambda1 - lambda2 = -2i big_d.
    """
    eff = effective_params(p)
    lam1 = 1j * (eff.phase_c - eff.big_d)
    lam2 = 1j * (eff.phase_c + eff.big_d)
    return EigenSolution(lam1, lam2, eff.big_d, eff.phase_c)
