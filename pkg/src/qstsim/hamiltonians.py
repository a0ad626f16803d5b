"""Builders for each stage of the cavity / electron spin / nuclear spin model.

Conventions, fixed once for the whole package:

* dressed electron qubit basis [g, e]: S+ = |e><g|, S_z = |e><e| - |g><g|
* bare electron basis for the driven-cavity builder: [|0>, |-1>]
* electron triplet basis for the bare hyperfine builder: [+1, 0, -1]
* nuclear spin-1/2 basis [down, up]: I+ = |up><down|, I_z eigenvalues -1/2, +1/2
* subsystem order [electron, cavity, carbon] for three-body builders,
  [cavity, carbon] for the effective two-body builders; the carbon-excited
  basis state of the effective space is index 1, the one-photon state index 2.

Time dependence lives in per-term scalar envelopes, evaluated as exact
complex exponentials at every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError
from .linalg import HilbertDims, Operator, destroy, number_op
from .model import ModelParams, effective_params, flip_rate, hyperfine_coefficients

__all__ = [
    "TimeDependentHamiltonian",
    "build_cavity_nv",
    "build_hyperfine",
    "build_dressed_total",
    "build_rwa_interaction",
    "build_effective",
    "build_effective_general",
    "build_effective_dephasing",
    "EFFECTIVE_DIMS",
    "EFFECTIVE_INDEX",
]

Envelope = Callable[[float], complex]

# effective two-body space bookkeeping: basis |cavity, carbon>
EFFECTIVE_DIMS = HilbertDims((2, 2), ("cavity", "carbon"))
EFFECTIVE_INDEX = {"00": 0, "01": 1, "10": 2, "11": 3}


def _const(_t: float) -> complex:
    return 1.0 + 0.0j


def _rotating(freq: float) -> Envelope:
    def env(t: float) -> complex:
        return np.exp(1j * freq * t)

    return env


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """Sum of (constant operator, scalar envelope of time) pairs.

    ``hermitian_contract`` declares whether H(t) must be Hermitian at every
    time; builders that add decay terms set it to False.
    """

    dims: HilbertDims
    terms: tuple[tuple[Operator, Envelope], ...]
    hermitian_contract: bool = True

    def __post_init__(self):
        for op, _ in self.terms:
            if op.dims.dims != self.dims.dims:
                raise ParameterError("all term operators must share the builder dims")

    def matrix_at(self, t: float) -> np.ndarray:
        out = np.zeros((self.dims.total, self.dims.total), dtype=complex)
        for op, env in self.terms:
            out += complex(env(t)) * op.matrix
        return out

    def at(self, t: float) -> Operator:
        return Operator(self.dims, self.matrix_at(t))

    def is_constant(self) -> bool:
        return all(env is _const for _, env in self.terms)

    def reversed_in_time(self, t_final: float) -> "TimeDependentHamiltonian":
        """H'(t) = -H(t_final - t); evolving under H' undoes the original run."""

        def flip(env: Envelope) -> Envelope:
            def rev(t: float) -> complex:
                return env(t_final - t)

            return rev

        terms = tuple((-op, flip(env)) for op, env in self.terms)
        return TimeDependentHamiltonian(self.dims, terms, self.hermitian_contract)


# single-subsystem operator blocks ------------------------------------------

def _qubit_ops():
    """[g, e] dressed basis: returns (s_minus, s_plus, s_z, proj_e)."""
    sm = np.array([[0, 1], [0, 0]], dtype=complex)  # |g><e|
    sp = sm.T.copy()
    sz = np.diag([-1.0, 1.0]).astype(complex)
    pe = np.diag([0.0, 1.0]).astype(complex)
    return sm, sp, sz, pe


def _carbon_ops():
    """[down, up] basis: returns (i_minus, i_plus, i_z, n_up)."""
    im = np.array([[0, 1], [0, 0]], dtype=complex)  # |down><up|
    ip = im.T.copy()
    iz = np.diag([-0.5, 0.5]).astype(complex)
    n_up = np.diag([0.0, 1.0]).astype(complex)
    return im, ip, iz, n_up


def _triplet_ops():
    """[+1, 0, -1] basis: ladder with unit matrix elements, as used here."""
    sig_p = np.zeros((3, 3), dtype=complex)
    sig_p[0, 1] = 1.0  # |+1><0|
    sig_p[1, 2] = 1.0  # |0><-1|
    sig_m = sig_p.conj().T
    sig_z = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sig_m, sig_p, sig_z


def _embed3(nv: np.ndarray, cav: np.ndarray, car: np.ndarray, dims: HilbertDims) -> Operator:
    return Operator(dims, np.kron(np.kron(nv, cav), car))


def _hyperfine_pair(p: ModelParams) -> tuple[float, float]:
    p.require("c_par", "c_perp", "theta_axis")
    hf = hyperfine_coefficients(p.c_par, p.c_perp, p.theta_axis)
    return hf.c_par_theta, hf.c_perp_theta


# builders -------------------------------------------------------------------

def build_cavity_nv(p: ModelParams, fock_levels: int = 2) -> TimeDependentHamiltonian:
    """Driven electron qubit coupled to the cavity mode.

    Space: bare qubit [|0>, |-1>] (x) Fock(fock_levels).  The microwave drive
    enters with envelopes exp(-+ i omega_0 t).
    """
    p.require("omega_nv", "omega_c", "g_coupling", "lambda_drive", "omega_0")
    dims = HilbertDims((2, fock_levels), ("nv", "cavity"))
    flip = np.array([[0, 0], [1, 0]], dtype=complex)  # |-1><0|
    sz = np.diag([-1.0, 1.0]).astype(complex)
    eye_q = np.eye(2, dtype=complex)
    a = destroy(fock_levels).matrix
    n = number_op(fock_levels).matrix
    eye_c = np.eye(fock_levels, dtype=complex)

    free = (p.omega_nv / 2.0) * np.kron(sz, eye_c) + p.omega_c * np.kron(eye_q, n)
    exchange = p.g_coupling * (np.kron(flip, a) + np.kron(flip.conj().T, a.conj().T))
    drive_dn = p.lambda_drive * np.kron(flip, eye_c)
    drive_up = p.lambda_drive * np.kron(flip.conj().T, eye_c)
    terms = (
        (Operator(dims, free + exchange), _const),
        (Operator(dims, drive_dn), _rotating(-p.omega_0)),
        (Operator(dims, drive_up), _rotating(p.omega_0)),
    )
    return TimeDependentHamiltonian(dims, terms, hermitian_contract=True)


def build_hyperfine(
    p: ModelParams,
    c_r: float | None = None,
    c_delta: float | None = None,
) -> TimeDependentHamiltonian:
    """Bare electron-triplet / nuclear-spin coupling with the |0>,|-1| flip pair.

    ``c_r`` and ``c_delta`` optionally restore the double-flip and transverse
    terms that are dropped at high magnetic field; they use the full triplet
    ladder operators.
    """
    p.require("omega_c13")
    c_par_t, c_perp_t = _hyperfine_pair(p)
    dims = HilbertDims((3, 2), ("nv", "carbon"))
    im, ip, iz, _ = _carbon_ops()
    eye3 = np.eye(3, dtype=complex)
    proj_m1 = np.diag([0.0, 0.0, 1.0]).astype(complex)
    lower_nv = np.zeros((3, 3), dtype=complex)
    lower_nv[1, 2] = 1.0  # |0><-1|

    h = p.omega_c13 * np.kron(eye3, iz)
    h += c_par_t * np.kron(proj_m1, iz)
    h += (c_perp_t / 2.0) * (np.kron(lower_nv, im) + np.kron(lower_nv.conj().T, ip))
    if c_r is not None or c_delta is not None:
        sig_m, sig_p, sig_z = _triplet_ops()
        iy = (ip - im) / 2j
        sig_y = (sig_p - sig_m) / 2j
        if c_r is not None:
            h += (c_r / 2.0) * (np.kron(sig_p, ip) + np.kron(sig_m, im))
        if c_delta is not None:
            h += c_delta * (np.kron(sig_z, iy) + np.kron(sig_y, iz))
    return TimeDependentHamiltonian(dims, ((Operator(dims, h), _const),), hermitian_contract=True)


def build_dressed_total(p: ModelParams, fock_levels: int = 2) -> TimeDependentHamiltonian:
    """Full dressed-basis Hamiltonian of electron qubit, cavity and nucleus."""
    p.require("omega_dressed", "omega_c", "omega_0", "eta", "omega_c13")
    c_par_t, c_perp_t = _hyperfine_pair(p)
    dims = HilbertDims((2, fock_levels, 2), ("nv", "cavity", "carbon"))
    sm, sp, sz, _ = _qubit_ops()
    im, ip, iz, _ = _carbon_ops()
    eye_q = np.eye(2, dtype=complex)
    a = destroy(fock_levels).matrix
    n = number_op(fock_levels).matrix
    eye_c = np.eye(fock_levels, dtype=complex)
    eye_i = np.eye(2, dtype=complex)
    cos_eta, sin_eta = np.cos(p.eta), np.sin(p.eta)
    cos_half_sq = np.cos(p.eta / 2.0) ** 2
    sin_half_sq = np.sin(p.eta / 2.0) ** 2

    free = (p.omega_dressed / 2.0) * _embed3(sz, eye_c, eye_i, dims).matrix
    free += p.omega_c * _embed3(eye_q, n, eye_i, dims).matrix
    free += (p.omega_c13 + c_par_t / 2.0) * _embed3(eye_q, eye_c, iz, dims).matrix
    free += (c_par_t / 2.0) * (
        (cos_eta / 2.0) * _embed3(sz, eye_c, iz, dims).matrix
        - (sin_eta / 2.0) * _embed3(sm + sp, eye_c, iz, dims).matrix
    )

    exch_dn = (p.kappa / 2.0) * _embed3(sm, a.conj().T, eye_i, dims).matrix
    exch_up = exch_dn.conj().T

    mix_minus = (sin_eta / 2.0) * sz + cos_half_sq * sm - sin_half_sq * sp
    mix_plus = (sin_eta / 2.0) * sz - sin_half_sq * sm + cos_half_sq * sp
    hyper_dn = (c_perp_t / 2.0) * _embed3(mix_minus, eye_c, im, dims).matrix
    hyper_up = (c_perp_t / 2.0) * _embed3(mix_plus, eye_c, ip, dims).matrix

    terms = (
        (Operator(dims, free), _const),
        (Operator(dims, exch_dn), _rotating(-p.omega_0)),
        (Operator(dims, exch_up), _rotating(p.omega_0)),
        (Operator(dims, hyper_dn), _rotating(-p.omega_0)),
        (Operator(dims, hyper_up), _rotating(p.omega_0)),
    )
    return TimeDependentHamiltonian(dims, terms, hermitian_contract=True)


def build_rwa_interaction(p: ModelParams, fock_levels: int = 2) -> TimeDependentHamiltonian:
    """Interaction-picture Hamiltonian after dropping fast co-rotating terms.

    Envelopes oscillate at the two detunings omega1 and omega2; the diagonal
    S_z I_z piece keeps the parallel hyperfine shift.
    """
    p.require("eta")
    c_par_t, _ = _hyperfine_pair(p)
    dims = HilbertDims((2, fock_levels, 2), ("nv", "cavity", "carbon"))
    sm, sp, sz, _ = _qubit_ops()
    im, ip, iz, _ = _carbon_ops()
    eye_c = np.eye(fock_levels, dtype=complex)
    eye_i = np.eye(2, dtype=complex)
    a = destroy(fock_levels).matrix

    exch_dn = (p.kappa / 2.0) * _embed3(sm, a.conj().T, eye_i, dims).matrix
    stark = (c_par_t / 2.0) * (np.cos(p.eta) / 2.0) * _embed3(sz, eye_c, iz, dims).matrix
    flip_pm = p.h_flip * _embed3(sp, eye_c, im, dims).matrix
    flip_mp = p.h_flip * _embed3(sm, eye_c, ip, dims).matrix

    terms = (
        (Operator(dims, stark), _const),
        (Operator(dims, exch_dn), _rotating(p.omega1)),
        (Operator(dims, exch_dn.conj().T), _rotating(-p.omega1)),
        (Operator(dims, flip_pm), _rotating(-p.omega2)),
        (Operator(dims, flip_mp), _rotating(p.omega2)),
    )
    return TimeDependentHamiltonian(dims, terms, hermitian_contract=True)


def _effective_blocks(p: ModelParams):
    eff = effective_params(p)
    stark_cav = p.kappa**2 / (4.0 * p.omega1)
    stark_car = p.h_flip**2 / p.omega2
    flip = flip_rate(p)
    return eff, stark_cav, stark_car, flip


def build_effective(p: ModelParams, fock_levels: int = 2) -> TimeDependentHamiltonian:
    """Two-body effective model on cavity(fock_levels) (x) carbon(2).

    Diagonal Stark shifts plus the excitation-conserving exchange with
    envelope exp(+-i delta12 t); |00> and |11> are exactly decoupled.  The
    two-level cavity truncation is exact for the transfer initial state;
    higher truncations exist to verify that no leakage occurs.
    """
    eff, stark_cav, stark_car, flip = _effective_blocks(p)
    dims = EFFECTIVE_DIMS if fock_levels == 2 else HilbertDims((fock_levels, 2), ("cavity", "carbon"))
    im, ip, _, n_up = _carbon_ops()
    a = destroy(fock_levels).matrix
    n_cav = number_op(fock_levels).matrix
    eye2 = np.eye(2, dtype=complex)

    diag = stark_cav * np.kron(n_cav, eye2) + stark_car * np.kron(np.eye(fock_levels), n_up)
    raise_cav = flip * np.kron(a.conj().T, im)
    lower_cav = flip * np.kron(a, ip)
    terms = (
        (Operator(dims, diag), _const),
        (Operator(dims, raise_cav), _rotating(eff.delta12)),
        (Operator(dims, lower_cav), _rotating(-eff.delta12)),
    )
    return TimeDependentHamiltonian(dims, terms, hermitian_contract=True)


def build_effective_general(p: ModelParams) -> TimeDependentHamiltonian:
    """Effective model before conditioning on the electron state.

    Space: electron(2) (x) cavity(2) (x) carbon(2).  Restricting to the
    electron ground block reproduces :func:`build_effective` exactly.
    """
    eff, stark_cav, stark_car, flip = _effective_blocks(p)
    dims = HilbertDims((2, 2, 2), ("nv", "cavity", "carbon"))
    sm, sp, sz, pe = _qubit_ops()
    im, ip, iz, n_up = _carbon_ops()
    a = destroy(2).matrix
    n_cav = number_op(2).matrix
    eye2 = np.eye(2, dtype=complex)

    diag = stark_cav * (-_embed3(sz, n_cav, eye2, dims).matrix - _embed3(pe, eye2, eye2, dims).matrix)
    diag += stark_car * (
        _embed3(pe, eye2, iz, dims).matrix - _embed3(sz, eye2, n_up, dims).matrix
    )
    raise_cav = -flip * _embed3(sz, a.conj().T, im, dims).matrix
    lower_cav = -flip * _embed3(sz, a, ip, dims).matrix
    terms = (
        (Operator(dims, diag), _const),
        (Operator(dims, raise_cav), _rotating(eff.delta12)),
        (Operator(dims, lower_cav), _rotating(-eff.delta12)),
    )
    return TimeDependentHamiltonian(dims, terms, hermitian_contract=True)


def build_effective_dephasing(p: ModelParams) -> TimeDependentHamiltonian:
    """Effective model plus anti-Hermitian decay -i k1/2 n_cav - i k2/2 n_up."""
    if p.k1 < 0 or p.k2 < 0:
        raise ParameterError("dephasing constants must be >= 0")
    base = build_effective(p)
    _, _, _, n_up = _carbon_ops()
    n_cav = number_op(2).matrix
    eye2 = np.eye(2, dtype=complex)
    decay = -0.5j * (p.k1 * np.kron(n_cav, eye2) + p.k2 * np.kron(eye2, n_up))
    terms = base.terms + ((Operator(base.dims, decay), _const),)
    return TimeDependentHamiltonian(base.dims, terms, hermitian_contract=False)
