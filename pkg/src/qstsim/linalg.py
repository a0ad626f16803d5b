"""Dense complex linear algebra over small tensor-product Hilbert spaces.

States, operators and density matrices carry their subsystem dimensions as
metadata, so Kronecker products, partial traces and expectation values can
check compatibility instead of silently misindexing.  Everything is an
immutable value: arrays are copied on construction and marked read-only, so
instances can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Union

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "HilbertDims",
    "StateVector",
    "Operator",
    "DensityMatrix",
    "tensor",
    "partial_trace",
    "expectation",
    "dagger",
    "is_hermitian",
    "identity",
    "basis",
    "destroy",
    "number_op",
    "outer",
]

HERMITIAN_TOL = 1e-10


def _frozen_array(values, shape_check=None) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if shape_check is not None and arr.shape != shape_check:
        raise DimensionMismatchError(f"expected shape {shape_check}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HilbertDims:
    """Ordered subsystem dimensions of a tensor-product space.

    The first entry is the slowest-varying index of the flattened basis.
    Optional labels document which physical subsystem each factor is.
    """

    dims: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionMismatchError(f"invalid subsystem dims {dims}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(dims):
                raise DimensionMismatchError("labels must match dims one-to-one")
            object.__setattr__(self, "labels", labels)

    @property
    def total(self) -> int:
        return prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def concat(self, other: "HilbertDims") -> "HilbertDims":
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = self.labels + other.labels
        return HilbertDims(self.dims + other.dims, labels)


def _as_dims(dims) -> HilbertDims:
    if isinstance(dims, HilbertDims):
        return dims
    if isinstance(dims, int):
        return HilbertDims((dims,))
    return HilbertDims(tuple(dims))


@dataclass(frozen=True)
class StateVector:
    """Pure state |psi> over a tensor-product space.

    Norm is not forced to 1: conditional (decaying) evolution legitimately
    produces sub-normalized states.
    """

    dims: HilbertDims
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        amps = _frozen_array(self.amplitudes, (dims.total,))
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density_matrix(self) -> "DensityMatrix":
        return outer(self)


@dataclass(frozen=True)
class Operator:
    """Square complex matrix acting on a tensor-product space."""

    dims: HilbertDims
    matrix: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        n = dims.total
        mat = _frozen_array(self.matrix, (n, n))
        object.__setattr__(self, "matrix", mat)

    def _check_same_space(self, other: "Operator"):
        if self.dims.dims != other.dims.dims:
            raise DimensionMismatchError(
                f"operator spaces differ: {self.dims.dims} vs {other.dims.dims}"
            )

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.dims, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.dims, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.dims, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.dims, -self.matrix)

    def __matmul__(self, other: Union["Operator", StateVector]):
        if isinstance(other, StateVector):
            if self.dims.dims != other.dims.dims:
                raise DimensionMismatchError("operator and state spaces differ")
            return StateVector(self.dims, self.matrix @ other.amplitudes)
        self._check_same_space(other)
        return Operator(self.dims, self.matrix @ other.matrix)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian (within tolerance) state matrix; trace need not be 1 for
    conditional states."""

    dims: HilbertDims
    matrix: np.ndarray
    hermitian_tol: float = HERMITIAN_TOL

    def __post_init__(self):
        dims = _as_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        n = dims.total
        mat = _frozen_array(self.matrix, (n, n))
        dev = np.max(np.abs(mat - mat.conj().T))
        scale = max(1.0, float(np.max(np.abs(mat))))
        if dev > self.hermitian_tol * scale:
            raise ValueError(f"matrix not Hermitian: max deviation {dev:.3e}")
        object.__setattr__(self, "matrix", mat)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def min_eigenvalue(self) -> float:
        half = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(half)[0])

    def assert_physical(self, trace_tol: float = 1e-8, eig_floor: float = -1e-10):
        """Full state-matrix invariant: unit trace and near-positive spectrum."""
        if abs(self.trace - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace} deviates from 1 beyond {trace_tol}")
        lo = self.min_eigenvalue()
        if lo < eig_floor:
            raise ValueError(f"negative eigenvalue {lo:.3e} below floor {eig_floor}")


def tensor(a, b):
    """Kronecker product of two states or two operators.

    The left operand becomes the slower-varying index of the result, and the
    result's dims are the concatenation of the operand dims.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(a.dims.concat(b.dims), np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(a.dims.concat(b.dims), np.kron(a.matrix, b.matrix))
    raise TypeError("tensor expects two StateVectors or two Operators")


def tensor_all(factors: Iterable):
    factors = list(factors)
    out = factors[0]
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Trace out every subsystem except ``keep``.

    Implemented by reshaping to one (bra, ket) index pair per subsystem and
    contracting the discarded pairs; preserves the trace exactly up to
    floating point.
    """
    dims = rho.dims.dims
    n_sub = len(dims)
    if n_sub < 2:
        raise DimensionMismatchError("partial_trace needs at least two subsystems")
    if not 0 <= keep < n_sub:
        raise DimensionMismatchError(f"keep index {keep} out of range for {n_sub} subsystems")
    tensor_form = rho.matrix.reshape(dims + dims)
    # contract bra/ket index pairs of every traced-out subsystem
    out = tensor_form
    removed = 0
    for idx in range(n_sub):
        if idx == keep:
            continue
        ax = idx - removed
        out = np.trace(out, axis1=ax, axis2=ax + n_sub - removed)
        removed += 1
    label = None
    if rho.dims.labels is not None:
        label = (rho.dims.labels[keep],)
    return DensityMatrix(HilbertDims((dims[keep],), label), out)


def expectation(op: Operator, state) -> complex:
    """<psi|A|psi> for a StateVector or Tr(A rho) for a DensityMatrix."""
    if op.dims.dims != state.dims.dims:
        raise DimensionMismatchError("operator and state spaces differ")
    if isinstance(state, StateVector):
        v = state.amplitudes
        return complex(np.vdot(v, op.matrix @ v))
    if isinstance(state, DensityMatrix):
        return complex(np.trace(op.matrix @ state.matrix))
    raise TypeError(f"unsupported state type {type(state)}")


def dagger(op: Operator) -> Operator:
    return Operator(op.dims, op.matrix.conj().T)


def is_hermitian(op: Operator, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(op.matrix - op.matrix.conj().T)) <= tol)


def identity(dim, labels=None) -> Operator:
    d = _as_dims(dim) if not isinstance(dim, int) else HilbertDims((dim,), labels)
    return Operator(d, np.eye(d.total))


def basis(dim: int, index: int, label: str | None = None) -> StateVector:
    if not 0 <= index < dim:
        raise DimensionMismatchError(f"basis index {index} out of range for dim {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return StateVector(HilbertDims((dim,), (label,) if label else None), v)


def destroy(dim: int) -> Operator:
    """Truncated bosonic annihilation operator: a|n> = sqrt(n)|n-1>."""
    m = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return Operator(HilbertDims((dim,)), m)


def number_op(dim: int) -> Operator:
    return Operator(HilbertDims((dim,)), np.diag(np.arange(dim, dtype=float)))


def outer(state: StateVector) -> DensityMatrix:
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    return DensityMatrix(state.dims, rho)
