import numpy as np
import pytest

from qstsim.errors import DimensionMismatchError
from qstsim.linalg import (
    DensityMatrix,
    HilbertDims,
    Operator,
    StateVector,
    basis,
    dagger,
    destroy,
    expectation,
    identity,
    is_hermitian,
    number_op,
    outer,
    partial_trace,
    tensor,
)


def brute_force_keep(rho: np.ndarray, dims: tuple, keep: int) -> np.ndarray:
    """Independent partial-trace oracle: explicit summation over flat indices."""
    n_keep = dims[keep]
    out = np.zeros((n_keep, n_keep), dtype=complex)
    total = int(np.prod(dims))
    for row in range(total):
        for col in range(total):
            ridx = np.unravel_index(row, dims)
            cidx = np.unravel_index(col, dims)
            traced_match = all(
                ridx[k] == cidx[k] for k in range(len(dims)) if k != keep
            )
            if traced_match:
                out[ridx[keep], cidx[keep]] += rho[row, col]
    return out


class TestTensor:
    def test_identity_product(self):
        result = tensor(identity(2), identity(2))
        assert np.array_equal(result.matrix, np.eye(4))
        assert result.dims.dims == (2, 2)

    def test_basis_bookkeeping(self):
        ket = tensor(basis(2, 0), basis(2, 1))
        expected = np.zeros(4, dtype=complex)
        expected[1] = 1.0
        assert np.array_equal(ket.amplitudes, expected)

    def test_lowering_on_first_factor(self):
        op = tensor(destroy(2), identity(2))
        state = tensor(basis(2, 1), basis(2, 0))
        out = op @ state
        assert np.array_equal(out.amplitudes, tensor(basis(2, 0), basis(2, 0)).amplitudes)

    def test_associativity_exact(self, rng):
        # small-integer entries keep float products exact, so the grouping
        # really is bit-identical
        mats = [
            rng.integers(-3, 4, size=(d, d)) + 1j * rng.integers(-3, 4, size=(d, d))
            for d in (2, 3, 2)
        ]
        ops = [Operator(HilbertDims((m.shape[0],)), m) for m in mats]
        left = tensor(tensor(ops[0], ops[1]), ops[2])
        right = tensor(ops[0], tensor(ops[1], ops[2]))
        assert np.array_equal(left.matrix, right.matrix)

    def test_type_mismatch(self):
        with pytest.raises(TypeError):
            tensor(identity(2), basis(2, 0))


class TestPartialTrace:
    def test_product_state_factors(self):
        rho = outer(tensor(basis(2, 0), basis(2, 1)))
        kept = partial_trace(rho, keep=1)
        assert np.allclose(kept.matrix, np.diag([0.0, 1.0]), atol=1e-15)

    def test_bell_state_maximally_mixed(self):
        amps = np.zeros(4, dtype=complex)
        amps[0] = amps[3] = 1 / np.sqrt(2)
        rho = outer(StateVector(HilbertDims((2, 2)), amps))
        for keep in (0, 1):
            kept = partial_trace(rho, keep)
            assert np.allclose(kept.matrix, np.eye(2) / 2, atol=1e-15)

    def test_transfer_superposition_vs_brute_force(self, rng):
        # state m0|00> + m1|10> + m2|01> on cavity (x) carbon, keep carbon
        m = rng.normal(size=3) + 1j * rng.normal(size=3)
        m /= np.linalg.norm(m)
        m0, m1, m2 = m
        amps = np.array([m0, m2, m1, 0.0], dtype=complex)
        rho = outer(StateVector(HilbertDims((2, 2), ("cavity", "carbon")), amps))
        kept = partial_trace(rho, keep=1)
        by_hand = np.array(
            [
                [abs(m0) ** 2 + abs(m1) ** 2, m0 * np.conj(m2)],
                [m2 * np.conj(m0), abs(m2) ** 2],
            ]
        )
        oracle = brute_force_keep(rho.matrix, (2, 2), keep=1)
        assert np.allclose(by_hand, oracle, atol=1e-14)
        assert np.allclose(kept.matrix, oracle, atol=1e-14)

    def test_product_density_matrices(self, rng):
        def random_density(d):
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            m = a @ a.conj().T
            return DensityMatrix(HilbertDims((d,)), m / np.trace(m))

        rho_a, rho_b = random_density(2), random_density(3)
        joint = DensityMatrix(
            HilbertDims((2, 3)), np.kron(rho_a.matrix, rho_b.matrix)
        )
        kept = partial_trace(joint, keep=0)
        assert np.allclose(kept.matrix, rho_a.matrix, atol=1e-14)

    def test_trace_preserved_three_subsystems(self, rng):
        dims = (2, 3, 2)
        total = int(np.prod(dims))
        a = rng.normal(size=(total, total)) + 1j * rng.normal(size=(total, total))
        m = a @ a.conj().T
        rho = DensityMatrix(HilbertDims(dims), m / np.trace(m))
        for keep in range(3):
            kept = partial_trace(rho, keep)
            assert abs(kept.trace - rho.trace) < 1e-12
            assert np.allclose(kept.matrix, brute_force_keep(rho.matrix, dims, keep), atol=1e-12)

    def test_keep_out_of_range(self):
        rho = outer(tensor(basis(2, 0), basis(2, 0)))
        with pytest.raises(DimensionMismatchError):
            partial_trace(rho, keep=2)


class TestExpectation:
    def test_number_operator(self):
        n = number_op(2)
        assert expectation(n, basis(2, 1)) == pytest.approx(1.0)
        assert expectation(n, basis(2, 0)) == pytest.approx(0.0)

    def test_projector_on_transfer_state(self):
        theta = np.pi / 4
        amps = np.zeros(4, dtype=complex)
        amps[0] = np.cos(theta)
        amps[2] = np.sin(theta)
        state = StateVector(HilbertDims((2, 2)), amps)
        proj = tensor(Operator(HilbertDims((2,)), np.diag([0.0, 1.0])), identity(2))
        assert expectation(proj, state) == pytest.approx(0.5)

    def test_hermitian_expectation_real(self, rng):
        for _ in range(20):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            herm = Operator(HilbertDims((4,)), a + a.conj().T)
            v = rng.normal(size=4) + 1j * rng.normal(size=4)
            v /= np.linalg.norm(v)
            val = expectation(herm, StateVector(HilbertDims((4,)), v))
            assert abs(val.imag) <= 1e-10 * np.linalg.norm(herm.matrix, 2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            expectation(identity(3), basis(2, 0))


class TestDagger:
    def test_destroy_adjoint_entries(self):
        a = destroy(3)
        adj = dagger(a)
        expected = np.diag(np.sqrt([1.0, 2.0]), k=-1)
        assert np.array_equal(adj.matrix, expected)

    def test_involution_exact(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        op = Operator(HilbertDims((4,)), m)
        assert np.array_equal(dagger(dagger(op)).matrix, op.matrix)

    def test_is_hermitian(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert is_hermitian(Operator(HilbertDims((3,)), a + a.conj().T))
        assert not is_hermitian(Operator(HilbertDims((3,)), a + a.conj().T + 1e-6 * 1j * np.eye(3)))


class TestValueSemantics:
    def test_arrays_are_read_only(self):
        op = identity(2)
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 5.0

    def test_density_matrix_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            DensityMatrix(HilbertDims((2,)), np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_density_matrix_physicality_check(self):
        rho = DensityMatrix(HilbertDims((2,)), np.diag([0.5, 0.5]))
        rho.assert_physical()
        lopsided = DensityMatrix(HilbertDims((2,)), np.diag([1.5, -0.5]))
        with pytest.raises(ValueError):
            lopsided.assert_physical()

    def test_state_norm(self):
        v = StateVector(HilbertDims((2,)), np.array([3.0, 4.0]))
        assert v.norm == pytest.approx(5.0)
