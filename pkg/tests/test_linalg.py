"""Core linear algebra: HS inner product, Jacobi eigensolver, functional
calculus, trace norm.  numpy.linalg.eigh serves as the independent
eigensolver oracle throughout."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matflow import (
    DimensionMismatchError,
    DomainError,
    NonHermitianError,
    hermitian_eig,
    hs_inner,
    hs_norm_sq,
    matrix_function,
    min_eigenvalue,
    trace_norm,
)
from matflow.sampling import random_hermitian, rng_from_seed


def _rand_complex(n, rng):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestHSInner:
    def test_identity_pair(self):
        eye = np.eye(3, dtype=complex)
        assert hs_inner(eye, eye) == pytest.approx(3.0)

    def test_pauli_orthogonality(self, paulis):
        sx, sy, _ = paulis
        assert abs(hs_inner(sx, sy)) <= 1e-12

    def test_single_entry(self):
        e01 = np.zeros((2, 2), dtype=complex)
        e01[0, 1] = 1.0
        assert hs_inner(e01, e01) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            hs_inner(np.eye(2), np.eye(3))

    def test_conjugate_symmetry(self):
        rng = rng_from_seed(101)
        for _ in range(50):
            a = _rand_complex(4, rng)
            b = _rand_complex(4, rng)
            assert hs_inner(a, b) == pytest.approx(np.conj(hs_inner(b, a)), abs=1e-12)

    def test_cauchy_schwarz(self):
        rng = rng_from_seed(102)
        for _ in range(100):
            a = _rand_complex(3, rng)
            b = _rand_complex(3, rng)
            lhs = abs(hs_inner(a, b)) ** 2
            assert lhs <= hs_norm_sq(a) * hs_norm_sq(b) * (1 + 1e-12)

    @given(st.integers(2, 5), st.integers(0, 10**6))
    @settings(max_examples=30, deadline=None)
    def test_conjugate_linearity_first_argument(self, n, seed):
        rng = rng_from_seed(seed)
        a, b = _rand_complex(n, rng), _rand_complex(n, rng)
        z = complex(rng.standard_normal(), rng.standard_normal())
        assert hs_inner(z * a, b) == pytest.approx(np.conj(z) * hs_inner(a, b))


class TestHermitianEig:
    def test_diagonal_sorted(self):
        dec = hermitian_eig(np.diag([3.0, 1.0, 2.0]).astype(complex))
        assert np.allclose(dec.eigenvalues, [1.0, 2.0, 3.0])

    def test_pauli_x(self, paulis):
        sx, _, _ = paulis
        dec = hermitian_eig(sx)
        assert np.allclose(dec.eigenvalues, [-1.0, 1.0])

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction_random(self):
        # oracle: V diag(w) V^* must reproduce the input
        for k in range(100):
            rng = rng_from_seed(7, k)
            n = 2 + k % 7  # n in 2..8
            h = random_hermitian(n, rng)
            dec = hermitian_eig(h)
            scale = max(1.0, float(np.abs(h).max()))
            assert np.abs(dec.reconstruct() - h).max() <= 1e-9 * scale
            v = dec.eigenvectors
            assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-10

    def test_matches_lapack_eigenvalues(self):
        for k in range(30):
            rng = rng_from_seed(8, k)
            h = random_hermitian(6, rng)
            dec = hermitian_eig(h)
            assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(h), atol=1e-11)

    def test_deterministic(self):
        rng = rng_from_seed(9)
        h = random_hermitian(5, rng)
        d1 = hermitian_eig(h)
        d2 = hermitian_eig(h.copy())
        assert np.array_equal(d1.eigenvalues, d2.eigenvalues)
        assert np.array_equal(d1.eigenvectors, d2.eigenvectors)

    def test_phase_convention(self):
        # first nonzero component of each eigenvector is real positive
        rng = rng_from_seed(10)
        h = random_hermitian(6, rng)
        v = hermitian_eig(h).eigenvectors
        for k in range(6):
            col = v[:, k]
            j = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
            assert col[j].imag == pytest.approx(0.0, abs=1e-12)
            assert col[j].real > 0


class TestMatrixFunction:
    def test_exponential_diagonal(self):
        h = np.diag([0.0, np.log(2.0)]).astype(complex)
        assert np.allclose(matrix_function(h, np.exp), np.diag([1.0, 2.0]), atol=1e-12)

    def test_identity_function(self):
        rng = rng_from_seed(11)
        h = random_hermitian(4, rng)
        assert np.abs(matrix_function(h, lambda x: x) - h).max() <= 1e-12

    def test_square_against_multiplication(self):
        for k in range(50):
            rng = rng_from_seed(12, k)
            h = random_hermitian(3 + k % 4, rng)
            assert np.abs(matrix_function(h, lambda x: x * x) - h @ h).max() <= 1e-10

    def test_log_of_nonpositive_rejected(self):
        with pytest.raises(DomainError) as err:
            matrix_function(np.diag([1.0, -2.0]).astype(complex), np.log, name="log")
        assert "-2" in str(err.value)

    def test_composition(self):
        rng = rng_from_seed(13)
        for _ in range(20):
            h = random_hermitian(4, rng)
            direct = matrix_function(h, lambda x: np.exp(x * x))
            staged = matrix_function(matrix_function(h, lambda x: x * x), np.exp)
            scale = max(1.0, np.abs(direct).max())
            assert np.abs(direct - staged).max() <= 1e-9 * scale


class TestTraceNorm:
    def test_plus_minus_one(self):
        a = np.diag([1.0, 0.0]) - np.diag([0.0, 1.0])
        assert trace_norm(a.astype(complex)) == pytest.approx(2.0)

    def test_zero(self):
        assert trace_norm(np.zeros((3, 3))) == 0.0

    def test_against_eigensolve_oracle(self):
        for k in range(50):
            rng = rng_from_seed(14, k)
            h = random_hermitian(5, rng)
            oracle = np.sum(np.abs(np.linalg.eigvalsh(h)))
            assert trace_norm(h) == pytest.approx(oracle, abs=1e-10)

    def test_norm_axioms(self):
        rng = rng_from_seed(15)
        for _ in range(50):
            a = random_hermitian(4, rng)
            b = random_hermitian(4, rng)
            s = float(rng.standard_normal())
            assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10
            assert trace_norm(s * a) == pytest.approx(abs(s) * trace_norm(a), abs=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestMinEigenvalue:
    def test_identity(self):
        assert min_eigenvalue(np.eye(4)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert min_eigenvalue(np.diag([5.0, -2.0, 0.0])) == pytest.approx(-2.0)

    def test_gram_lower_bound(self):
        eps = 1e-3
        for k in range(20):
            rng = rng_from_seed(16, k)
            b = _rand_complex(4, rng)
            g = b.conj().T @ b + eps * np.eye(4)
            assert min_eigenvalue(g) >= eps - 1e-10
