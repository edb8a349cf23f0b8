"""Model construction, derivations, Laplacian, super-operator, eigenbasis.

Oracles: entrywise hand evaluations for n = 2, numpy.linalg.eigh on the
vectorized super-operator, and direct multiplication for commutation
relations."""

import numpy as np
import pytest

from matflow import (
    DegenerateModelError,
    DimensionMismatchError,
    build_model,
    decompose,
    delta1,
    delta2,
    dirichlet_energy,
    hs_inner,
    hs_norm_sq,
    laplacian_apply,
    laplacian_superoperator,
    rayleigh,
    reconstruct,
    vec,
)
from matflow.geometry import delta_superoperators, fourier_matrix
from matflow.sampling import random_hermitian, random_unitary, rng_from_seed


def _rand_complex(n, rng):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestBuildModel:
    def test_n2_generators(self, model):
        m = model(2)
        assert np.allclose(m.x, np.diag([0.0, 1.0]), atol=1e-14)
        assert np.allclose(m.y, 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-12)

    def test_n2_clock_unitary(self, model):
        m = model(2)
        assert np.allclose(m.u, np.diag([1.0, -1.0]), atol=1e-12)
        assert np.allclose(m.u @ m.u, np.eye(2), atol=1e-9)

    def test_unitarity_and_order(self):
        for n in (2, 3, 5):
            m = build_model(n)
            for w in (m.u, m.v):
                assert np.abs(w.conj().T @ w - np.eye(n)).max() <= 1e-10
                power = np.eye(n, dtype=complex)
                for _ in range(n):
                    power = power @ w
                assert np.abs(power - np.eye(n)).max() <= 1e-9

    def test_clock_shift_commutation(self, model):
        # V U = omega U V with omega = exp(2 pi i / n)
        for n in (3, 5):
            m = build_model(n)
            omega = np.exp(2j * np.pi / n)
            assert np.abs(m.v @ m.u - omega * m.u @ m.v).max() <= 1e-10

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            build_model(1)

    def test_custom_requires_hermitian(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        good = np.eye(2)
        with pytest.raises(Exception):
            build_model(2, "custom", x=bad, y=good)

    def test_custom_degenerate_kernel_flagged(self):
        # commuting generators leave a kernel of dimension > 1
        m = build_model(2, "custom", x=np.diag([0.0, 1.0]), y=np.diag([1.0, 2.0]))
        with pytest.raises(DegenerateModelError):
            m.eigenbasis()


class TestDerivations:
    def test_identity_in_kernel(self, model):
        m = model(3)
        eye = np.eye(3, dtype=complex)
        assert np.abs(delta1(m, eye)).max() <= 1e-12
        assert np.abs(delta2(m, eye)).max() <= 1e-12

    def test_delta2_on_unit_matrix(self, model):
        m = model(2)
        e01 = np.zeros((2, 2), dtype=complex)
        e01[0, 1] = 1.0
        assert np.abs(delta2(m, e01) - e01).max() <= 1e-12

    def test_leibniz_rule(self, model):
        m = model(4)
        rng = rng_from_seed(20)
        for _ in range(100):
            a = _rand_complex(4, rng)
            b = _rand_complex(4, rng)
            for delta in (delta1, delta2):
                lhs = delta(m, a @ b)
                rhs = delta(m, a) @ b + a @ delta(m, b)
                assert np.abs(lhs - rhs).max() <= 1e-11 * max(1.0, np.abs(lhs).max())

    def test_adjoint_identity(self):
        # commutator with a Hermitian generator is HS self-adjoint,
        # also for custom random-generator models
        rng = rng_from_seed(21)
        for n in (2, 3, 5):
            m = build_model(n, "custom",
                            x=random_hermitian(n, rng), y=random_hermitian(n, rng))
            for _ in range(10):
                a = _rand_complex(n, rng)
                b = _rand_complex(n, rng)
                for delta in (delta1, delta2):
                    lhs = hs_inner(delta(m, a), b)
                    rhs = hs_inner(a, delta(m, b))
                    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(lhs))

    def test_dimension_mismatch(self, model):
        with pytest.raises(DimensionMismatchError):
            delta1(model(3), np.eye(2))


class TestLaplacian:
    def test_kernel_contains_identity(self, model):
        m = model(3)
        assert np.abs(laplacian_apply(m, np.eye(3))).max() <= 1e-12

    def test_pauli_actions(self, model, paulis):
        # oracle: the 4x4 vectorized eigenproblem gives levels {0, 1, 1, 2};
        # sigma_x and sigma_z span the level-1 eigenspace, sigma_y the level 2
        m = model(2)
        sx, sy, sz = paulis
        assert np.abs(laplacian_apply(m, sy) - 2.0 * sy).max() <= 1e-12
        assert np.abs(laplacian_apply(m, sx) - sx).max() <= 1e-12
        assert np.abs(laplacian_apply(m, sz) - sz).max() <= 1e-12

    def test_agrees_with_superoperator(self, model):
        rng = rng_from_seed(22)
        for n in (2, 4, 6):
            m = model(n)
            l = laplacian_superoperator(m)
            for _ in range(10):
                a = _rand_complex(n, rng)
                direct = vec(laplacian_apply(m, a))
                assert np.abs(l @ vec(a) - direct).max() <= 1e-11 * max(1.0, np.abs(direct).max())

    def test_superoperator_is_adjoint_composition(self, model):
        for n in (2, 3, 4):
            m = model(n)
            l1, l2 = delta_superoperators(m)
            composed = l1.conj().T @ l1 + l2.conj().T @ l2
            assert np.abs(laplacian_superoperator(m) - composed).max() <= 1e-12

    def test_hermitian_preserving(self, model):
        m = model(5)
        rng = rng_from_seed(23)
        for _ in range(20):
            h = random_hermitian(5, rng)
            out = laplacian_apply(m, h)
            assert np.abs(out - out.conj().T).max() <= 1e-11 * max(1.0, np.abs(out).max())

    def test_superoperator_psd_and_kernel(self, model):
        for n in range(2, 9):
            l = laplacian_superoperator(model(n))
            w = np.linalg.eigvalsh(l)  # oracle eigensolve
            assert w[0] >= -1e-10
            eye = np.eye(n, dtype=complex)
            assert np.abs(l @ vec(eye)).max() <= 1e-11

    def test_n2_eigenvalues(self, model):
        w = np.linalg.eigvalsh(laplacian_superoperator(model(2)))
        assert np.allclose(w, [0.0, 1.0, 1.0, 2.0], atol=1e-10)


class TestEigenbasis:
    def test_n2_spectrum_and_kernel_matrix(self, model):
        basis = model(2).eigenbasis()
        assert np.allclose(basis.eigenvalues, [0.0, 1.0, 1.0, 2.0], atol=1e-10)
        assert np.abs(basis.eigenmatrices[0] - np.eye(2) / np.sqrt(2)).max() <= 1e-10
        assert basis.gap == pytest.approx(1.0, abs=1e-10)

    def test_orthonormality(self, model):
        for n in range(2, 9):
            basis = model(n).eigenbasis()
            gram = basis.vectors.conj().T @ basis.vectors
            assert np.abs(gram - np.eye(n * n)).max() <= 1e-9

    def test_eigen_relation(self, model):
        for n in (2, 3, 5):
            m = model(n)
            basis = m.eigenbasis()
            for i in range(n * n):
                phi = basis.eigenmatrices[i]
                resid = laplacian_apply(m, phi) - basis.eigenvalues[i] * phi
                assert np.abs(resid).max() <= 1e-8

    def test_spectrum_invariant_under_conjugation(self, model):
        # simultaneous unitary conjugation of the generators is an isometry
        rng = rng_from_seed(24)
        for n in (2, 3):
            base = model(n).eigenbasis().eigenvalues
            for _ in range(3):
                w = random_unitary(n, rng)
                m2 = build_model(
                    n, "custom",
                    x=w @ model(n).x @ w.conj().T,
                    y=w @ model(n).y @ w.conj().T,
                )
                assert np.abs(m2.eigenbasis().eigenvalues - base).max() <= 1e-8


class TestEnergyAndRayleigh:
    def test_identity_zero(self, model):
        m = model(3)
        assert dirichlet_energy(m, np.eye(3)) <= 1e-12
        assert rayleigh(m, np.eye(3)) <= 1e-12

    def test_eigen_matrices_give_eigenvalues(self, model):
        m = model(3)
        basis = m.eigenbasis()
        for i in range(9):
            assert dirichlet_energy(m, basis.eigenmatrices[i]) == pytest.approx(
                basis.eigenvalues[i], abs=1e-9
            )
            assert rayleigh(m, basis.eigenmatrices[i]) == pytest.approx(
                basis.eigenvalues[i], abs=1e-9
            )

    def test_two_mode_energy(self, model, paulis):
        sx, sy, _ = paulis
        c = (sx + sy) / 2.0
        assert dirichlet_energy(model(2), c) == pytest.approx(1.5, abs=1e-12)
        assert rayleigh(model(2), c) == pytest.approx(1.5, abs=1e-12)

    def test_energy_equals_quadratic_form(self, model):
        m = model(4)
        rng = rng_from_seed(25)
        for _ in range(20):
            a = _rand_complex(4, rng)
            quad = hs_inner(a, laplacian_apply(m, a)).real
            d = dirichlet_energy(m, a)
            assert d >= -1e-12
            assert abs(d - quad) <= 1e-10 * max(1.0, d)

    def test_norm_equivalence(self, model):
        # D(a) <= lambda_max * |a - (tr a / n) I|^2
        rng = rng_from_seed(26)
        for n in (2, 4):
            m = model(n)
            lam_max = m.eigenbasis().lambda_max
            for _ in range(20):
                a = _rand_complex(n, rng)
                centered = a - (np.trace(a) / n) * np.eye(n)
                bound = lam_max * hs_norm_sq(centered)
                assert dirichlet_energy(m, a) <= bound + 1e-9 * max(1.0, bound)

    def test_zero_rejected(self, model):
        with pytest.raises(ValueError):
            rayleigh(model(2), np.zeros((2, 2)))


class TestDecompose:
    def test_eigen_matrix_gives_unit_vector(self, model):
        m = model(3)
        basis = m.eigenbasis()
        coeffs = decompose(m, basis.eigenmatrices[3])
        expected = np.zeros(9)
        expected[3] = 1.0
        assert np.abs(coeffs - expected).max() <= 1e-10

    def test_identity_hits_kernel_mode(self, model):
        m = model(4)
        coeffs = decompose(m, np.eye(4))
        assert abs(coeffs[0] - 2.0) <= 1e-10  # sqrt(n)
        assert np.abs(coeffs[1:]).max() <= 1e-10

    def test_round_trip_and_parseval(self, model):
        rng = rng_from_seed(27)
        for n in (2, 5):
            m = model(n)
            for _ in range(10):
                a = _rand_complex(n, rng)
                coeffs = decompose(m, a)
                assert np.abs(reconstruct(m, coeffs) - a).max() <= 1e-9
                assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(
                    hs_norm_sq(a), rel=1e-9
                )


def test_fourier_matrix_unitary():
    for n in (2, 3, 7):
        f = fourier_matrix(n)
        assert np.abs(f.conj().T @ f - np.eye(n)).max() <= 1e-12
