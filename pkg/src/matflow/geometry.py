"""Matrix-geometry model: generators, derivations, Laplacian, eigenbasis.

The model is the finite torus built from two Hermitian generators X, Y with
unitaries U = exp(2*pi*i*X/n) and V = exp(2*pi*i*Y/n).  The default
"clock-shift" variant takes X = diag(0..n-1) and Y = F X F^* with F the
discrete Fourier matrix, which makes U the clock matrix, V the cyclic
shift, and guarantees the Laplacian kernel is exactly the scalars.

Derivations are the commutators

    delta1(a) = Y a - a Y        delta2(a) = -(X a - a X)

Commutators with Hermitian matrices are self-adjoint under the HS inner
product, so the Laplacian built from their adjoint compositions is

    lap(a) = [Y, [Y, a]] + [X, [X, a]]

which is positive semidefinite: <a, lap(a)> = |delta1 a|^2 + |delta2 a|^2.
Its n^2 x n^2 matrix representation acts on column-stacked matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateModelError, DimensionMismatchError
from .linalg import (
    EigDecomposition,
    as_matrix,
    hermitian_eig,
    hs_inner,
    hs_norm_sq,
    require_hermitian,
)

KERNEL_TOL = 1e-8
VARIANTS = ("clock-shift", "custom")


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization of a matrix."""
    return np.asarray(a, dtype=complex).reshape(-1, order="F")


def unvec(w: np.ndarray, n: int) -> np.ndarray:
    """Inverse of `vec`."""
    return np.asarray(w, dtype=complex).reshape(n, n, order="F")


def fourier_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix F_jk = exp(2*pi*i*j*k/n) / sqrt(n)."""
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def _unitary_exponential(h: np.ndarray, angle: float) -> np.ndarray:
    """exp(i * angle * h) for Hermitian h via the spectral theorem."""
    dec = hermitian_eig(h)
    v = dec.eigenvectors
    return (v * np.exp(1j * angle * dec.eigenvalues)) @ v.conj().T


@dataclass(frozen=True)
class EigenBasis:
    """Full spectral data of the Laplacian super-operator.

    eigenvalues   -- ascending, length n^2, eigenvalues[0] ~ 0
    vectors       -- n^2 x n^2 unitary; column i is vec(eigenmatrix i)
    eigenmatrices -- stacked (n^2, n, n) array, HS-orthonormal
    gap           -- smallest nonzero eigenvalue (lambda_1)
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    eigenmatrices: np.ndarray
    gap: float

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])


@dataclass
class TorusModel:
    """Generators and derived structure of one n x n matrix-geometry model.

    Immutable in use: the cached super-operator and eigenbasis are computed
    once and shared read-only afterwards.
    """

    n: int
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    variant: str = "clock-shift"
    _superop: np.ndarray | None = field(default=None, repr=False, compare=False)
    _basis: EigenBasis | None = field(default=None, repr=False, compare=False)

    def superoperator(self) -> np.ndarray:
        if self._superop is None:
            self._superop = _build_superoperator(self.x, self.y)
        return self._superop

    def eigenbasis(self) -> EigenBasis:
        if self._basis is None:
            self._basis = _build_eigenbasis(self)
        return self._basis

    def check_dim(self, a: np.ndarray) -> np.ndarray:
        a = as_matrix(a)
        if a.shape[0] != self.n:
            raise DimensionMismatchError(
                f"matrix of dimension {a.shape[0]} does not fit a model with n={self.n}"
            )
        return a


def build_model(
    n: int,
    variant: str = "clock-shift",
    x: np.ndarray | None = None,
    y: np.ndarray | None = None,
) -> TorusModel:
    """Construct a torus model.

    variant "clock-shift": X = diag(0..n-1), Y = F X F^*.
    variant "custom": caller supplies Hermitian X, Y; degeneracy of the
    resulting Laplacian kernel is detected when the eigenbasis is built.
    """
    if n < 2:
        raise ValueError(f"model dimension must be >= 2, got {n}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")

    if variant == "clock-shift":
        if x is not None or y is not None:
            raise ValueError("clock-shift variant does not accept custom generators")
        xm = np.diag(np.arange(n)).astype(complex)
        f = fourier_matrix(n)
        ym = f @ xm @ f.conj().T
        ym = (ym + ym.conj().T) / 2.0
        um = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
        vm = f @ um @ f.conj().T
    else:
        if x is None or y is None:
            raise ValueError("custom variant requires both generators")
        xm = require_hermitian(as_matrix(x), "custom generator X")
        ym = require_hermitian(as_matrix(y), "custom generator Y")
        if xm.shape[0] != n or ym.shape[0] != n:
            raise DimensionMismatchError("custom generators must be n x n")
        um = _unitary_exponential(xm, 2.0 * np.pi / n)
        vm = _unitary_exponential(ym, 2.0 * np.pi / n)

    for m in (xm, ym, um, vm):
        m.setflags(write=False)
    return TorusModel(n=n, x=xm, y=ym, u=um, v=vm, variant=variant)


def delta1(m: TorusModel, a: np.ndarray) -> np.ndarray:
    """delta1(a) = [Y, a]."""
    a = m.check_dim(a)
    return m.y @ a - a @ m.y


def delta2(m: TorusModel, a: np.ndarray) -> np.ndarray:
    """delta2(a) = -[X, a]."""
    a = m.check_dim(a)
    return a @ m.x - m.x @ a


def laplacian_apply(m: TorusModel, a: np.ndarray) -> np.ndarray:
    """lap(a) = [Y, [Y, a]] + [X, [X, a]] (PSD; Hermitian-preserving)."""
    a = m.check_dim(a)
    ya = m.y @ a - a @ m.y
    xa = m.x @ a - a @ m.x
    return (m.y @ ya - ya @ m.y) + (m.x @ xa - xa @ m.x)


def delta_superoperators(m: TorusModel) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized representations L1, L2 of delta1, delta2 (both Hermitian)."""
    eye = np.eye(m.n, dtype=complex)
    l1 = np.kron(eye, m.y) - np.kron(m.y.T, eye)
    l2 = np.kron(m.x.T, eye) - np.kron(eye, m.x)
    return l1, l2


def _build_superoperator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # L = L1^* L1 + L2^* L2 expanded into Kronecker terms; elementwise
    # products only, so the layout is bit-reproducible.
    n = x.shape[0]
    eye = np.eye(n, dtype=complex)
    s = x @ x + y @ y
    l = (
        np.kron(eye, s)
        + np.kron(s.T, eye)
        - 2.0 * (np.kron(x.T, x) + np.kron(y.T, y))
    )
    l = (l + l.conj().T) / 2.0
    l.setflags(write=False)
    return l


def laplacian_superoperator(m: TorusModel) -> np.ndarray:
    """n^2 x n^2 Hermitian PSD matrix with L vec(a) = vec(lap(a))."""
    return m.superoperator()


def _build_eigenbasis(m: TorusModel) -> EigenBasis:
    l = m.superoperator()
    dec: EigDecomposition = hermitian_eig(l)
    w = dec.eigenvalues.copy()
    v = dec.eigenvectors
    kernel_tol = KERNEL_TOL * max(1.0, float(w[-1]))
    kernel_dim = int(np.sum(w <= kernel_tol))
    if kernel_dim != 1:
        raise DegenerateModelError(
            f"Laplacian kernel has dimension {kernel_dim}; the generators do "
            "not generate the full matrix algebra"
        )
    w[0] = 0.0
    gap = float(w[1])
    mats = np.stack([unvec(v[:, k], m.n) for k in range(v.shape[1])])
    w.setflags(write=False)
    mats.setflags(write=False)
    return EigenBasis(eigenvalues=w, vectors=v, eigenmatrices=mats, gap=gap)


def eigenbasis(m: TorusModel) -> EigenBasis:
    """Spectral decomposition of the Laplacian, cached on the model."""
    return m.eigenbasis()


def dirichlet_energy(m: TorusModel, c: np.ndarray) -> float:
    """D(c) = |delta1 c|^2 + |delta2 c|^2 = <c, lap(c)> >= 0."""
    c = m.check_dim(c)
    return hs_norm_sq(delta1(m, c)) + hs_norm_sq(delta2(m, c))


def rayleigh(m: TorusModel, c: np.ndarray) -> float:
    """Rayleigh quotient D(c) / M(c); equals lambda_i on eigen-matrices."""
    c = m.check_dim(c)
    mass = hs_norm_sq(c)
    if mass <= 1e-14:
        raise ValueError("Rayleigh quotient of a (near-)zero matrix")
    return dirichlet_energy(m, c) / mass


def decompose(m: TorusModel, a: np.ndarray) -> np.ndarray:
    """Coefficients <phi_i, a> of `a` in the Laplacian eigenbasis."""
    a = m.check_dim(a)
    basis = m.eigenbasis()
    return basis.vectors.conj().T @ vec(a)


def reconstruct(m: TorusModel, coeffs: np.ndarray) -> np.ndarray:
    """Inverse of `decompose`: sum_i coeffs_i * phi_i."""
    coeffs = np.asarray(coeffs, dtype=complex)
    basis = m.eigenbasis()
    if coeffs.shape != (basis.size,):
        raise DimensionMismatchError(
            f"expected {basis.size} coefficients, got shape {coeffs.shape}"
        )
    return unvec(basis.vectors @ coeffs, m.n)


def spectral_coefficient_data(
    m: TorusModel, a: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(eigenvalues, coefficients) pair used by the spectral flow solvers."""
    return m.eigenbasis().eigenvalues, decompose(m, a)
