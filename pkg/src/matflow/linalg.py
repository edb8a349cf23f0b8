"""Dense complex linear algebra on the matrix algebra M_n.

The inner product throughout is Hilbert-Schmidt with the *unnormalized*
trace, <a, b> = tr(a^* b), so <I, I> = n.  All tolerances are relative to
max(1, input magnitude) unless noted otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    EigensolverError,
    NonHermitianError,
)

HERMITIAN_TOL = 1e-12
JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50
CLUSTER_GAP = 1e-9


def as_matrix(a) -> np.ndarray:
    """Coerce input to a square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^* b), conjugate-linear in `a`."""
    a = as_matrix(a)
    b = as_matrix(b)
    _check_same_dim(a, b)
    return complex(np.sum(np.conj(a) * b))


def hs_norm_sq(a: np.ndarray) -> float:
    """Squared HS norm <a, a> (real, >= 0)."""
    a = as_matrix(a)
    return float(np.sum(np.abs(a) ** 2))


def hs_norm(a: np.ndarray) -> float:
    """HS norm sqrt(<a, a>)."""
    return float(np.sqrt(hs_norm_sq(a)))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """True if max |a - a^*| <= tol * max(1, max |a|)."""
    a = as_matrix(a)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    return float(np.abs(a - a.conj().T).max(initial=0.0)) <= tol * scale


def require_hermitian(a: np.ndarray, what: str = "input") -> np.ndarray:
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NonHermitianError(f"{what} is not Hermitian")
    return a


@dataclass(frozen=True)
class EigDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    `eigenvalues` are sorted ascending; the columns of `eigenvectors` are
    the corresponding orthonormal eigenvectors.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate a[p, q] with a unitary plane rotation; updates a and v."""
    apq = a[p, q]
    b = abs(apq)
    alpha = a[p, p].real
    gamma = a[q, q].real
    phase = apq / b
    tau = (gamma - alpha) / (2.0 * b)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    sig = (t * c) * phase

    colp = a[:, p].copy()
    colq = a[:, q].copy()
    a[:, p] = c * colp - np.conj(sig) * colq
    a[:, q] = sig * colp + c * colq
    rowp = a[p, :].copy()
    rowq = a[q, :].copy()
    a[p, :] = c * rowp - sig * rowq
    a[q, :] = np.conj(sig) * rowp + c * rowq
    # keep exact Hermitian structure on the touched entries
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - np.conj(sig) * vq
    v[:, q] = sig * vp + c * vq


def _off_norm(a: np.ndarray) -> float:
    # summed directly over off-diagonal entries; the subtraction
    # |A|_F^2 - |diag|^2 would cancel catastrophically near convergence
    sq = np.abs(a) ** 2
    np.fill_diagonal(sq, 0.0)
    return float(np.sqrt(sq.sum()))


def _fix_phases(v: np.ndarray) -> None:
    """Rotate each column so its first nonzero component is real positive."""
    n = v.shape[0]
    for k in range(v.shape[1]):
        col = v[:, k]
        mags = np.abs(col)
        cutoff = 1e-12 * max(mags.max(initial=0.0), 1e-300)
        idx = 0
        for j in range(n):
            if mags[j] > cutoff:
                idx = j
                break
        z = col[idx]
        if abs(z) > 0.0:
            v[:, k] = col * (np.conj(z) / abs(z))


def _order_clusters(w: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Within each near-degenerate eigenvalue cluster, order eigenvectors by
    the index of their largest-magnitude component (stable)."""
    n = w.shape[0]
    order = np.arange(n)
    start = 0
    while start < n:
        end = start + 1
        while end < n and w[end] - w[end - 1] < CLUSTER_GAP:
            end += 1
        if end - start > 1:
            block = order[start:end]
            keys = [int(np.argmax(np.abs(v[:, j]))) for j in block]
            block = block[np.argsort(keys, kind="stable")]
            order[start:end] = block
        start = end
    return w[order], v[:, order]


def hermitian_eig(
    h: np.ndarray,
    off_tol: float = JACOBI_OFF_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> EigDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Runs fixed-order (row-cyclic) complex plane rotations until the
    off-diagonal Frobenius norm drops below `off_tol * max(1, |h|_F)`.
    The result is deterministic for a fixed input: ties inside degenerate
    clusters are broken by the index of each eigenvector's largest
    component, and every eigenvector's phase is fixed so that its first
    nonzero entry is real positive.
    """
    h = require_hermitian(h, "eigendecomposition input")
    n = h.shape[0]
    a = np.array(h, dtype=complex)
    v = np.eye(n, dtype=complex)
    if n == 1:
        return EigDecomposition(np.array([a[0, 0].real]), v)

    thresh = off_tol * max(1.0, float(np.linalg.norm(a)))
    # pivots below this cannot push the off-norm above the threshold
    tiny = thresh / n
    converged = False
    for _ in range(max_sweeps):
        if _off_norm(a) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > tiny:
                    _jacobi_rotate(a, v, p, q)
    else:
        if _off_norm(a) <= thresh:
            converged = True
    if not converged:
        raise EigensolverError(
            f"Jacobi did not reach off-norm {thresh:.3e} in {max_sweeps} sweeps"
        )

    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    w, v = _order_clusters(w, v)
    _fix_phases(v)
    w.setflags(write=False)
    v.setflags(write=False)
    return EigDecomposition(w, v)


def matrix_function(
    h: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    name: str = "f",
) -> np.ndarray:
    """Spectral functional calculus: apply a real scalar function to a
    Hermitian matrix, V diag(f(lambda_i)) V^*.

    `f` must be finite on every eigenvalue of `h`; a non-finite value raises
    DomainError naming the offending eigenvalue.
    """
    dec = hermitian_eig(h)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(dec.eigenvalues), dtype=float)
    bad = ~np.isfinite(fw)
    if bad.any():
        lam = dec.eigenvalues[bad][0]
        raise DomainError(f"{name} is undefined at eigenvalue {lam!r}")
    v = dec.eigenvectors
    out = (v * fw) @ v.conj().T
    return (out + out.conj().T) / 2.0


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix: sum of |eigenvalues|."""
    dec = hermitian_eig(require_hermitian(a, "trace_norm input"))
    return float(np.sum(np.abs(dec.eigenvalues)))


def min_eigenvalue(h: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix; > 0 iff h is PD."""
    dec = hermitian_eig(require_hermitian(h, "min_eigenvalue input"))
    return float(dec.eigenvalues[0])
