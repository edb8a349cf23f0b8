"""Seeded random matrix ensembles.

All randomness in the package flows through numpy's PCG64 generator so that
every sampled experiment is reproducible from (seed, stream indices) alone.
Ensembles:

* Hermitian: (G + G^*) / 2 with G of independent standard complex Gaussian
  entries (real and imaginary parts N(0, 1/2) each).
* PSD: B^* B with B complex Gaussian as above.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "pcg64"


def rng_from_seed(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for a seed plus optional sub-stream indices.

    Sub-streams make per-trial sampling order-independent: trial k of a run
    seeded with s always draws from rng_from_seed(s, k).
    """
    return np.random.default_rng([int(seed), *map(int, stream)])


def complex_gaussian(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n matrix of standard complex Gaussian entries."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = complex_gaussian(n, rng)
    return (g + g.conj().T) / 2.0


def random_psd(n: int, rng: np.random.Generator) -> np.ndarray:
    b = complex_gaussian(n, rng)
    return b.conj().T @ b


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian (phases fixed)."""
    q, r = np.linalg.qr(complex_gaussian(n, rng))
    d = np.diagonal(r)
    return q * (d / np.abs(d))
