"""Named initial-data library for experiments."""

from __future__ import annotations

import numpy as np

from .geometry import TorusModel
from .linalg import hs_norm
from .sampling import random_hermitian, rng_from_seed, complex_gaussian

PD_PRESET_EPS = 1e-2

_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)

PRESET_NAMES = ("two-mode", "random-tracefree-unit", "random-pd-unit", "eigen:<i>")


def is_preset_name(name: str) -> bool:
    if name in ("two-mode", "random-tracefree-unit", "random-pd-unit"):
        return True
    if name.startswith("eigen:"):
        return name[len("eigen:"):].isdigit()
    return False


def preset(name: str, model: TorusModel, seed: int = 0) -> np.ndarray:
    """Build a unit-HS-norm initial state by name.

    two-mode              (sigma_x + sigma_y)/2 at n=2; (phi_1 + phi_2)/sqrt(2)
                          for larger n
    random-tracefree-unit seeded Hermitian with the trace projected out
    random-pd-unit        seeded B^* B + eps I, normalized
    eigen:<i>             the i-th Laplacian eigen-matrix
    """
    n = model.n
    if name == "two-mode":
        if n == 2:
            return (_SIGMA_X + _SIGMA_Y) / 2.0
        basis = model.eigenbasis()
        return (basis.eigenmatrices[1] + basis.eigenmatrices[2]) / np.sqrt(2.0)
    if name == "random-tracefree-unit":
        a = random_hermitian(n, rng_from_seed(seed))
        a = a - (np.trace(a) / n) * np.eye(n)
        return a / hs_norm(a)
    if name == "random-pd-unit":
        b = complex_gaussian(n, rng_from_seed(seed))
        a = b.conj().T @ b + PD_PRESET_EPS * np.eye(n)
        return a / hs_norm(a)
    if name.startswith("eigen:"):
        idx_text = name[len("eigen:"):]
        if not idx_text.isdigit():
            raise ValueError(f"bad eigen-matrix index in preset {name!r}")
        idx = int(idx_text)
        basis = model.eigenbasis()
        if idx >= basis.size:
            raise ValueError(f"eigen-matrix index {idx} out of range for n={n}")
        return np.array(basis.eigenmatrices[idx])
    raise ValueError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
