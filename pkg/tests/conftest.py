import numpy as np
import pytest

from matflow import build_model

_MODEL_CACHE = {}


@pytest.fixture(scope="session")
def model():
    """Factory for clock-shift models with eigenbases computed once."""

    def get(n):
        if n not in _MODEL_CACHE:
            m = build_model(n)
            m.eigenbasis()
            _MODEL_CACHE[n] = m
        return _MODEL_CACHE[n]

    return get


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture()
def paulis():
    return SIGMA_X, SIGMA_Y, SIGMA_Z
