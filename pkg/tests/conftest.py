"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from sdabe.filters import design_fixed_filters


@pytest.fixture(scope="session")
def fixed_filters():
    return design_fixed_filters()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_stable_ss(rng, n, inputs=1, outputs=1, radius=0.9):
    """Random stable state-space model via scaled random A."""
    from sdabe.statespace import StateSpaceModel

    A = rng.standard_normal((n, n))
    if n:
        rho = max(abs(np.linalg.eigvals(A)))
        A = A * (radius * rng.uniform(0.3, 1.0) / max(rho, 1e-12))
    B = rng.standard_normal((n, inputs))
    C = rng.standard_normal((outputs, n))
    D = rng.standard_normal((outputs, inputs))
    return StateSpaceModel(A, B, C, D)
