"""
Shared fixtures for the QPG test suite
"""

import numpy as np
import pytest

from qpg import linalg as la
from qpg.game import GameOperator, random_game


def interior_ne_operator() -> GameOperator:
    """R = I + traceless product terms, so the uniform profile is an interior NE."""
    r = (
        np.eye(4)
        + 0.3 * np.kron(la.PAULI_Z, la.PAULI_Z)
        + 0.2 * np.kron(la.PAULI_X, la.PAULI_Y)
    )
    return GameOperator(n=2, m=2, r=r)


def uniform(g: GameOperator):
    return la.maximally_mixed(g.n), la.maximally_mixed(g.m)


def interior_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random density bounded away from the boundary."""
    return 0.8 * la.random_density(dim, rng) + 0.2 * la.maximally_mixed(dim)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ne_game():
    return interior_ne_operator()


@pytest.fixture
def game22():
    return random_game(2, 2, seed=7)


@pytest.fixture
def game23():
    return random_game(2, 3, seed=11)
