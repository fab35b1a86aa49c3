"""
Tests for the separable-state oracle
"""

import numpy as np
import orjson
import pytest

from conftest import uniform
from qpg import linalg as la
from qpg.dynamics import run
from qpg.errors import InvalidInputError, OracleInconsistencyError
from qpg.game import GameOperator, identity_game, random_game
from qpg.models import DynamicsConfig
from qpg.oracle import (
    accuracy,
    certify_top_eigvec,
    ppt_check,
    product_value,
    sampled_product_value,
    seesaw,
    seesaw_trace,
)

BELL = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2)


def product_game(u, v, shift=0.0):
    z = np.kron(u, v)
    dim = len(z)
    return GameOperator(n=len(u), m=len(v), r=np.outer(z, z.conj()) + shift * np.eye(dim))


def entangled_pure_state(rng):
    """cos(t)|x1 y1> + sin(t)|x2 y2> with random local bases."""
    xs, _ = np.linalg.qr(la.complex_gaussian((2, 2), rng))
    ys, _ = np.linalg.qr(la.complex_gaussian((2, 2), rng))
    t = rng.uniform(0.1, np.pi / 4)
    return np.cos(t) * np.kron(xs[:, 0], ys[:, 0]) + np.sin(t) * np.kron(xs[:, 1], ys[:, 1])


def planted_product_game(rng):
    """Random PD game whose top eigenvector is a known product state."""
    u, v = la.random_pure_state(2, rng), la.random_pure_state(3, rng)
    z = np.kron(u, v)
    p = np.outer(z, z.conj())
    q = np.eye(6) - p
    w = la.random_density(6, rng)
    w = q @ w @ q
    w = w / la.lambda_max(w)
    return GameOperator(n=2, m=3, r=2.0 * p + w + 1e-3 * np.eye(6)), u, v


# seesaw

def test_seesaw_identity_game():
    result = seesaw(identity_game(2, 2), restarts=3, seed=0)
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.certified_optimal


def test_seesaw_recovers_product_game(rng):
    u, v = la.random_pure_state(2, rng), la.random_pure_state(3, rng)
    result = seesaw(product_game(u, v), restarts=5, seed=1)
    assert result.value == pytest.approx(1.0, abs=1e-10)
    assert abs(np.vdot(result.x, u)) >= 1 - 1e-8
    assert abs(np.vdot(result.y, v)) >= 1 - 1e-8


def test_seesaw_result_invariants():
    for seed in range(20):
        g = random_game(2, 3, seed)
        result = seesaw(g, restarts=10, seed=seed)
        assert product_value(g, result.x, result.y) == pytest.approx(result.value, abs=1e-10)
        assert result.value <= result.upper_bound + 1e-10
        assert result.upper_bound == pytest.approx(1.0, abs=1e-12)
        if result.certified_optimal:
            assert abs(result.value - result.upper_bound) <= 1e-8
        assert 0 <= result.best_restart_index < result.restarts_used


def test_seesaw_values_non_decreasing(rng):
    for seed in range(50):
        g = random_game(2, 2, seed)
        _, _, values = seesaw_trace(g, la.random_pure_state(2, rng))
        assert np.all(np.diff(values) >= -1e-12)


def test_seesaw_deterministic(game23):
    first = seesaw(game23, restarts=10, seed=42)
    second = seesaw(game23, restarts=10, seed=42)
    assert first.value == second.value
    assert first.best_restart_index == second.best_restart_index
    np.testing.assert_array_equal(first.x, second.x)


def test_seesaw_rejects_bad_arguments(game22):
    with pytest.raises(InvalidInputError):
        seesaw(game22, restarts=0)
    with pytest.raises(InvalidInputError):
        seesaw(game22, restarts=1, tol=0.0)


def test_oracle_result_json(game22):
    raw = orjson.loads(seesaw(game22, restarts=2).to_json())
    assert set(raw) == {"value", "x", "y", "restarts_used", "certified_optimal", "upper_bound"}
    assert len(raw["x"]) == 2 and len(raw["x"][0]) == 2


@pytest.mark.slow
def test_seesaw_beats_dense_sampling():
    g = random_game(2, 2, 5)
    best = seesaw(g, restarts=50, seed=0).value
    sampled = sampled_product_value(g, samples=10**6, seed=1)
    assert best >= sampled - 1e-10
    assert best - sampled <= 1e-2


def test_sampled_value_is_lower_bound(game22):
    sampled = sampled_product_value(game22, samples=2000, seed=3, chunk=512)
    assert sampled <= seesaw(game22, restarts=20).value + 1e-10


# ppt

def test_ppt_examples(rng):
    rho, sigma = la.random_density(2, rng), la.random_density(3, rng)
    assert ppt_check(np.kron(rho, sigma), 2, 3)
    bell = la.projector(BELL)
    assert not ppt_check(bell, 2, 2)
    assert la.lambda_min(la.partial_transpose_B(bell, 2, 2)) == pytest.approx(-0.5, abs=1e-12)
    assert ppt_check(np.eye(6) / 6, 2, 3)


def test_ppt_separates_product_from_entangled_pure_states(rng):
    for _ in range(100):
        z = np.kron(la.random_pure_state(2, rng), la.random_pure_state(2, rng))
        assert ppt_check(la.projector(z), 2, 2)
    for _ in range(100):
        assert not ppt_check(la.projector(entangled_pure_state(rng)), 2, 2)


# certificate

def test_certify_product_top_eigenvector(rng):
    g = product_game(la.random_pure_state(2, rng), la.random_pure_state(2, rng), shift=0.1)
    certified, value = certify_top_eigvec(g)
    assert certified
    assert value == pytest.approx(1.1, abs=1e-12)


def test_certify_bell_top_eigenvector():
    g = GameOperator(n=2, m=2, r=la.projector(BELL) + 0.1 * np.eye(4))
    certified, value = certify_top_eigvec(g)
    assert not certified
    assert value == pytest.approx(1.1, abs=1e-12)


def test_certify_outside_exact_dimensions(rng):
    g = product_game(la.random_pure_state(3, rng), la.random_pure_state(3, rng), shift=0.1)
    certified, _ = certify_top_eigvec(g)
    assert not certified


def test_certificate_matches_seesaw(rng):
    for _ in range(20):
        g, _, _ = planted_product_game(rng)
        certified, value = certify_top_eigvec(g)
        assert certified
        assert seesaw(g, restarts=50, seed=0).value == pytest.approx(value, abs=1e-6)
    for seed in range(30):
        g = random_game(2, 2, seed)
        certified, value = certify_top_eigvec(g)
        if certified:
            assert seesaw(g, restarts=50, seed=seed).value == pytest.approx(value, abs=1e-6)


# accuracy

def test_accuracy_examples():
    assert accuracy(0.5, 0.5) == 1.0
    assert accuracy(0.972, 1.0) == pytest.approx(0.972)
    assert accuracy(1.0 + 5e-7, 1.0) == pytest.approx(1.0 + 1e-8)
    with pytest.raises(OracleInconsistencyError):
        accuracy(1.001, 1.0)
    with pytest.raises(InvalidInputError):
        accuracy(0.5, 0.0)


def test_oracle_dominates_dynamics():
    config = DynamicsConfig()
    for seed in range(10):
        g = random_game(2, 2, seed)
        _, report = run(g, *uniform(g), config)
        assert report.final_utility <= seesaw(g, restarts=50, seed=seed).value + 1e-6
