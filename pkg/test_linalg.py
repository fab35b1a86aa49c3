"""
Tests for the Hermitian linear algebra kernel
"""

import numpy as np
import pytest

from qpg import linalg as la
from qpg.errors import (
    DegenerateStateError,
    InvalidDimensionsError,
    InvalidInputError,
    NotPSDError,
    UnsupportedDimensionError,
)

BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def random_psd(dim, rng):
    g = la.complex_gaussian((dim, dim), rng)
    return g @ g.conj().T


# kron

def test_kron_identity_and_projectors():
    np.testing.assert_array_equal(la.kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(
        la.kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0])
    )


def test_kron_index_convention(rng):
    a, b = la.random_hermitian(2, rng), la.random_hermitian(3, rng)
    out = la.kron(a, b)
    for i in range(2):
        for j in range(3):
            for k in range(2):
                for l in range(3):
                    assert out[i * 3 + j, k * 3 + l] == a[i, k] * b[j, l]
    assert la.hermiticity_residual(out) < 1e-14
    assert np.trace(out) == pytest.approx(np.trace(a) * np.trace(b))


def test_kron_associative_on_integer_matrices(rng):
    a, b, c = (rng.integers(-5, 5, (2, 2)) for _ in range(3))
    np.testing.assert_array_equal(la.kron(la.kron(a, b), c), la.kron(a, la.kron(b, c)))


# partial trace

def test_partial_trace_factorizes(rng):
    a, b = la.random_hermitian(2, rng), la.random_hermitian(3, rng)
    np.testing.assert_allclose(la.partial_trace_B(la.kron(a, b), 2, 3), a * np.trace(b), atol=1e-12)
    np.testing.assert_allclose(la.partial_trace_A(la.kron(a, b), 2, 3), b * np.trace(a), atol=1e-12)


def test_partial_trace_identity():
    np.testing.assert_allclose(la.partial_trace_B(np.eye(4), 2, 2), 2 * np.eye(2))


def test_partial_trace_matches_block_loop(rng):
    mat = la.random_hermitian(6, rng)
    expected = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for k in range(2):
            expected[i, k] = sum(mat[i * 3 + j, k * 3 + j] for j in range(3))
    np.testing.assert_allclose(la.partial_trace_B(mat, 2, 3), expected, atol=1e-14)
    assert np.trace(la.partial_trace_B(mat, 2, 3)) == pytest.approx(np.trace(mat))


def test_partial_trace_adjoint_identity(rng):
    mat, a = la.random_hermitian(6, rng), la.random_hermitian(2, rng)
    lhs = la.hs_inner(la.partial_trace_B(mat, 2, 3), a)
    rhs = la.hs_inner(mat, la.kron(a, np.eye(3)))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_partial_trace_rejects_bad_dimensions():
    with pytest.raises(InvalidDimensionsError):
        la.partial_trace_B(np.eye(6), 2, 2)
    with pytest.raises(InvalidDimensionsError):
        la.partial_transpose_B(np.eye(5), 2, 2)


# partial transpose

def test_partial_transpose_of_product(rng):
    a, b = la.random_hermitian(2, rng), la.random_hermitian(3, rng)
    np.testing.assert_allclose(la.partial_transpose_B(la.kron(a, b), 2, 3), la.kron(a, b.T), atol=1e-14)


def test_partial_transpose_involution_and_isometry(rng):
    mat = la.random_hermitian(6, rng)
    once = la.partial_transpose_B(mat, 2, 3)
    np.testing.assert_array_equal(la.partial_transpose_B(once, 2, 3), mat)
    assert la.frobenius(once) == pytest.approx(la.frobenius(mat))
    assert la.hermiticity_residual(once) < 1e-14


def test_partial_transpose_bell_state():
    pt = la.partial_transpose_B(la.projector(BELL), 2, 2)
    assert la.lambda_min(pt) == pytest.approx(-0.5, abs=1e-12)


# eigh

def test_eigh_diagonal_and_pauli():
    w, _ = la.eigh(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1, 2, 3])
    w, _ = la.eigh(la.PAULI_X)
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)


def test_eigh_reconstruction(rng):
    h = la.random_hermitian(5, rng)
    w, v = la.eigh(h)
    assert la.frobenius(h - (v * w) @ v.conj().T) <= 1e-10 * (1 + la.frobenius(h))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(5), atol=1e-10)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        la.eigh(np.array([[0, 1], [0, 0]], dtype=complex))


# psd_power

def test_psd_power_examples(rng):
    np.testing.assert_allclose(la.psd_power(np.eye(3), 0.37), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(la.psd_power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]), atol=1e-14)
    rho = la.random_density(4, rng)
    root = la.psd_power(rho, 0.5)
    np.testing.assert_allclose(root @ root, rho, atol=1e-8)
    np.testing.assert_allclose(la.psd_power(rho, 1), rho, atol=1e-12)


def test_psd_power_semigroup(rng):
    h = random_psd(4, rng)
    np.testing.assert_allclose(
        la.psd_power(h, 0.3) @ la.psd_power(h, 0.9), la.psd_power(h, 1.2), atol=1e-8
    )


def test_psd_power_clips_small_negatives_and_rejects_large():
    out = la.psd_power(np.diag([1.0, -1e-9]), 0.5)
    np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(NotPSDError):
        la.psd_power(np.diag([1.0, -1e-3]), 0.5)


# hs_inner

def test_hs_inner_examples(rng):
    rho = la.random_density(3, rng)
    assert la.hs_inner(np.eye(3), rho) == pytest.approx(1.0)
    assert la.hs_inner(random_psd(3, rng), random_psd(3, rng)) >= 0
    a, b = la.random_hermitian(3, rng), la.random_hermitian(3, rng)
    expected = sum(np.conj(a[i, j]) * b[i, j] for i in range(3) for j in range(3))
    assert la.hs_inner(a, b) == pytest.approx(expected.real, abs=1e-12)


def test_hs_inner_dimension_mismatch():
    with pytest.raises(InvalidDimensionsError):
        la.hs_inner(np.eye(2), np.eye(3))


# project_to_density

def test_project_to_density_examples(rng):
    rho = la.random_density(3, rng)
    assert la.frobenius(la.project_to_density(rho) - rho) <= 1e-10
    np.testing.assert_allclose(la.project_to_density(np.diag([2.0, 2.0])), np.diag([0.5, 0.5]))
    np.testing.assert_allclose(la.project_to_density(np.diag([1.5, -0.1])), np.diag([1.0, 0.0]), atol=1e-15)
    assert la.is_density(la.project_to_density(la.random_hermitian(4, rng) + 3 * np.eye(4)))


def test_project_to_density_degenerate():
    with pytest.raises(DegenerateStateError):
        la.project_to_density(-np.eye(2))


# qubit helpers

def test_bloch_vector():
    assert la.bloch_vector(np.eye(2) / 2) == pytest.approx((0, 0, 0))
    assert la.bloch_vector(np.diag([1.0, 0.0])) == pytest.approx((0, 0, 1))
    plus = la.projector([1, 1])
    assert la.bloch_vector(plus) == pytest.approx((1, 0, 0))
    with pytest.raises(UnsupportedDimensionError):
        la.bloch_vector(np.eye(3) / 3)


def test_purity(rng):
    assert la.purity(np.eye(2) / 2) == pytest.approx(0.5)
    assert la.purity(la.projector([1, 1j])) == pytest.approx(1.0)
    rho = la.random_density(2, rng)
    assert la.purity(rho) == pytest.approx((1 + np.linalg.norm(la.bloch_vector(rho)) ** 2) / 2)


def test_random_density_is_valid(rng):
    for dim in (2, 3, 7):
        assert la.is_density(la.random_density(dim, rng))
        xi = la.random_traceless_hermitian(dim, rng)
        assert abs(np.trace(xi)) < 1e-14
