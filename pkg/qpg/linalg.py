"""
Dense complex-Hermitian linear algebra kernel

Every function here is pure: inputs are never mutated and fresh arrays are
returned. Joint indices on A (x) B follow the row-major rule (i, j) -> i*m + j,
which is what ``np.kron`` produces, so partial traces and transposes are
plain reshapes of an (n, m, n, m) tensor.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DegenerateStateError,
    InvalidDimensionsError,
    InvalidInputError,
    NotPSDError,
    SingularStateError,
    UnsupportedDimensionError,
)

HermitianMatrix = NDArray[np.complex128]
DensityMatrix = NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
EIGH_SYMMETRY_TOL = 1e-8
PSD_TOL = 1e-8
TRACE_TOL = 1e-10
MIN_EIG_TOL = 1e-10
IMAG_TOL = 1e-12
DEGENERATE_TRACE = 1e-14

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


# helpers

def as_matrix(m) -> NDArray[np.complex128]:
    """Square complex128 copy of ``m``."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDimensionsError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m: NDArray) -> NDArray:
    return m.conj().T


def hermitize(m) -> HermitianMatrix:
    """Return the Hermitian part (M + M^dagger) / 2."""
    a = as_matrix(m)
    return (a + dagger(a)) / 2


def hermiticity_residual(m) -> float:
    a = as_matrix(m)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def real_scalar(z: complex, scale: float = 1.0) -> float:
    """Drop the imaginary part of a trace-like scalar after checking it is noise."""
    z = complex(z)
    if abs(z.imag) > IMAG_TOL * max(1.0, scale):
        raise InvalidInputError(f"expected a real scalar, imaginary part is {z.imag:.3e}")
    return z.real


def real_trace(m) -> float:
    a = np.asarray(m)
    return real_scalar(np.trace(a), scale=float(np.linalg.norm(a)))


def _check_joint(mat: NDArray, n: int, m: int) -> None:
    if n < 1 or m < 1 or mat.shape != (n * m, n * m):
        raise InvalidDimensionsError(
            f"matrix of shape {mat.shape} is not on a {n}x{m} joint space"
        )


# tensor structure

def kron(a, b) -> HermitianMatrix:
    """Kronecker product with (A (x) B)[i*m+j, k*m+l] = A[i,k] B[j,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_B(mat, n: int, m: int) -> HermitianMatrix:
    """Trace out the second register: result[i,k] = sum_j M[i*m+j, k*m+j]."""
    a = as_matrix(mat)
    _check_joint(a, n, m)
    return np.einsum("ijkj->ik", a.reshape(n, m, n, m))


def partial_trace_A(mat, n: int, m: int) -> HermitianMatrix:
    """Trace out the first register: result[j,l] = sum_i M[i*m+j, i*m+l]."""
    a = as_matrix(mat)
    _check_joint(a, n, m)
    return np.einsum("ijil->jl", a.reshape(n, m, n, m))


def partial_transpose_B(mat, n: int, m: int) -> HermitianMatrix:
    """Transpose every m x m block (i, k) of the joint matrix."""
    a = as_matrix(mat)
    _check_joint(a, n, m)
    return a.reshape(n, m, n, m).transpose(0, 3, 2, 1).reshape(n * m, n * m)


# spectral calculus

def eigh(h) -> Tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Ascending eigenvalues and orthonormal eigenvector columns."""
    a = as_matrix(h)
    if hermiticity_residual(a) > EIGH_SYMMETRY_TOL * max(1.0, float(np.linalg.norm(a))):
        raise InvalidInputError("eigh requires a Hermitian matrix")
    w, v = np.linalg.eigh(hermitize(a))
    return w, v


def eigvalsh(h) -> NDArray[np.float64]:
    return np.linalg.eigvalsh(hermitize(h))


def lambda_max(h) -> float:
    return float(eigvalsh(h)[-1])


def lambda_min(h) -> float:
    return float(eigvalsh(h)[0])


def top_eigvec(h) -> Tuple[float, NDArray[np.complex128]]:
    """Largest eigenvalue and a unit eigenvector for it.

    Ties go to the column the eigensolver lists last.
    """
    w, v = eigh(h)
    return float(w[-1]), v[:, -1].copy()


def spectral_apply(h, fn) -> HermitianMatrix:
    w, v = eigh(h)
    return hermitize((v * fn(w)) @ dagger(v))


def psd_power(h, p: float) -> HermitianMatrix:
    """h**p for a numerically PSD matrix, eigenvalues clipped at zero first."""
    w, v = eigh(h)
    if w[0] < -PSD_TOL:
        raise NotPSDError(f"smallest eigenvalue {w[0]:.3e} is below -{PSD_TOL}")
    w = np.clip(w, 0.0, None)
    if p < 0 and w[0] <= 0.0:
        raise SingularStateError(f"negative power {p} of a singular matrix")
    if p == 0:
        wp = np.ones_like(w)
    else:
        wp = np.power(w, p)
    return hermitize((v * wp) @ dagger(v))


def herm_exp(h) -> HermitianMatrix:
    """exp(h), shifted by lambda_max for stability; callers renormalize."""
    return spectral_apply(h, lambda w: np.exp(w - np.max(w)))


def herm_log(rho, floor: float = 1e-300) -> HermitianMatrix:
    """log(rho) with eigenvalues floored so zero modes stay finite."""
    return spectral_apply(rho, lambda w: np.log(np.maximum(w, floor)))


# inner products and norms

def hs_inner(a, b) -> float:
    """Hilbert-Schmidt inner product Tr(a^dagger b) for Hermitian a, b."""
    x, y = as_matrix(a), as_matrix(b)
    if x.shape != y.shape:
        raise InvalidDimensionsError(f"shape mismatch {x.shape} vs {y.shape}")
    scale = float(np.linalg.norm(x) * np.linalg.norm(y))
    return real_scalar(np.vdot(x, y), scale=scale)


def frobenius(a) -> float:
    return float(np.linalg.norm(a))


def frobenius_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


# the density manifold

def project_to_density(mat) -> DensityMatrix:
    """Symmetrize, clip negative eigenvalues, renormalize the trace to one."""
    w, v = np.linalg.eigh(hermitize(mat))
    w = np.clip(w, 0.0, None)
    total = float(np.sum(w))
    if total <= DEGENERATE_TRACE:
        raise DegenerateStateError("clipped spectrum is all zero")
    return hermitize((v * (w / total)) @ dagger(v))


def density_violation(rho) -> str | None:
    """Describe the first violated density invariant, or None."""
    a = as_matrix(rho)
    if hermiticity_residual(a) > HERMITIAN_TOL * max(1.0, float(np.linalg.norm(a))):
        return "not Hermitian"
    tr = np.trace(a)
    if abs(tr.real - 1.0) > TRACE_TOL or abs(tr.imag) > IMAG_TOL:
        return f"trace {tr} is not one"
    if lambda_min(a) < -MIN_EIG_TOL:
        return "not positive semidefinite"
    return None


def is_density(rho) -> bool:
    return density_violation(rho) is None


def check_density(rho, dim: int | None = None, name: str = "state") -> DensityMatrix:
    a = as_matrix(rho)
    if dim is not None and a.shape[0] != dim:
        raise InvalidDimensionsError(f"{name} has dimension {a.shape[0]}, expected {dim}")
    problem = density_violation(a)
    if problem:
        raise InvalidInputError(f"{name} is not a density matrix: {problem}")
    return a


def maximally_mixed(dim: int) -> DensityMatrix:
    return np.eye(dim, dtype=complex) / dim


def projector(v) -> DensityMatrix:
    """Rank-1 projector v v^dagger onto the normalized vector v."""
    x = np.asarray(v, dtype=complex).ravel()
    x = x / np.linalg.norm(x)
    return np.outer(x, x.conj())


# random objects

def complex_gaussian(shape, rng: np.random.Generator) -> NDArray[np.complex128]:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pure_state(dim: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """Haar-uniform unit vector."""
    g = complex_gaussian(dim, rng)
    return g / np.linalg.norm(g)


def random_density(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """G G^dagger / Tr(G G^dagger) with complex Gaussian G."""
    g = complex_gaussian((dim, dim), rng)
    w = g @ dagger(g)
    return hermitize(w / np.trace(w).real)


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianMatrix:
    return hermitize(complex_gaussian((dim, dim), rng))


def random_traceless_hermitian(dim: int, rng: np.random.Generator) -> HermitianMatrix:
    h = random_hermitian(dim, rng)
    h = h - (np.trace(h).real / dim) * np.eye(dim)
    return h / np.linalg.norm(h)


# qubit diagnostics

def bloch_vector(rho) -> Tuple[float, float, float]:
    """(Tr rho X, Tr rho Y, Tr rho Z) for a 2x2 density."""
    a = as_matrix(rho)
    if a.shape != (2, 2):
        raise UnsupportedDimensionError(f"Bloch coordinates need a 2x2 state, got {a.shape}")
    return tuple(real_scalar(np.trace(a @ s)) for s in PAULIS)


def purity(rho) -> float:
    a = as_matrix(rho)
    return hs_inner(a, a)
