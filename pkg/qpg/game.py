"""
Quantum common-interest games: the game operator R, the superoperator Phi
and its adjoint, utilities, best responses and equilibrium diagnostics.

Convention: Phi(sigma) = Tr_B(R (I (x) sigma)) and
Phi^dagger(rho) = Tr_A(R (rho (x) I)), so <rho, Phi(sigma)> = <R, rho (x) sigma>
holds without any transpose.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict

from . import linalg as la
from .config import settings
from .errors import InvalidDimensionsError, InvalidInputError
from .linalg import DensityMatrix, HermitianMatrix
from .log import get_logger
from .models import KKTCertificate, complex_to_pairs, pairs_to_complex

logger = get_logger(__name__)

PD_THRESHOLD = 1e-10
WISHART_RIDGE = 1e-6


class GameOperator(BaseModel):
    """Hermitian game operator on the joint space of an n x m game"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    m: int
    r: np.ndarray
    positive_definite: bool = False
    ensemble: Optional[str] = None
    seed: Optional[int] = None

    # checks run before pydantic so our own error types reach the caller
    def __init__(self, *, r, n: int, m: int, positive_definite: bool = False, **kwargs):
        r = la.as_matrix(r)
        n, m = int(n), int(m)
        if r.shape != (n * m, n * m):
            raise InvalidDimensionsError(f"R has shape {r.shape}, expected {(n * m, n * m)}")
        if la.hermiticity_residual(r) > la.HERMITIAN_TOL * max(1.0, la.frobenius(r)):
            raise InvalidInputError("game operator must be Hermitian")
        r = la.hermitize(r)
        r.setflags(write=False)
        pd = la.lambda_min(r) > PD_THRESHOLD
        if positive_definite and not pd:
            raise InvalidInputError("positive_definite flag set on an operator that is not PD")
        super().__init__(r=r, n=n, m=m, positive_definite=pd, **kwargs)

    @property
    def tensor(self) -> np.ndarray:
        """R viewed as R[i, j, k, l] with rows (i, j) and columns (k, l)."""
        return self.r.reshape(self.n, self.m, self.n, self.m)

    @property
    def lambda_max(self) -> float:
        return la.lambda_max(self.r)

    def to_json(self) -> bytes:
        return orjson.dumps({
            "n": self.n,
            "m": self.m,
            "r": complex_to_pairs(self.r),
            "ensemble": self.ensemble,
            "seed": self.seed,
        })

    @classmethod
    def from_json(cls, data: bytes) -> "GameOperator":
        raw = orjson.loads(data)
        return cls(
            n=raw["n"],
            m=raw["m"],
            r=pairs_to_complex(raw["r"]),
            ensemble=raw.get("ensemble"),
            seed=raw.get("seed"),
        )


def _check_dim(mat, dim: int, name: str) -> np.ndarray:
    a = la.as_matrix(mat)
    if a.shape[0] != dim:
        raise InvalidDimensionsError(f"{name} has dimension {a.shape[0]}, expected {dim}")
    return a


# superoperator

def phi(g: GameOperator, sigma) -> HermitianMatrix:
    """Phi(sigma) = Tr_B(R (I_n (x) sigma))."""
    s = _check_dim(sigma, g.m, "sigma")
    return la.hermitize(np.einsum("ijkl,lj->ik", g.tensor, s))


def phi_adjoint(g: GameOperator, rho) -> HermitianMatrix:
    """Phi^dagger(rho) = Tr_A(R (rho (x) I_m))."""
    p = _check_dim(rho, g.n, "rho")
    return la.hermitize(np.einsum("ijkl,ki->jl", g.tensor, p))


def choi_reconstruct(g: GameOperator) -> HermitianMatrix:
    """Reassemble R = sum_{j,l} Phi(E_lj) (x) E_jl from the superoperator alone."""
    out = np.zeros((g.n * g.m, g.n * g.m), dtype=complex)
    for j in range(g.m):
        for l in range(g.m):
            e_lj = np.zeros((g.m, g.m), dtype=complex)
            e_lj[l, j] = 1.0
            image = np.einsum("ijkl,lj->ik", g.tensor, e_lj)
            out += np.kron(image, e_lj.T)
    return out


# utilities and best responses

def utility(g: GameOperator, rho, sigma) -> float:
    """Common utility Tr(R (rho (x) sigma))."""
    p = _check_dim(rho, g.n, "rho")
    s = _check_dim(sigma, g.m, "sigma")
    return la.hs_inner(g.r, la.kron(p, s))


def _profile_utility(g: GameOperator, rho, phi_sigma) -> float:
    return la.hs_inner(rho, phi_sigma)


def best_response_A(g: GameOperator, sigma) -> Tuple[float, DensityMatrix]:
    value, v = la.top_eigvec(phi(g, sigma))
    return value, la.projector(v)


def best_response_B(g: GameOperator, rho) -> Tuple[float, DensityMatrix]:
    value, v = la.top_eigvec(phi_adjoint(g, rho))
    return value, la.projector(v)


def exploitability(g: GameOperator, rho, sigma) -> float:
    """Half the sum of both players' best unilateral gains."""
    phi_s = phi(g, sigma)
    phi_r = phi_adjoint(g, rho)
    gain_a = la.lambda_max(phi_s) - la.hs_inner(rho, phi_s)
    gain_b = la.lambda_max(phi_r) - la.hs_inner(phi_r, sigma)
    return 0.5 * (gain_a + gain_b)


def kkt_certificate(g: GameOperator, rho, sigma) -> KKTCertificate:
    """Multipliers lambda = mu = utility with Lambda = Phi(sigma) - lambda I."""
    phi_s = phi(g, sigma)
    phi_r = phi_adjoint(g, rho)
    u = _profile_utility(g, rho, phi_s)
    lam_mat = phi_s - u * np.eye(g.n)
    m_mat = phi_r - u * np.eye(g.m)
    # stationarity Phi(sigma) - Lambda - lambda I = 0 holds by construction
    stat_a = la.frobenius(phi_s - lam_mat - u * np.eye(g.n))
    stat_b = la.frobenius(phi_r - m_mat - u * np.eye(g.m))
    return KKTCertificate(
        lam=u,
        mu=u,
        Lambda_mat=lam_mat,
        M_mat=m_mat,
        stationarity_residual_A=stat_a,
        stationarity_residual_B=stat_b,
        dual_feas_A=la.lambda_max(lam_mat),
        dual_feas_B=la.lambda_max(m_mat),
        comp_slack_A=la.hs_inner(lam_mat, rho),
        comp_slack_B=la.hs_inner(m_mat, sigma),
    )


def interior_ne_residual(g: GameOperator, rho, sigma) -> float:
    phi_s = phi(g, sigma)
    u = _profile_utility(g, rho, phi_s)
    return (
        la.frobenius(phi_s - u * np.eye(g.n))
        + la.frobenius(phi_adjoint(g, rho) - u * np.eye(g.m))
    )


def _equilibrium_threshold(g: GameOperator, tol: Optional[float]) -> float:
    tol = settings.equilibrium_tol if tol is None else tol
    spectral_norm = max(abs(la.lambda_min(g.r)), abs(la.lambda_max(g.r)))
    return tol * max(1.0, spectral_norm)


def is_nash(g: GameOperator, rho, sigma, tol: Optional[float] = None) -> bool:
    """Exploitability within tol, scaled by the spectral norm of R."""
    return exploitability(g, rho, sigma) <= _equilibrium_threshold(g, tol)


def kkt_holds(g: GameOperator, rho, sigma, tol: Optional[float] = None) -> bool:
    return kkt_certificate(g, rho, sigma).max_residual() <= _equilibrium_threshold(g, tol)


# constructors

def embed_classical(a) -> GameOperator:
    """Diagonal game operator with R[(i*m+j), (i*m+j)] = a[i, j]."""
    payoff = np.asarray(a, dtype=float)
    if payoff.ndim != 2:
        raise InvalidDimensionsError("payoff must be a matrix")
    n, m = payoff.shape
    return GameOperator(n=n, m=m, r=np.diag(payoff.ravel()).astype(complex), ensemble="classical")


def _wishart(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = la.complex_gaussian((dim, dim), rng)
    w = g @ la.dagger(g)
    return w / la.lambda_max(w)


def _gue_shifted(dim: int, rng: np.random.Generator) -> np.ndarray:
    h = la.random_hermitian(dim, rng)
    w = la.eigvalsh(h)
    return (h - w[0] * np.eye(dim)) / (w[-1] - w[0])


ENSEMBLES: dict[str, Callable[[int, np.random.Generator], np.ndarray]] = {
    "wishart": _wishart,
    "gue-shifted": _gue_shifted,
}


def random_game(n: int, m: int, seed: int, ensemble: str = "wishart") -> GameOperator:
    """Random PD game operator normalized so that lambda_max(R) = 1."""
    if n < 2 or m < 2:
        raise InvalidDimensionsError("random games need n, m >= 2")
    try:
        draw = ENSEMBLES[ensemble]
    except KeyError:
        raise InvalidInputError(f"unknown ensemble {ensemble!r}; choose from {sorted(ENSEMBLES)}")
    rng = np.random.default_rng(seed)
    r = draw(n * m, rng) + WISHART_RIDGE * np.eye(n * m)
    r = la.hermitize(r / la.lambda_max(r))
    return GameOperator(n=n, m=m, r=r, ensemble=ensemble, seed=seed)


def identity_game(n: int, m: int) -> GameOperator:
    return GameOperator(n=n, m=m, r=np.eye(n * m, dtype=complex), ensemble="identity")


# potential games

class PotentialGameSpec(BaseModel):
    """Coordination-dummy game: u_i(s) = V(s) + D_i(s_-i)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    potential: GameOperator
    dummy_A: Callable[[DensityMatrix], float] = lambda sigma: 0.0
    dummy_B: Callable[[DensityMatrix], float] = lambda rho: 0.0

    def value(self, rho, sigma) -> float:
        return utility(self.potential, rho, sigma)

    def utility_A(self, rho, sigma) -> float:
        return self.value(rho, sigma) + self.dummy_A(sigma)

    def utility_B(self, rho, sigma) -> float:
        return self.value(rho, sigma) + self.dummy_B(rho)


def potential_identity_check(p: PotentialGameSpec, samples: int, seed: int) -> float:
    """Largest violation of the potential identity over sampled deviations."""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n, m = p.potential.n, p.potential.m
    worst = 0.0
    for _ in range(samples):
        rho, rho_dev = la.random_density(n, rng), la.random_density(n, rng)
        sigma, sigma_dev = la.random_density(m, rng), la.random_density(m, rng)

        du = p.utility_A(rho, sigma) - p.utility_A(rho_dev, sigma)
        dv = p.value(rho, sigma) - p.value(rho_dev, sigma)
        worst = max(worst, abs(du - dv))

        du = p.utility_B(rho, sigma) - p.utility_B(rho, sigma_dev)
        dv = p.value(rho, sigma) - p.value(rho, sigma_dev)
        worst = max(worst, abs(du - dv))
    logger.debug("potential.check", samples=samples, max_residual=worst)
    return worst


def coordination_dummy_game(
    potential: GameOperator,
    dummy_A: Optional[Callable[[DensityMatrix], float]] = None,
    dummy_B: Optional[Callable[[DensityMatrix], float]] = None,
) -> PotentialGameSpec:
    """Potential game from a common-interest operator plus per-player dummy terms."""
    kwargs = {}
    if dummy_A is not None:
        kwargs["dummy_A"] = dummy_A
    if dummy_B is not None:
        kwargs["dummy_B"] = dummy_B
    return PotentialGameSpec(potential=potential, **kwargs)
