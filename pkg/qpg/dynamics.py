"""
Learning dynamics on pairs of density matrices.

- lin-qrep-q: the q-Shahshahani gradient flow of the common utility,
  integrated with fixed-step RK4 and projected back to the density manifold.
- lin-mmwu: the alternating linear matrix multiplicative weights update.
- exp-mmwu: the matrix-exponential update, kept as a comparison baseline.
"""

from __future__ import annotations

from collections import deque
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from . import linalg as la
from .errors import (
    DegenerateUtilityError,
    InvalidInputError,
    QPGError,
    RequiresPDGameError,
    RunAborted,
    SingularStateError,
    StabilityGuardError,
)
from .game import GameOperator, exploitability, phi, phi_adjoint, utility
from .linalg import DensityMatrix, HermitianMatrix
from .log import get_logger
from .models import (
    ConvergenceReport,
    DynamicsConfig,
    DynamicsKind,
    TerminationReason,
    TrajectoryRecord,
    UpdateOrder,
)

logger = get_logger(__name__)

NEGATIVE_Q_MIN_EIG = 1e-8
METRIC_MIN_EIG = 1e-10
GRADIENT_CHECK_MIN_EIG = 1e-6
GRADIENT_CHECK_STEP = 1e-5
DENOMINATOR_FLOOR = 1e-14
STABILITY_BOUND = 0.5
# a stall ends a run only this close to a fixed point
STALL_RESIDUAL_FACTOR = 10.0

Profile = Tuple[DensityMatrix, DensityMatrix]


# continuous time

def _replicator_block(state, payoff, q: float) -> HermitianMatrix:
    if q < 0 and la.lambda_min(state) <= NEGATIVE_Q_MIN_EIG:
        raise SingularStateError(f"q = {q} needs a strictly positive state")
    half = la.psd_power(state, q / 2)
    full = la.psd_power(state, q)
    baseline = la.hs_inner(full, payoff) / la.real_trace(full)
    return la.hermitize(half @ (payoff - baseline * np.eye(len(payoff))) @ half)


def qrep_field(g: GameOperator, rho, sigma, q: float) -> Tuple[HermitianMatrix, HermitianMatrix]:
    """Right-hand side of the lin-QREP_q flow for both players."""
    drho = _replicator_block(rho, phi(g, sigma), q)
    dsigma = _replicator_block(sigma, phi_adjoint(g, rho), q)
    return drho, dsigma


def shah_inner(a, b, rho, q: float) -> float:
    """q-Shahshahani inner product Tr(rho^(-q/2) a rho^(-q/2) b)."""
    if q != 0 and la.lambda_min(rho) <= METRIC_MIN_EIG:
        raise SingularStateError("the q-Shahshahani metric needs a strictly positive state")
    w = la.psd_power(rho, -q / 2)
    return la.real_scalar(np.trace(w @ la.as_matrix(a) @ w @ la.as_matrix(b)))


def rk4_step(g: GameOperator, rho, sigma, q: float, h: float) -> Profile:
    """One classical Runge-Kutta step of the coupled flow."""
    if h <= 0:
        raise InvalidInputError("step size must be positive")
    rho, sigma = la.as_matrix(rho), la.as_matrix(sigma)

    k1r, k1s = qrep_field(g, rho, sigma, q)
    k2r, k2s = qrep_field(g, rho + 0.5 * h * k1r, sigma + 0.5 * h * k1s, q)
    k3r, k3s = qrep_field(g, rho + 0.5 * h * k2r, sigma + 0.5 * h * k2s, q)
    k4r, k4s = qrep_field(g, rho + h * k3r, sigma + h * k3s, q)

    rho_next = rho + h * (k1r + 2 * (k2r + k3r) + k4r) / 6
    sigma_next = sigma + h * (k1s + 2 * (k2s + k3s) + k4s) / 6
    return la.project_to_density(rho_next), la.project_to_density(sigma_next)


# discrete time

def _require_pd(g: GameOperator) -> None:
    if not g.positive_definite:
        raise RequiresPDGameError("lin-MMWU is only defined for positive definite games")


def _linear_weights(state, payoff, denominator: float) -> DensityMatrix:
    if denominator <= DENOMINATOR_FLOOR:
        raise DegenerateUtilityError(f"normalizer {denominator:.3e} vanished")
    half = la.psd_power(state, 0.5)
    return la.project_to_density(half @ payoff @ half / denominator)


def mmwu_half_step_A(g: GameOperator, rho, sigma) -> DensityMatrix:
    """rho <- rho^(1/2) Phi(sigma) rho^(1/2) / <rho, Phi(sigma)>."""
    _require_pd(g)
    payoff = phi(g, sigma)
    return _linear_weights(rho, payoff, la.hs_inner(rho, payoff))


def mmwu_half_step_B(g: GameOperator, rho, sigma) -> DensityMatrix:
    """sigma <- sigma^(1/2) Phi^dagger(rho) sigma^(1/2) / <Phi^dagger(rho), sigma>."""
    _require_pd(g)
    payoff = phi_adjoint(g, rho)
    return _linear_weights(sigma, payoff, la.hs_inner(payoff, sigma))


def mmwu_step(g: GameOperator, rho, sigma, order: UpdateOrder = UpdateOrder.RHO_FIRST) -> Profile:
    """Alternating lin-MMWU step; the second mover sees the first mover's update.

    For rho-first the sigma normalizer is <rho', Phi(sigma)>, which equals
    <Phi^dagger(rho'), sigma>.
    """
    if order == UpdateOrder.RHO_FIRST:
        rho_next = mmwu_half_step_A(g, rho, sigma)
        return rho_next, mmwu_half_step_B(g, rho_next, sigma)
    sigma_next = mmwu_half_step_B(g, rho, sigma)
    return mmwu_half_step_A(g, rho, sigma_next), sigma_next


def _exp_weights(state, payoff, eta: float) -> DensityMatrix:
    w = la.herm_exp(la.herm_log(state) + eta * payoff)
    return la.project_to_density(w)


def exp_mmwu_step(
    g: GameOperator, rho, sigma, eta: float, order: UpdateOrder = UpdateOrder.RHO_FIRST
) -> Profile:
    """rho <- exp(log rho + eta Phi(sigma)) / Tr(.), alternating like lin-MMWU."""
    if eta <= 0:
        raise InvalidInputError("eta must be positive")
    if order == UpdateOrder.RHO_FIRST:
        rho_next = _exp_weights(rho, phi(g, sigma), eta)
        return rho_next, _exp_weights(sigma, phi_adjoint(g, rho_next), eta)
    sigma_next = _exp_weights(sigma, phi_adjoint(g, rho), eta)
    return _exp_weights(rho, phi(g, sigma_next), eta), sigma_next


def fixed_point_residual(g: GameOperator, rho, sigma) -> float:
    """Norm of the q = 1 field, which is also the lin-MMWU displacement scale."""
    phi_s = phi(g, sigma)
    u = la.hs_inner(rho, phi_s)
    rho_half = la.psd_power(rho, 0.5)
    sigma_half = la.psd_power(sigma, 0.5)
    return (
        la.frobenius(rho_half @ (phi_s - u * np.eye(g.n)) @ rho_half)
        + la.frobenius(sigma_half @ (phi_adjoint(g, rho) - u * np.eye(g.m)) @ sigma_half)
    )


def step(g: GameOperator, rho, sigma, config: DynamicsConfig) -> Profile:
    """Advance the configured dynamic by one step."""
    if config.kind == DynamicsKind.LIN_QREP_Q:
        return rk4_step(g, rho, sigma, config.q, config.step_size)
    if config.kind == DynamicsKind.LIN_MMWU:
        return mmwu_step(g, rho, sigma, config.update_order)
    return exp_mmwu_step(g, rho, sigma, config.eta, config.update_order)


# run loop

class RunResult(BaseModel):
    """Trajectory, report and the states a run visited"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    trajectory: List[TrajectoryRecord]
    report: ConvergenceReport
    final_rho: np.ndarray
    final_sigma: np.ndarray
    states: Optional[List[Tuple[np.ndarray, np.ndarray]]] = None


def record(g: GameOperator, rho, sigma, index: int, time: float) -> TrajectoryRecord:
    return TrajectoryRecord(
        step=index,
        time=time,
        utility=utility(g, rho, sigma),
        exploitability=exploitability(g, rho, sigma),
        fixed_point_residual=fixed_point_residual(g, rho, sigma),
        min_eig_rho=la.lambda_min(rho),
        min_eig_sigma=la.lambda_min(sigma),
        bloch_rho=la.bloch_vector(rho) if g.n == 2 else None,
        bloch_sigma=la.bloch_vector(sigma) if g.m == 2 else None,
    )


def frobenius_post_pass(
    trajectory: List[TrajectoryRecord], states: List[Tuple[np.ndarray, np.ndarray]]
) -> List[TrajectoryRecord]:
    """Fill frobenius_to_final with the joint distance to the last state."""
    last_rho, last_sigma = states[-1]
    out = []
    for rec, (rho, sigma) in zip(trajectory, states):
        dist = float(np.hypot(la.frobenius_distance(rho, last_rho), la.frobenius_distance(sigma, last_sigma)))
        out.append(rec.model_copy(update={"frobenius_to_final": dist}))
    return out


def _check_stability(g: GameOperator, config: DynamicsConfig) -> None:
    if config.kind != DynamicsKind.LIN_QREP_Q:
        return
    scale = config.step_size * g.lambda_max
    if scale > STABILITY_BOUND:
        raise StabilityGuardError(
            f"step_size * lambda_max(R) = {scale:.3g} exceeds {STABILITY_BOUND}"
        )


def run_detailed(
    g: GameOperator, rho0, sigma0, config: DynamicsConfig, keep_states: bool = False
) -> RunResult:
    """Iterate until the moving average stalls, the residual vanishes or max_iters."""
    _check_stability(g, config)
    rho = la.check_density(rho0, g.n, "rho0")
    sigma = la.check_density(sigma0, g.m, "sigma0")
    continuous = config.kind == DynamicsKind.LIN_QREP_Q
    dt = config.step_size if continuous else 1.0

    log = logger.bind(kind=config.kind.value, n=g.n, m=g.m, seed=config.seed)
    log.debug("run.start", max_iters=config.max_iters)

    trajectory = [record(g, rho, sigma, 0, 0.0)]
    states = [(rho, sigma)] if keep_states else None
    recent = deque([trajectory[0].utility], maxlen=config.window)
    previous_average: Optional[float] = None
    stalled = 0
    reason = TerminationReason.MAX_ITERS
    iterations = 0

    for it in range(1, config.max_iters + 1):
        try:
            rho, sigma = step(g, rho, sigma, config)
            rec = record(g, rho, sigma, it, it * dt)
        except QPGError as exc:
            log.error("run.aborted", step=it, error=str(exc))
            raise RunAborted(exc, trajectory) from exc
        trajectory.append(rec)
        if keep_states:
            states.append((rho, sigma))
        iterations = it

        if rec.fixed_point_residual < config.conv_tol:
            reason = TerminationReason.RESIDUAL_BELOW_TOL
            break

        recent.append(rec.utility)
        if len(recent) == config.window:
            average = float(np.mean(recent))
            # the flow compares d(average)/dt, so the rule does not depend on step_size
            if previous_average is not None and abs(average - previous_average) / dt < config.conv_tol:
                stalled += 1
            else:
                stalled = 0
            previous_average = average
            if (
                stalled >= config.stall_iters
                and rec.fixed_point_residual <= STALL_RESIDUAL_FACTOR * config.conv_tol
            ):
                reason = TerminationReason.MOVING_AVERAGE_STALL
                break

    last = trajectory[-1]
    report = ConvergenceReport(
        converged=reason != TerminationReason.MAX_ITERS,
        iterations=iterations,
        final_utility=last.utility,
        final_exploitability=last.exploitability,
        final_residual=last.fixed_point_residual,
        termination_reason=reason,
    )
    log.info(
        "run.finished",
        reason=reason.value,
        iterations=iterations,
        utility=round(last.utility, 10),
    )
    if keep_states:
        trajectory = frobenius_post_pass(trajectory, states)
    return RunResult(
        trajectory=trajectory,
        report=report,
        final_rho=rho,
        final_sigma=sigma,
        states=states,
    )


def run(
    g: GameOperator, rho0, sigma0, config: DynamicsConfig
) -> Tuple[List[TrajectoryRecord], ConvergenceReport]:
    result = run_detailed(g, rho0, sigma0, config)
    return result.trajectory, result.report


# verification

def metric_gradient_check(
    g: GameOperator, rho, sigma, q: float, n_directions: int, seed: int
) -> float:
    """Compare finite differences of the utility with <field, xi> in the q-metric.

    Returns the worst relative error over random traceless directions.
    """
    if min(la.lambda_min(rho), la.lambda_min(sigma)) <= GRADIENT_CHECK_MIN_EIG:
        raise SingularStateError("gradient check needs strictly positive states")
    rng = np.random.default_rng(seed)
    drho, dsigma = qrep_field(g, rho, sigma, q)
    eps = GRADIENT_CHECK_STEP
    worst = 0.0
    for _ in range(n_directions):
        xi_rho = la.random_traceless_hermitian(g.n, rng)
        xi_sigma = la.random_traceless_hermitian(g.m, rng)
        forward = utility(g, rho + eps * xi_rho, sigma + eps * xi_sigma)
        backward = utility(g, rho - eps * xi_rho, sigma - eps * xi_sigma)
        numeric = (forward - backward) / (2 * eps)
        analytic = shah_inner(drho, xi_rho, rho, q) + shah_inner(dsigma, xi_sigma, sigma, q)
        worst = max(worst, abs(numeric - analytic) / max(abs(analytic), 1e-6))
    return worst
