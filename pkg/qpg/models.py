"""
Data models for the QPG system
"""

from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DynamicsKind(str, Enum):
    """Learning dynamic to iterate"""
    LIN_QREP_Q = "lin-qrep-q"
    LIN_MMWU = "lin-mmwu"
    EXP_MMWU = "exp-mmwu"


class UpdateOrder(str, Enum):
    """Which player moves first in an alternating update"""
    RHO_FIRST = "rho-first"
    SIGMA_FIRST = "sigma-first"


class TerminationReason(str, Enum):
    """Why a run stopped"""
    MOVING_AVERAGE_STALL = "moving-average-stall"
    RESIDUAL_BELOW_TOL = "residual-below-tol"
    MAX_ITERS = "max-iters"


class InitKind(str, Enum):
    """Initial profile for a run"""
    UNIFORM = "uniform"
    RANDOM = "random"


class Command(str, Enum):
    """Experiment commands exposed by the CLI"""
    SIMULATE = "simulate"
    BATCH = "batch"
    EXPLOITABILITY = "exploitability"
    BLOCH = "bloch"
    COMPARE = "compare"
    UTILITY = "utility"
    SCALE = "scale"


class BlochPlayer(str, Enum):
    RHO = "rho"
    SIGMA = "sigma"
    BOTH = "both"


def complex_to_pairs(a: np.ndarray) -> list:
    """Row-major [re, im] pairs; nested one level per array axis."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [complex_to_pairs(row) for row in arr]


def pairs_to_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


# Pydantic models

class DynamicsConfig(BaseModel):
    """Parameters of a single dynamics run"""
    model_config = ConfigDict(frozen=True)

    kind: DynamicsKind = DynamicsKind.LIN_MMWU
    q: float = 1.0
    step_size: float = Field(0.01, gt=0)
    eta: float = Field(0.1, gt=0)
    max_iters: int = Field(5000, ge=1)
    window: int = Field(5, ge=2)
    conv_tol: float = Field(1e-7, gt=0)
    stall_iters: int = Field(10, ge=1)
    seed: int = 0
    update_order: UpdateOrder = UpdateOrder.RHO_FIRST

    @model_validator(mode="after")
    def _window_fits(self):
        if self.max_iters < self.window:
            raise ValueError(f"max_iters ({self.max_iters}) must be >= window ({self.window})")
        return self


class TrajectoryRecord(BaseModel):
    """Diagnostics recorded after each step"""
    model_config = ConfigDict(frozen=True)

    step: int
    time: float
    utility: float
    exploitability: float
    fixed_point_residual: float
    min_eig_rho: float
    min_eig_sigma: float
    bloch_rho: Optional[Tuple[float, float, float]] = None
    bloch_sigma: Optional[Tuple[float, float, float]] = None
    frobenius_to_final: Optional[float] = None


class ConvergenceReport(BaseModel):
    """Outcome of a run"""
    model_config = ConfigDict(frozen=True)

    converged: bool
    iterations: int
    final_utility: float
    final_exploitability: float
    final_residual: float
    termination_reason: TerminationReason


class KKTCertificate(BaseModel):
    """Multipliers and residuals of the KKT system at a profile"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    mu: float
    Lambda_mat: np.ndarray
    M_mat: np.ndarray
    stationarity_residual_A: float
    stationarity_residual_B: float
    dual_feas_A: float
    dual_feas_B: float
    comp_slack_A: float
    comp_slack_B: float

    def max_residual(self) -> float:
        return max(
            self.stationarity_residual_A,
            self.stationarity_residual_B,
            max(self.dual_feas_A, 0.0),
            max(self.dual_feas_B, 0.0),
            abs(self.comp_slack_A),
            abs(self.comp_slack_B),
        )


class OracleResult(BaseModel):
    """Best separable state value and the product vectors attaining it"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: float
    x: np.ndarray
    y: np.ndarray
    restarts_used: int
    best_restart_index: int
    certified_optimal: bool = False
    upper_bound: float

    def to_json(self) -> bytes:
        return orjson.dumps({
            "value": self.value,
            "x": complex_to_pairs(self.x),
            "y": complex_to_pairs(self.y),
            "restarts_used": self.restarts_used,
            "certified_optimal": self.certified_optimal,
            "upper_bound": self.upper_bound,
        })


class BatchRunRow(BaseModel):
    """One line of the per-run batch CSV"""
    model_config = ConfigDict(frozen=True)

    run: int
    seed: int
    accuracy: Optional[float]
    iterations: int
    final_utility: float
    oracle_value: float
    certified: bool
    converged: bool
    final_exploitability: float
    rank1: bool
    oracle_inconsistent: bool = False


class BatchSummary(BaseModel):
    """Aggregate statistics over a batch"""
    model_config = ConfigDict(frozen=True)

    runs: int
    mean_accuracy: float = Field(ge=0, le=1 + 1e-8)
    std_accuracy: float
    mean_iterations: float
    converged_fraction: float = Field(ge=0, le=1)
    mean_final_exploitability: float
    rank1_fraction: float = Field(ge=0, le=1)
    inconsistent_runs: List[int] = []


class ExperimentConfig(BaseModel):
    """Full configuration of a CLI experiment"""
    model_config = ConfigDict(frozen=True)

    command: Command = Command.SIMULATE
    n: int = Field(2, ge=2)
    m: int = Field(2, ge=2)
    runs: int = Field(1, ge=1)
    seed: int = 0
    dynamics: DynamicsConfig = DynamicsConfig()
    init: InitKind = InitKind.UNIFORM
    oracle_restarts: int = Field(50, ge=1)
    output_dir: str = "./results"
    ensemble: str = "wishart"
    fixed_game: bool = False
    bloch_player: BlochPlayer = BlochPlayer.BOTH
    game_path: Optional[str] = None

    def to_json(self) -> bytes:
        return orjson.dumps(self.model_dump(mode="json"), option=orjson.OPT_INDENT_2)

    @classmethod
    def from_json(cls, data: bytes) -> "ExperimentConfig":
        return cls.model_validate(orjson.loads(data))
