"""
Experiment commands: each takes an ExperimentConfig, writes plot-ready
CSV/JSON into cfg.output_dir and returns a CommandOutcome carrying the
exit code the CLI should use.

Per-run seeds are cfg.seed + run_index, so any run of a batch can be
replayed in isolation.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import orjson
from pydantic import BaseModel

from . import linalg as la
from .batch import BatchRunner
from .dynamics import RunResult, run_detailed, step
from .errors import OracleInconsistencyError, UnsupportedDimensionError
from .game import GameOperator, random_game
from .io import write_csv, write_json, write_trajectory_csv
from .log import get_logger
from .models import (
    BatchRunRow,
    BatchSummary,
    BlochPlayer,
    Command,
    DynamicsConfig,
    DynamicsKind,
    ExperimentConfig,
    InitKind,
)
from .oracle import accuracy, certify_top_eigvec, seesaw

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_ORACLE_INCONSISTENT = 3

RANK1_EIG = 1e-2
PURE_BLOCH_NORM = 0.99
EXPLOITABLE = 1e-3
FROBENIUS_INCREASE = 1e-6
INIT_STREAM = 7919


class CommandOutcome(BaseModel):
    """What a command produced"""
    exit_code: int = EXIT_OK
    files: List[str] = []
    summary: Dict[str, Any] = {}


# shared setup

def load_game(cfg: ExperimentConfig, run_index: int = 0) -> GameOperator:
    """The configured game for a run: a fixed file, a fixed seed, or seed + run."""
    if cfg.game_path:
        return GameOperator.from_json(Path(cfg.game_path).read_bytes())
    seed = cfg.seed if cfg.fixed_game else cfg.seed + run_index
    return random_game(cfg.n, cfg.m, seed, cfg.ensemble)


def initial_profile(init: InitKind, n: int, m: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    if init == InitKind.UNIFORM:
        return la.maximally_mixed(n), la.maximally_mixed(m)
    rng = np.random.default_rng((seed, INIT_STREAM))
    return la.random_density(n, rng), la.random_density(m, rng)


def run_config(cfg: ExperimentConfig, run_index: int, **overrides) -> DynamicsConfig:
    update = {"seed": cfg.seed + run_index, **overrides}
    return cfg.dynamics.model_copy(update=update)


def _simulate_run(
    cfg: ExperimentConfig, run_index: int, keep_states: bool = False, **overrides
) -> Tuple[GameOperator, RunResult]:
    g = load_game(cfg, run_index)
    rho0, sigma0 = initial_profile(cfg.init, g.n, g.m, cfg.seed + run_index)
    return g, run_detailed(g, rho0, sigma0, run_config(cfg, run_index, **overrides), keep_states)


def _out(cfg: ExperimentConfig, name: str) -> Path:
    return Path(cfg.output_dir) / name


def _echo_config(cfg: ExperimentConfig) -> str:
    path = _out(cfg, "config.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(cfg.to_json() + b"\n")
    return str(path)


def local_increases(values, threshold: float = FROBENIUS_INCREASE) -> int:
    diffs = np.diff(np.asarray(values, dtype=float))
    return int(np.sum(diffs > threshold))


# commands

def cmd_simulate(cfg: ExperimentConfig) -> CommandOutcome:
    """One run: trajectory CSV with the Frobenius post-pass plus the report."""
    g, result = _simulate_run(cfg, 0, keep_states=True)
    files = [
        _echo_config(cfg),
        str(write_trajectory_csv(_out(cfg, "trajectory.csv"), result.trajectory)),
        str(write_json(_out(cfg, "report.json"), result.report)),
        str(write_json(_out(cfg, "game.json"), orjson.loads(g.to_json()))),
    ]
    code = EXIT_OK if result.report.converged else EXIT_NOT_CONVERGED
    return CommandOutcome(exit_code=code, files=files, summary=result.report.model_dump(mode="json"))


def _batch_job(cfg: ExperimentConfig, run_index: int) -> BatchRunRow:
    g, result = _simulate_run(cfg, run_index)
    report = result.report
    oracle = seesaw(g, restarts=cfg.oracle_restarts, seed=cfg.seed + run_index)
    certified, _ = certify_top_eigvec(g)
    try:
        acc = accuracy(report.final_utility, oracle.value)
        inconsistent = False
    except OracleInconsistencyError as exc:
        logger.warning("batch.oracle_inconsistent", run=run_index, error=str(exc))
        acc, inconsistent = None, True
    rank1 = max(la.lambda_min(result.final_rho), la.lambda_min(result.final_sigma)) < RANK1_EIG
    return BatchRunRow(
        run=run_index,
        seed=cfg.seed + run_index,
        accuracy=acc,
        iterations=report.iterations,
        final_utility=report.final_utility,
        oracle_value=oracle.value,
        certified=certified or oracle.certified_optimal,
        converged=report.converged,
        final_exploitability=report.final_exploitability,
        rank1=rank1,
        oracle_inconsistent=inconsistent,
    )


def summarize_batch(rows: List[BatchRunRow]) -> BatchSummary:
    accuracies = np.array([r.accuracy for r in rows if r.accuracy is not None], dtype=float)
    return BatchSummary(
        runs=len(rows),
        mean_accuracy=float(accuracies.mean()) if accuracies.size else 0.0,
        std_accuracy=float(accuracies.std()) if accuracies.size else 0.0,
        mean_iterations=float(np.mean([r.iterations for r in rows])),
        converged_fraction=float(np.mean([r.converged for r in rows])),
        mean_final_exploitability=float(np.mean([r.final_exploitability for r in rows])),
        rank1_fraction=float(np.mean([r.rank1 for r in rows])),
        inconsistent_runs=[r.run for r in rows if r.oracle_inconsistent],
    )


def cmd_batch(cfg: ExperimentConfig, runner: BatchRunner = None) -> CommandOutcome:
    """Dynamics vs seesaw oracle on cfg.runs games; summary JSON plus per-run CSV."""
    runner = runner or BatchRunner()
    rows = runner.run(lambda i: _batch_job(cfg, i), cfg.runs)
    summary = summarize_batch(rows)
    header = ["run", "seed", "accuracy", "iterations", "final_utility", "oracle_value", "certified"]
    files = [
        _echo_config(cfg),
        str(write_csv(_out(cfg, "runs.csv"), header, (
            [r.run, r.seed, r.accuracy, r.iterations, r.final_utility, r.oracle_value, r.certified]
            for r in rows
        ))),
        str(write_json(_out(cfg, "summary.json"), summary)),
    ]
    code = EXIT_ORACLE_INCONSISTENT if summary.inconsistent_runs else EXIT_OK
    return CommandOutcome(exit_code=code, files=files, summary=summary.model_dump(mode="json"))


def cmd_exploitability(cfg: ExperimentConfig) -> CommandOutcome:
    """Exploitability trace per run in long format, footer JSON with the median."""
    rows, finals = [], []
    for run_index in range(cfg.runs):
        _, result = _simulate_run(cfg, run_index)
        rows.extend([run_index, rec.step, rec.exploitability] for rec in result.trajectory)
        finals.append(result.trajectory[-1].exploitability)
    footer = {
        "dynamics": cfg.dynamics.kind.value,
        "runs": cfg.runs,
        "median_final_exploitability": float(np.median(finals)),
        "exploitable_runs": int(np.sum(np.asarray(finals) > EXPLOITABLE)),
    }
    files = [
        _echo_config(cfg),
        str(write_csv(_out(cfg, "exploitability.csv"), ["run", "step", "exploitability"], rows)),
        str(write_json(_out(cfg, "exploitability_summary.json"), footer)),
    ]
    return CommandOutcome(files=files, summary=footer)


def _bloch_players(cfg: ExperimentConfig) -> List[str]:
    wanted = {
        BlochPlayer.RHO: ["rho"],
        BlochPlayer.SIGMA: ["sigma"],
        BlochPlayer.BOTH: ["rho", "sigma"],
    }[cfg.bloch_player]
    dims = {"rho": cfg.n, "sigma": cfg.m}
    for player in wanted:
        if dims[player] != 2:
            raise UnsupportedDimensionError(f"Bloch trace of {player} needs dimension 2, got {dims[player]}")
    return wanted


def cmd_bloch(cfg: ExperimentConfig) -> CommandOutcome:
    """Bloch coordinates per step; with fixed_game every run shares one game."""
    players = _bloch_players(cfg)
    if cfg.fixed_game and cfg.init == InitKind.UNIFORM:
        logger.warning("bloch.identical_runs", reason="fixed game with uniform init repeats one trajectory")
    rows, final_norms, final_purities = [], [], []
    for run_index in range(cfg.runs):
        _, result = _simulate_run(cfg, run_index)
        for rec in result.trajectory:
            for player in players:
                a = rec.bloch_rho if player == "rho" else rec.bloch_sigma
                rows.append([run_index, rec.step, player, *a])
        last = result.trajectory[-1]
        final_norms.extend(
            float(np.linalg.norm(last.bloch_rho if p == "rho" else last.bloch_sigma)) for p in players
        )
        final_purities.extend(
            la.purity(result.final_rho if p == "rho" else result.final_sigma) for p in players
        )
    summary = {
        "runs": cfg.runs,
        "boundary_fraction": float(np.mean(np.asarray(final_norms) > PURE_BLOCH_NORM)),
        "mean_final_purity": float(np.mean(final_purities)),
    }
    files = [
        _echo_config(cfg),
        str(write_csv(_out(cfg, "bloch.csv"), ["run", "step", "player", "a1", "a2", "a3"], rows)),
        str(write_json(_out(cfg, "bloch_summary.json"), summary)),
    ]
    return CommandOutcome(files=files, summary=summary)


def divergence_trace(
    g: GameOperator, first: DynamicsConfig, second: DynamicsConfig, steps: int
) -> List[float]:
    """Joint Frobenius distance between two dynamics run from the uniform profile."""
    start = (la.maximally_mixed(g.n), la.maximally_mixed(g.m))
    a, b = start, start
    distances = [0.0]
    for _ in range(steps):
        a = step(g, *a, first)
        b = step(g, *b, second)
        distances.append(float(np.hypot(la.frobenius_distance(a[0], b[0]), la.frobenius_distance(a[1], b[1]))))
    return distances


def cmd_compare(cfg: ExperimentConfig) -> CommandOutcome:
    """lin-qrep-q (q = 1, RK4) against the exp-mmwu baseline, step by step."""
    flow = cfg.dynamics.model_copy(update={"kind": DynamicsKind.LIN_QREP_Q, "q": 1.0})
    baseline = cfg.dynamics.model_copy(update={"kind": DynamicsKind.EXP_MMWU})
    rows, diverged = [], 0
    for run_index in range(cfg.runs):
        g = load_game(cfg, run_index)
        distances = divergence_trace(g, flow, baseline, cfg.dynamics.max_iters)
        rows.extend([run_index, k, d] for k, d in enumerate(distances))
        diverged += int(max(distances) > EXPLOITABLE)
    summary = {"runs": cfg.runs, "diverged_runs": diverged}
    files = [
        _echo_config(cfg),
        str(write_csv(_out(cfg, "compare.csv"), ["run", "step", "frobenius_distance_between_dynamics"], rows)),
        str(write_json(_out(cfg, "compare_summary.json"), summary)),
    ]
    return CommandOutcome(files=files, summary=summary)


def cmd_utility(cfg: ExperimentConfig) -> CommandOutcome:
    """Utility traces of the flow and of lin-mmwu, on one game or one game per run.

    A fixed game is started from random profiles, otherwise every run would
    repeat the same trajectory.
    """
    variant = cfg.model_copy(update={"init": InitKind.RANDOM}) if cfg.fixed_game else cfg
    rows, decreases = [], 0
    for kind in (DynamicsKind.LIN_QREP_Q, DynamicsKind.LIN_MMWU):
        for run_index in range(cfg.runs):
            _, result = _simulate_run(variant, run_index, kind=kind)
            utilities = [rec.utility for rec in result.trajectory]
            decreases += int(np.sum(np.diff(utilities) < -1e-10))
            rows.extend([run_index, kind.value, k, u] for k, u in enumerate(utilities))
    if cfg.game_path:
        game_seeds = []
    elif cfg.fixed_game:
        game_seeds = [cfg.seed]
    else:
        game_seeds = [cfg.seed + i for i in range(cfg.runs)]
    summary = {
        "runs": cfg.runs,
        "fixed_game": cfg.fixed_game,
        "game_seeds": game_seeds,
        "utility_decreases": decreases,
    }
    files = [
        _echo_config(cfg),
        str(write_csv(_out(cfg, "utility.csv"), ["run", "dynamics", "step", "utility"], rows)),
        str(write_json(_out(cfg, "utility_summary.json"), summary)),
    ]
    return CommandOutcome(files=files, summary=summary)


def _scale_job(cfg: ExperimentConfig, run_index: int) -> RunResult:
    _, result = _simulate_run(cfg, run_index, keep_states=True)
    return result


def cmd_scale(cfg: ExperimentConfig, runner: BatchRunner = None) -> CommandOutcome:
    """Large-dimension runs with the distance-to-last-iterate column."""
    runner = runner or BatchRunner()
    results = runner.run(lambda i: _scale_job(cfg, i), cfg.runs)
    rows, per_run = [], []
    for run_index, result in enumerate(results):
        utilities = [rec.utility for rec in result.trajectory]
        distances = [rec.frobenius_to_final for rec in result.trajectory]
        rows.extend(
            [run_index, rec.step, rec.utility, rec.frobenius_to_final] for rec in result.trajectory
        )
        per_run.append({
            "run": run_index,
            "converged": result.report.converged,
            "iterations": result.report.iterations,
            "monotone_utility": bool(np.all(np.diff(utilities) >= -1e-10)),
            "frobenius_local_increases": local_increases(distances),
        })
    summary = {
        "n": cfg.n,
        "m": cfg.m,
        "runs": per_run,
        "converged_fraction": float(np.mean([r["converged"] for r in per_run])),
    }
    files = [
        _echo_config(cfg),
        str(write_csv(_out(cfg, "scale.csv"), ["run", "step", "utility", "frobenius_to_final"], rows)),
        str(write_json(_out(cfg, "scale_summary.json"), summary)),
    ]
    code = EXIT_OK if all(r["converged"] for r in per_run) else EXIT_NOT_CONVERGED
    return CommandOutcome(exit_code=code, files=files, summary=summary)


COMMANDS = {
    Command.SIMULATE: cmd_simulate,
    Command.BATCH: cmd_batch,
    Command.EXPLOITABILITY: cmd_exploitability,
    Command.BLOCH: cmd_bloch,
    Command.COMPARE: cmd_compare,
    Command.UTILITY: cmd_utility,
    Command.SCALE: cmd_scale,
}


def execute(cfg: ExperimentConfig) -> CommandOutcome:
    logger.info("experiment.start", command=cfg.command.value, n=cfg.n, m=cfg.m, runs=cfg.runs)
    outcome = COMMANDS[cfg.command](cfg)
    logger.info("experiment.finished", command=cfg.command.value, exit_code=outcome.exit_code)
    return outcome
