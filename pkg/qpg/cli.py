"""
Command-line entry point: ``qpg <command> --config <path.json> [overrides]``

Exit codes: 0 success, 1 I/O or configuration error, 2 non-convergence,
3 oracle inconsistency.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import orjson
from pydantic import ValidationError

from .config import settings
from .errors import QPGError
from .experiments import EXIT_ERROR, execute
from .log import configure_logging, get_logger
from .models import BlochPlayer, Command, DynamicsKind, ExperimentConfig, InitKind

logger = get_logger(__name__)

# CLI flag -> (section, field); section None means top level
OVERRIDES = {
    "n": (None, "n"),
    "m": (None, "m"),
    "runs": (None, "runs"),
    "seed": (None, "seed"),
    "init": (None, "init"),
    "oracle_restarts": (None, "oracle_restarts"),
    "out": (None, "output_dir"),
    "ensemble": (None, "ensemble"),
    "fixed_game": (None, "fixed_game"),
    "player": (None, "bloch_player"),
    "game": (None, "game_path"),
    "dynamics": ("dynamics", "kind"),
    "q": ("dynamics", "q"),
    "step_size": ("dynamics", "step_size"),
    "eta": ("dynamics", "eta"),
    "max_iters": ("dynamics", "max_iters"),
    "conv_tol": ("dynamics", "conv_tol"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpg",
        description="Learning dynamics for quantum common-interest games",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", type=Path, help="ExperimentConfig JSON file")
    parser.add_argument("--n", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--runs", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--dynamics", choices=[k.value for k in DynamicsKind])
    parser.add_argument("--q", type=float)
    parser.add_argument("--step-size", type=float)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--max-iters", type=int)
    parser.add_argument("--conv-tol", type=float)
    parser.add_argument("--init", choices=[i.value for i in InitKind])
    parser.add_argument("--oracle-restarts", type=int)
    parser.add_argument("--ensemble")
    parser.add_argument("--fixed-game", action="store_true", default=None)
    parser.add_argument("--player", choices=[p.value for p in BlochPlayer])
    parser.add_argument("--game", help="game operator JSON to use instead of random games")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--log-level", default=None)
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (or settings defaults) with command-line overrides applied."""
    if args.config:
        raw = orjson.loads(args.config.read_bytes())
    else:
        raw = {"output_dir": settings.output_dir, "oracle_restarts": settings.oracle_restarts}
    raw["command"] = args.command
    raw.setdefault("dynamics", {})
    for flag, (section, field) in OVERRIDES.items():
        value = getattr(args, flag)
        if value is None:
            continue
        target = raw["dynamics"] if section else raw
        target[field] = value
    return ExperimentConfig.model_validate(raw)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(level=args.log_level)
    try:
        cfg = build_config(args)
        outcome = execute(cfg)
    except (ValidationError, QPGError, OSError, orjson.JSONDecodeError) as exc:
        logger.error("cli.failed", command=args.command, error=str(exc))
        print(f"qpg: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for path in outcome.files:
        print(path)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
