"""
Result file writers: UTF-8 CSV with LF endings and JSON via orjson
"""

import csv
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import orjson
from pydantic import BaseModel

from .models import TrajectoryRecord

TRAJECTORY_COLUMNS = [
    "step", "time", "utility", "exploitability", "fixed_point_residual",
    "min_eig_rho", "min_eig_sigma",
    "bloch_rho_x", "bloch_rho_y", "bloch_rho_z",
    "bloch_sigma_x", "bloch_sigma_y", "bloch_sigma_z",
    "frobenius_to_final",
]


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    path.write_bytes(orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS) + b"\n")
    return path


def trajectory_row(rec: TrajectoryRecord) -> List[Any]:
    bloch_rho = rec.bloch_rho or (None, None, None)
    bloch_sigma = rec.bloch_sigma or (None, None, None)
    return [
        rec.step, rec.time, rec.utility, rec.exploitability, rec.fixed_point_residual,
        rec.min_eig_rho, rec.min_eig_sigma,
        *bloch_rho, *bloch_sigma,
        rec.frobenius_to_final,
    ]


def write_trajectory_csv(path: Path, trajectory: Iterable[TrajectoryRecord]) -> Path:
    return write_csv(path, TRAJECTORY_COLUMNS, (trajectory_row(r) for r in trajectory))
