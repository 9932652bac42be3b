"""Reading and writing rotation datasets, traces and reports."""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import DatasetParseError, InvalidRotationError, NonUnitQuaternionError
from .models import FlowResult, WeightedDataset
from .so3 import (
    Matrix,
    orthogonality_error,
    project_to_so3,
    quat_to_rotation,
    rotation_to_quat,
    sphere_points,
    validate_rotation,
)

logger = logging.getLogger(__name__)

# Inputs further than this from SO(3) or S^3 are rejected even with repair
REPAIR_LIMIT = 1e-3

MATRIX = "matrix"
QUATERNION = "quat"

_COLUMNS = {9: (MATRIX, False), 10: (MATRIX, True), 4: (QUATERNION, False), 5: (QUATERNION, True)}
_SEPARATOR = re.compile(r"[,\s]+")


@dataclass
class DatasetInfo:
    """What was found in a dataset file."""

    path: Path
    representation: str
    has_weights: bool
    repaired: int = 0


def _format_value(value: float) -> str:
    return f"{value:.17g}"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write a file through a temporary sibling and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path


def _parse_record(line: str, lineno: int) -> list[float]:
    try:
        return [float(token) for token in _SEPARATOR.split(line.strip())]
    except ValueError as e:
        raise DatasetParseError(f"non-numeric field ({e})", line=lineno) from e


def _matrix_record(values: list[float], lineno: int, repair: bool) -> tuple[Matrix, bool]:
    matrix = np.array(values, dtype=np.float64).reshape(3, 3)
    try:
        return validate_rotation(matrix), False
    except InvalidRotationError as e:
        if not np.all(np.isfinite(matrix)):
            raise InvalidRotationError(f"line {lineno}: {e}") from e
        error = max(orthogonality_error(matrix), abs(float(np.linalg.det(matrix)) - 1.0))
        if not repair or error > REPAIR_LIMIT:
            raise InvalidRotationError(f"line {lineno}: {e}") from e
        return project_to_so3(matrix), True


def _quat_record(values: list[float], lineno: int, repair: bool) -> tuple[Matrix, bool]:
    q = np.array(values, dtype=np.float64)
    try:
        return quat_to_rotation(q), False
    except NonUnitQuaternionError as e:
        norm = float(np.linalg.norm(q))
        if not repair or not np.isfinite(norm) or abs(norm - 1.0) > REPAIR_LIMIT:
            raise InvalidRotationError(f"line {lineno}: {e}") from e
        return quat_to_rotation(q / norm), True


def read_dataset(path: str | Path, repair: bool = False) -> tuple[WeightedDataset, DatasetInfo]:
    """Load a dataset file.

    Each non-comment line holds 9 (row-major matrix), 10 (matrix + weight),
    4 (quaternion w, x, y, z) or 5 (quaternion + weight) numbers separated by
    commas or whitespace. Text after ``#`` is ignored.

    Args:
        path: Dataset file
        repair: Project slightly invalid records (error up to REPAIR_LIMIT)
            onto SO(3) or S^3 instead of rejecting them

    Returns:
        Tuple of (dataset, file info); files without a weight column get unit weights

    Raises:
        DatasetParseError: On a malformed record, mixed arity, negative weight
            or an empty file
        InvalidRotationError: On a record that is not a rotation and is not repaired
    """
    path = Path(path)
    rotations: list[Matrix] = []
    weights: list[float] = []
    arity: int | None = None
    repaired = 0

    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            values = _parse_record(line, lineno)

            if arity is None:
                if len(values) not in _COLUMNS:
                    raise DatasetParseError(
                        f"expected 4, 5, 9 or 10 columns, got {len(values)}", line=lineno
                    )
                arity = len(values)
            elif len(values) != arity:
                raise DatasetParseError(
                    f"record has {len(values)} columns, file started with {arity}", line=lineno
                )

            representation, has_weight = _COLUMNS[arity]
            fields = values[:-1] if has_weight else values
            if representation == MATRIX:
                rotation, fixed = _matrix_record(fields, lineno, repair)
            else:
                rotation, fixed = _quat_record(fields, lineno, repair)
            repaired += fixed
            rotations.append(rotation)

            if has_weight:
                weight = values[-1]
                if not np.isfinite(weight) or weight < 0:
                    raise DatasetParseError(f"invalid weight {weight}", line=lineno)
                weights.append(weight)

    if arity is None:
        raise DatasetParseError(f"{path} contains no records")

    representation, has_weights = _COLUMNS[arity]
    if repaired:
        logger.warning(f"Repaired {repaired} near-rotation records in {path}")
    if has_weights:
        if not any(w > 0 for w in weights):
            raise DatasetParseError(f"{path} has no positive weight")
        dataset = WeightedDataset(np.array(rotations), np.array(weights))
    else:
        dataset = WeightedDataset.unweighted(np.array(rotations))

    logger.info(f"Loaded {len(dataset)} rotations from {path}")
    return dataset, DatasetInfo(path, representation, has_weights, repaired)


def write_dataset(
    path: str | Path,
    data: WeightedDataset,
    representation: str = MATRIX,
    include_weights: bool = False,
    header: str | None = None,
) -> Path:
    """Write a dataset file losslessly (17 significant digits).

    Args:
        path: Output file
        data: Rotations and weights
        representation: "matrix" for 9 row-major columns, "quat" for w, x, y, z
        include_weights: Append the weight column
        header: Optional comment written above the records

    Returns:
        Path to the written file
    """
    if representation not in (MATRIX, QUATERNION):
        raise ValueError(f"Unknown representation: {representation}")

    lines = []
    if header:
        lines.extend(f"# {row}" for row in header.splitlines())
    for rotation, weight in zip(data.rotations, data.weights):
        if representation == MATRIX:
            values = list(rotation.reshape(-1))
        else:
            values = list(rotation_to_quat(rotation))
        if include_weights:
            values.append(weight)
        lines.append(",".join(_format_value(v) for v in values))

    written = atomic_write_text(path, "\n".join(lines) + "\n")
    logger.info(f"Dataset saved to {written}")
    return written


def metadata_path(path: str | Path) -> Path:
    """Sidecar file holding the metadata of a data file."""
    path = Path(path)
    return path.with_name(f"{path.name}.meta.json")


def points_path(path: str | Path) -> Path:
    """Sidecar file holding the sphere points of a trace file."""
    path = Path(path)
    return path.with_name(f"{path.stem}.points{path.suffix or '.csv'}")


def write_json(path: str | Path, payload: dict[str, Any]) -> Path:
    """Write a JSON document atomically."""
    written = atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info(f"JSON saved to {written}")
    return written


def write_trace(path: str | Path, result: FlowResult, data: WeightedDataset) -> tuple[Path, Path]:
    """Write the flow trace and the sphere points of the inputs and average.

    The trace file has a header line followed by ``t, potential,
    order_parameter`` records. The sidecar lists ``member_index,
    vector_index, x, y, z`` for the columns of every input rotation; the
    average uses member index -1.

    Returns:
        Tuple of (trace path, sphere point path)
    """
    lines = ["t,potential,order_parameter"]
    for record in result.trace:
        lines.append(
            ",".join(
                _format_value(v) for v in (record.time, record.potential, record.order_parameter)
            )
        )
    trace_file = atomic_write_text(path, "\n".join(lines) + "\n")

    rows = ["member_index,vector_index,x,y,z"]
    members = [(i, r) for i, r in enumerate(data.rotations)] + [(-1, result.average)]
    for index, rotation in members:
        for vector_index, point in enumerate(sphere_points(rotation), 1):
            rows.append(f"{index},{vector_index}," + ",".join(_format_value(v) for v in point))
    points_file = atomic_write_text(points_path(path), "\n".join(rows) + "\n")

    logger.info(f"Trace saved to {trace_file} ({len(result.trace)} records)")
    return trace_file, points_file


def read_trace(path: str | Path) -> np.ndarray:
    """Load a trace file as an array of shape (steps, 3)."""
    trace: np.ndarray = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return trace

