"""Command-line front end: average, compare, sample and trace."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from . import __version__
from .averager import KL, KLW, METHODS, RotationAverager
from .exceptions import (
    DatasetParseError,
    InvalidRotationError,
    InvalidWeightsError,
    RotationAverageError,
)
from .models import FlowConfig, FlowStatus, KarcherConfig, VmfParams, WeightedDataset
from .report import Report, build_report, render_report
from .sampling import GENERATOR_NAME, sample_dataset
from .storage import (
    MATRIX,
    QUATERNION,
    DatasetInfo,
    metadata_path,
    read_dataset,
    write_dataset,
    write_json,
    write_trace,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_NON_CONSENSUS = 3
EXIT_MAX_TIME = 4

_STATUS_EXIT = {
    FlowStatus.CONVERGED.value: EXIT_OK,
    FlowStatus.NON_CONSENSUS.value: EXIT_NON_CONSENSUS,
    FlowStatus.MAX_TIME_EXCEEDED.value: EXIT_MAX_TIME,
}


def _add_flow_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", type=Path, help="Dataset file (9/10 or 4/5 columns)")
    parser.add_argument("--epsilon", type=float, default=1e-5, help="Stop when 1 - det R_hat < eps")
    parser.add_argument("--delta", type=float, default=0.01, help="RK4 step in flow time")
    parser.add_argument("--t-max", type=float, default=1000.0, help="Flow time cap")
    parser.add_argument(
        "--karcher-tolerance", type=float, default=1e-10, help="Geodesic mean tolerance (rad)"
    )
    parser.add_argument("--repair", action="store_true", help="Project near-rotations onto SO(3)")
    parser.add_argument("--seed", type=int, help="Seed recorded in the report metadata")
    parser.add_argument(
        "--format", choices=[MATRIX, QUATERNION], default=MATRIX, help="Display of averages"
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser for all commands."""
    parser = argparse.ArgumentParser(
        prog="so3-consensus",
        description="Rotation averaging by Kuramoto consensus flow on SO(3)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    average = commands.add_parser("average", help="Average a dataset with one method")
    _add_flow_options(average)
    average.add_argument("--method", choices=METHODS, default=KL)
    average.add_argument("--out", type=Path, help="Write the JSON report here")

    compare = commands.add_parser("compare", help="Run every applicable method and compare")
    _add_flow_options(compare)
    compare.add_argument("--out", type=Path, help="Write the JSON report here")

    trace = commands.add_parser("trace", help="Record the flow trace and sphere points")
    _add_flow_options(trace)
    trace.add_argument("--method", choices=[KL, KLW], default=KL)
    trace.add_argument("--out", type=Path, required=True, help="Trace file to write")
    trace.add_argument("--report", type=Path, help="Write the JSON report here")

    sample = commands.add_parser("sample", help="Draw a von Mises-Fisher dataset")
    sample.add_argument(
        "--mu",
        type=float,
        nargs=4,
        default=[0.5, 0.5, 0.5, 0.5],
        metavar=("W", "X", "Y", "Z"),
        help="Mean direction on S^3",
    )
    sample.add_argument("--kappa", type=float, default=0.5, help="Concentration")
    sample.add_argument("--n", type=int, default=500, help="Number of rotations")
    sample.add_argument("--seed", type=int, default=0, help="Generator seed")
    sample.add_argument("--weights", action="store_true", help="Append uniform [0, 1] weights")
    sample.add_argument("--format", choices=[MATRIX, QUATERNION], default=MATRIX)
    sample.add_argument("--out", type=Path, required=True, help="Dataset file to write")
    return parser


def _configs(args: argparse.Namespace) -> tuple[FlowConfig, KarcherConfig]:
    flow = FlowConfig(epsilon=args.epsilon, delta=args.delta, t_max=args.t_max)
    karcher = KarcherConfig(tolerance=args.karcher_tolerance)
    return flow, karcher


def _load(args: argparse.Namespace) -> tuple[WeightedDataset, DatasetInfo]:
    return read_dataset(args.input, repair=args.repair)


def _metadata(
    flow: FlowConfig, karcher: KarcherConfig, info: DatasetInfo, seed: int | None = None
) -> dict[str, Any]:
    metadata: dict[str, Any] = {
        "version": __version__,
        "generator": GENERATOR_NAME,
        "epsilon": flow.epsilon,
        "delta": flow.delta,
        "t_max": flow.t_max,
        "karcher_tolerance": karcher.tolerance,
        "karcher_max_iterations": karcher.max_iterations,
        "representation": info.representation,
        "repaired_records": info.repaired,
    }
    if seed is not None:
        metadata["seed"] = seed

    sidecar = metadata_path(info.path)
    if not sidecar.exists():
        return metadata
    try:
        sample_meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        logger.warning(f"Skipping unreadable sample metadata {sidecar}: {e}")
        return metadata
    if not isinstance(sample_meta, dict):
        logger.warning(f"Skipping sample metadata {sidecar}: not a JSON object")
        return metadata
    for key in ("seed", "generator", "kappa", "mu"):
        if key in sample_meta:
            metadata[f"dataset_{key}"] = sample_meta[key]
    return metadata


def _emit(report: Report, args: argparse.Namespace, out: Path | None) -> None:
    print(render_report(report, args.format))
    if out is not None:
        write_json(out, report.model_dump(mode="json"))


def cmd_average(args: argparse.Namespace) -> int:
    """Average a dataset file with the chosen method."""
    flow, karcher = _configs(args)
    data, info = _load(args)
    if args.method == KLW and not info.has_weights:
        logger.error("klw needs a weight column in the dataset file")
        return EXIT_INVALID_INPUT

    averager = RotationAverager(flow, karcher)
    try:
        result = averager.average(data, args.method)
    except RotationAverageError as e:
        logger.error(f"{args.method} failed: {e}")
        return EXIT_FAILURE

    report = build_report(
        "average", str(args.input), data, [result], _metadata(flow, karcher, info, args.seed)
    )
    _emit(report, args, args.out)
    if result.status != FlowStatus.CONVERGED.value and result.method in (KL, KLW):
        logger.error(
            f"{result.method} stopped without consensus: {result.status} "
            f"at T={result.termination_time:.2f}"
        )
    return _STATUS_EXIT.get(result.status, EXIT_OK)


def cmd_compare(args: argparse.Namespace) -> int:
    """Run every applicable method on a dataset file and compare the averages."""
    flow, karcher = _configs(args)
    data, info = _load(args)

    averager = RotationAverager(flow, karcher)
    results = averager.compare(data)
    metadata = _metadata(flow, karcher, info, args.seed)
    if averager.errors:
        metadata["errors"] = averager.errors

    report = build_report("compare", str(args.input), data, results, metadata)
    _emit(report, args, args.out)

    for result in results:
        code = _STATUS_EXIT.get(result.status, EXIT_OK)
        if code != EXIT_OK:
            return code
    return EXIT_FAILURE if averager.errors else EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    """Run a flow method and write its trace and sphere points."""
    flow, karcher = _configs(args)
    data, info = _load(args)
    if args.method == KLW and not info.has_weights:
        logger.error("klw needs a weight column in the dataset file")
        return EXIT_INVALID_INPUT

    averager = RotationAverager(flow, karcher)
    result = averager.average(data, args.method)
    trace_file, points_file = write_trace(args.out, averager.flows[args.method], data)
    print(f"Trace written to {trace_file}, sphere points to {points_file}")

    report = build_report(
        "trace", str(args.input), data, [result], _metadata(flow, karcher, info, args.seed)
    )
    _emit(report, args, args.report)
    return _STATUS_EXIT[result.status]


def cmd_sample(args: argparse.Namespace) -> int:
    """Draw a vMF dataset and write it with a metadata sidecar."""
    params = VmfParams(mu=tuple(args.mu), kappa=args.kappa, n=args.n, seed=args.seed)
    data = sample_dataset(params, weighted=args.weights)

    header = (
        f"von Mises-Fisher sample on S^3: mu={list(params.mu)} kappa={params.kappa} "
        f"n={params.n} seed={params.seed}\n"
        f"generator: {GENERATOR_NAME}\n"
        f"columns: {'r11..r33' if args.format == MATRIX else 'w,x,y,z'}"
        f"{',weight' if args.weights else ''}"
    )
    out = write_dataset(args.out, data, args.format, include_weights=args.weights, header=header)
    write_json(
        metadata_path(out),
        {
            "mu": list(params.mu),
            "kappa": params.kappa,
            "n": params.n,
            "seed": params.seed,
            "weights": args.weights,
            "format": args.format,
            "generator": GENERATOR_NAME,
            "version": __version__,
        },
    )
    print(f"Wrote {params.n} rotations to {out}")
    return EXIT_OK


_COMMANDS = {
    "average": cmd_average,
    "compare": cmd_compare,
    "trace": cmd_trace,
    "sample": cmd_sample,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the so3-consensus command."""
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return _COMMANDS[args.command](args)
    except (DatasetParseError, InvalidRotationError, InvalidWeightsError, ValidationError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID_INPUT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INVALID_INPUT if args.command != "sample" else EXIT_FAILURE
    except RotationAverageError as e:
        logger.error(str(e))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
