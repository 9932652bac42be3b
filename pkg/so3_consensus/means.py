"""Baseline rotation averages: projected arithmetic and geodesic (Karcher) means."""

from __future__ import annotations

import logging

import numpy as np

from .exceptions import NoConvergenceError
from .models import KarcherConfig, WeightedDataset
from .so3 import Matrix, exp_so3, log_so3_many, project_to_so3

logger = logging.getLogger(__name__)


def euclidean_mean(data: WeightedDataset) -> Matrix:
    """Weight-normalized entrywise mean sum(k_i R_i) / sum(k_i).

    The result is a convex combination of rotations and generally not in SO(3).
    """
    total: Matrix = np.tensordot(data.weights, data.rotations, axes=1)
    return total / data.total_weight


def projected_mean(data: WeightedDataset) -> Matrix:
    """Chordal L2 mean: the Euclidean mean projected back onto SO(3).

    Minimizes sum(k_i * ||R_i - R||_F^2) over SO(3).

    Raises:
        DegenerateProjectionError: If the Euclidean mean has no unique
            nearest rotation (e.g. an equal-weight antipodal pair)
    """
    return project_to_so3(euclidean_mean(data))


def tangent_mean(data: WeightedDataset, rotation: Matrix) -> np.ndarray:
    """Weighted mean of log(R^T R_i), the Riemannian gradient direction at R."""
    omegas = log_so3_many(rotation.T @ data.rotations)
    step: np.ndarray = data.weights @ omegas / data.total_weight
    return step


def karcher_mean(
    data: WeightedDataset, config: KarcherConfig | None = None
) -> tuple[Matrix, int]:
    """Geodesic mean by the Karcher fixed-point iteration.

    Starts from :func:`projected_mean` and repeats
    R <- R exp(sum(k_i log(R^T R_i)) / sum(k_i)) until the tangent mean is
    shorter than the configured tolerance.

    Args:
        data: Weighted rotations
        config: Tolerance and iteration cap (defaults if None)

    Returns:
        Tuple of (mean rotation, iterations used)

    Raises:
        NoConvergenceError: If the tangent mean is still above tolerance
            after max_iterations updates
        DegenerateProjectionError: If the initializer is degenerate
    """
    config = config or KarcherConfig()
    rotation = projected_mean(data)

    residual = float("inf")
    for iteration in range(config.max_iterations + 1):
        step = tangent_mean(data, rotation)
        residual = float(np.linalg.norm(step))
        if residual < config.tolerance:
            logger.debug(f"Karcher mean converged after {iteration} iterations")
            return rotation, iteration
        if iteration == config.max_iterations:
            break
        rotation = rotation @ exp_so3(step)

    raise NoConvergenceError(
        f"Karcher mean did not converge in {config.max_iterations} iterations "
        f"(tangent mean norm {residual:.3e})",
        iterations=config.max_iterations,
        residual=residual,
    )


def geodesic_mean(data: WeightedDataset, config: KarcherConfig | None = None) -> Matrix:
    """Geodesic L2 mean: minimizer of sum(k_i * d_R(R_i, R)^2).

    See :func:`karcher_mean` for the iteration and its errors.
    """
    rotation, _ = karcher_mean(data, config)
    return rotation


def chordal_cost(data: WeightedDataset, rotation: Matrix) -> float:
    """Return sum(k_i * ||R_i - R||_F^2)."""
    sq = np.sum((data.rotations - rotation) ** 2, axis=(1, 2))
    return float(data.weights @ sq)


def geodesic_cost(data: WeightedDataset, rotation: Matrix) -> float:
    """Return sum(k_i * angle(R^T R_i)^2)."""
    angles = np.linalg.norm(log_so3_many(rotation.T @ data.rotations), axis=1)
    return float(data.weights @ angles**2)
