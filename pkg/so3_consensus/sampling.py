"""Seeded synthetic data: von Mises-Fisher rotations and uniform weights."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from .models import Stack, VmfParams, WeightedDataset
from .so3 import quat_to_rotation

logger = logging.getLogger(__name__)

# Bit generator behind every seed; recorded in dataset and report metadata
GENERATOR_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"

ROTATION_STREAM = 0
WEIGHT_STREAM = 1


def make_rng(seed: int, stream: int = ROTATION_STREAM) -> np.random.Generator:
    """Independent, reproducible generator for one (seed, stream) pair."""
    sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(sequence))


def _sample_cosines(
    kappa: float, dim: int, n: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Draw <x, mu> for n vMF samples by Wood's rejection scheme."""
    m = dim - 1
    # Stable form of (-2k + sqrt(4k^2 + m^2)) / m for large kappa
    b = m / (np.sqrt(4.0 * kappa**2 + m**2) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * np.log(1.0 - x0**2)

    cosines = np.empty(n)
    for i in range(n):
        while True:
            z = rng.beta(m / 2.0, m / 2.0)
            w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
            if kappa * w + m * np.log(1.0 - x0 * w) - c >= np.log(rng.uniform()):
                cosines[i] = w
                break
    return cosines


def _frame_for(mu: NDArray[np.float64]) -> NDArray[np.float64]:
    """Orthogonal matrix whose first column is mu."""
    q, r = np.linalg.qr(mu.reshape(-1, 1), mode="complete")
    if r[0, 0] < 0:
        q = -q
    return q


def sample_vmf_s3(params: VmfParams) -> NDArray[np.float64]:
    """Draw unit quaternions from vMF(mu, kappa) on S^3.

    Samples are returned as drawn, without folding onto the w >= 0 sheet, so
    both q and -q occur.

    Args:
        params: Mean direction, concentration, count and seed

    Returns:
        Array of shape (n, 4), rows ordered (w, x, y, z)
    """
    mu = np.asarray(params.mu, dtype=np.float64)
    rng = make_rng(params.seed)
    dim = len(mu)

    cosines = _sample_cosines(params.kappa, dim, params.n, rng)
    tangent = rng.standard_normal((params.n, dim - 1))
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)

    canonical = np.column_stack([cosines, np.sqrt(1.0 - cosines**2)[:, None] * tangent])
    samples = canonical @ _frame_for(mu).T
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    logger.debug(f"Drew {params.n} vMF samples (kappa={params.kappa}, seed={params.seed})")
    return samples


def sample_rotations(params: VmfParams) -> Stack:
    """Push vMF quaternion samples through the double cover map."""
    return np.array([quat_to_rotation(q) for q in sample_vmf_s3(params)])


def sample_weights(n: int, seed: int) -> NDArray[np.float64]:
    """Draw n i.i.d. weights uniform on [0, 1]."""
    if n < 1:
        raise ValueError("Need at least one weight")
    return make_rng(seed, WEIGHT_STREAM).uniform(0.0, 1.0, size=n)


def sample_dataset(params: VmfParams, weighted: bool = False) -> WeightedDataset:
    """Build a ready dataset from vMF rotations, optionally with random weights.

    Weights come from a stream independent of the rotation draws. A draw of
    all-zero weights is not possible in practice.
    """
    rotations = sample_rotations(params)
    if not weighted:
        return WeightedDataset.unweighted(rotations)
    return WeightedDataset(rotations, sample_weights(params.n, params.seed))
