"""Shared test fixtures for so3-consensus tests."""

from pathlib import Path

import numpy as np
import pytest

from so3_consensus.models import WeightedDataset
from so3_consensus.so3 import exp_so3, random_rotation
from so3_consensus.storage import write_dataset

# Averages of the drill dataset as printed to six digits
PROJECTED_DRILL = [
    [0.948745, 0.307382, 0.0734808],
    [0.229426, -0.509944, -0.829048],
    [-0.217364, 0.803414, -0.554328],
]
GEOMETRIC_DRILL = [
    [0.947201, 0.311427, 0.0763086],
    [0.227146, -0.48376, -0.845211],
    [-0.226306, 0.817918, -0.528957],
]
KL_DRILL = [
    [0.947206, 0.311415, 0.0762942],
    [0.227135, -0.483792, -0.845196],
    [-0.226296, 0.817904, -0.528984],
]


def rot_z(angle: float) -> np.ndarray:
    """Rotation by angle about the z axis."""
    return exp_so3([0.0, 0.0, angle])


def cluster(rng: np.random.Generator, n: int, spread: float) -> np.ndarray:
    """n rotations scattered around a random center by rotation vectors of scale spread."""
    center = random_rotation(rng)
    return np.array([center @ exp_so3(spread * rng.standard_normal(3)) for _ in range(n)])


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded generator."""
    return np.random.default_rng(20240115)


@pytest.fixture
def random_rotations(rng: np.random.Generator) -> np.ndarray:
    """Return 12 rotations drawn uniformly from SO(3)."""
    return np.array([random_rotation(rng) for _ in range(12)])


@pytest.fixture
def clustered_dataset(rng: np.random.Generator) -> WeightedDataset:
    """Return 20 unweighted rotations within a few tenths of a radian of a center."""
    return WeightedDataset.unweighted(cluster(rng, 20, 0.2))


@pytest.fixture
def weighted_cluster(rng: np.random.Generator) -> WeightedDataset:
    """Return 15 clustered rotations with uniform [0, 1] weights."""
    rotations = cluster(rng, 15, 0.3)
    return WeightedDataset(rotations, rng.uniform(0.0, 1.0, size=15))


@pytest.fixture
def symmetric_pair() -> WeightedDataset:
    """Return two rotations at +/- 0.4 rad about z."""
    return WeightedDataset.unweighted([rot_z(0.4), rot_z(-0.4)])


@pytest.fixture
def antipodal_pair() -> WeightedDataset:
    """Return the identity and an exact half turn about z."""
    return WeightedDataset.unweighted([np.eye(3), np.diag([-1.0, -1.0, 1.0])])


@pytest.fixture
def drill_averages_file(tmp_path: Path) -> Path:
    """Return a dataset file holding the three six-digit drill averages."""
    path = tmp_path / "drill_averages.csv"
    lines = ["# projected, geometric and KL averages of the drill data"]
    for matrix in (PROJECTED_DRILL, GEOMETRIC_DRILL, KL_DRILL):
        lines.append(",".join(str(v) for row in matrix for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def dataset_file(tmp_path: Path, clustered_dataset: WeightedDataset) -> Path:
    """Return a matrix-format dataset file of the clustered rotations."""
    return write_dataset(tmp_path / "cluster.csv", clustered_dataset)
