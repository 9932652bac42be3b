"""Data models for so3-consensus."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import InvalidRotationError, InvalidWeightsError, SizeMismatchError
from .so3 import ROTATION_TOLERANCE, Matrix, quat_to_rotation, validate_quat

Stack = NDArray[np.float64]
Quaternion4 = tuple[float, float, float, float]


def _as_stack(rotations: ArrayLike) -> Stack:
    stack = np.array(rotations, dtype=np.float64)
    if stack.ndim != 3 or stack.shape[1:] != (3, 3):
        raise InvalidRotationError(f"Expected an (N, 3, 3) stack, got shape {stack.shape}")
    return stack


def check_stack(rotations: Stack, tol: float = ROTATION_TOLERANCE) -> None:
    """Raise InvalidRotationError naming the first member off SO(3)."""
    if not np.all(np.isfinite(rotations)):
        raise InvalidRotationError("Rotation stack has non-finite entries")
    gram = np.transpose(rotations, (0, 2, 1)) @ rotations - np.eye(3)
    ortho = np.linalg.norm(gram, axis=(1, 2))
    dets = np.linalg.det(rotations)
    bad = np.flatnonzero((ortho > tol) | (np.abs(dets - 1.0) > tol))
    if bad.size:
        i = int(bad[0])
        raise InvalidRotationError(
            f"Member {i} is not a rotation "
            f"(||R^T R - I||_F = {ortho[i]:.3e}, det = {dets[i]:.12f})"
        )


@dataclass
class WeightedDataset:
    """Rotations R_i with nonnegative weights kappa_i.

    Attributes:
        rotations: Array of shape (N, 3, 3)
        weights: Array of shape (N,); unweighted data carries all ones
    """

    rotations: Stack
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        self.rotations = _as_stack(self.rotations)
        self.weights = np.array(self.weights, dtype=np.float64).reshape(-1)

        if len(self.rotations) == 0:
            raise InvalidRotationError("Dataset must contain at least one rotation")
        if len(self.weights) != len(self.rotations):
            raise SizeMismatchError(
                f"{len(self.rotations)} rotations but {len(self.weights)} weights"
            )
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise InvalidWeightsError("Weights must be finite and nonnegative")
        if not np.any(self.weights > 0):
            raise InvalidWeightsError("At least one weight must be positive")
        check_stack(self.rotations)

    @classmethod
    def unweighted(cls, rotations: ArrayLike) -> WeightedDataset:
        """Build a dataset with every weight equal to 1."""
        stack = _as_stack(rotations)
        return cls(stack, np.ones(len(stack)))

    @classmethod
    def from_quaternions(
        cls, quaternions: Sequence[ArrayLike], weights: ArrayLike | None = None
    ) -> WeightedDataset:
        """Build a dataset through the double cover map."""
        stack = np.array([quat_to_rotation(q) for q in quaternions])
        if weights is None:
            return cls.unweighted(stack)
        return cls(stack, np.asarray(weights, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.rotations)

    @property
    def total_weight(self) -> float:
        """Sum of the weights."""
        return float(np.sum(self.weights))

    @property
    def is_unweighted(self) -> bool:
        """True when every weight equals 1."""
        return bool(np.all(self.weights == 1.0))

    def with_unit_weights(self) -> WeightedDataset:
        """Same rotations with every weight reset to 1."""
        return WeightedDataset(self.rotations.copy(), np.ones(len(self)))

    def scaled(self, factor: float) -> WeightedDataset:
        """Same rotations with every weight multiplied by a positive factor."""
        if factor <= 0:
            raise InvalidWeightsError("Weight scale factor must be positive")
        return WeightedDataset(self.rotations.copy(), self.weights * factor)


@dataclass
class FlowState:
    """The evolving population R_1(t), ..., R_N(t) at flow time t."""

    rotations: Stack
    time: float = 0.0

    def __len__(self) -> int:
        return len(self.rotations)


class FlowStatus(str, Enum):
    """How a consensus flow run ended."""

    CONVERGED = "converged"
    NON_CONSENSUS = "non_consensus"
    MAX_TIME_EXCEEDED = "max_time_exceeded"


@dataclass(frozen=True)
class TraceRecord:
    """One sample of the flow diagnostics."""

    time: float
    potential: float
    order_parameter: float


@dataclass
class FlowResult:
    """Outcome of a consensus flow run.

    Attributes:
        average: Projected mean of the final population
        termination_time: Flow time T at which the run stopped
        status: Converged, NonConsensus or MaxTimeExceeded
        trace: (t, P(t), det R_hat(t)) at every step, when recorded
        steps: Number of integrator steps taken
        final_state: Population at time T
    """

    average: Matrix
    termination_time: float
    status: FlowStatus
    trace: list[TraceRecord] = field(default_factory=list)
    steps: int = 0
    final_state: FlowState | None = None

    @property
    def converged(self) -> bool:
        """True when the order parameter test passed."""
        return self.status is FlowStatus.CONVERGED


@dataclass
class MethodResult:
    """Average produced by one method, as collected for a report."""

    method: str
    average: Matrix
    status: str = "success"
    termination_time: float | None = None
    iterations: int | None = None


class FlowConfig(BaseModel):
    """Configuration for the consensus flow.

    Attributes:
        epsilon: Stopping tolerance on 1 - det R_hat
        delta: Fixed RK4 step in flow time
        t_max: Flow time cap
        record_trace: Keep (t, P, det R_hat) for every step
        stall_window: Flow time between potential comparisons
        stall_tolerance: Potential change below which the flow counts as stalled
    """

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(default=1e-5, gt=0)
    delta: float = Field(default=0.01, gt=0)
    t_max: float = Field(default=1000.0, gt=0)
    record_trace: bool = True
    stall_window: float = Field(default=1.0, gt=0)
    stall_tolerance: float = Field(default=1e-12, ge=0)

    @model_validator(mode="after")
    def _check_horizon(self) -> FlowConfig:
        if self.t_max < self.delta:
            raise ValueError("t_max must be at least delta")
        return self


class KarcherConfig(BaseModel):
    """Configuration for the geodesic (Karcher) mean iteration."""

    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(default=1e-10, gt=0)
    max_iterations: int = Field(default=100, ge=1)


class VmfParams(BaseModel):
    """Parameters of a von Mises-Fisher sample on S^3.

    Defaults reproduce the reference protocol: mean direction
    (1/2, 1/2, 1/2, 1/2), concentration 0.5, 500 samples.
    """

    model_config = ConfigDict(frozen=True)

    mu: Quaternion4 = (0.5, 0.5, 0.5, 0.5)
    kappa: float = Field(default=0.5, ge=0)
    n: int = Field(default=500, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("mu")
    @classmethod
    def _check_unit(cls, mu: Quaternion4) -> Quaternion4:
        validate_quat(mu)
        return mu
